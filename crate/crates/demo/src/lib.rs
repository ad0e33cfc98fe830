//! Browser bindings: render a view of an RGBA buffer, the FLOP table, and the
//! conformality check. Each export is a thin wrapper over a plain Rust
//! function so the logic is testable natively.

use lcmwarp::bench::{flop_reduction, flop_report, TransformKind};
use lcmwarp::lcm::{conformality_report, nonlinearity_witness, WITNESS_PAIR};
use lcmwarp::{
    synthesize_view, ComplexValue, Direction, ImageBuffer, LogParams, PadPolicy, Padding, Transform,
    ViewOptions, WarpMode,
};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Opaque black, so filled regions read as borders rather than holes.
const FILL: [f32; 4] = [0.0, 0.0, 0.0, 1.0];

fn parse_mode(mode: &str) -> Result<WarpMode, String> {
    match mode {
        "bilinear" => Ok(WarpMode::InverseBilinear),
        "scatter" => Ok(WarpMode::ForwardScatter),
        other => Err(format!("unknown mode '{other}' (expected bilinear or scatter)")),
    }
}

/// Warps an RGBA8 buffer. `transform` is the JSON form of a transform, e.g.
/// `{"kind":"lcm","k":[1,0],"c":[2,0]}`. The result is RGBA8 of size
/// `(width + 2·pad) × (height + 2·pad)`.
pub fn render(
    rgba: &[u8],
    width: usize,
    height: usize,
    transform: &str,
    view: &str,
    mode: &str,
    pad: usize,
) -> Result<Vec<u8>, String> {
    let transform: Transform = serde_json::from_str(transform).map_err(|e| format!("transform: {e}"))?;
    transform.validate().map_err(|e| e.to_string())?;
    let direction: Direction = view.parse().map_err(|e: lcmwarp::WarpError| e.to_string())?;
    let img = ImageBuffer::from_u8(width, height, 4, rgba).map_err(|e| e.to_string())?;
    let options = ViewOptions {
        mode: parse_mode(mode)?,
        padding: Padding { margin: pad, policy: PadPolicy::Zero },
        fill: Some(FILL.to_vec()),
    };
    let out = synthesize_view(&img, &direction.spec(), &transform, &options).map_err(|e| e.to_string())?;
    let mut bytes = out.to_u8();
    // Zero padding also zeroes alpha; make the border opaque.
    let (ow, oh) = (out.width(), out.height());
    for y in 0..oh {
        for x in 0..ow {
            if x < pad || y < pad || x >= pad + width || y >= pad + height {
                bytes[(y * ow + x) * 4 + 3] = 255;
            }
        }
    }
    Ok(bytes)
}

/// Both FLOP reports and the reduction at `size × size`, as JSON.
pub fn flops_json(size: usize) -> Result<String, String> {
    let lcm = flop_report(TransformKind::Lcm, size, size).map_err(|e| e.to_string())?;
    let mpd = flop_report(TransformKind::Mpd, size, size).map_err(|e| e.to_string())?;
    let reduction = flop_reduction(size, size).map_err(|e| e.to_string())?;
    Ok(json!({ "lcm": lcm, "mpd": mpd, "reduction": reduction }).to_string())
}

/// Conformality report and superposition gap for the given parameters, as JSON.
pub fn conformality_json(
    k_re: f64,
    k_im: f64,
    c_re: f64,
    c_im: f64,
    points: usize,
    seed: u64,
) -> Result<String, String> {
    let p = LogParams::new(ComplexValue::new(k_re, k_im), ComplexValue::new(c_re, c_im))
        .map_err(|e| e.to_string())?;
    let report = conformality_report(&p, points, seed).map_err(|e| e.to_string())?;
    let witness = nonlinearity_witness(&p, WITNESS_PAIR.0, WITNESS_PAIR.1).map_err(|e| e.to_string())?;
    let pass = report.max_angle_error < 1e-3 && witness > 0.01;
    Ok(json!({ "report": report, "witness": witness, "pass": pass }).to_string())
}

/// A checkerboard over a color gradient; straight lines make the warp visible.
pub fn checkerboard(width: usize, height: usize, cell: usize) -> Vec<u8> {
    let cell = cell.max(1);
    let mut out = Vec::with_capacity(width * height * 4);
    for y in 0..height {
        for x in 0..width {
            let dark = ((x / cell) + (y / cell)).is_multiple_of(2);
            let (u, v) = (x as f32 / width.max(1) as f32, y as f32 / height.max(1) as f32);
            let s = if dark { 0.35 } else { 1.0 };
            out.extend_from_slice(&[
                (255.0 * s * u) as u8,
                (255.0 * s * v) as u8,
                (255.0 * s * (1.0 - u)) as u8,
                255,
            ]);
        }
    }
    out
}

#[wasm_bindgen(js_name = renderView)]
#[allow(clippy::too_many_arguments)]
pub fn render_view(
    rgba: &[u8],
    width: usize,
    height: usize,
    transform: &str,
    view: &str,
    mode: &str,
    pad: usize,
) -> Result<Vec<u8>, JsError> {
    render(rgba, width, height, transform, view, mode, pad).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = flopTable)]
pub fn flop_table(size: usize) -> Result<String, JsError> {
    flops_json(size).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = verifyConformality)]
pub fn verify_conformality(
    k_re: f64,
    k_im: f64,
    c_re: f64,
    c_im: f64,
    points: usize,
    seed: u64,
) -> Result<String, JsError> {
    conformality_json(k_re, k_im, c_re, c_im, points, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = sampleImage)]
pub fn sample_image(width: usize, height: usize) -> Vec<u8> {
    checkerboard(width, height, 16)
}
