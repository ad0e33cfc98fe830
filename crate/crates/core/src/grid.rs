//! Sampling grids and the two warp kernels.
//!
//! Pixel centers are normalized to `[-1, 1]²`, pushed through a transform, and
//! the transformed set is min–max rescaled back onto the span of normalized
//! pixel centers so the warped content fills the frame. The resulting field
//! drives either an inverse bilinear warp (output pixel reads the source at its
//! grid entry) or a forward scatter (source pixel is written to the rounded
//! location of its own entry).

use serde::{Deserialize, Serialize};

use crate::complex::ComplexValue;
use crate::error::{Result, WarpError};
use crate::image::ImageBuffer;
use crate::transform::Transform;

/// Smallest span the transformed coordinates may have along an axis.
pub const MIN_RANGE: f64 = 1e-9;

/// Distance, in pixels, under which a sample position snaps to a pixel center.
const SNAP: f64 = 1e-9;

/// Maps the center of pixel `(x, y)` into `[-1, 1]²`.
#[inline]
pub fn normalize_coords(x: f64, y: f64, width: usize, height: usize) -> ComplexValue {
    ComplexValue::new(2.0 * (x + 0.5) / width as f64 - 1.0, 2.0 * (y + 0.5) / height as f64 - 1.0)
}

/// Inverse of [`normalize_coords`].
#[inline]
pub fn denormalize_coords(sx: f64, sy: f64, width: usize, height: usize) -> (f64, f64) {
    ((sx + 1.0) * 0.5 * width as f64 - 0.5, (sy + 1.0) * 0.5 * height as f64 - 0.5)
}

/// Per-axis affine map from transformed coordinates onto the normalized
/// pixel-center span `[c(0), c(n-1)]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rescale {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
    lo: [f64; 2],
    scale: [f64; 2],
}

impl Rescale {
    fn fit(points: &[[f64; 2]], valid: &[bool], width: usize, height: usize) -> Result<Rescale> {
        let (mut u_min, mut u_max) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut v_min, mut v_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for (p, _) in points.iter().zip(valid).filter(|(_, ok)| **ok) {
            u_min = u_min.min(p[0]);
            u_max = u_max.max(p[0]);
            v_min = v_min.min(p[1]);
            v_max = v_max.max(p[1]);
        }
        if !u_min.is_finite() {
            return Err(WarpError::DegenerateRange { axis: "x", span: 0.0, min: MIN_RANGE });
        }
        let lo = normalize_coords(0.0, 0.0, width, height);
        let hi = normalize_coords((width - 1) as f64, (height - 1) as f64, width, height);
        // A one-pixel axis has a single target, so any spread collapses onto it.
        let axis = |name, min: f64, max: f64, lo: f64, hi: f64, n: usize| {
            let span = max - min;
            if n == 1 {
                Ok(0.0)
            } else if span.is_nan() || span < MIN_RANGE || !span.is_finite() {
                Err(WarpError::DegenerateRange { axis: name, span, min: MIN_RANGE })
            } else {
                Ok((hi - lo) / span)
            }
        };
        let sx = axis("x", u_min, u_max, lo.re, hi.re, width)?;
        let sy = axis("y", v_min, v_max, lo.im, hi.im, height)?;
        Ok(Rescale { u_min, u_max, v_min, v_max, lo: [lo.re, lo.im], scale: [sx, sy] })
    }

    #[inline]
    pub fn apply(&self, u: f64, v: f64) -> [f64; 2] {
        [self.lo[0] + (u - self.u_min) * self.scale[0], self.lo[1] + (v - self.v_min) * self.scale[1]]
    }

    /// Maps a normalized coordinate back into transformed space.
    #[inline]
    pub fn invert(&self, sx: f64, sy: f64) -> [f64; 2] {
        let back = |s: f64, lo: f64, scale: f64, min: f64| {
            if scale == 0.0 {
                min
            } else {
                min + (s - lo) / scale
            }
        };
        [back(sx, self.lo[0], self.scale[0], self.u_min), back(sy, self.lo[1], self.scale[1], self.v_min)]
    }
}

/// Source coordinates, in normalized space, for each output pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingGrid {
    width: usize,
    height: usize,
    coords: Vec<[f64; 2]>,
    valid: Vec<bool>,
}

impl SamplingGrid {
    pub fn new(width: usize, height: usize, coords: Vec<[f64; 2]>, valid: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(WarpError::InvalidArgument("grid dimensions must be at least 1x1".into()));
        }
        if coords.len() != width * height || valid.len() != coords.len() {
            return Err(WarpError::InvalidArgument(format!(
                "grid arrays must hold {} entries, got {} coords / {} flags",
                width * height,
                coords.len(),
                valid.len()
            )));
        }
        // Entries that are not finite are never sampled.
        let valid = valid
            .into_iter()
            .zip(&coords)
            .map(|(ok, c)| ok && c[0].is_finite() && c[1].is_finite())
            .collect();
        Ok(SamplingGrid { width, height, coords, valid })
    }

    /// Every entry at its own pixel center.
    pub fn identity(width: usize, height: usize) -> Result<Self> {
        let coords = (0..height)
            .flat_map(|y| {
                (0..width).map(move |x| {
                    let z = normalize_coords(x as f64, y as f64, width, height);
                    [z.re, z.im]
                })
            })
            .collect::<Vec<_>>();
        let n = coords.len();
        Self::new(width, height, coords, vec![true; n])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    pub fn invalid_count(&self) -> usize {
        self.valid.iter().filter(|ok| !**ok).count()
    }
}

/// The forward-transformed pixel centers of a `width × height` frame.
struct ForwardField {
    points: Vec<[f64; 2]>,
    valid: Vec<bool>,
    rescale: Rescale,
}

fn forward_field(width: usize, height: usize, transform: &Transform) -> Result<ForwardField> {
    if width == 0 || height == 0 {
        return Err(WarpError::InvalidArgument("dimensions must be at least 1x1".into()));
    }
    transform.validate()?;
    let n = width * height;
    let mut points = Vec::with_capacity(n);
    let mut valid = Vec::with_capacity(n);
    let mut push = |r: Result<ComplexValue>| match r {
        Ok(w) if w.is_finite() => {
            points.push([w.re, w.im]);
            valid.push(true);
        }
        _ => {
            points.push([0.0, 0.0]);
            valid.push(false);
        }
    };
    match transform {
        // Domain-safe parameters keep Re(kz + c) > 0 on the whole square, so
        // the log needs no singularity test here.
        Transform::Log(p) => {
            let (k, c) = (p.k(), p.c());
            for y in 0..height {
                for x in 0..width {
                    let z = normalize_coords(x as f64, y as f64, width, height);
                    push(Ok(z.mul_add(k, c).ln()));
                }
            }
        }
        Transform::Mobius(p) => {
            for y in 0..height {
                for x in 0..width {
                    let z = normalize_coords(x as f64, y as f64, width, height);
                    push(crate::mobius::mobius_map(z, p));
                }
            }
        }
    }
    let rescale = Rescale::fit(&points, &valid, width, height)?;
    Ok(ForwardField { points, valid, rescale })
}

/// The rescale shared by [`build_grid`] and [`warp_scatter`] for one frame size.
pub fn frame_rescale(width: usize, height: usize, transform: &Transform) -> Result<Rescale> {
    Ok(forward_field(width, height, transform)?.rescale)
}

/// Grid whose entry for output pixel `z` is the rescaled `T(z)`.
///
/// Pixels where the transform is singular are flagged invalid and excluded
/// from the rescale.
pub fn build_grid(width: usize, height: usize, transform: &Transform) -> Result<SamplingGrid> {
    let ForwardField { mut points, valid, rescale } = forward_field(width, height, transform)?;
    for (p, ok) in points.iter_mut().zip(&valid) {
        if *ok {
            *p = rescale.apply(p[0], p[1]);
        }
    }
    Ok(SamplingGrid { width, height, coords: points, valid })
}

/// Grid that inverts the forward geometry: entry `q` holds the source point
/// whose rescaled transform lands on `q`. Bilinear sampling through this grid
/// reproduces [`warp_scatter`] without holes.
pub fn build_inverse_grid(width: usize, height: usize, transform: &Transform) -> Result<SamplingGrid> {
    let rescale = frame_rescale(width, height, transform)?;
    let n = width * height;
    let mut coords = Vec::with_capacity(n);
    let mut valid = Vec::with_capacity(n);
    for y in 0..height {
        for x in 0..width {
            let q = normalize_coords(x as f64, y as f64, width, height);
            let [u, v] = rescale.invert(q.re, q.im);
            match transform.apply_inverse(ComplexValue::new(u, v)) {
                Ok(z) if z.is_finite() => {
                    coords.push([z.re, z.im]);
                    valid.push(true);
                }
                _ => {
                    coords.push([0.0, 0.0]);
                    valid.push(false);
                }
            }
        }
    }
    Ok(SamplingGrid { width, height, coords, valid })
}

fn check_fill(fill: &[f32], channels: usize) -> Result<()> {
    if fill.len() != channels {
        return Err(WarpError::ChannelMismatch { expected: channels, got: fill.len() });
    }
    if let Some(v) = fill.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(WarpError::InvalidArgument(format!("fill value {v} outside [0, 1]")));
    }
    Ok(())
}

#[inline]
fn snap(p: f64) -> f64 {
    let r = p.round();
    if (p - r).abs() < SNAP {
        r
    } else {
        p
    }
}

/// Bilinear sample at pixel-space `(px, py)`; `None` outside `[0, w-1] × [0, h-1]`.
#[inline]
fn bilinear_at(src: &ImageBuffer, px: f64, py: f64, out: &mut [f32]) -> bool {
    let (w, h) = (src.width(), src.height());
    let (px, py) = (snap(px), snap(py));
    if !(px >= 0.0 && py >= 0.0 && px <= (w - 1) as f64 && py <= (h - 1) as f64) {
        return false;
    }
    let x0 = px as usize;
    let y0 = py as usize;
    let fx = px - x0 as f64;
    let fy = py - y0 as f64;
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let (p00, p10) = (src.pixel(x0, y0), src.pixel(x1, y0));
    let (p01, p11) = (src.pixel(x0, y1), src.pixel(x1, y1));
    for ch in 0..out.len() {
        let top = (1.0 - fx) * p00[ch] as f64 + fx * p10[ch] as f64;
        let bottom = (1.0 - fx) * p01[ch] as f64 + fx * p11[ch] as f64;
        out[ch] = (((1.0 - fy) * top + fy * bottom) as f32).min(1.0);
    }
    true
}

/// Inverse warp: each output pixel bilinearly samples `src` at its grid entry.
/// Invalid entries and positions outside the source receive `fill`.
pub fn warp_bilinear(src: &ImageBuffer, grid: &SamplingGrid, fill: &[f32]) -> Result<ImageBuffer> {
    check_fill(fill, src.channels())?;
    let ch = src.channels();
    let mut data = vec![0.0f32; grid.width * grid.height * ch];
    for ((out, c), ok) in data.chunks_exact_mut(ch).zip(&grid.coords).zip(&grid.valid) {
        let hit = *ok && {
            let (px, py) = denormalize_coords(c[0], c[1], src.width(), src.height());
            bilinear_at(src, px, py, out)
        };
        if !hit {
            out.copy_from_slice(fill);
        }
    }
    ImageBuffer::new(grid.width, grid.height, ch, data)
}

/// Forward scatter output together with which pixels were written.
#[derive(Clone, Debug)]
pub struct ScatterResult {
    pub image: ImageBuffer,
    pub written: Vec<bool>,
}

impl ScatterResult {
    pub fn hole_count(&self) -> usize {
        self.written.iter().filter(|w| !**w).count()
    }

    pub fn hole_fraction(&self) -> f64 {
        self.hole_count() as f64 / self.written.len() as f64
    }
}

/// Forward warp: each source pixel is written at the rounded position of its
/// rescaled transform. Later source pixels (row-major) overwrite earlier ones;
/// pixels nobody writes keep `fill`.
pub fn warp_scatter(src: &ImageBuffer, transform: &Transform, fill: &[f32]) -> Result<ImageBuffer> {
    Ok(warp_scatter_detailed(src, transform, fill)?.image)
}

pub fn warp_scatter_detailed(
    src: &ImageBuffer,
    transform: &Transform,
    fill: &[f32],
) -> Result<ScatterResult> {
    check_fill(fill, src.channels())?;
    let (w, h) = (src.width(), src.height());
    let field = forward_field(w, h, transform)?;
    let mut out = ImageBuffer::from_fn(w, h, src.channels(), |_, _, ch| fill[ch])?;
    let mut written = vec![false; w * h];
    for (i, (p, ok)) in field.points.iter().zip(&field.valid).enumerate() {
        if !*ok {
            continue;
        }
        let [sx, sy] = field.rescale.apply(p[0], p[1]);
        let (px, py) = denormalize_coords(sx, sy, w, h);
        let (xd, yd) = (px.round(), py.round());
        if xd < 0.0 || yd < 0.0 || xd > (w - 1) as f64 || yd > (h - 1) as f64 {
            continue;
        }
        let (xd, yd) = (xd as usize, yd as usize);
        out.pixel_mut(xd, yd).copy_from_slice(src.pixel(i % w, i / w));
        written[yd * w + xd] = true;
    }
    Ok(ScatterResult { image: out, written })
}

/// Which kernel realizes a warp.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WarpMode {
    /// Output pixels sample the source bilinearly through [`build_grid`].
    #[default]
    InverseBilinear,
    /// Source pixels are rounded onto the output, as in the scatter formulation.
    ForwardScatter,
}

impl WarpMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            WarpMode::InverseBilinear => "inverse-bilinear",
            WarpMode::ForwardScatter => "forward-scatter",
        }
    }
}

/// Warps `src` with `transform` in the requested mode; output has the same size.
pub fn warp(src: &ImageBuffer, transform: &Transform, mode: WarpMode, fill: &[f32]) -> Result<ImageBuffer> {
    match mode {
        WarpMode::InverseBilinear => {
            check_fill(fill, src.channels())?;
            let grid = build_grid(src.width(), src.height(), transform)?;
            warp_bilinear(src, &grid, fill)
        }
        WarpMode::ForwardScatter => warp_scatter(src, transform, fill),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PadPolicy {
    /// Border is 0 in every channel.
    Zero,
    /// Border repeats the nearest edge pixel.
    Replicate,
    /// Mirror including the edge pixel: `[a b]` pads to `… b a | a b | b a …`.
    #[default]
    Reflect,
}

/// Margin and policy for the final padding step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Padding {
    pub margin: usize,
    pub policy: PadPolicy,
}

impl Default for Padding {
    fn default() -> Self {
        Padding { margin: 8, policy: PadPolicy::Reflect }
    }
}

impl Padding {
    pub const NONE: Padding = Padding { margin: 0, policy: PadPolicy::Reflect };
}

/// Edge-inclusive reflection of `i` into `0..n`, periodic with period `2n`.
#[inline]
pub fn reflect_index(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period);
    if m < n as isize {
        m as usize
    } else {
        (period - 1 - m) as usize
    }
}

/// Grows `img` by `margin` pixels on every side.
pub fn pad_image(img: &ImageBuffer, margin: usize, policy: PadPolicy) -> ImageBuffer {
    if margin == 0 {
        return img.clone();
    }
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let (ow, oh) = (w + 2 * margin, h + 2 * margin);
    let mut data = vec![0.0f32; ow * oh * ch];
    for y in 0..oh {
        for x in 0..ow {
            let sx = x as isize - margin as isize;
            let sy = y as isize - margin as isize;
            let inside = sx >= 0 && sy >= 0 && (sx as usize) < w && (sy as usize) < h;
            let src = match (inside, policy) {
                (true, _) => Some((sx as usize, sy as usize)),
                (false, PadPolicy::Zero) => None,
                (false, PadPolicy::Replicate) => {
                    Some((sx.clamp(0, w as isize - 1) as usize, sy.clamp(0, h as isize - 1) as usize))
                }
                (false, PadPolicy::Reflect) => Some((reflect_index(sx, w), reflect_index(sy, h))),
            };
            if let Some((sx, sy)) = src {
                let o = (y * ow + x) * ch;
                data[o..o + ch].copy_from_slice(img.pixel(sx, sy));
            }
        }
    }
    ImageBuffer::new(ow, oh, ch, data).expect("padding preserves the image invariants")
}
