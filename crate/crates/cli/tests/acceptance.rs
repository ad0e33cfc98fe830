//! Acceptance suite. Runs every criterion in sequence, prints one
//! `PASS`/`FAIL` line each, and exits non-zero if any failed.
//!
//! Sequential on purpose: the timing criterion must not share the machine
//! with the rest of the suite.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use lcmwarp::bench::{flop_reduction, flop_report, time_both, TransformKind};
use lcmwarp::grid::pad_image;
use lcmwarp::io::encode_png;
use lcmwarp::lcm::{conformality_report, nonlinearity_witness, WITNESS_PAIR};
use lcmwarp::{
    build_grid, flip, normalize_coords, rotate, synthesize_all_views, synthesize_view, warp_bilinear,
    ComplexValue, Direction, FlipAxis, ImageBuffer, LogParams, MobiusParams, PadPolicy, Padding, Rotation,
    SamplingGrid, Transform, ViewOptions, WarpMode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn flop_fidelity() -> Outcome {
    let sizes = [1usize, 7, 224, 513];
    let mpd_rows = [2u64, 14, 0, 0, 7];
    let lcm_rows = [2u64, 0, 4, 6, 7];
    for &h in &sizes {
        for &w in &sizes {
            let px = (h * w) as u64;
            for (kind, per, rows) in
                [(TransformKind::Mpd, 23, &mpd_rows), (TransformKind::Lcm, 19, &lcm_rows)]
            {
                let r = flop_report(kind, w, h).map_err(|e| e.to_string())?;
                ensure(r.total_flops == per * px, || format!("{kind} {w}x{h}: total {}", r.total_flops))?;
                for (row, want) in r.rows.iter().zip(rows.iter()) {
                    ensure(row.per_pixel == *want && row.total == want * px, || {
                        format!("{kind} {w}x{h}: row '{}' = {}/{}", row.name, row.per_pixel, row.total)
                    })?;
                }
            }
        }
    }
    Ok("16 sizes, 23·H·W and 19·H·W with every row exact".into())
}

fn flop_reduction_ratio() -> Outcome {
    let r = flop_reduction(224, 224).map_err(|e| e.to_string())?;
    ensure((r - 4.0 / 23.0).abs() <= 1e-5, || format!("reduction {r}"))?;
    Ok(format!("reduction {r:.6}"))
}

fn timing_ordering() -> Outcome {
    let mut runs = Vec::new();
    for attempt in 0..2 {
        let (lcm, mpd) = time_both(224, 224, 100, attempt).map_err(|e| e.to_string())?;
        let (l, m) = (lcm.per_image_seconds.mean, mpd.per_image_seconds.mean);
        runs.push(format!(
            "run {}: lcm {:.3} ms, mpd {:.3} ms, ratio {:.3}",
            attempt + 1,
            l * 1e3,
            m * 1e3,
            l / m
        ));
        if l <= m {
            return Ok(runs.join("; "));
        }
    }
    Err(runs.join("; "))
}

fn conformality() -> Outcome {
    let h = 1e-4;
    let r = conformality_report(&LogParams::default(), 1000, 0).map_err(|e| e.to_string())?;
    ensure(r.step == h, || format!("step {}", r.step))?;
    ensure(r.max_cr_residual < 1e-3, || format!("CR residual {:e}", r.max_cr_residual))?;
    ensure(r.max_angle_error < 1e-3, || format!("angle error {:e}", r.max_angle_error))?;
    ensure(r.max_derivative_error <= 100.0 * h * h, || {
        format!("derivative error {:e}", r.max_derivative_error)
    })?;
    Ok(format!(
        "CR {:.1e}, angle {:.1e} rad, derivative {:.1e}",
        r.max_cr_residual, r.max_angle_error, r.max_derivative_error
    ))
}

fn nonlinearity() -> Outcome {
    let shipped = nonlinearity_witness(&LogParams::default(), WITNESS_PAIR.0, WITNESS_PAIR.1)
        .map_err(|e| e.to_string())?;
    ensure(shipped > 0.1, || format!("shipped pair gap {shipped}"))?;
    let p = LogParams::new(ComplexValue::ONE, ComplexValue::ONE).map_err(|e| e.to_string())?;
    let v = nonlinearity_witness(&p, ComplexValue::ONE, ComplexValue::ONE).map_err(|e| e.to_string())?;
    let want = (3f64.ln() - 2.0 * 2f64.ln()).abs();
    ensure((v - want).abs() <= 1e-6, || format!("k=1,c=1 gap {v}, want {want}"))?;
    Ok(format!("shipped gap {shipped:.4}, k=c=1 gap {v:.6}"))
}

/// Brute-force bilinear sample as a sum of tent weights over every pixel.
fn tent_oracle(src: &ImageBuffer, grid: &SamplingGrid, fill: &[f32]) -> Vec<f32> {
    let (w, h) = (src.width(), src.height());
    let tent = |d: f64| (1.0 - d.abs()).max(0.0);
    let tol = 1e-9;
    let mut out = Vec::new();
    for (c, ok) in grid.coords().iter().zip(grid.valid()) {
        let px = (c[0] + 1.0) * w as f64 / 2.0 - 0.5;
        let py = (c[1] + 1.0) * h as f64 / 2.0 - 0.5;
        if !(*ok && px >= -tol && py >= -tol && px <= (w - 1) as f64 + tol && py <= (h - 1) as f64 + tol) {
            out.extend_from_slice(fill);
            continue;
        }
        for k in 0..src.channels() {
            let mut acc = 0.0;
            for j in 0..h {
                for i in 0..w {
                    acc += tent(px - i as f64) * tent(py - j as f64) * src.get(i, j, k) as f64;
                }
            }
            out.push(acc as f32);
        }
    }
    out
}

fn warp_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f32;
    for _ in 0..1000 {
        let ch = [1, 3, 4][rng.random_range(0..3)];
        let src = ImageBuffer::from_fn(16, 16, ch, |_, _, _| rng.random::<f32>()).unwrap();
        let coords = (0..256).map(|_| [rng.random_range(-1.2..1.2), rng.random_range(-1.2..1.2)]).collect();
        let valid = (0..256).map(|_| rng.random::<f64>() > 0.05).collect();
        let grid = SamplingGrid::new(16, 16, coords, valid).unwrap();
        let fill: Vec<f32> = (0..ch).map(|_| rng.random::<f32>()).collect();
        let got = warp_bilinear(&src, &grid, &fill).map_err(|e| e.to_string())?;
        for (a, b) in got.data().iter().zip(tent_oracle(&src, &grid, &fill)) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst <= 1e-6, || format!("max deviation {worst:e}"))?;
    Ok(format!("1000 trials, max deviation {worst:.1e}"))
}

fn smooth(w: usize, h: usize) -> ImageBuffer {
    ImageBuffer::from_fn(w, h, 3, |x, y, c| {
        (0.5 + 0.45 * ((x as f64 * 0.31 + y as f64 * 0.17 + c as f64).sin())) as f32
    })
    .unwrap()
}

fn max_diff(a: &ImageBuffer, b: &ImageBuffer) -> f32 {
    a.data().iter().zip(b.data()).map(|(x, y)| (x - y).abs()).fold(0.0, f32::max)
}

fn identity_and_group_laws() -> Outcome {
    let img = smooth(23, 15);
    let identity = Transform::Mobius(MobiusParams::identity());
    for mode in [WarpMode::InverseBilinear, WarpMode::ForwardScatter] {
        let opts = ViewOptions { mode, ..Default::default() };
        let padded = pad_image(&img, opts.padding.margin, opts.padding.policy);
        for (d, out) in synthesize_all_views(&img, &identity, &opts).map_err(|e| e.to_string())?.iter() {
            let mae = out.mean_abs_diff(&padded);
            ensure(mae <= 1e-6, || format!("identity {d} {mode:?}: MAE {mae:e}"))?;
        }
    }

    let rots = [Rotation::R0, Rotation::R90, Rotation::R180, Rotation::R270];
    for a in rots {
        for b in rots {
            ensure(rotate(&rotate(&img, a), b) == rotate(&img, a.then(b)), || {
                format!("rotation {a:?} then {b:?}")
            })?;
        }
        let back = Rotation::from_degrees((360 - a.degrees()) % 360).unwrap();
        ensure(rotate(&rotate(&img, a), back) == img, || format!("rotation {a:?} inverse"))?;
    }
    for axis in [FlipAxis::Horizontal, FlipAxis::Vertical] {
        ensure(flip(&flip(&img, axis), axis) == img, || format!("flip {axis:?} involution"))?;
    }

    let mut worst = 0.0f32;
    for t in [Transform::Log(LogParams::default()), Transform::Mobius(MobiusParams::default())] {
        for policy in [PadPolicy::Zero, PadPolicy::Reflect] {
            let opts = ViewOptions { padding: Padding { margin: 4, policy }, ..Default::default() };
            let views = synthesize_all_views(&img, &t, &opts).map_err(|e| e.to_string())?;
            let fh = |i: &ImageBuffer| flip(i, FlipAxis::Horizontal);
            let fv = |i: &ImageBuffer| flip(i, FlipAxis::Vertical);
            let lm =
                synthesize_view(&fh(&img), &Direction::Left.spec(), &t, &opts).map_err(|e| e.to_string())?;
            let tm =
                synthesize_view(&fv(&img), &Direction::Top.spec(), &t, &opts).map_err(|e| e.to_string())?;
            worst = worst.max(max_diff(&views.right, &fh(&lm))).max(max_diff(&views.bottom, &fv(&tm)));
        }
    }
    ensure(worst <= 1e-6, || format!("mirror deviation {worst:e}"))?;
    Ok(format!("identity views exact, group laws exact, mirror deviation {worst:.1e}"))
}

fn augment_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let inp = dir.path().join("in");
    fs::create_dir(&inp).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for i in 0..100 {
        let img = ImageBuffer::from_fn(24, 24, 3, |_, _, _| rng.random::<f32>()).unwrap();
        fs::write(inp.join(format!("img{i:03}.png")), encode_png(&img).unwrap())
            .map_err(|e| e.to_string())?;
    }
    let run = |out: &Path| -> Result<Vec<u8>, String> {
        let o = Command::new(env!("CARGO_BIN_EXE_lcmwarp"))
            .args(["augment", "--prob", "0.8", "--seed", "7", "--in-dir"])
            .arg(&inp)
            .arg("--out-dir")
            .arg(out)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(o.status.success(), || String::from_utf8_lossy(&o.stderr).into_owned())?;
        fs::read(out.join("manifest.jsonl")).map_err(|e| e.to_string())
    };
    let a = run(&dir.path().join("a"))?;
    let b = run(&dir.path().join("b"))?;
    ensure(a == b, || "manifests differ between runs".into())?;
    let text = String::from_utf8(a).map_err(|e| e.to_string())?;
    let applied = text.lines().filter(|l| l.contains("\"applied\":true")).count();
    ensure(text.lines().count() == 100, || format!("{} manifest lines", text.lines().count()))?;
    let frac = applied as f64 / 100.0;
    ensure((0.70..=0.90).contains(&frac), || format!("applied fraction {frac}"))?;
    Ok(format!("identical manifests, applied fraction {frac:.2}"))
}

fn singularity() -> Outcome {
    let cases = [
        ((0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0), 5usize, 5usize),
        ((1.0, 0.0), (0.0, 1.0), (1.0, 0.0), (-0.4, 0.8), 5, 5),
        ((0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0), 33, 21),
    ];
    let mut flagged_total = 0;
    for (a, b, c, d, w, h) in cases {
        let p = MobiusParams::new(a.into(), b.into(), c.into(), d.into()).map_err(|e| e.to_string())?;
        let grid = build_grid(w, h, &Transform::Mobius(p)).map_err(|e| e.to_string())?;
        for y in 0..h {
            for x in 0..w {
                let z = normalize_coords(x as f64, y as f64, w, h);
                let pole = (z * p.c() + p.d()).abs() <= 1e-12;
                ensure(grid.valid()[y * w + x] != pole, || format!("{w}x{h} pixel ({x},{y}) pole={pole}"))?;
                flagged_total += pole as usize;
            }
        }
        let src = smooth(w, h);
        let out = warp_bilinear(&src, &grid, &[0.2, 0.4, 0.6]).map_err(|e| e.to_string())?;
        ensure(out.data().iter().all(|v| v.is_finite()), || "NaN in output".into())?;
    }
    ensure(flagged_total == 3, || format!("{flagged_total} poles flagged"))?;
    Ok("3 pole pixels flagged exactly, outputs finite".into())
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "FLOP table fidelity", budget: Duration::from_secs(1), run: flop_fidelity },
        Criterion {
            id: 2,
            name: "FLOP reduction",
            budget: Duration::from_secs(1),
            run: flop_reduction_ratio,
        },
        Criterion { id: 3, name: "timing ordering", budget: Duration::from_secs(120), run: timing_ordering },
        Criterion { id: 4, name: "conformality", budget: Duration::from_secs(5), run: conformality },
        Criterion { id: 5, name: "non-linearity witness", budget: Duration::from_secs(1), run: nonlinearity },
        Criterion {
            id: 6,
            name: "warp oracle equivalence",
            budget: Duration::from_secs(30),
            run: warp_oracle,
        },
        Criterion {
            id: 7,
            name: "identity and group laws",
            budget: Duration::from_secs(30),
            run: identity_and_group_laws,
        },
        Criterion {
            id: 8,
            name: "augment determinism",
            budget: Duration::from_secs(60),
            run: augment_determinism,
        },
        Criterion { id: 9, name: "singularity handling", budget: Duration::from_secs(5), run: singularity },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > c.budget => Err(format!("{msg}; over budget {:?}", c.budget)),
            other => other,
        };
        let (tag, msg) = match &outcome {
            Ok(m) => ("PASS", m),
            Err(m) => ("FAIL", m),
        };
        failed += outcome.is_err() as usize;
        println!("criterion {} {:<26} {tag}  ({:.2?}) {msg}", c.id, c.name, elapsed);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
