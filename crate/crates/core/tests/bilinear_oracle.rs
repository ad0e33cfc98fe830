//! `warp_bilinear` against a brute-force tent-kernel sum over every source pixel.

use lcmwarp::{warp_bilinear, ImageBuffer, SamplingGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Σ tent(px - i) · tent(py - j) · src[j][i], or `fill` when the point is
/// outside the pixel-center hull or flagged invalid.
fn oracle(src: &ImageBuffer, grid: &SamplingGrid, fill: &[f32]) -> Vec<f32> {
    let (w, h, ch) = (src.width(), src.height(), src.channels());
    let tent = |d: f64| (1.0 - d.abs()).max(0.0);
    let mut out = Vec::new();
    for (c, ok) in grid.coords().iter().zip(grid.valid()) {
        let px = (c[0] + 1.0) * w as f64 / 2.0 - 0.5;
        let py = (c[1] + 1.0) * h as f64 / 2.0 - 0.5;
        // Pixel-center coordinates round-trip with a few ulps of error.
        let tol = 1e-9;
        let inside =
            *ok && px >= -tol && py >= -tol && px <= (w - 1) as f64 + tol && py <= (h - 1) as f64 + tol;
        if !inside {
            out.extend_from_slice(fill);
            continue;
        }
        for k in 0..ch {
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

#[test]
fn matches_brute_force_over_random_trials() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_611);
    let mut worst = 0.0f32;
    for _ in 0..1000 {
        let ch = [1, 3, 4][rng.random_range(0..3)];
        let src = ImageBuffer::from_fn(16, 16, ch, |_, _, _| rng.random::<f32>()).unwrap();
        let n = 16 * 16;
        let coords = (0..n).map(|_| [rng.random_range(-1.2..1.2), rng.random_range(-1.2..1.2)]).collect();
        let valid = (0..n).map(|_| rng.random::<f64>() > 0.05).collect();
        let grid = SamplingGrid::new(16, 16, coords, valid).unwrap();
        let fill: Vec<f32> = (0..ch).map(|_| rng.random::<f32>()).collect();
        let got = warp_bilinear(&src, &grid, &fill).unwrap();
        let want = oracle(&src, &grid, &fill);
        for (a, b) in got.data().iter().zip(&want) {
            worst = worst.max((a - b).abs());
        }
    }
    assert!(worst <= 1e-6, "max deviation {worst}");
}

#[test]
fn pixel_centers_reproduce_the_source() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let src = ImageBuffer::from_fn(9, 5, 3, |_, _, _| rng.random::<f32>()).unwrap();
    let grid = SamplingGrid::identity(9, 5).unwrap();
    assert_eq!(warp_bilinear(&src, &grid, &[0.0; 3]).unwrap(), src);
    assert_eq!(oracle(&src, &grid, &[0.0; 3]), src.data());
}
