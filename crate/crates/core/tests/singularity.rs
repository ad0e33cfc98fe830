use lcmwarp::{build_grid, normalize_coords, warp_bilinear, ImageBuffer, MobiusParams, Transform};

/// Pixels whose denominator modulus is at most 1e-12, by direct enumeration.
fn poles(w: usize, h: usize, p: &MobiusParams) -> Vec<bool> {
    let (c, d) = (p.c(), p.d());
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let z = normalize_coords(x as f64, y as f64, w, h);
            let re = c.re * z.re - c.im * z.im + d.re;
            let im = c.re * z.im + c.im * z.re + d.im;
            out.push(re.hypot(im) <= 1e-12);
        }
    }
    out
}

#[test]
fn flags_exactly_the_pole_pixels() {
    let cases = [
        // 1/z with the pole on the center pixel of odd frames.
        ((0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0), 5, 5, 1),
        ((0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0), 31, 17, 1),
        // Pole at z = 0.4 - 0.8i, a pixel center of the 5x5 frame up to rounding.
        ((1.0, 0.0), (0.0, 1.0), (1.0, 0.0), (-0.4, 0.8), 5, 5, 1),
        // Pole between pixel centers: nothing flagged.
        ((0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0), 6, 6, 0),
    ];
    for (a, b, c, d, w, h, poles_expected) in cases {
        let p = MobiusParams::new(a.into(), b.into(), c.into(), d.into()).unwrap();
        let grid = build_grid(w, h, &Transform::Mobius(p)).unwrap();
        let expected = poles(w, h, &p);
        let flagged: Vec<bool> = grid.valid().iter().map(|v| !v).collect();
        assert_eq!(flagged, expected, "{w}x{h}");
        assert_eq!(expected.iter().filter(|p| **p).count(), poles_expected);

        let src = ImageBuffer::from_fn(w, h, 3, |x, y, c| ((x + y + c) % 5) as f32 / 4.0).unwrap();
        let out = warp_bilinear(&src, &grid, &[0.25, 0.5, 0.75]).unwrap();
        assert!(out.data().iter().all(|v| v.is_finite()));
        for (i, pole) in expected.iter().enumerate() {
            if *pole {
                assert_eq!(out.pixel(i % w, i / w), &[0.25, 0.5, 0.75]);
            }
        }
    }
}
