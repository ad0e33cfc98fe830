use std::f64::consts::PI;

use lcmwarp::grid::reflect_index;
use lcmwarp::io::{decode_ppm, encode_ppm};
use lcmwarp::{
    build_grid, flip, log_conformal_derivative, log_conformal_map, mobius_map, pad_image, rotate,
    ComplexValue, FlipAxis, ImageBuffer, LogParams, MobiusParams, PadPolicy, Rotation, Transform,
};
use proptest::prelude::*;

fn cplx(r: f64) -> impl Strategy<Value = ComplexValue> {
    (-r..r, -r..r).prop_map(|(re, im)| ComplexValue::new(re, im))
}

fn unit_square() -> impl Strategy<Value = ComplexValue> {
    cplx(1.0)
}

fn mobius() -> impl Strategy<Value = MobiusParams> {
    (cplx(2.0), cplx(2.0), cplx(2.0), cplx(2.0)).prop_filter_map("well conditioned", |(a, b, c, d)| {
        let p = MobiusParams::new(a, b, c, d).ok()?;
        (p.determinant().abs() > 0.1).then_some(p)
    })
}

/// Domain-safe parameters: Re(kz + c) stays well above zero on the square.
fn safe_log() -> impl Strategy<Value = LogParams> {
    (cplx(1.5), -2.0..2.0f64).prop_filter_map("domain safe", |(k, c_im)| {
        let c_re = k.re.abs() + k.im.abs() + 0.2;
        let p = LogParams::new(k, ComplexValue::new(c_re, c_im)).ok()?;
        p.is_domain_safe().then_some(p)
    })
}

fn within(a: ComplexValue, b: ComplexValue, abs: f64) -> bool {
    (a - b).abs() <= abs
}

fn close(a: ComplexValue, b: ComplexValue, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

/// Away from the pole, so that conditioning does not swamp the tolerance.
fn tame(z: ComplexValue, p: &MobiusParams) -> bool {
    (z * p.c() + p.d()).abs() > 0.1
}

proptest! {
    #[test]
    fn mobius_composition_is_map_composition(p in mobius(), q in mobius(), z in unit_square()) {
        prop_assume!(tame(z, &q));
        let inner = mobius_map(z, &q).unwrap();
        prop_assume!(tame(inner, &p));
        let pq = p.compose(&q).unwrap();
        prop_assert!(within(mobius_map(z, &pq).unwrap(), mobius_map(inner, &p).unwrap(), 1e-9));
    }

    #[test]
    fn mobius_is_invariant_under_scaling(p in mobius(), lam in cplx(3.0), z in unit_square()) {
        prop_assume!(lam.abs() > 0.05 && tame(z, &p));
        let s = p.scaled(lam).unwrap();
        prop_assert!(within(mobius_map(z, &s).unwrap(), mobius_map(z, &p).unwrap(), 1e-9));
    }

    #[test]
    fn mobius_inverse_round_trips(p in mobius(), z in unit_square()) {
        prop_assume!(tame(z, &p));
        let w = mobius_map(z, &p).unwrap();
        let inv = p.inverse();
        prop_assume!(tame(w, &inv));
        prop_assert!(close(mobius_map(w, &inv).unwrap(), z, 1e-9));
    }

    #[test]
    fn mobius_matches_complex_division(p in mobius(), z in unit_square()) {
        prop_assume!(tame(z, &p));
        let naive = (p.a() * z + p.b()) / (p.c() * z + p.d());
        prop_assert!(close(mobius_map(z, &p).unwrap(), naive, 1e-12));
    }

    #[test]
    fn log_map_inverts_through_exp(p in safe_log(), z in unit_square()) {
        let w = log_conformal_map(z, &p).unwrap();
        prop_assert!(w.im > -PI && w.im <= PI);
        prop_assert!(close(w.exp(), z * p.k() + p.c(), 1e-12));
    }

    #[test]
    fn log_derivative_matches_a_difference_quotient(p in safe_log(), z in cplx(0.9)) {
        let h = 1e-5;
        let f = |dz: ComplexValue| log_conformal_map(z + dz, &p).unwrap();
        let fd = (f(ComplexValue::new(h, 0.0)) - f(ComplexValue::new(-h, 0.0))) * (0.5 / h);
        prop_assert!(close(log_conformal_derivative(z, &p).unwrap(), fd, 1e-6));
    }

    #[test]
    fn log_grid_stays_inside_the_pixel_span(p in safe_log(), w in 2usize..40, h in 2usize..40) {
        let grid = build_grid(w, h, &Transform::Log(p)).unwrap();
        prop_assert_eq!(grid.invalid_count(), 0);
        let (xmax, ymax) = (1.0 - 1.0 / w as f64, 1.0 - 1.0 / h as f64);
        for c in grid.coords() {
            prop_assert!(c[0].abs() <= xmax + 1e-12 && c[1].abs() <= ymax + 1e-12);
        }
    }

    #[test]
    fn grid_construction_is_deterministic(p in safe_log(), w in 1usize..20, h in 1usize..20) {
        let t = Transform::Log(p);
        prop_assert_eq!(build_grid(w, h, &t).unwrap(), build_grid(w, h, &t).unwrap());
    }

    #[test]
    fn ppm_round_trips_bytes(w in 1usize..12, h in 1usize..12, seed in any::<u64>()) {
        let bytes: Vec<u8> = (0..w * h * 3).map(|i| (seed.wrapping_mul(i as u64 + 1) >> 29) as u8).collect();
        let img = ImageBuffer::from_u8(w, h, 3, &bytes).unwrap();
        let encoded = encode_ppm(&img);
        let back = decode_ppm(&encoded).unwrap();
        prop_assert_eq!(&back, &img);
        prop_assert_eq!(encode_ppm(&back), encoded);
    }

    #[test]
    fn orientation_laws(w in 1usize..9, h in 1usize..9, seed in any::<u32>()) {
        let img = ImageBuffer::from_fn(w, h, 1, |x, y, _| ((x * 31 + y * 17 + seed as usize) % 97) as f32 / 96.0).unwrap();
        let mut r = img.clone();
        for _ in 0..4 {
            r = rotate(&r, Rotation::R90);
        }
        prop_assert_eq!(&r, &img);
        prop_assert_eq!(&rotate(&rotate(&img, Rotation::R90), Rotation::R270), &img);
        for axis in [FlipAxis::Horizontal, FlipAxis::Vertical] {
            prop_assert_eq!(&flip(&flip(&img, axis), axis), &img);
        }
    }

    #[test]
    fn reflect_index_stays_in_range(i in -500isize..500, n in 1usize..20) {
        let r = reflect_index(i, n);
        prop_assert!(r < n);
        if (0..n as isize).contains(&i) {
            prop_assert_eq!(r, i as usize);
        }
    }

    #[test]
    fn padding_keeps_the_interior(w in 1usize..8, h in 1usize..8, m in 0usize..12) {
        let img = ImageBuffer::from_fn(w, h, 3, |x, y, c| ((x + 2 * y + c) % 7) as f32 / 6.0).unwrap();
        for policy in [PadPolicy::Zero, PadPolicy::Replicate, PadPolicy::Reflect] {
            let padded = pad_image(&img, m, policy);
            prop_assert_eq!(padded.crop(m, m, w, h).unwrap(), img.clone());
        }
    }
}
