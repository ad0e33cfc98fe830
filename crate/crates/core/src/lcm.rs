//! The log conformal map `Ψ(z) = log(kz + c)` and its numerical checks.
//!
//! Besides the pointwise map and its closed-form derivative, this module
//! carries the machinery that certifies the map numerically: central
//! difference Jacobians, a Cauchy–Riemann / angle-preservation sweep over the
//! normalized image domain, and a superposition-gap witness for non-linearity.

use std::f64::consts::FRAC_PI_4;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::ComplexValue;
use crate::error::{Result, WarpError};

/// Below this modulus `kz + c` is treated as zero.
pub const EPS_SINGULAR: f64 = 1e-12;

/// Required clearance of `Re(kz + c)` from the branch cut over the domain.
pub const EPS_DOMAIN: f64 = 1e-6;

/// Corners of the normalized coordinate square `[-1, 1]²`.
pub(crate) const DOMAIN_CORNERS: [ComplexValue; 4] = [
    ComplexValue::new(-1.0, -1.0),
    ComplexValue::new(1.0, -1.0),
    ComplexValue::new(-1.0, 1.0),
    ComplexValue::new(1.0, 1.0),
];

/// Parameters `(k, c)` of `Ψ(z) = log(kz + c)`.
///
/// Construction only rejects `k = 0` (or non-finite values). Whether the
/// parameters are usable for warping an image is a separate question answered
/// by [`LogParams::check_domain`], because the pointwise map is meaningful far
/// outside the image domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLogParams", into = "RawLogParams")]
pub struct LogParams {
    k: ComplexValue,
    c: ComplexValue,
}

#[derive(Serialize, Deserialize)]
struct RawLogParams {
    k: [f64; 2],
    c: [f64; 2],
}

impl TryFrom<RawLogParams> for LogParams {
    type Error = WarpError;
    fn try_from(raw: RawLogParams) -> Result<Self> {
        LogParams::new(raw.k.into(), raw.c.into())
    }
}

impl From<LogParams> for RawLogParams {
    fn from(p: LogParams) -> Self {
        RawLogParams { k: [p.k.re, p.k.im], c: [p.c.re, p.c.im] }
    }
}

impl Default for LogParams {
    /// `k = 1`, `c = 2`: the domain lands on `[1, 3] × [-1, 1]`.
    fn default() -> Self {
        LogParams { k: ComplexValue::ONE, c: ComplexValue::real(2.0) }
    }
}

impl LogParams {
    pub fn new(k: ComplexValue, c: ComplexValue) -> Result<Self> {
        if !k.is_finite() || !c.is_finite() {
            return Err(WarpError::InvalidParams(format!("k and c must be finite (k = {k}, c = {c})")));
        }
        if k == ComplexValue::ZERO {
            return Err(WarpError::InvalidParams(
                "k must be non-zero, otherwise the derivative k/(kz+c) vanishes".into(),
            ));
        }
        Ok(LogParams { k, c })
    }

    #[inline]
    pub fn k(&self) -> ComplexValue {
        self.k
    }

    #[inline]
    pub fn c(&self) -> ComplexValue {
        self.c
    }

    /// Smallest `Re(kz + c)` over `[-1, 1]²`.
    ///
    /// `z ↦ kz + c` is affine, so the minimum over the square is attained at
    /// one of its corners.
    pub fn domain_margin(&self) -> f64 {
        DOMAIN_CORNERS.iter().map(|&z| z.mul_add(self.k, self.c).re).fold(f64::INFINITY, f64::min)
    }

    pub fn is_domain_safe(&self) -> bool {
        self.domain_margin() > EPS_DOMAIN
    }

    /// Fails with [`WarpError::DomainViolation`] unless `Re(kz + c) > 1e-6`
    /// everywhere on the normalized image domain.
    pub fn check_domain(&self) -> Result<()> {
        let margin = self.domain_margin();
        if margin > EPS_DOMAIN {
            Ok(())
        } else {
            Err(WarpError::DomainViolation(format!(
                "Re(k*z + c) reaches {margin} on [-1,1]^2 for k = {}, c = {}; \
                 it must stay above {EPS_DOMAIN} to keep the log branch cut out of the image \
                 (try a larger Re(c))",
                self.k, self.c
            )))
        }
    }
}

#[inline]
fn affine_checked(z: ComplexValue, p: &LogParams) -> Result<ComplexValue> {
    let w = z.mul_add(p.k, p.c);
    let modulus = w.abs();
    if modulus <= EPS_SINGULAR || !modulus.is_finite() {
        return Err(WarpError::SingularInput { modulus, threshold: EPS_SINGULAR });
    }
    Ok(w)
}

/// `Ψ(z) = log(kz + c)` on the principal branch, imaginary part in `(-π, π]`.
pub fn log_conformal_map(z: ComplexValue, p: &LogParams) -> Result<ComplexValue> {
    Ok(affine_checked(z, p)?.ln())
}

/// `Ψ'(z) = k / (kz + c)`, evaluated in closed form.
pub fn log_conformal_derivative(z: ComplexValue, p: &LogParams) -> Result<ComplexValue> {
    let w = affine_checked(z, p)?;
    Ok(p.k / w)
}

/// Central-difference partials of `Ψ = u + iv` at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobianEstimate {
    pub du_dx: f64,
    pub du_dy: f64,
    pub dv_dx: f64,
    pub dv_dy: f64,
    pub step: f64,
}

impl JacobianEstimate {
    /// `|u_x - v_y| + |u_y + v_x|`; zero for a holomorphic map.
    pub fn cauchy_riemann_residual(&self) -> f64 {
        (self.du_dx - self.dv_dy).abs() + (self.du_dy + self.dv_dx).abs()
    }

    /// The complex derivative implied by the partials, `u_x + i v_x`.
    pub fn complex_derivative(&self) -> ComplexValue {
        ComplexValue::new(self.du_dx, self.dv_dx)
    }

    /// Image of the tangent `(tx, ty)` under the Jacobian.
    pub fn apply(&self, tx: f64, ty: f64) -> (f64, f64) {
        (self.du_dx * tx + self.du_dy * ty, self.dv_dx * tx + self.dv_dy * ty)
    }
}

pub fn estimate_jacobian(z: ComplexValue, p: &LogParams, h: f64) -> Result<JacobianEstimate> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(WarpError::InvalidArgument(format!(
            "finite-difference step must be positive and finite, got {h}"
        )));
    }
    let hx = ComplexValue::real(h);
    let hy = ComplexValue::new(0.0, h);
    let fx1 = log_conformal_map(z + hx, p)?;
    let fx0 = log_conformal_map(z - hx, p)?;
    let fy1 = log_conformal_map(z + hy, p)?;
    let fy0 = log_conformal_map(z - hy, p)?;
    let inv = 0.5 / h;
    Ok(JacobianEstimate {
        du_dx: (fx1.re - fx0.re) * inv,
        dv_dx: (fx1.im - fx0.im) * inv,
        du_dy: (fy1.re - fy0.re) * inv,
        dv_dy: (fy1.im - fy0.im) * inv,
        step: h,
    })
}

/// Worst-case outcome of a conformality sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConformalityReport {
    pub n_points: usize,
    pub step: f64,
    /// Largest Cauchy–Riemann residual seen.
    pub max_cr_residual: f64,
    /// Largest deviation, in radians, of the mapped angle between two
    /// tangents 45° apart from 45°.
    pub max_angle_error: f64,
    /// Largest `|finite-difference derivative - k/(kz+c)|`.
    pub max_derivative_error: f64,
    /// Smallest `|k/(kz+c)|` seen.
    pub min_derivative_modulus: f64,
}

/// Finite-difference step used by [`conformality_report`].
pub const DEFAULT_STEP: f64 = 1e-4;

/// Radical inverse of `i` in `base` (van der Corput).
fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv_base = 1.0 / base as f64;
    let mut f = inv_base;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv_base;
    }
    r
}

/// Seeded low-discrepancy points in `[0, 1)^3`: a Halton sequence (bases 2, 3, 5)
/// with a Cranley–Patterson shift drawn from ChaCha8 seeded with `seed`.
pub(crate) fn halton_points(n: usize, seed: u64) -> impl Iterator<Item = [f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: [f64; 3] = [rng.random(), rng.random(), rng.random()];
    (1..=n as u64).map(move |i| {
        let mut out = [0.0; 3];
        for (d, base) in [2u64, 3, 5].into_iter().enumerate() {
            out[d] = (radical_inverse(i, base) + shift[d]).fract();
        }
        out
    })
}

/// Sweeps `n_points` quasi-random points of the image domain and records the
/// worst Cauchy–Riemann residual and angle distortion. Deterministic for a
/// given seed.
pub fn conformality_report(p: &LogParams, n_points: usize, seed: u64) -> Result<ConformalityReport> {
    conformality_report_with_step(p, n_points, seed, DEFAULT_STEP)
}

pub fn conformality_report_with_step(
    p: &LogParams,
    n_points: usize,
    seed: u64,
    h: f64,
) -> Result<ConformalityReport> {
    if n_points == 0 {
        return Err(WarpError::InvalidArgument("n_points must be at least 1".into()));
    }
    p.check_domain()?;
    // Points are drawn from the square shrunk by h so every probe stays in the domain.
    let half = 1.0 - h;
    let mut report = ConformalityReport {
        n_points,
        step: h,
        max_cr_residual: 0.0,
        max_angle_error: 0.0,
        max_derivative_error: 0.0,
        min_derivative_modulus: f64::INFINITY,
    };
    for [a, b, t] in halton_points(n_points, seed) {
        let z = ComplexValue::new(half * (2.0 * a - 1.0), half * (2.0 * b - 1.0));
        let jac = estimate_jacobian(z, p, h)?;
        let exact = log_conformal_derivative(z, p)?;

        let theta = t * std::f64::consts::TAU;
        let (s1, c1) = theta.sin_cos();
        let (s2, c2) = (theta + FRAC_PI_4).sin_cos();
        let (ax, ay) = jac.apply(c1, s1);
        let (bx, by) = jac.apply(c2, s2);
        let mapped = (ax * by - ay * bx).atan2(ax * bx + ay * by);

        report.max_cr_residual = report.max_cr_residual.max(jac.cauchy_riemann_residual());
        report.max_angle_error = report.max_angle_error.max((mapped - FRAC_PI_4).abs());
        report.max_derivative_error =
            report.max_derivative_error.max((jac.complex_derivative() - exact).abs());
        report.min_derivative_modulus = report.min_derivative_modulus.min(exact.abs());
    }
    Ok(report)
}

/// `|Ψ(z1 + z2) - (Ψ(z1) + Ψ(z2))|`, the superposition gap.
pub fn nonlinearity_witness(p: &LogParams, z1: ComplexValue, z2: ComplexValue) -> Result<f64> {
    let joint = log_conformal_map(z1 + z2, p)?;
    let split = log_conformal_map(z1, p)? + log_conformal_map(z2, p)?;
    Ok((joint - split).abs())
}

/// The witness pair shipped with the verifier: `z1 = 1`, `z2 = i`.
pub const WITNESS_PAIR: (ComplexValue, ComplexValue) = (ComplexValue::ONE, ComplexValue::I);

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::{E, PI};

    fn params(k: (f64, f64), c: (f64, f64)) -> LogParams {
        LogParams::new(k.into(), c.into()).unwrap()
    }

    #[test]
    fn map_at_origin_with_c_e_is_one() {
        let p = params((1.0, 0.0), (E, 0.0));
        let w = log_conformal_map(ComplexValue::ZERO, &p).unwrap();
        assert!((w.re - 1.0).abs() < 1e-15);
        assert_eq!(w.im, 0.0);
    }

    #[test]
    fn map_rejects_log_of_zero() {
        let p = params((1.0, 0.0), (0.0, 0.0));
        let err = log_conformal_map(ComplexValue::ZERO, &p).unwrap_err();
        assert!(matches!(err, WarpError::SingularInput { .. }));
        assert!(log_conformal_derivative(ComplexValue::ZERO, &p).is_err());
    }

    #[test]
    fn map_matches_reference_log() {
        // Reference value from num-complex's principal log of 2 + i.
        let p = params((1.0, 0.0), (1.0, 0.0));
        let w = log_conformal_map(ComplexValue::new(1.0, 1.0), &p).unwrap();
        let want = Complex64::new(2.0, 1.0).ln();
        assert!((w.re - want.re).abs() < 1e-15);
        assert!((w.im - want.im).abs() < 1e-15);
        assert!((w.re - 0.80472).abs() < 1e-5 && (w.im - 0.46365).abs() < 1e-5);
    }

    #[test]
    fn map_lands_on_principal_branch_across_the_cut() {
        let p = params((1.0, 0.0), (0.0, 0.0));
        let above = log_conformal_map(ComplexValue::new(-1.0, 0.0), &p).unwrap();
        let neg_zero = log_conformal_map(ComplexValue::new(-1.0, -0.0), &p).unwrap();
        let below = log_conformal_map(ComplexValue::new(-1.0, -1e-3), &p).unwrap();
        assert_eq!(above.im, PI);
        assert_eq!(neg_zero.im, PI);
        assert!(below.im > -PI && below.im < -PI + 2e-3, "{below}");
    }

    #[test]
    fn derivative_closed_form() {
        let p = params((1.0, 0.0), (1.0, 0.0));
        assert_eq!(log_conformal_derivative(ComplexValue::ZERO, &p).unwrap(), ComplexValue::ONE);
        let p = params((2.0, 0.0), (0.5, 0.0));
        let d = log_conformal_derivative(ComplexValue::ONE, &p).unwrap();
        assert!((d.re - 0.8).abs() < 1e-15 && d.im == 0.0);
    }

    #[test]
    fn jacobian_at_origin_is_half_identity() {
        let p = LogParams::default();
        let j = estimate_jacobian(ComplexValue::ZERO, &p, 1e-4).unwrap();
        assert!((j.du_dx - 0.5).abs() < 1e-8);
        assert!((j.dv_dy - 0.5).abs() < 1e-8);
        assert!(j.du_dy.abs() < 1e-12);
        assert!(j.dv_dx.abs() < 1e-12);
        assert!(j.cauchy_riemann_residual() <= 10.0 * j.step);
    }

    #[test]
    fn jacobian_rejects_bad_step() {
        let p = LogParams::default();
        for h in [0.0, -1e-3, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                estimate_jacobian(ComplexValue::ZERO, &p, h),
                Err(WarpError::InvalidArgument(_))
            ));
        }
    }

    #[test]
    fn jacobian_probe_hitting_the_singularity_errors() {
        let p = params((1.0, 0.0), (0.0, 0.0));
        let err = estimate_jacobian(ComplexValue::real(1e-4), &p, 1e-4).unwrap_err();
        assert!(matches!(err, WarpError::SingularInput { .. }));
    }

    #[test]
    fn zero_k_is_rejected() {
        assert!(LogParams::new(ComplexValue::ZERO, ComplexValue::real(2.0)).is_err());
        assert!(LogParams::new(ComplexValue::new(f64::NAN, 0.0), ComplexValue::ONE).is_err());
    }

    #[test]
    fn domain_safety_uses_corners() {
        assert!(LogParams::default().is_domain_safe());
        // c = 1 puts the corner z = -1 exactly on Re = 0.
        assert!(!params((1.0, 0.0), (1.0, 0.0)).is_domain_safe());
        assert!(!params((1.0, 0.0), (0.0, 0.0)).is_domain_safe());
        // Rotated k: Re(kz) = -Im(z) for k = i, so corners reach -1.
        assert!(params((0.0, 1.0), (1.5, 0.0)).is_domain_safe());
        assert!(matches!(params((1.0, 0.0), (0.5, 0.0)).check_domain(), Err(WarpError::DomainViolation(_))));
    }

    #[test]
    fn nonlinearity_examples() {
        let p = params((1.0, 0.0), (1.0, 0.0));
        let gap = nonlinearity_witness(&p, ComplexValue::ONE, ComplexValue::ONE).unwrap();
        assert!((gap - (3f64.ln() - 2.0 * 2f64.ln()).abs()).abs() < 1e-12);
        assert!((gap - 0.2877).abs() < 1e-4);
        assert_eq!(nonlinearity_witness(&p, ComplexValue::ZERO, ComplexValue::ZERO).unwrap(), 0.0);

        // Shipped pair under default params, against num-complex.
        let p = LogParams::default();
        let (z1, z2) = WITNESS_PAIR;
        let gap = nonlinearity_witness(&p, z1, z2).unwrap();
        let l = |re: f64, im: f64| Complex64::new(re, im).ln();
        let want = (l(3.0, 1.0) - l(3.0, 0.0) - l(2.0, 1.0)).norm();
        assert!((gap - want).abs() < 1e-12);
        assert!(gap > 0.1);
    }

    #[test]
    fn conformality_default_params() {
        let r = conformality_report(&LogParams::default(), 1000, 7).unwrap();
        assert!(r.max_cr_residual < 1e-3, "{r:?}");
        assert!(r.max_angle_error < 1e-3, "{r:?}");
        assert!(r.max_derivative_error < 100.0 * DEFAULT_STEP * DEFAULT_STEP, "{r:?}");
        assert!(r.min_derivative_modulus > 0.0);
    }

    #[test]
    fn conformality_is_deterministic() {
        let p = params((0.8, 0.3), (2.5, -0.4));
        let a = conformality_report(&p, 200, 42).unwrap();
        let b = conformality_report(&p, 200, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn conformality_rejects_bad_inputs() {
        assert!(matches!(
            conformality_report(&LogParams::default(), 0, 1),
            Err(WarpError::InvalidArgument(_))
        ));
        let unsafe_p = params((1.0, 0.0), (1.0, 0.0));
        assert!(matches!(conformality_report(&unsafe_p, 10, 1), Err(WarpError::DomainViolation(_))));
    }

    #[test]
    fn halton_points_fill_the_unit_cube() {
        let pts: Vec<_> = halton_points(512, 3).collect();
        for d in 0..3 {
            let below = pts.iter().filter(|p| p[d] < 0.5).count();
            assert!((below as i64 - 256).abs() <= 4, "dim {d}: {below}");
            assert!(pts.iter().all(|p| (0.0..1.0).contains(&p[d])));
        }
    }

    #[test]
    fn serde_round_trip_keeps_invariant() {
        let p = params((1.0, 0.5), (2.0, -1.0));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"k":[1.0,0.5],"c":[2.0,-1.0]}"#);
        assert_eq!(serde_json::from_str::<LogParams>(&s).unwrap(), p);
        assert!(serde_json::from_str::<LogParams>(r#"{"k":[0,0],"c":[2,0]}"#).is_err());
    }
}
