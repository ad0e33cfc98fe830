//! Mobius baseline `Φ(z) = (az + b) / (cz + d)`.
//!
//! The quotient is evaluated through its real/imaginary decomposition rather
//! than a generic complex division, so the same kernel can be run over a
//! counting scalar to obtain the per-pixel FLOP figure used by the cost model.

use std::cell::Cell;
use std::ops::{Add, Div, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::complex::ComplexValue;
use crate::error::{Result, WarpError};
use crate::lcm::EPS_SINGULAR;

/// Minimum `|ad - bc|` for a non-degenerate transform.
pub const EPS_DET: f64 = 1e-9;

/// Coefficients of a Mobius transform with `|ad - bc| > 1e-9`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMobiusParams", into = "RawMobiusParams")]
pub struct MobiusParams {
    a: ComplexValue,
    b: ComplexValue,
    c: ComplexValue,
    d: ComplexValue,
}

#[derive(Serialize, Deserialize)]
struct RawMobiusParams {
    a: [f64; 2],
    b: [f64; 2],
    c: [f64; 2],
    d: [f64; 2],
}

impl TryFrom<RawMobiusParams> for MobiusParams {
    type Error = WarpError;
    fn try_from(r: RawMobiusParams) -> Result<Self> {
        MobiusParams::new(r.a.into(), r.b.into(), r.c.into(), r.d.into())
    }
}

impl From<MobiusParams> for RawMobiusParams {
    fn from(p: MobiusParams) -> Self {
        RawMobiusParams { a: p.a.into(), b: p.b.into(), c: p.c.into(), d: p.d.into() }
    }
}

impl Default for MobiusParams {
    /// `z / (0.5 z + 1)`: pole at `z = -2`, outside the image domain.
    fn default() -> Self {
        MobiusParams {
            a: ComplexValue::ONE,
            b: ComplexValue::ZERO,
            c: ComplexValue::real(0.5),
            d: ComplexValue::ONE,
        }
    }
}

impl MobiusParams {
    pub fn new(a: ComplexValue, b: ComplexValue, c: ComplexValue, d: ComplexValue) -> Result<Self> {
        if ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(WarpError::InvalidParams("Mobius coefficients must be finite".into()));
        }
        let det = (a * d - b * c).abs();
        if det <= EPS_DET {
            return Err(WarpError::InvalidParams(format!(
                "degenerate Mobius transform: |ad - bc| = {det:e} must exceed {EPS_DET:e}"
            )));
        }
        Ok(MobiusParams { a, b, c, d })
    }

    pub fn identity() -> Self {
        MobiusParams {
            a: ComplexValue::ONE,
            b: ComplexValue::ZERO,
            c: ComplexValue::ZERO,
            d: ComplexValue::ONE,
        }
    }

    pub fn a(&self) -> ComplexValue {
        self.a
    }
    pub fn b(&self) -> ComplexValue {
        self.b
    }
    pub fn c(&self) -> ComplexValue {
        self.c
    }
    pub fn d(&self) -> ComplexValue {
        self.d
    }

    pub fn determinant(&self) -> ComplexValue {
        self.a * self.d - self.b * self.c
    }

    /// `self ∘ inner`, via the product of coefficient matrices.
    pub fn compose(&self, inner: &MobiusParams) -> Result<MobiusParams> {
        MobiusParams::new(
            self.a * inner.a + self.b * inner.c,
            self.a * inner.b + self.b * inner.d,
            self.c * inner.a + self.d * inner.c,
            self.c * inner.b + self.d * inner.d,
        )
    }

    /// All coefficients multiplied by `lambda`; the same map projectively.
    pub fn scaled(&self, lambda: ComplexValue) -> Result<MobiusParams> {
        MobiusParams::new(self.a * lambda, self.b * lambda, self.c * lambda, self.d * lambda)
    }

    /// The inverse map `(dw - b) / (-cw + a)`.
    pub fn inverse(&self) -> MobiusParams {
        MobiusParams { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }
}

/// Re and Im of `N / D` written out per component, each with its own
/// copy of `Re(D)² + Im(D)²`. Compiled for `f64` the two copies fold into one.
#[inline(always)]
fn quotient<T>(nr: T, ni: T, dr: T, di: T) -> (T, T)
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Div<Output = T>,
{
    let re = (nr * dr + ni * di) / (dr * dr + di * di);
    let im = (ni * dr - nr * di) / (dr * dr + di * di);
    (re, im)
}

#[inline]
fn check_pole(den: ComplexValue) -> Result<()> {
    // Cheap reject first; the exact modulus only matters close to the threshold.
    if den.norm_sqr() > 1e-20 {
        return Ok(());
    }
    let modulus = den.abs();
    if modulus <= EPS_SINGULAR {
        Err(WarpError::NearSingularity { modulus, threshold: EPS_SINGULAR })
    } else {
        Ok(())
    }
}

/// `Φ(z) = (az + b) / (cz + d)`.
#[inline]
pub fn mobius_map(z: ComplexValue, p: &MobiusParams) -> Result<ComplexValue> {
    let num = z.mul_add(p.a, p.b);
    let den = z.mul_add(p.c, p.d);
    check_pole(den)?;
    let (re, im) = quotient(num.re, num.im, den.re, den.im);
    Ok(ComplexValue::new(re, im))
}

/// A real scalar that counts every add, subtract, multiply and divide it takes part in.
#[derive(Clone, Copy)]
struct Counted<'a> {
    value: f64,
    ops: &'a Cell<u64>,
}

impl<'a> Counted<'a> {
    fn tick(self, value: f64) -> Self {
        self.ops.set(self.ops.get() + 1);
        Counted { value, ops: self.ops }
    }
}

macro_rules! counted_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl<'a> $tr for Counted<'a> {
            type Output = Counted<'a>;
            fn $m(self, rhs: Counted<'a>) -> Counted<'a> {
                self.tick(self.value $op rhs.value)
            }
        }
    };
}
counted_op!(Add, add, +);
counted_op!(Sub, sub, -);
counted_op!(Mul, mul, *);
counted_op!(Div, div, /);

/// Real FLOPs spent in the quotient step of one [`mobius_map`] call.
///
/// Runs the same decomposition kernel over a counting scalar. `az + b` and
/// `cz + d` are computed once and enter as shared operands; the count covers
/// the two component formulas, 7 operations each.
pub fn mobius_flop_trace(z: ComplexValue, p: &MobiusParams) -> Result<u64> {
    let num = z.mul_add(p.a, p.b);
    let den = z.mul_add(p.c, p.d);
    check_pole(den)?;
    let ops = Cell::new(0);
    let wrap = |value| Counted { value, ops: &ops };
    let (re, im) = quotient(wrap(num.re), wrap(num.im), wrap(den.re), wrap(den.im));
    debug_assert!(re.value.is_finite() && im.value.is_finite());
    Ok(ops.get())
}
