//! A small complex number type for image-plane coordinates.
//!
//! Pixel coordinates are mapped to `z = x + iy` before a transform is applied,
//! and the transforms only need a handful of operations, so this stays a plain
//! `Copy` pair of `f64` rather than a generic numeric type.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A point `re + i·im` on the complex plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl ComplexValue {
    pub const ZERO: ComplexValue = ComplexValue { re: 0.0, im: 0.0 };
    pub const ONE: ComplexValue = ComplexValue { re: 1.0, im: 0.0 };
    pub const I: ComplexValue = ComplexValue { re: 0.0, im: 1.0 };

    #[inline]
    pub const fn new(re: f64, im: f64) -> Self {
        ComplexValue { re, im }
    }

    #[inline]
    pub const fn real(re: f64) -> Self {
        ComplexValue { re, im: 0.0 }
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    /// Modulus `|z|`, computed without intermediate overflow.
    #[inline]
    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    #[inline]
    pub fn conj(self) -> Self {
        ComplexValue::new(self.re, -self.im)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Principal argument in `(-π, π]`.
    ///
    /// `atan2` returns `-π` for a negative real axis approached with `im = -0.0`;
    /// that value is folded onto `+π` so the half-open interval holds.
    #[inline]
    pub fn arg(self) -> f64 {
        let a = self.im.atan2(self.re);
        if a == -PI {
            PI
        } else {
            a
        }
    }

    /// Principal-branch logarithm `ln|z| + i·Arg z`.
    ///
    /// For `re > 0` the argument is `atan(im/re)`, which equals the principal
    /// value there and avoids the quadrant logic of `atan2`. The squared
    /// modulus is used for the real part unless it leaves the normal range.
    #[inline]
    pub fn ln(self) -> Self {
        let s = self.norm_sqr();
        let re = if s.is_normal() && s.is_finite() { 0.5 * s.ln() } else { self.abs().ln() };
        let im = if self.re > 0.0 { (self.im / self.re).atan() } else { self.arg() };
        ComplexValue::new(re, im)
    }

    #[inline]
    pub fn exp(self) -> Self {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        ComplexValue::new(m * c, m * s)
    }

    /// `self * a + b`, the affine step shared by both transforms.
    #[inline]
    pub fn mul_add(self, a: ComplexValue, b: ComplexValue) -> Self {
        ComplexValue::new(self.re * a.re - self.im * a.im + b.re, self.re * a.im + self.im * a.re + b.im)
    }
}

impl fmt::Display for ComplexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_sign_negative() {
            write!(f, "{}-{}i", self.re, -self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl From<f64> for ComplexValue {
    fn from(re: f64) -> Self {
        ComplexValue::real(re)
    }
}

impl From<(f64, f64)> for ComplexValue {
    fn from((re, im): (f64, f64)) -> Self {
        ComplexValue::new(re, im)
    }
}

impl From<[f64; 2]> for ComplexValue {
    fn from([re, im]: [f64; 2]) -> Self {
        ComplexValue::new(re, im)
    }
}

impl From<ComplexValue> for [f64; 2] {
    fn from(z: ComplexValue) -> Self {
        [z.re, z.im]
    }
}

impl Add for ComplexValue {
    type Output = ComplexValue;
    #[inline]
    fn add(self, rhs: ComplexValue) -> ComplexValue {
        ComplexValue::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for ComplexValue {
    type Output = ComplexValue;
    #[inline]
    fn sub(self, rhs: ComplexValue) -> ComplexValue {
        ComplexValue::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for ComplexValue {
    type Output = ComplexValue;
    #[inline]
    fn mul(self, rhs: ComplexValue) -> ComplexValue {
        ComplexValue::new(self.re * rhs.re - self.im * rhs.im, self.re * rhs.im + self.im * rhs.re)
    }
}

impl Mul<f64> for ComplexValue {
    type Output = ComplexValue;
    #[inline]
    fn mul(self, rhs: f64) -> ComplexValue {
        ComplexValue::new(self.re * rhs, self.im * rhs)
    }
}

impl Div for ComplexValue {
    type Output = ComplexValue;
    #[inline]
    fn div(self, rhs: ComplexValue) -> ComplexValue {
        let d = rhs.norm_sqr();
        ComplexValue::new(
            (self.re * rhs.re + self.im * rhs.im) / d,
            (self.im * rhs.re - self.re * rhs.im) / d,
        )
    }
}

impl Neg for ComplexValue {
    type Output = ComplexValue;
    #[inline]
    fn neg(self) -> ComplexValue {
        ComplexValue::new(-self.re, -self.im)
    }
}
