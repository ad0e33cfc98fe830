use serde::{Deserialize, Serialize};

use crate::complex::ComplexValue;
use crate::error::Result;
use crate::lcm::{log_conformal_map, LogParams};
use crate::mobius::{mobius_map, MobiusParams};

/// Either warp family, with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Transform {
    #[serde(rename = "lcm")]
    Log(LogParams),
    Mobius(MobiusParams),
}

impl Transform {
    pub fn name(&self) -> &'static str {
        match self {
            Transform::Log(_) => "lcm",
            Transform::Mobius(_) => "mobius",
        }
    }

    /// Checks what a whole-image warp needs beyond the parameter type's own
    /// invariant: log parameters must keep the branch cut off the domain.
    pub fn validate(&self) -> Result<()> {
        match self {
            Transform::Log(p) => p.check_domain(),
            Transform::Mobius(_) => Ok(()),
        }
    }

    #[inline]
    pub fn apply(&self, z: ComplexValue) -> Result<ComplexValue> {
        match self {
            Transform::Log(p) => log_conformal_map(z, p),
            Transform::Mobius(p) => mobius_map(z, p),
        }
    }

    /// Inverse map, used to build grids that invert the forward geometry.
    pub fn apply_inverse(&self, w: ComplexValue) -> Result<ComplexValue> {
        match self {
            Transform::Log(p) => Ok((w.exp() - p.c()) / p.k()),
            Transform::Mobius(p) => mobius_map(w, &p.inverse()),
        }
    }
}

impl From<LogParams> for Transform {
    fn from(p: LogParams) -> Self {
        Transform::Log(p)
    }
}

impl From<MobiusParams> for Transform {
    fn from(p: MobiusParams) -> Self {
        Transform::Mobius(p)
    }
}
