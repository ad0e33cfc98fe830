//! Perspective-distortion synthesis with the log conformal map
//! `Ψ(z) = log(kz + c)` and a Mobius baseline `Φ(z) = (az + b)/(cz + d)`.
//!
//! The crate covers the pointwise transforms and their numerical checks
//! ([`lcm`], [`mobius`]), sampling grids and warp kernels ([`grid`]), the four
//! directional views and batch augmentation ([`views`], [`augment`]), image
//! I/O ([`io`]) and the FLOP/timing cost model ([`bench`]).

pub mod augment;
pub mod bench;
pub mod complex;
pub mod error;
pub mod grid;
pub mod image;
pub mod io;
pub mod lcm;
pub mod mobius;
pub mod transform;
pub mod views;

pub use complex::ComplexValue;
pub use error::{Result, WarpError};
pub use grid::{
    build_grid, build_inverse_grid, normalize_coords, pad_image, warp, warp_bilinear, warp_scatter,
    PadPolicy, Padding, SamplingGrid, WarpMode,
};
pub use image::ImageBuffer;
pub use lcm::{
    conformality_report, estimate_jacobian, log_conformal_derivative, log_conformal_map,
    nonlinearity_witness, ConformalityReport, JacobianEstimate, LogParams,
};
pub use mobius::{mobius_flop_trace, mobius_map, MobiusParams};
pub use transform::Transform;
pub use views::{
    flip, rotate, synthesize_all_views, synthesize_view, AllViews, Direction, FlipAxis, Rotation,
    ViewOptions, ViewSpec,
};
