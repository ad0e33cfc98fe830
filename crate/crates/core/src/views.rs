//! Directional views built from one base warp.
//!
//! The base warp produces the left view. The other three are obtained by
//! re-orienting the image before the warp and undoing that orientation after
//! it, so every view shares the same transform parameters.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WarpError};
use crate::grid::{pad_image, warp, Padding, WarpMode};
use crate::image::ImageBuffer;
use crate::transform::Transform;

/// Counter-clockwise quarter turns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rotation {
    #[default]
    R0,
    R90,
    R180,
    R270,
}

impl Rotation {
    pub fn from_degrees(deg: i32) -> Result<Rotation> {
        match deg.rem_euclid(360) {
            0 => Ok(Rotation::R0),
            90 => Ok(Rotation::R90),
            180 => Ok(Rotation::R180),
            270 => Ok(Rotation::R270),
            _ => Err(WarpError::InvalidArgument(format!(
                "rotation must be a multiple of 90 degrees, got {deg}"
            ))),
        }
    }

    pub fn degrees(self) -> i32 {
        match self {
            Rotation::R0 => 0,
            Rotation::R90 => 90,
            Rotation::R180 => 180,
            Rotation::R270 => 270,
        }
    }

    /// `self` followed by `other`.
    pub fn then(self, other: Rotation) -> Rotation {
        Rotation::from_degrees(self.degrees() + other.degrees()).expect("quarter turns compose")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FlipAxis {
    /// Mirror left-right.
    Horizontal,
    /// Mirror top-bottom.
    Vertical,
}

/// Rotates counter-clockwise by a multiple of 90°. Lossless; 90° and 270°
/// swap width and height.
pub fn rotate(img: &ImageBuffer, rotation: Rotation) -> ImageBuffer {
    let (w, h) = (img.width(), img.height());
    let (ow, oh) = match rotation {
        Rotation::R0 | Rotation::R180 => (w, h),
        Rotation::R90 | Rotation::R270 => (h, w),
    };
    remap(img, ow, oh, |x, y| match rotation {
        Rotation::R0 => (x, y),
        Rotation::R90 => (w - 1 - y, x),
        Rotation::R180 => (w - 1 - x, h - 1 - y),
        Rotation::R270 => (y, h - 1 - x),
    })
}

pub fn flip(img: &ImageBuffer, axis: FlipAxis) -> ImageBuffer {
    let (w, h) = (img.width(), img.height());
    remap(img, w, h, |x, y| match axis {
        FlipAxis::Horizontal => (w - 1 - x, y),
        FlipAxis::Vertical => (x, h - 1 - y),
    })
}

/// Output pixel `(x, y)` copies source pixel `src_of(x, y)`.
fn remap(
    img: &ImageBuffer,
    ow: usize,
    oh: usize,
    src_of: impl Fn(usize, usize) -> (usize, usize),
) -> ImageBuffer {
    let ch = img.channels();
    let mut data = Vec::with_capacity(ow * oh * ch);
    for y in 0..oh {
        for x in 0..ow {
            let (sx, sy) = src_of(x, y);
            data.extend_from_slice(img.pixel(sx, sy));
        }
    }
    ImageBuffer::new(ow, oh, ch, data).expect("remap preserves the image invariants")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Left,
    Right,
    Top,
    Bottom,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Left, Direction::Right, Direction::Top, Direction::Bottom];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Left => "left",
            Direction::Right => "right",
            Direction::Top => "top",
            Direction::Bottom => "bottom",
        }
    }

    pub fn spec(self) -> ViewSpec {
        ViewSpec::canonical(self)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = WarpError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "left" => Ok(Direction::Left),
            "right" => Ok(Direction::Right),
            "top" => Ok(Direction::Top),
            "bottom" => Ok(Direction::Bottom),
            other => Err(WarpError::InvalidArgument(format!(
                "unknown view '{other}' (expected left, right, top or bottom)"
            ))),
        }
    }
}

/// One orientation step: rotate, then optionally flip.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    pub rotation: Rotation,
    pub flip: Option<FlipAxis>,
}

impl Orientation {
    pub const IDENTITY: Orientation = Orientation { rotation: Rotation::R0, flip: None };

    pub fn apply(&self, img: &ImageBuffer) -> ImageBuffer {
        let rotated = rotate(img, self.rotation);
        match self.flip {
            Some(axis) => flip(&rotated, axis),
            None => rotated,
        }
    }
}

/// How a direction is realized around the base warp.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewSpec {
    pub direction: Direction,
    pub pre: Orientation,
    pub post: Orientation,
}

impl ViewSpec {
    /// The four canonical views.
    ///
    /// | view   | pre             | post            |
    /// |--------|-----------------|-----------------|
    /// | left   | –               | –               |
    /// | right  | flip H          | flip H          |
    /// | top    | rot 90          | rot 270         |
    /// | bottom | rot 270, flip V | rot 270, flip V |
    ///
    /// Right is the horizontal-flip conjugate of left and bottom the
    /// vertical-flip conjugate of top, so those pairs are exact mirrors.
    pub fn canonical(direction: Direction) -> ViewSpec {
        let o = |deg, flip| Orientation { rotation: Rotation::from_degrees(deg).unwrap(), flip };
        let (pre, post) = match direction {
            Direction::Left => (Orientation::IDENTITY, Orientation::IDENTITY),
            Direction::Right => (o(0, Some(FlipAxis::Horizontal)), o(0, Some(FlipAxis::Horizontal))),
            Direction::Top => (o(90, None), o(270, None)),
            Direction::Bottom => (o(270, Some(FlipAxis::Vertical)), o(270, Some(FlipAxis::Vertical))),
        };
        ViewSpec { direction, pre, post }
    }

    /// Whether `post ∘ pre` is the identity orientation, checked on a probe
    /// image with distinct pixels.
    pub fn is_orientation_neutral(&self) -> bool {
        let probe =
            ImageBuffer::from_fn(3, 2, 1, |x, y, _| (1 + x + 3 * y) as f32 / 8.0).expect("probe image");
        self.post.apply(&self.pre.apply(&probe)) == probe
    }
}

/// Warp settings shared by every view.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ViewOptions {
    pub mode: WarpMode,
    pub padding: Padding,
    /// Per-channel fill, or one value for all channels; `None` means 0.
    pub fill: Option<Vec<f32>>,
}

impl ViewOptions {
    /// A one-element fill is broadcast to every channel.
    fn fill_for(&self, channels: usize) -> Vec<f32> {
        match &self.fill {
            None => vec![0.0; channels],
            Some(v) if v.len() == 1 => vec![v[0]; channels],
            Some(v) => v.clone(),
        }
    }
}

/// Pre-orient, warp, post-orient, pad.
pub fn synthesize_view(
    img: &ImageBuffer,
    spec: &ViewSpec,
    transform: &Transform,
    options: &ViewOptions,
) -> Result<ImageBuffer> {
    let fill = options.fill_for(img.channels());
    let oriented = spec.pre.apply(img);
    let warped = warp(&oriented, transform, options.mode, &fill)?;
    let restored = spec.post.apply(&warped);
    Ok(pad_image(&restored, options.padding.margin, options.padding.policy))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AllViews {
    pub left: ImageBuffer,
    pub right: ImageBuffer,
    pub top: ImageBuffer,
    pub bottom: ImageBuffer,
}

impl AllViews {
    pub fn get(&self, d: Direction) -> &ImageBuffer {
        match d {
            Direction::Left => &self.left,
            Direction::Right => &self.right,
            Direction::Top => &self.top,
            Direction::Bottom => &self.bottom,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Direction, &ImageBuffer)> {
        Direction::ALL.into_iter().map(move |d| (d, self.get(d)))
    }
}

pub fn synthesize_all_views(
    img: &ImageBuffer,
    transform: &Transform,
    options: &ViewOptions,
) -> Result<AllViews> {
    let view = |d: Direction| synthesize_view(img, &d.spec(), transform, options);
    Ok(AllViews {
        left: view(Direction::Left)?,
        right: view(Direction::Right)?,
        top: view(Direction::Top)?,
        bottom: view(Direction::Bottom)?,
    })
}
