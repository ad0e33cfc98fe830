use crate::error::{Result, WarpError};

/// An interleaved `height × width × channels` raster with values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f32>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(WarpError::InvalidImage(format!(
                "dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if !matches!(channels, 1 | 3 | 4) {
            return Err(WarpError::InvalidImage(format!("channel count must be 1, 3 or 4, got {channels}")));
        }
        let expected = width * height * channels;
        if data.len() != expected {
            return Err(WarpError::InvalidImage(format!(
                "data length {} does not match {width}x{height}x{channels} = {expected}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(WarpError::InvalidImage(format!("value {bad} outside [0, 1]")));
        }
        Ok(ImageBuffer { width, height, channels, data })
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: f32) -> Result<Self> {
        Self::new(width, height, channels, vec![value; width * height * channels])
    }

    /// Builds an image from `f(x, y, channel)`; values are clamped into `[0, 1]`.
    pub fn from_fn(
        width: usize,
        height: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f32,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * channels);
        for y in 0..height {
            for x in 0..width {
                for ch in 0..channels {
                    let v = f(x, y, ch);
                    data.push(if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) });
                }
            }
        }
        Self::new(width, height, channels, data)
    }

    /// Converts 8-bit samples with `v / 255`.
    pub fn from_u8(width: usize, height: usize, channels: usize, bytes: &[u8]) -> Result<Self> {
        Self::new(width, height, channels, bytes.iter().map(|&b| b as f32 / 255.0).collect())
    }

    /// Encodes with `round(v · 255)`.
    pub fn to_u8(&self) -> Vec<u8> {
        self.data.iter().map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8).collect()
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> &[f32] {
        let i = (y * self.width + x) * self.channels;
        &self.data[i..i + self.channels]
    }

    #[inline]
    pub(crate) fn pixel_mut(&mut self, x: usize, y: usize) -> &mut [f32] {
        let i = (y * self.width + x) * self.channels;
        &mut self.data[i..i + self.channels]
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, channel: usize) -> f32 {
        self.data[(y * self.width + x) * self.channels + channel]
    }

    /// Mean absolute difference over all samples. Panics on a shape mismatch.
    pub fn mean_abs_diff(&self, other: &ImageBuffer) -> f64 {
        assert_eq!(
            (self.width, self.height, self.channels),
            (other.width, other.height, other.channels),
            "image shapes differ"
        );
        let sum: f64 = self.data.iter().zip(&other.data).map(|(a, b)| (*a as f64 - *b as f64).abs()).sum();
        sum / self.data.len() as f64
    }

    /// Crops a `width × height` window starting at `(x0, y0)`.
    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Result<ImageBuffer> {
        if x0 + width > self.width || y0 + height > self.height {
            return Err(WarpError::InvalidArgument(format!(
                "crop {width}x{height}+{x0}+{y0} exceeds {}x{}",
                self.width, self.height
            )));
        }
        let mut data = Vec::with_capacity(width * height * self.channels);
        for y in y0..y0 + height {
            let start = (y * self.width + x0) * self.channels;
            data.extend_from_slice(&self.data[start..start + width * self.channels]);
        }
        ImageBuffer::new(width, height, self.channels, data)
    }
}
