//! Image file I/O: 8-bit PNG (gray, gray+alpha, RGB, RGBA, palette) and binary PPM (P6).
//!
//! Samples become `v / 255` on decode and `round(v · 255)` on encode.

use std::io::Cursor;
use std::path::Path;

use crate::error::{Result, WarpError};
use crate::image::ImageBuffer;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    Ppm,
}

impl ImageFormat {
    /// Sniffs the format from the leading magic bytes.
    pub fn detect(bytes: &[u8]) -> Option<ImageFormat> {
        if bytes.starts_with(b"\x89PNG\r\n\x1a\n") {
            Some(ImageFormat::Png)
        } else if bytes.starts_with(b"P6") {
            Some(ImageFormat::Ppm)
        } else {
            None
        }
    }

    pub fn from_path(path: &Path) -> Option<ImageFormat> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "png" => Some(ImageFormat::Png),
            "ppm" => Some(ImageFormat::Ppm),
            _ => None,
        }
    }
}

fn png_err(e: impl std::fmt::Display) -> WarpError {
    WarpError::Format(format!("png: {e}"))
}

pub fn decode_png(bytes: &[u8]) -> Result<ImageBuffer> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND | png::Transformations::STRIP_16);
    let mut reader = decoder.read_info().map_err(png_err)?;
    let size = reader.output_buffer_size().ok_or_else(|| png_err("image too large"))?;
    let mut buf = vec![0u8; size];
    let info = reader.next_frame(&mut buf).map_err(png_err)?;
    buf.truncate(info.buffer_size());
    if info.bit_depth != png::BitDepth::Eight {
        return Err(png_err(format!("unsupported bit depth {:?}", info.bit_depth)));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    let (channels, bytes) = match info.color_type {
        png::ColorType::Grayscale => (1, buf),
        png::ColorType::Rgb => (3, buf),
        png::ColorType::Rgba => (4, buf),
        png::ColorType::GrayscaleAlpha => {
            let rgba = buf.chunks_exact(2).flat_map(|p| [p[0], p[0], p[0], p[1]]).collect();
            (4, rgba)
        }
        png::ColorType::Indexed => return Err(png_err("palette was not expanded")),
    };
    ImageBuffer::from_u8(w, h, channels, &bytes)
}

pub fn encode_png(img: &ImageBuffer) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, img.width() as u32, img.height() as u32);
        encoder.set_color(match img.channels() {
            1 => png::ColorType::Grayscale,
            3 => png::ColorType::Rgb,
            _ => png::ColorType::Rgba,
        });
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder.write_header().map_err(png_err)?;
        writer.write_image_data(&img.to_u8()).map_err(png_err)?;
        writer.finish().map_err(png_err)?;
    }
    Ok(out)
}

fn ppm_err(msg: impl Into<String>) -> WarpError {
    WarpError::Format(format!("ppm: {}", msg.into()))
}

/// Reads the next whitespace-delimited header token, skipping `#` comments.
fn ppm_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
        *pos += 1;
    }
    if start == *pos {
        return Err(ppm_err("truncated header"));
    }
    Ok(&bytes[start..*pos])
}

fn ppm_number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<usize> {
    let tok = ppm_token(bytes, pos)?;
    std::str::from_utf8(tok).ok().and_then(|s| s.parse().ok()).ok_or_else(|| ppm_err(format!("bad {what}")))
}

/// Decodes binary PPM with a maxval of at most 255.
pub fn decode_ppm(bytes: &[u8]) -> Result<ImageBuffer> {
    let mut pos = 0;
    if ppm_token(bytes, &mut pos)? != b"P6" {
        return Err(ppm_err("missing P6 magic"));
    }
    let width = ppm_number(bytes, &mut pos, "width")?;
    let height = ppm_number(bytes, &mut pos, "height")?;
    let maxval = ppm_number(bytes, &mut pos, "maxval")?;
    if !(1..=255).contains(&maxval) {
        return Err(ppm_err(format!("maxval {maxval} not in 1..=255")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(ppm_err("missing raster"));
    }
    pos += 1;
    let n = width
        .checked_mul(height)
        .and_then(|p| p.checked_mul(3))
        .ok_or_else(|| ppm_err("dimensions overflow"))?;
    let raster = bytes
        .get(pos..pos + n)
        .ok_or_else(|| ppm_err(format!("expected {n} raster bytes, found {}", bytes.len() - pos)))?;
    if let Some(v) = raster.iter().find(|&&v| v as usize > maxval) {
        return Err(ppm_err(format!("sample {v} exceeds maxval {maxval}")));
    }
    let scale = maxval as f32;
    let data = raster.iter().map(|&v| v as f32 / scale).collect();
    ImageBuffer::new(width, height, 3, data)
}

/// Encodes as `P6\n<w> <h>\n255\n`. Gray is replicated into RGB; alpha is dropped.
pub fn encode_ppm(img: &ImageBuffer) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    let bytes = img.to_u8();
    match img.channels() {
        1 => out.extend(bytes.iter().flat_map(|&g| [g, g, g])),
        3 => out.extend_from_slice(&bytes),
        _ => out.extend(bytes.chunks_exact(4).flat_map(|p| [p[0], p[1], p[2]])),
    }
    out
}

pub fn decode_image(bytes: &[u8]) -> Result<ImageBuffer> {
    match ImageFormat::detect(bytes) {
        Some(ImageFormat::Png) => decode_png(bytes),
        Some(ImageFormat::Ppm) => decode_ppm(bytes),
        None => Err(WarpError::Format("neither PNG nor binary PPM (P6)".into())),
    }
}

pub fn encode_image(img: &ImageBuffer, format: ImageFormat) -> Result<Vec<u8>> {
    match format {
        ImageFormat::Png => encode_png(img),
        ImageFormat::Ppm => Ok(encode_ppm(img)),
    }
}

pub fn read_image(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| WarpError::io(path, e))?;
    decode_image(&bytes).map_err(|e| match e {
        WarpError::Format(msg) => WarpError::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Writes `img` in the format named by the path's extension.
pub fn write_image(path: impl AsRef<Path>, img: &ImageBuffer) -> Result<()> {
    let path = path.as_ref();
    let format = ImageFormat::from_path(path).ok_or_else(|| {
        WarpError::Format(format!("{}: output extension must be .png or .ppm", path.display()))
    })?;
    let bytes = encode_image(img, format)?;
    std::fs::write(path, bytes).map_err(|e| WarpError::io(path, e))
}
