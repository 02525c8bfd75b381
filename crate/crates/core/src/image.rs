//! RGB raster with normalized `[0, 1]` channels.

use std::path::Path;

use crate::error::{Error, Result};

/// Row-major `h x w x 3` image, channel values clamped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    h: usize,
    w: usize,
    data: Vec<f32>,
}

impl ImageBuffer {
    /// Builds an image from normalized values, clamping into `[0, 1]`.
    pub fn from_normalized(h: usize, w: usize, mut data: Vec<f32>) -> Result<Self> {
        check_dims(h, w, data.len())?;
        if data.iter().any(|v| v.is_nan()) {
            return Err(Error::Numeric("NaN pixel value".into()));
        }
        for v in data.iter_mut() {
            *v = clamp_unit(*v);
        }
        Ok(Self { h, w, data })
    }

    /// Builds an image from 8-bit RGB, dividing by 255.
    pub fn from_rgb8(h: usize, w: usize, rgb: &[u8]) -> Result<Self> {
        check_dims(h, w, rgb.len())?;
        let data = rgb.iter().map(|&v| v as f32 / 255.0).collect();
        Ok(Self { h, w, data })
    }

    /// Same value everywhere.
    pub fn constant(h: usize, w: usize, rgb: [f32; 3]) -> Result<Self> {
        let data = (0..h * w).flat_map(|_| rgb).collect();
        Self::from_normalized(h, w, data)
    }

    /// Builds an image by evaluating `f(x, y)` on normalized coordinates.
    pub fn from_fn(h: usize, w: usize, f: impl Fn(f64, f64) -> [f64; 3]) -> Result<Self> {
        let grid = crate::net::CoordinateGrid::new(h, w);
        let data = grid
            .coords()
            .iter()
            .flat_map(|&[x, y]| f(x, y).map(|v| v as f32))
            .collect();
        Self::from_normalized(h, w, data)
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn pixel_count(&self) -> usize {
        self.h * self.w
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn pixel(&self, r: usize, c: usize) -> [f32; 3] {
        let k = (r * self.w + c) * 3;
        [self.data[k], self.data[k + 1], self.data[k + 2]]
    }

    /// `round(v * 255)` with halves rounded away from zero.
    pub fn to_rgb8(&self) -> Vec<u8> {
        self.data.iter().map(|&v| to_u8(v)).collect()
    }

    /// The image as it would look after an 8-bit round trip.
    pub fn quantized_8bit(&self) -> Self {
        Self {
            h: self.h,
            w: self.w,
            data: self.data.iter().map(|&v| to_u8(v) as f32 / 255.0).collect(),
        }
    }

    /// Averages each 2x2 block; odd trailing rows/columns are dropped.
    pub fn downsample_2x2(&self) -> Result<Self> {
        let (h, w) = (self.h / 2, self.w / 2);
        check_dims(h, w, h * w * 3)?;
        let mut data = Vec::with_capacity(h * w * 3);
        for r in 0..h {
            for c in 0..w {
                for ch in 0..3 {
                    let at = |rr: usize, cc: usize| self.data[(rr * self.w + cc) * 3 + ch];
                    let s = at(2 * r, 2 * c)
                        + at(2 * r, 2 * c + 1)
                        + at(2 * r + 1, 2 * c)
                        + at(2 * r + 1, 2 * c + 1);
                    data.push(s / 4.0);
                }
            }
        }
        Ok(Self { h, w, data })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let img = image::open(path.as_ref())?.to_rgb8();
        let (w, h) = img.dimensions();
        Self::from_rgb8(h as usize, w as usize, img.as_raw())
    }

    /// Writes an 8-bit raster; the format follows the file extension (PNG recommended).
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let buf = image::RgbImage::from_raw(self.w as u32, self.h as u32, self.to_rgb8())
            .ok_or_else(|| Error::invalid("image buffer size mismatch"))?;
        buf.save(path.as_ref())?;
        Ok(())
    }
}

fn check_dims(h: usize, w: usize, len: usize) -> Result<()> {
    if h == 0 || w == 0 {
        return Err(Error::invalid(format!("image dimensions must be >= 1, got {h}x{w}")));
    }
    if len != h * w * 3 {
        return Err(Error::invalid(format!(
            "{h}x{w} RGB image needs {} values, got {len}",
            h * w * 3
        )));
    }
    Ok(())
}

/// Clamps into `[0, 1]`; also turns `-0.0` into `+0.0`.
pub(crate) fn clamp_unit(v: f32) -> f32 {
    v.clamp(0.0, 1.0) + 0.0
}

fn to_u8(v: f32) -> u8 {
    // f32::round rounds half away from zero
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}
