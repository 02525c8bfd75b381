//! Rebuilds RGB images from models at any resolution.
//!
//! Work is split across images and across row tiles of each image. Every
//! pixel is evaluated independently with a fixed accumulation order, so the
//! output does not depend on the thread count.

use rayon::prelude::*;

use crate::compress::dequantize;
use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::net::{forward_rows, InrModel};

/// Rows evaluated per parallel task.
const TILE_ROWS: usize = 8;

/// Decodes `model` to an `out_h x out_w` image.
pub fn decode(model: &InrModel, out_h: usize, out_w: usize) -> Result<ImageBuffer> {
    if out_h == 0 || out_w == 0 {
        return Err(Error::invalid(format!("output size must be >= 1, got {out_h}x{out_w}")));
    }
    model.validate()?;
    let plain;
    let model = if model.is_quantized() {
        plain = dequantize(model)?;
        &plain
    } else {
        model
    };
    let raw = forward_raster(model, out_h, out_w)?;
    ImageBuffer::from_normalized(out_h, out_w, raw)
}

/// Decodes at the size the model was trained on.
pub fn decode_native(model: &InrModel) -> Result<ImageBuffer> {
    if model.source_h == 0 || model.source_w == 0 {
        return Err(Error::invalid("model does not record its source size"));
    }
    decode(model, model.source_h, model.source_w)
}

/// Raw (unclamped) network output over an `h x w` raster; the model must
/// already be dequantized.
pub(crate) fn forward_raster(model: &InrModel, h: usize, w: usize) -> Result<Vec<f32>> {
    let tiles: Vec<std::ops::Range<usize>> = (0..h)
        .step_by(TILE_ROWS)
        .map(|r| r..(r + TILE_ROWS).min(h))
        .collect();
    let parts: Vec<Vec<f32>> = tiles
        .into_par_iter()
        .map(|rows| forward_rows(model, h, w, rows))
        .collect::<Result<_>>()?;
    Ok(parts.concat())
}

/// Output size for a batch decode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputSize {
    /// Each model's own source size.
    #[default]
    Native,
    Fixed { h: usize, w: usize },
}

impl OutputSize {
    pub fn resolve(self, model: &InrModel) -> (usize, usize) {
        match self {
            OutputSize::Native => (model.source_h, model.source_w),
            OutputSize::Fixed { h, w } => (h, w),
        }
    }
}

/// Decodes every model, in order, using at most `parallelism` threads.
/// Failures carry the index of the offending model.
pub fn decode_batch(models: &[InrModel], size: OutputSize, parallelism: usize) -> Result<Vec<ImageBuffer>> {
    if models.is_empty() {
        return Err(Error::invalid("nothing to decode"));
    }
    with_pool(parallelism, || {
        models
            .par_iter()
            .enumerate()
            .map(|(i, m)| {
                let (h, w) = size.resolve(m);
                decode(m, h, w).map_err(|e| Error::at(i, e))
            })
            .collect()
    })
}

/// Runs `f` inside a dedicated rayon pool of `threads` workers (0 = rayon default).
pub(crate) fn with_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
