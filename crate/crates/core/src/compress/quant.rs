//! Layer-wise affine post-training quantization.
//!
//! Only hidden layers are quantized; the first and last weight matrices and
//! all biases stay in full precision. Each quantized layer carries its own
//! `scale` and `zero_point`, and stores unsigned codes with
//! `value = scale * (code - zero_point)`. Pruned entries are recovered from
//! the mask, never from codes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{Architecture, InrModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantMode {
    #[default]
    None,
    Affine8,
    Affine16,
}

impl QuantMode {
    pub fn bits(self) -> Option<u8> {
        match self {
            QuantMode::None => None,
            QuantMode::Affine8 => Some(8),
            QuantMode::Affine16 => Some(16),
        }
    }

    pub fn from_bits(bits: u8) -> Result<Self> {
        match bits {
            8 => Ok(QuantMode::Affine8),
            16 => Ok(QuantMode::Affine16),
            other => Err(Error::invalid(format!("unsupported quantization width {other}"))),
        }
    }
}

/// Codes and affine parameters of one quantized weight matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineLayer {
    pub bits: u8,
    pub scale: f32,
    pub zero_point: i32,
    /// One code per weight entry; entries under a zero mask hold 0.
    pub codes: Vec<u16>,
}

impl AffineLayer {
    pub fn qmax(&self) -> u32 {
        (1u32 << self.bits) - 1
    }

    pub fn dequant(&self, code: u16) -> f32 {
        (self.scale as f64 * (code as i64 - self.zero_point as i64) as f64) as f32
    }

    /// Quantizes the kept entries of `w`.
    fn fit(w: &[f32], mask: &[bool], bits: u8) -> Result<Self> {
        let qmax = (1u32 << bits) - 1;
        let kept: Vec<f64> = w
            .iter()
            .zip(mask)
            .filter(|(_, &k)| k)
            .map(|(&v, _)| v as f64)
            .collect();
        if kept.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite weight in quantized layer".into()));
        }
        let min = kept.iter().copied().fold(f64::INFINITY, f64::min);
        let max = kept.iter().copied().fold(f64::NEG_INFINITY, f64::max);

        if kept.is_empty() || max == min {
            // Degenerate range: encode the constant c as |c| * (code - zp)
            // with code, zp in {0, 1} so it round-trips exactly.
            let c = if kept.is_empty() { 0.0 } else { min as f32 };
            let (scale, zero_point, code) = if c == 0.0 {
                (1.0, 0, 0)
            } else if c > 0.0 {
                (c, 0, 1)
            } else {
                (-c, 1, 0)
            };
            let codes = mask.iter().map(|&k| if k { code } else { 0 }).collect();
            return Ok(Self {
                bits,
                scale,
                zero_point,
                codes,
            });
        }

        let exact = (max - min) / qmax as f64;
        let mut scale = exact as f32;
        if (scale as f64) < exact {
            // round up so the top of the code range still reaches `max`
            scale = scale.next_up();
        }
        let s = scale as f64;
        let zero_point = (-min / s).round() as i32;
        let codes = w
            .iter()
            .zip(mask)
            .map(|(&v, &k)| {
                if !k {
                    return 0;
                }
                let q = (v as f64 / s).round() as i64 + zero_point as i64;
                q.clamp(0, qmax as i64) as u16
            })
            .collect();
        Ok(Self {
            bits,
            scale,
            zero_point,
            codes,
        })
    }
}

/// Quantization metadata of a model, one slot per weight matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantInfo {
    pub mode: QuantMode,
    pub layers: Vec<Option<AffineLayer>>,
}

impl QuantInfo {
    pub fn is_active(&self) -> bool {
        self.mode != QuantMode::None
    }

    pub fn quantized_layers(&self) -> Vec<usize> {
        self.layers
            .iter()
            .enumerate()
            .filter_map(|(l, q)| q.as_ref().map(|_| l))
            .collect()
    }

    pub(crate) fn validate(&self, arch: &Architecture) -> Result<()> {
        if self.layers.len() != arch.num_layers() {
            return Err(Error::format("quantization info layer count mismatch"));
        }
        let bits = self.mode.bits();
        for (l, q) in self.layers.iter().enumerate() {
            let Some(q) = q else { continue };
            if !arch.is_hidden_layer(l) {
                return Err(Error::format(format!("layer {l} is not hidden but is quantized")));
            }
            if Some(q.bits) != bits {
                return Err(Error::format(format!("layer {l} code width disagrees with mode")));
            }
            let (out_dim, in_dim) = arch.layer_shape(l);
            if q.codes.len() != out_dim * in_dim {
                return Err(Error::format(format!("layer {l} has the wrong number of codes")));
            }
            if q.codes.iter().any(|&c| c as u32 > q.qmax()) {
                return Err(Error::format(format!("layer {l} code out of range")));
            }
            if !(q.scale.is_finite() && q.scale > 0.0) {
                return Err(Error::format(format!("layer {l} has an invalid scale")));
            }
        }
        Ok(())
    }
}

/// Quantizes every hidden layer's kept weights to `mode`. The returned model
/// carries the codes and holds the dequantized values in its weights, so it
/// can be evaluated directly.
pub fn quantize(model: &InrModel, mode: QuantMode) -> Result<InrModel> {
    if model.is_quantized() {
        return Err(Error::invalid("model is already quantized"));
    }
    let Some(bits) = mode.bits() else {
        return Ok(model.clone());
    };
    let mut out = model.clone();
    let mut layers = Vec::with_capacity(model.num_layers());
    for l in 0..model.num_layers() {
        if !model.arch.is_hidden_layer(l) {
            layers.push(None);
            continue;
        }
        let q = AffineLayer::fit(&model.layers[l].w, &model.mask[l], bits)?;
        for (k, w) in out.layers[l].w.iter_mut().enumerate() {
            *w = if model.mask[l][k] { q.dequant(q.codes[k]) } else { 0.0 };
        }
        layers.push(Some(q));
    }
    out.quant = Some(QuantInfo { mode, layers });
    Ok(out)
}

/// Rebuilds full-precision weights from the stored codes. Unquantized models
/// are returned unchanged.
pub fn dequantize(model: &InrModel) -> Result<InrModel> {
    let mut out = model.clone();
    let Some(info) = model.quant.as_ref().filter(|q| q.is_active()) else {
        out.quant = None;
        return Ok(out);
    };
    info.validate(&model.arch)?;
    if info.quantized_layers().is_empty() && model.arch.num_layers() > 2 {
        return Err(Error::format("quantized model carries no layer codes"));
    }
    for (l, q) in info.layers.iter().enumerate() {
        let Some(q) = q else { continue };
        let mask = &model.mask[l];
        for (k, w) in out.layers[l].w.iter_mut().enumerate() {
            *w = if mask[k] { q.dequant(q.codes[k]) } else { 0.0 };
        }
    }
    out.quant = None;
    Ok(out)
}
