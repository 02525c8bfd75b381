use serde::Serialize;

use crate::error::{Error, Result};
use crate::net::InrModel;

/// Normalized weight distribution of one layer over uniform bins spanning
/// `[lo, hi]`. `density` sums to 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub density: Vec<f64>,
}

impl Histogram {
    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.density.len() as f64
    }

    pub fn occupied_bins(&self) -> usize {
        self.density.iter().filter(|&&d| d > 0.0).count()
    }
}

pub fn weight_histogram(model: &InrModel, layer: usize, bins: usize) -> Result<Histogram> {
    let w = &model
        .layers
        .get(layer)
        .ok_or_else(|| Error::invalid(format!("no layer {layer}")))?
        .w;
    if bins == 0 {
        return Err(Error::invalid("need at least one bin"));
    }
    let lo = w.iter().map(|&v| v as f64).fold(f64::INFINITY, f64::min);
    let hi = w.iter().map(|&v| v as f64).fold(f64::NEG_INFINITY, f64::max);
    let mut density = vec![0.0; bins];
    let n = w.len() as f64;
    for &v in w {
        let b = if hi > lo {
            (((v as f64 - lo) / (hi - lo)) * bins as f64).floor() as usize
        } else {
            0
        };
        density[b.min(bins - 1)] += 1.0 / n;
    }
    Ok(Histogram { lo, hi, density })
}

/// Moments of one layer's weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayerStats {
    pub mean: f64,
    pub std: f64,
    pub excess_kurtosis: f64,
}

impl LayerStats {
    pub fn of(model: &InrModel, layer: usize) -> Result<Self> {
        let w = &model
            .layers
            .get(layer)
            .ok_or_else(|| Error::invalid(format!("no layer {layer}")))?
            .w;
        let n = w.len() as f64;
        let mean = w.iter().map(|&v| v as f64).sum::<f64>() / n;
        let m2 = w.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / n;
        let m4 = w.iter().map(|&v| (v as f64 - mean).powi(4)).sum::<f64>() / n;
        let excess_kurtosis = if m2 > 0.0 { m4 / (m2 * m2) - 3.0 } else { 0.0 };
        Ok(Self {
            mean,
            std: m2.sqrt(),
            excess_kurtosis,
        })
    }
}
