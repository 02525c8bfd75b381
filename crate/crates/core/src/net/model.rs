use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Architecture, Real};
use crate::compress::QuantInfo;
use crate::error::{Error, Result};

/// One weight matrix (`out x in`, row-major) and its bias vector.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerWeights<T> {
    pub out_dim: usize,
    pub in_dim: usize,
    pub w: Vec<T>,
    pub b: Vec<T>,
}

impl<T: Real> LayerWeights<T> {
    pub fn zeros(out_dim: usize, in_dim: usize) -> Self {
        Self {
            out_dim,
            in_dim,
            w: vec![T::zero(); out_dim * in_dim],
            b: vec![T::zero(); out_dim],
        }
    }

    pub fn weight(&self, row: usize, col: usize) -> T {
        self.w[row * self.in_dim + col]
    }

    pub fn fill_zero(&mut self) {
        self.w.iter_mut().for_each(|v| *v = T::zero());
        self.b.iter_mut().for_each(|v| *v = T::zero());
    }

    pub fn cast<U: Real>(&self) -> LayerWeights<U> {
        LayerWeights {
            out_dim: self.out_dim,
            in_dim: self.in_dim,
            w: self.w.iter().map(|v| U::of(v.as_f64())).collect(),
            b: self.b.iter().map(|v| U::of(v.as_f64())).collect(),
        }
    }
}

/// A trained (or training) image: network weights, pruning mask, optional
/// quantization codes and the size of the image it was fit to.
#[derive(Debug, Clone, PartialEq)]
pub struct InrModel<T = f32> {
    pub arch: Architecture,
    pub layers: Vec<LayerWeights<T>>,
    /// Per layer, one flag per weight entry; `false` means pruned.
    pub mask: Vec<Vec<bool>>,
    pub quant: Option<QuantInfo>,
    pub source_h: usize,
    pub source_w: usize,
}

/// Sine-network initialization: the first layer draws from `U(-1/in, 1/in)`,
/// later layers from `U(-sqrt(6/in)/omega, sqrt(6/in)/omega)`. Biases start at 0.
pub fn init<T: Real>(arch: &Architecture, seed: u64) -> InrModel<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = arch.omega();
    let layers = (0..arch.num_layers())
        .map(|l| {
            let (out_dim, in_dim) = arch.layer_shape(l);
            let bound = if l == 0 {
                1.0 / in_dim as f64
            } else {
                (6.0 / in_dim as f64).sqrt() / omega
            };
            let mut layer = LayerWeights::zeros(out_dim, in_dim);
            for v in layer.w.iter_mut() {
                *v = T::of(rng.gen_range(-bound..bound));
            }
            layer
        })
        .collect();
    InrModel::from_layers(arch.clone(), layers)
}

impl<T: Real> InrModel<T> {
    /// Wraps raw layers with an all-kept mask. Source size defaults to 0x0
    /// (unknown) until [`InrModel::with_source`] is called.
    pub fn from_layers(arch: Architecture, layers: Vec<LayerWeights<T>>) -> Self {
        let mask = layers.iter().map(|l| vec![true; l.w.len()]).collect();
        Self {
            arch,
            layers,
            mask,
            quant: None,
            source_h: 0,
            source_w: 0,
        }
    }

    pub fn with_source(mut self, h: usize, w: usize) -> Self {
        self.source_h = h;
        self.source_w = w;
        self
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn weight_count(&self) -> usize {
        self.layers.iter().map(|l| l.w.len()).sum()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    /// Number of pruned (mask == 0) weight entries.
    pub fn pruned_count(&self) -> usize {
        self.mask.iter().flatten().filter(|&&k| !k).count()
    }

    /// Kept weight entries (biases excluded).
    pub fn kept_count(&self) -> usize {
        self.weight_count() - self.pruned_count()
    }

    /// Fraction of weight entries that are pruned.
    pub fn prune_ratio(&self) -> f64 {
        let n = self.weight_count();
        if n == 0 {
            0.0
        } else {
            self.pruned_count() as f64 / n as f64
        }
    }

    /// Forces every masked weight to exactly zero.
    pub fn apply_mask(&mut self) {
        for (layer, mask) in self.layers.iter_mut().zip(&self.mask) {
            for (w, &keep) in layer.w.iter_mut().zip(mask) {
                if !keep {
                    *w = T::zero();
                }
            }
        }
    }

    pub fn is_quantized(&self) -> bool {
        self.quant.as_ref().is_some_and(|q| q.is_active())
    }

    /// Checks that layer shapes, mask shapes and quantization metadata agree
    /// with the architecture.
    pub fn validate(&self) -> Result<()> {
        if self.layers.len() != self.arch.num_layers() {
            return Err(Error::format(format!(
                "model has {} layers, architecture expects {}",
                self.layers.len(),
                self.arch.num_layers()
            )));
        }
        if self.mask.len() != self.layers.len() {
            return Err(Error::format("mask layer count mismatch"));
        }
        for (l, layer) in self.layers.iter().enumerate() {
            let (out_dim, in_dim) = self.arch.layer_shape(l);
            if layer.out_dim != out_dim
                || layer.in_dim != in_dim
                || layer.w.len() != out_dim * in_dim
                || layer.b.len() != out_dim
            {
                return Err(Error::format(format!("layer {l} shape does not match architecture")));
            }
            if self.mask[l].len() != layer.w.len() {
                return Err(Error::format(format!("layer {l} mask shape mismatch")));
            }
        }
        if let Some(q) = &self.quant {
            q.validate(&self.arch)?;
        }
        Ok(())
    }

    /// Same model in another float type (masks and metadata carried over).
    pub fn cast<U: Real>(&self) -> InrModel<U> {
        InrModel {
            arch: self.arch.clone(),
            layers: self.layers.iter().map(|l| l.cast()).collect(),
            mask: self.mask.clone(),
            quant: self.quant.clone(),
            source_h: self.source_h,
            source_w: self.source_w,
        }
    }

    /// Gradient-shaped zero buffers.
    pub fn zeros_like(&self) -> Vec<LayerWeights<T>> {
        self.layers
            .iter()
            .map(|l| LayerWeights::zeros(l.out_dim, l.in_dim))
            .collect()
    }
}
