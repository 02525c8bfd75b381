use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Activation frequency used throughout the published recipe.
pub const DEFAULT_OMEGA: f64 = 30.0;

/// Shape of a coordinate MLP: layer widths from input (2) to output (3), plus
/// the sine frequency.
///
/// "N layers" always means N weight matrices, so a 3-layer network with 15
/// hidden units is `[2, 15, 15, 3]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Architecture {
    dims: Vec<usize>,
    omega: f64,
}

impl Architecture {
    pub fn new(dims: Vec<usize>, omega: f64) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::invalid("architecture needs at least input and output widths"));
        }
        if dims[0] != 2 {
            return Err(Error::invalid(format!("input width must be 2, got {}", dims[0])));
        }
        if *dims.last().unwrap() != 3 {
            return Err(Error::invalid(format!(
                "output width must be 3, got {}",
                dims.last().unwrap()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::invalid("every layer width must be >= 1"));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::invalid(format!("omega must be positive, got {omega}")));
        }
        Ok(Self { dims, omega })
    }

    /// `layers` weight matrices with `hidden` units in every hidden layer.
    pub fn uniform(layers: usize, hidden: usize, omega: f64) -> Result<Self> {
        if layers == 0 {
            return Err(Error::invalid("need at least one layer"));
        }
        let mut dims = vec![2];
        dims.extend(std::iter::repeat_n(hidden, layers - 1));
        dims.push(3);
        Self::new(dims, omega)
    }

    /// 3 layers, 15 hidden (32x32 images).
    pub fn cifar() -> Self {
        Self::uniform(3, 15, DEFAULT_OMEGA).unwrap()
    }

    /// 10 layers, 32 hidden.
    pub fn flowers() -> Self {
        Self::uniform(10, 32, DEFAULT_OMEGA).unwrap()
    }

    /// 10 layers, 40 hidden.
    pub fn imagenet() -> Self {
        Self::uniform(10, 40, DEFAULT_OMEGA).unwrap()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        Self::new(self.dims.clone(), omega)
    }

    /// Number of weight matrices.
    pub fn num_layers(&self) -> usize {
        self.dims.len() - 1
    }

    /// `(out, in)` for weight matrix `layer`.
    pub fn layer_shape(&self, layer: usize) -> (usize, usize) {
        (self.dims[layer + 1], self.dims[layer])
    }

    pub fn hidden_dims(&self) -> &[usize] {
        &self.dims[1..self.dims.len() - 1]
    }

    pub fn param_count(&self) -> usize {
        param_count(self)
    }

    /// Weight entries only (biases excluded); the denominator of every prune ratio.
    pub fn weight_count(&self) -> usize {
        self.dims.windows(2).map(|p| p[0] * p[1]).sum()
    }

    /// Dense f32 footprint of weights and biases.
    pub fn dense_bytes(&self) -> usize {
        self.param_count() * 4
    }

    pub fn is_hidden_layer(&self, layer: usize) -> bool {
        layer > 0 && layer + 1 < self.num_layers()
    }

    pub fn label(&self) -> String {
        self.dims
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

/// Sum over weight matrices of `in * out + out`.
pub fn param_count(arch: &Architecture) -> usize {
    arch.dims.windows(2).map(|p| p[0] * p[1] + p[1]).sum()
}
