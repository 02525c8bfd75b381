//! Sine-activated coordinate MLP.
//!
//! Hidden layers compute `sin(omega * (W x + b))`; the output layer is affine.
//! The network maps a normalized `(x, y)` pixel location to an RGB triple.
//!
//! Everything here is generic over [`Real`] so the same code runs in `f32`
//! (stored models, decoding) and `f64` (gradient checks).

mod adam;
mod arch;
mod grid;
mod model;
mod pass;

pub use adam::{cosine_lr, Adam, AdamConfig};
pub use arch::{param_count, Architecture, DEFAULT_OMEGA};
pub use grid::CoordinateGrid;
pub use model::{init, InrModel, LayerWeights};
pub use pass::{forward, loss_and_grad, loss_and_grad_with, Reduction, Workspace};
pub(crate) use pass::forward_rows;

use num_traits::{Float, FromPrimitive};
use std::fmt::Debug;

/// Floating point type the network can be evaluated in.
pub trait Real:
    Float + FromPrimitive + Default + Debug + Send + Sync + std::iter::Sum + 'static
{
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite conversion")
    }
}

impl Real for f32 {}
impl Real for f64 {}
