//! Weight pruning and layer-wise quantization.

mod histogram;
mod prune;
mod quant;
mod schedule;

pub use histogram::{weight_histogram, Histogram, LayerStats};
pub use prune::{prune_l1, prune_l1_scoped, PruneScope};
pub use quant::{dequantize, quantize, AffineLayer, QuantInfo, QuantMode};
pub use schedule::{dynamic_ratio, PruneSchedule, SchedulePiece};
