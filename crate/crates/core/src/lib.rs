//! Images stored as small sine-activated networks.
//!
//! Each image is fitted by a coordinate network `(x, y) -> (r, g, b)`, pruned
//! by weight magnitude, optionally quantized, and packed into a `.rinr`
//! archive. Decoding evaluates the network on any pixel grid.

pub mod archive;
pub mod bench;
pub mod cli;
pub mod compress;
pub mod decoder;
pub mod encoder;
pub mod error;
pub mod image;
pub mod metrics;
pub mod nas;
pub mod net;

pub use archive::{ArchiveReader, ArchiveRecord, DatasetArchive, FloatStorage};
pub use compress::{dequantize, dynamic_ratio, prune_l1, quantize, PruneSchedule, QuantMode};
pub use decoder::{decode, decode_batch, OutputSize};
pub use encoder::{encode_dataset, fit_full, EncodeConfig, EncodeReport};
pub use error::{Error, Result};
pub use image::ImageBuffer;
pub use metrics::{psnr, PsnrReport};
pub use net::{forward, init, Architecture, CoordinateGrid, InrModel};
