//! Decode throughput: load an archive once, then decode every record in
//! batches while timing each stage.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::archive::DatasetArchive;
use crate::compress::dequantize;
use crate::decoder::{forward_raster, with_pool, OutputSize};
use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::net::InrModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchConfig {
    /// Models decoded per parallel batch.
    pub batch: usize,
    pub jobs: usize,
    pub size: OutputSize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            batch: 1,
            jobs: 1,
            size: OutputSize::Native,
        }
    }
}

/// Seconds spent in each stage.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct StageTimes {
    pub load: f64,
    pub dequantize: f64,
    pub forward: f64,
    pub convert: f64,
}

impl StageTimes {
    pub fn total(&self) -> f64 {
        self.load + self.dequantize + self.forward + self.convert
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub images: usize,
    pub pixels: usize,
    pub batch: usize,
    pub jobs: usize,
    pub stages: StageTimes,
    /// Decode throughput, excluding the load stage.
    pub images_per_sec: f64,
    pub pixels_per_sec: f64,
    /// CRC32 over all decoded 8-bit pixels, in record order.
    pub output_digest: u32,
}

/// Benchmarks the archive at `path`, including the time to read and parse it.
pub fn bench(path: impl AsRef<Path>, cfg: &BenchConfig) -> Result<BenchReport> {
    let t = Instant::now();
    let archive = DatasetArchive::load(path)?;
    let load = t.elapsed().as_secs_f64();
    let mut report = bench_archive(&archive, cfg)?;
    report.stages.load = load;
    Ok(report)
}

/// Benchmarks an archive already in memory.
pub fn bench_archive(archive: &DatasetArchive, cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.batch == 0 || cfg.jobs == 0 {
        return Err(Error::invalid("batch and jobs must be positive"));
    }
    if archive.is_empty() {
        return Err(Error::invalid("archive has no records"));
    }
    let mut stages = StageTimes::default();
    let mut digest = crc32fast::Hasher::new();
    let mut pixels = 0;
    with_pool(cfg.jobs, || -> Result<()> {
        for chunk in archive.records().chunks(cfg.batch) {
            let t = Instant::now();
            let plain: Vec<InrModel> = chunk
                .par_iter()
                .map(|r| {
                    r.model.validate()?;
                    dequantize(&r.model)
                })
                .collect::<Result<_>>()?;
            stages.dequantize += t.elapsed().as_secs_f64();

            let t = Instant::now();
            let sizes: Vec<(usize, usize)> = plain.iter().map(|m| cfg.size.resolve(m)).collect();
            if sizes.iter().any(|&(h, w)| h == 0 || w == 0) {
                return Err(Error::invalid("output size must be >= 1"));
            }
            let raw: Vec<Vec<f32>> = plain
                .par_iter()
                .zip(&sizes)
                .map(|(m, &(h, w))| forward_raster(m, h, w))
                .collect::<Result<_>>()?;
            stages.forward += t.elapsed().as_secs_f64();

            let t = Instant::now();
            let bytes: Vec<Vec<u8>> = raw
                .into_par_iter()
                .zip(&sizes)
                .map(|(v, &(h, w))| Ok(ImageBuffer::from_normalized(h, w, v)?.to_rgb8()))
                .collect::<Result<_>>()?;
            stages.convert += t.elapsed().as_secs_f64();

            for (b, (h, w)) in bytes.iter().zip(&sizes) {
                digest.update(b);
                pixels += h * w;
            }
        }
        Ok(())
    })?;
    let decode_time = (stages.total() - stages.load).max(f64::MIN_POSITIVE);
    Ok(BenchReport {
        images: archive.len(),
        pixels,
        batch: cfg.batch,
        jobs: cfg.jobs,
        stages,
        images_per_sec: archive.len() as f64 / decode_time,
        pixels_per_sec: pixels as f64 / decode_time,
        output_digest: digest.finalize(),
    })
}
