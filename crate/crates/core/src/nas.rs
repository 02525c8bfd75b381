//! Architecture enumeration under a byte budget and hyperparameter sweeps.
//!
//! Budgets count dense f32 weights and biases (`param_count * 4`), before
//! any pruning or quantization. Depth is the number of weight layers.

use std::io::Write;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoder::with_pool;
use crate::encoder::{fit_round1, image_seed, EncodeConfig};
use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::net::{Architecture, DEFAULT_OMEGA};

/// Cells whose PSNR falls below this on any image are flagged as failed.
pub const FAILURE_PSNR_DB: f64 = 15.0;

/// Depth beyond which fits are known to lose quality.
pub const DEPTH_WARN: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    #[default]
    Uniform,
    /// Widths ramp up toward the middle hidden layer and back down.
    Tapered,
}

impl std::str::FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Shape::Uniform),
            "tapered" => Ok(Shape::Tapered),
            other => Err(Error::invalid(format!("unknown shape '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumerateOptions {
    pub depths: RangeInclusive<usize>,
    pub max_width: usize,
    /// Width of the outermost hidden layers of a tapered network.
    pub taper_start: usize,
    pub omega: f64,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        Self {
            depths: 2..=12,
            max_width: 512,
            taper_start: 8,
            omega: DEFAULT_OMEGA,
        }
    }
}

fn params(hidden: &[usize]) -> usize {
    let mut prev = 2;
    let mut total = 0;
    for &d in hidden.iter().chain(std::iter::once(&3)) {
        total += (prev + 1) * d;
        prev = d;
    }
    total
}

fn fits(hidden: &[usize], budget: usize) -> bool {
    params(hidden) * 4 <= budget
}

fn taper(k: usize, start: usize, step: usize) -> Vec<usize> {
    (0..k).map(|i| start + step * i.min(k - 1 - i)).collect()
}

fn uniform_width(k: usize, budget: usize, max_width: usize) -> Option<usize> {
    // params is monotone in the width, so binary search the largest fit
    let (mut lo, mut hi) = (0, max_width);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if fits(&vec![mid; k], budget) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    (lo >= 1).then_some(lo)
}

/// Hidden widths for one depth, or `None` if nothing fits.
fn widths_for(depth: usize, shape: Shape, budget: usize, opts: &EnumerateOptions) -> Option<Vec<usize>> {
    let k = depth - 1;
    let uniform = uniform_width(k, budget, opts.max_width)?;
    if shape == Shape::Uniform || k <= 2 {
        return Some(vec![uniform; k]);
    }
    let start = opts.taper_start.min(uniform);
    let mut step = 0;
    while start + (step + 1) * ((k - 1) / 2) <= opts.max_width && fits(&taper(k, start, step + 1), budget) {
        step += 1;
    }
    Some(taper(k, start, step))
}

/// One architecture per depth in `opts.depths` that fits `budget_bytes`.
pub fn enumerate(budget_bytes: usize, shape: Shape, opts: &EnumerateOptions) -> Result<Vec<Architecture>> {
    if opts.max_width == 0 {
        return Err(Error::invalid("max_width must be positive"));
    }
    if *opts.depths.start() < 2 {
        return Err(Error::invalid("depth counts weight layers and must be >= 2"));
    }
    let mut out = Vec::new();
    for depth in opts.depths.clone() {
        let Some(hidden) = widths_for(depth, shape, budget_bytes, opts) else {
            continue;
        };
        if depth > DEPTH_WARN {
            log::warn!("depth {depth} exceeds {DEPTH_WARN} layers; expect lower PSNR");
        }
        let mut dims = Vec::with_capacity(depth + 1);
        dims.push(2);
        dims.extend(hidden);
        dims.push(3);
        out.push(Architecture::new(dims, opts.omega)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepAxes {
    pub archs: Vec<Architecture>,
    pub omegas: Vec<f64>,
    pub lrs: Vec<f64>,
    pub steps: Vec<usize>,
}

impl SweepAxes {
    fn cells(&self) -> Vec<(Architecture, f64, f64, usize)> {
        let mut out = Vec::new();
        for a in &self.archs {
            for &o in &self.omegas {
                for &lr in &self.lrs {
                    for &s in &self.steps {
                        out.push((a.clone(), o, lr, s));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub arch: String,
    pub params: usize,
    pub omega: f64,
    pub lr: f64,
    pub steps: usize,
    /// Mean over images that did not diverge; NaN when all diverged.
    pub mean_psnr: f64,
    pub min_psnr: f64,
    pub diverged: usize,
    pub failed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub cells: Vec<SweepCell>,
    pub best_omega: Option<f64>,
}

impl SweepTable {
    fn new(cells: Vec<SweepCell>) -> Self {
        let mut t = Self { cells, best_omega: None };
        t.best_omega = t.compute_best_omega();
        t
    }

    /// Omega with the highest mean PSNR averaged over every other axis.
    /// Cells without a finite mean are skipped.
    fn compute_best_omega(&self) -> Option<f64> {
        let mut omegas: Vec<f64> = self.cells.iter().map(|c| c.omega).collect();
        omegas.sort_by(f64::total_cmp);
        omegas.dedup();
        omegas
            .into_iter()
            .filter_map(|o| {
                let v: Vec<f64> = self
                    .cells
                    .iter()
                    .filter(|c| c.omega == o && c.mean_psnr.is_finite())
                    .map(|c| c.mean_psnr)
                    .collect();
                (!v.is_empty()).then(|| (o, v.iter().sum::<f64>() / v.len() as f64))
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(o, _)| o)
    }

    pub fn failed(&self) -> impl Iterator<Item = &SweepCell> {
        self.cells.iter().filter(|c| c.failed)
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        for c in &self.cells {
            w.serialize(c).map_err(|e| Error::invalid(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// One JSON object per cell, then a summary line with `best_omega`.
    pub fn write_json_lines<W: Write>(&self, mut sink: W) -> Result<()> {
        let io = |e: serde_json::Error| Error::Io(e.into());
        for c in &self.cells {
            writeln!(sink, "{}", serde_json::to_string(c).map_err(io)?)?;
        }
        let summary = serde_json::json!({ "best_omega": self.best_omega, "cells": self.cells.len() });
        writeln!(sink, "{summary}")?;
        Ok(())
    }
}

/// Dense fits (round one only) for every combination of the axes. Every
/// cell uses the same per-image seeds.
pub fn sweep(images: &[ImageBuffer], axes: &SweepAxes, seed: u64, parallelism: usize) -> Result<SweepTable> {
    if images.is_empty() {
        return Err(Error::invalid("sweep needs at least one image"));
    }
    let cells = axes.cells();
    if cells.is_empty() {
        return Err(Error::invalid("every sweep axis needs at least one value"));
    }
    let rows: Vec<Result<SweepCell>> = with_pool(parallelism, || {
        cells
            .par_iter()
            .map(|(arch, omega, lr, steps)| run_cell(images, arch, *omega, *lr, *steps, seed))
            .collect()
    });
    Ok(SweepTable::new(rows.into_iter().collect::<Result<_>>()?))
}

fn run_cell(
    images: &[ImageBuffer],
    arch: &Architecture,
    omega: f64,
    lr: f64,
    steps: usize,
    seed: u64,
) -> Result<SweepCell> {
    let arch = arch.with_omega(omega)?;
    let mut psnrs = Vec::new();
    let mut diverged = 0;
    for (i, img) in images.iter().enumerate() {
        let cfg = EncodeConfig {
            arch: arch.clone(),
            round1_lr: lr,
            round1_steps: steps,
            seed: image_seed(seed, i),
            loss_sample_every: steps.max(1),
            ..EncodeConfig::default()
        };
        match fit_round1(img, &cfg) {
            Ok((_, report)) => psnrs.push(report.final_psnr()),
            Err(e) if e.is_numeric() => diverged += 1,
            Err(e) => return Err(e),
        }
    }
    let finite = psnrs.iter().filter(|p| p.is_finite()).count();
    let mean_psnr = if psnrs.is_empty() {
        f64::NAN
    } else {
        psnrs.iter().sum::<f64>() / psnrs.len() as f64
    };
    let min_psnr = psnrs.iter().copied().fold(f64::NAN, f64::min);
    Ok(SweepCell {
        arch: arch.label(),
        params: arch.param_count(),
        omega,
        lr,
        steps,
        mean_psnr,
        min_psnr,
        diverged,
        failed: diverged > 0 || finite < psnrs.len() || psnrs.iter().any(|&p| p < FAILURE_PSNR_DB),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_width_is_maximal() {
        let opts = EnumerateOptions::default();
        for budget in [1_000, 13_500, 29_000] {
            for a in enumerate(budget, Shape::Uniform, &opts).unwrap() {
                assert!(a.param_count() * 4 <= budget);
                let k = a.hidden_dims().len();
                let width = a.hidden_dims()[0];
                assert!(width == opts.max_width || !fits(&vec![width + 1; k], budget));
            }
        }
    }

    #[test]
    fn huge_budget_caps_width() {
        let opts = EnumerateOptions {
            depths: 3..=3,
            max_width: 64,
            ..Default::default()
        };
        let a = enumerate(usize::MAX / 8, Shape::Uniform, &opts).unwrap();
        assert_eq!(a[0].dims(), &[2, 64, 64, 3]);
    }

    #[test]
    fn tapered_is_symmetric_ramp() {
        let opts = EnumerateOptions {
            depths: 6..=6,
            ..Default::default()
        };
        let a = &enumerate(13_500, Shape::Tapered, &opts).unwrap()[0];
        let h = a.hidden_dims();
        assert_eq!(h.len(), 5);
        let rev: Vec<_> = h.iter().rev().copied().collect();
        assert_eq!(h, rev.as_slice());
        assert!(h[0] <= h[1] && h[1] <= h[2]);
        assert!(h[2] > h[0]);
        assert!(a.param_count() * 4 <= 13_500);
        let step = h[1] - h[0];
        assert!(!fits(&taper(5, h[0], step + 1), 13_500));
    }

    #[test]
    fn tiny_budget_yields_nothing() {
        assert!(enumerate(8, Shape::Uniform, &EnumerateOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn best_omega_picks_highest_mean() {
        let cell = |omega, mean_psnr| SweepCell {
            arch: "2-4-3".into(),
            params: 27,
            omega,
            lr: 1e-3,
            steps: 1,
            mean_psnr,
            min_psnr: mean_psnr,
            diverged: 0,
            failed: false,
        };
        let t = SweepTable::new(vec![cell(10.0, 20.0), cell(30.0, 31.0), cell(90.0, f64::NAN)]);
        assert_eq!(t.best_omega, Some(30.0));
        let mut csv = Vec::new();
        t.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 4);
    }
}
