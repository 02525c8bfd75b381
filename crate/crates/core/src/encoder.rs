//! Per-image fitting: overfit a dense network, optionally prune 20% and
//! retrain, then prune to a PSNR-dependent total ratio and retrain again.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::archive::{ArchiveRecord, DatasetArchive};
use crate::compress::{prune_l1, PruneSchedule};
use crate::decoder::{decode_native, with_pool};
use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::metrics::psnr;
use crate::net::{
    cosine_lr, init, loss_and_grad_with, Adam, Architecture, CoordinateGrid, InrModel, LayerWeights,
    Reduction, Workspace,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EncodeConfig {
    pub arch: Architecture,
    pub round1_lr: f64,
    pub round1_steps: usize,
    pub retrain_lr: f64,
    pub retrain_steps: usize,
    pub iterative_prune_ratio: f64,
    /// Go straight from the dense fit to dynamic pruning (small images).
    pub skip_round2: bool,
    pub schedule: PruneSchedule,
    pub seed: u64,
    /// Record the training loss every this many steps.
    pub loss_sample_every: usize,
}

impl Default for EncodeConfig {
    fn default() -> Self {
        Self {
            arch: Architecture::cifar(),
            round1_lr: 5e-4,
            round1_steps: 5000,
            retrain_lr: 2e-4,
            retrain_steps: 10_000,
            iterative_prune_ratio: 0.20,
            skip_round2: false,
            schedule: PruneSchedule::cifar(),
            seed: 0,
            loss_sample_every: 50,
        }
    }
}

impl EncodeConfig {
    /// 32x32 recipe: 3x15 network, no iterative round, small-image schedule.
    pub fn cifar() -> Self {
        Self {
            skip_round2: true,
            ..Self::default()
        }
    }

    pub fn flowers() -> Self {
        Self {
            arch: Architecture::flowers(),
            schedule: PruneSchedule::large(),
            ..Self::default()
        }
    }

    pub fn imagenet() -> Self {
        Self {
            arch: Architecture::imagenet(),
            schedule: PruneSchedule::large(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.round1_lr) || !pos(self.retrain_lr) {
            return Err(Error::invalid("learning rates must be positive"));
        }
        if self.round1_steps == 0 || self.retrain_steps == 0 {
            return Err(Error::invalid("step counts must be positive"));
        }
        if !(0.0..1.0).contains(&self.iterative_prune_ratio) {
            return Err(Error::invalid("iterative prune ratio must be in [0, 1)"));
        }
        if self.loss_sample_every == 0 {
            return Err(Error::invalid("loss_sample_every must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Round {
    Overfit,
    Iterative,
    Dynamic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub round: Round,
    /// PSNR (normalized, native resolution) at the end of the round.
    pub psnr_db: f64,
    /// Pruned fraction of weight entries at the end of the round.
    pub prune_ratio: f64,
    /// Ratio the round asked for (0 for the dense fit).
    pub target_ratio: f64,
    /// PSNR right after masking, before retraining.
    pub psnr_after_masking: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSample {
    pub step: usize,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodeReport {
    pub rounds: Vec<RoundReport>,
    /// Pruned weights over all weight entries (biases are never pruned).
    pub final_prune_ratio: f64,
    /// MSE samples; `step` counts across rounds.
    pub loss_curve: Vec<LossSample>,
    pub wall_time: f64,
}

impl EncodeReport {
    pub fn psnr_after_round(&self) -> Vec<f64> {
        self.rounds.iter().map(|r| r.psnr_db).collect()
    }

    pub fn final_psnr(&self) -> f64 {
        self.rounds.last().map_or(f64::NAN, |r| r.psnr_db)
    }
}

/// Full-batch trainer for one image.
struct Fitter {
    input: Vec<f32>,
    targets: Vec<f32>,
    ws: Workspace<f32>,
    grads: Vec<LayerWeights<f32>>,
    step: usize,
    sample_every: usize,
}

impl Fitter {
    fn new(image: &ImageBuffer, model: &InrModel, sample_every: usize) -> Self {
        let grid = CoordinateGrid::new(image.height(), image.width());
        Self {
            input: grid.to_input(),
            targets: image.data().to_vec(),
            ws: Workspace::new(model.arch.dims(), grid.len()),
            grads: model.zeros_like(),
            step: 0,
            sample_every,
        }
    }

    /// `steps` Adam updates with cosine decay from `lr0`, fresh moments.
    fn train(&mut self, model: &mut InrModel, lr0: f64, steps: usize, curve: &mut Vec<LossSample>) -> Result<()> {
        let mut adam = Adam::new(model);
        for t in 0..steps {
            let loss = loss_and_grad_with(
                model,
                &self.input,
                &self.targets,
                Reduction::Mean,
                &mut self.ws,
                &mut self.grads,
            )? as f64;
            if !loss.is_finite() {
                return Err(Error::Diverged {
                    step: self.step,
                    loss,
                });
            }
            if t % self.sample_every == 0 {
                curve.push(LossSample {
                    step: self.step,
                    loss,
                });
            }
            adam.step(model, &self.grads, cosine_lr(lr0, t, steps));
            self.step += 1;
        }
        if model.layers.iter().flat_map(|l| l.w.iter().chain(&l.b)).any(|v| !v.is_finite()) {
            return Err(Error::Diverged {
                step: self.step,
                loss: f64::NAN,
            });
        }
        Ok(())
    }
}

fn native_psnr(model: &InrModel, image: &ImageBuffer) -> Result<f64> {
    Ok(psnr(&decode_native(model)?, image)?.psnr_db)
}

/// Dense overfit: `round1_steps` at `round1_lr` with cosine decay.
pub fn fit_round1(image: &ImageBuffer, cfg: &EncodeConfig) -> Result<(InrModel, EncodeReport)> {
    cfg.validate()?;
    let start = Instant::now();
    let mut model: InrModel = init::<f32>(&cfg.arch, cfg.seed).with_source(image.height(), image.width());
    let mut report = EncodeReport {
        rounds: Vec::new(),
        final_prune_ratio: 0.0,
        loss_curve: Vec::new(),
        wall_time: 0.0,
    };
    let mut fitter = Fitter::new(image, &model, cfg.loss_sample_every);
    fitter.train(&mut model, cfg.round1_lr, cfg.round1_steps, &mut report.loss_curve)?;
    report.rounds.push(RoundReport {
        round: Round::Overfit,
        psnr_db: native_psnr(&model, image)?,
        prune_ratio: model.prune_ratio(),
        target_ratio: 0.0,
        psnr_after_masking: None,
    });
    report.wall_time = start.elapsed().as_secs_f64();
    Ok((model, report))
}

/// All three rounds.
pub fn fit_full(image: &ImageBuffer, cfg: &EncodeConfig) -> Result<(InrModel, EncodeReport)> {
    let (model, report) = fit_round1(image, cfg)?;
    refine(model, image, cfg, report)
}

/// Rounds two and three on top of an already fitted dense model. `report`
/// is extended in place and returned.
pub fn refine(
    mut model: InrModel,
    image: &ImageBuffer,
    cfg: &EncodeConfig,
    mut report: EncodeReport,
) -> Result<(InrModel, EncodeReport)> {
    cfg.validate()?;
    let start = Instant::now();
    let mut fitter = Fitter::new(image, &model, cfg.loss_sample_every);
    fitter.step = report.loss_curve.last().map_or(0, |s| s.step + 1);
    let mut current = match report.rounds.last() {
        Some(r) => r.psnr_db,
        None => native_psnr(&model, image)?,
    };

    if !cfg.skip_round2 {
        model = prune_l1(&model, cfg.iterative_prune_ratio)?;
        let masked = native_psnr(&model, image)?;
        fitter.train(&mut model, cfg.retrain_lr, cfg.retrain_steps, &mut report.loss_curve)?;
        current = native_psnr(&model, image)?;
        report.rounds.push(RoundReport {
            round: Round::Iterative,
            psnr_db: current,
            prune_ratio: model.prune_ratio(),
            target_ratio: cfg.iterative_prune_ratio,
            psnr_after_masking: Some(masked),
        });
    }

    let (pruned, target) = dynamic_prune(&model, &cfg.schedule, current)?;
    model = pruned;
    let masked = native_psnr(&model, image)?;
    fitter.train(&mut model, cfg.retrain_lr, cfg.retrain_steps, &mut report.loss_curve)?;
    report.rounds.push(RoundReport {
        round: Round::Dynamic,
        psnr_db: native_psnr(&model, image)?,
        prune_ratio: model.prune_ratio(),
        target_ratio: target,
        psnr_after_masking: Some(masked),
    });
    report.final_prune_ratio = model.prune_ratio();
    report.wall_time += start.elapsed().as_secs_f64();
    Ok((model, report))
}

/// Prunes to the schedule's total ratio for an image currently at `psnr`
/// dB. Zeros already present count toward the total; a model that is
/// already sparser than the target is returned unchanged.
pub fn dynamic_prune(model: &InrModel, schedule: &PruneSchedule, psnr: f64) -> Result<(InrModel, f64)> {
    let target = schedule.ratio(psnr);
    let pruned = prune_l1(model, target)?;
    Ok((pruned, target))
}

/// What to do when one image fails to encode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FailurePolicy {
    #[default]
    FailFast,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedImage {
    pub index: usize,
    pub id: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub images: Vec<(String, EncodeReport)>,
    pub failures: Vec<FailedImage>,
    pub mean_psnr: f64,
    pub mean_prune_ratio: f64,
    pub wall_time: f64,
}

/// Seed for image `index` of a dataset encoded with `global`.
pub fn image_seed(global: u64, index: usize) -> u64 {
    splitmix64(global ^ splitmix64(index as u64))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fits every image independently (all three rounds) on up to `parallelism`
/// threads. Record order follows input order; each image's seed is derived
/// from `cfg.seed` and its index, so the archive does not depend on the
/// thread count.
pub fn encode_dataset<I>(
    images: I,
    cfg: &EncodeConfig,
    parallelism: usize,
    policy: FailurePolicy,
) -> Result<(DatasetArchive, DatasetReport)>
where
    I: IntoIterator<Item = (String, ImageBuffer)>,
{
    cfg.validate()?;
    let images: Vec<(String, ImageBuffer)> = images.into_iter().collect();
    if images.is_empty() {
        return Err(Error::invalid("no images to encode"));
    }
    let start = Instant::now();
    let results: Vec<Result<(InrModel, EncodeReport)>> = with_pool(parallelism, || {
        images
            .par_iter()
            .enumerate()
            .map(|(i, (_, img))| {
                let cfg = EncodeConfig {
                    seed: image_seed(cfg.seed, i),
                    ..cfg.clone()
                };
                fit_full(img, &cfg)
            })
            .collect()
    });

    let mut archive = DatasetArchive::new();
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (i, ((id, _), res)) in images.into_iter().zip(results).enumerate() {
        match res {
            Ok((model, rep)) => {
                archive.push(ArchiveRecord::new(id.clone(), model))?;
                reports.push((id, rep));
            }
            Err(e) => match policy {
                FailurePolicy::FailFast => return Err(Error::at(i, e)),
                FailurePolicy::Skip => {
                    log::warn!("image {i} ({id}) failed: {e}");
                    failures.push(FailedImage {
                        index: i,
                        id,
                        error: e.to_string(),
                    });
                }
            },
        }
    }
    let n = reports.len().max(1) as f64;
    let mean_psnr = reports.iter().map(|(_, r)| r.final_psnr()).sum::<f64>() / n;
    let mean_prune_ratio = reports.iter().map(|(_, r)| r.final_prune_ratio).sum::<f64>() / n;
    Ok((
        archive,
        DatasetReport {
            images: reports,
            failures,
            mean_psnr,
            mean_prune_ratio,
            wall_time: start.elapsed().as_secs_f64(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(steps: usize) -> EncodeConfig {
        EncodeConfig {
            round1_steps: steps,
            retrain_steps: steps,
            ..EncodeConfig::cifar()
        }
    }

    #[test]
    fn config_validation() {
        assert!(EncodeConfig::default().validate().is_ok());
        let bad = EncodeConfig {
            round1_lr: 0.0,
            ..EncodeConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = EncodeConfig {
            iterative_prune_ratio: 1.0,
            ..EncodeConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = EncodeConfig {
            retrain_steps: 0,
            ..EncodeConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn constant_image_fits_quickly() {
        let img = ImageBuffer::constant(16, 16, [0.5, 0.5, 0.5]).unwrap();
        let (_, rep) = fit_round1(&img, &quick(500)).unwrap();
        assert!(rep.final_psnr() >= 40.0, "psnr {}", rep.final_psnr());
        // best-so-far loss never increases, by construction of the samples
        let mut best = f64::INFINITY;
        for s in &rep.loss_curve {
            best = best.min(s.loss);
        }
        assert!(best < rep.loss_curve[0].loss);
    }

    #[test]
    fn skip_round2_prunes_once() {
        let img = ImageBuffer::from_fn(8, 8, |x, y| [x, y, 0.5]).unwrap();
        let (_, rep) = fit_full(&img, &quick(40)).unwrap();
        let rounds: Vec<Round> = rep.rounds.iter().map(|r| r.round).collect();
        assert_eq!(rounds, vec![Round::Overfit, Round::Dynamic]);

        let cfg = EncodeConfig {
            skip_round2: false,
            ..quick(40)
        };
        let (m, rep) = fit_full(&img, &cfg).unwrap();
        assert_eq!(rep.rounds.len(), 3);
        assert_eq!(rep.rounds[1].prune_ratio, 60.0 / 300.0);
        assert_eq!(rep.final_prune_ratio, m.prune_ratio());
    }

    #[test]
    fn dynamic_prune_uses_total_ratio() {
        let m: InrModel = init(&Architecture::cifar(), 5);
        let twenty = prune_l1(&m, 0.2).unwrap();
        let (p, target) = dynamic_prune(&twenty, &PruneSchedule::large(), 37.5).unwrap();
        assert!((target - 0.3).abs() < 1e-12);
        assert_eq!(p.pruned_count(), 90); // round(0.3 * 300)
        let (p, target) = dynamic_prune(&twenty, &PruneSchedule::cifar(), 25.0).unwrap();
        assert_eq!(target, 0.0);
        assert_eq!(p, twenty);
    }

    #[test]
    fn divergence_reports_step() {
        let img = ImageBuffer::from_fn(8, 8, |x, y| [x, y, 0.5]).unwrap();
        let cfg = EncodeConfig {
            round1_lr: 1e30,
            ..quick(50)
        };
        match fit_round1(&img, &cfg) {
            Err(Error::Diverged { step, .. }) => assert!(step <= 50),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn seeds_differ_per_image() {
        assert_ne!(image_seed(0, 0), image_seed(0, 1));
        assert_ne!(image_seed(0, 1), image_seed(1, 1));
        assert_eq!(image_seed(9, 3), image_seed(9, 3));
    }
}
