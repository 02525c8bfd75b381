use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `ratio = slope * psnr + intercept` on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchedulePiece {
    pub lo: f64,
    pub hi: f64,
    pub slope: f64,
    pub intercept: f64,
}

impl SchedulePiece {
    fn eval(&self, psnr: f64) -> f64 {
        self.slope * psnr + self.intercept
    }
}

/// Piecewise-linear map from reconstruction PSNR to a total prune ratio.
///
/// Below the first piece the ratio is `below`; above the last it is `above`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneSchedule {
    pub name: String,
    pub below: f64,
    pub pieces: Vec<SchedulePiece>,
    pub above: f64,
}

impl PruneSchedule {
    /// Validates piece ordering and the ratio range. Continuity is not
    /// required for custom tables.
    pub fn new(name: impl Into<String>, below: f64, pieces: Vec<SchedulePiece>, above: f64) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::invalid("schedule needs at least one piece"));
        }
        for p in &pieces {
            if !(p.lo <= p.hi) {
                return Err(Error::invalid("schedule piece has lo > hi"));
            }
        }
        if pieces.windows(2).any(|w| w[0].hi > w[1].lo) {
            return Err(Error::invalid("schedule pieces overlap or are unsorted"));
        }
        let s = Self {
            name: name.into(),
            below,
            pieces,
            above,
        };
        let in_range = |r: f64| (0.0..1.0).contains(&r);
        let ends = s.pieces.iter().flat_map(|p| [p.eval(p.lo), p.eval(p.hi)]);
        if !in_range(below) || !in_range(above) || ends.into_iter().any(|r| !in_range(r)) {
            return Err(Error::invalid("schedule ratios must lie in [0, 1)"));
        }
        Ok(s)
    }

    /// Small images: 0 below 30 dB, `0.05 * PSNR - 1.5` up to 35 dB, then 0.25.
    pub fn cifar() -> Self {
        Self {
            name: "cifar".into(),
            below: 0.0,
            pieces: vec![SchedulePiece {
                lo: 30.0,
                hi: 35.0,
                slope: 0.05,
                intercept: -1.5,
            }],
            above: 0.25,
        }
    }

    /// Large images: 0.2 below 35 dB, `0.04 * PSNR - 1.2` up to 40 dB, then 0.4.
    pub fn large() -> Self {
        Self {
            name: "large".into(),
            below: 0.2,
            pieces: vec![SchedulePiece {
                lo: 35.0,
                hi: 40.0,
                slope: 0.04,
                intercept: -1.2,
            }],
            above: 0.4,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "cifar" => Ok(Self::cifar()),
            "large" | "flowers" | "imagenet" => Ok(Self::large()),
            other => Err(Error::invalid(format!("unknown prune schedule '{other}'"))),
        }
    }

    pub fn ratio(&self, psnr: f64) -> f64 {
        dynamic_ratio(self, psnr)
    }
}

/// Looks up the total prune ratio for an image reconstructed at `psnr` dB.
/// A NaN PSNR is treated as the worst case (the `below` value).
pub fn dynamic_ratio(schedule: &PruneSchedule, psnr: f64) -> f64 {
    let first = schedule.pieces.first().expect("non-empty schedule");
    let last = schedule.pieces.last().expect("non-empty schedule");
    if psnr.is_nan() || psnr < first.lo {
        return schedule.below;
    }
    if psnr > last.hi {
        return schedule.above;
    }
    let mut gap = schedule.below;
    for p in &schedule.pieces {
        if psnr < p.lo {
            return gap;
        }
        if psnr <= p.hi {
            return p.eval(psnr);
        }
        gap = p.eval(p.hi);
    }
    schedule.above
}
