//! Unstructured magnitude pruning.

use crate::error::{Error, Result};
use crate::net::{InrModel, Real};

/// Which weights compete for the prune budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PruneScope {
    /// One ranking across every weight matrix; the ratio applies to the total.
    #[default]
    Global,
    /// Each weight matrix is pruned to the ratio on its own.
    PerLayer,
}

/// Prunes the smallest-magnitude weights until `round(total_ratio * weights)`
/// entries are zero, counting entries that are already pruned. Biases are
/// never pruned. Ties are broken by `(layer, row, col)`.
pub fn prune_l1<T: Real>(model: &InrModel<T>, total_ratio: f64) -> Result<InrModel<T>> {
    prune_l1_scoped(model, total_ratio, PruneScope::Global)
}

pub fn prune_l1_scoped<T: Real>(
    model: &InrModel<T>,
    total_ratio: f64,
    scope: PruneScope,
) -> Result<InrModel<T>> {
    if !(0.0..1.0).contains(&total_ratio) {
        return Err(Error::invalid(format!("prune ratio must be in [0, 1), got {total_ratio}")));
    }
    let mut out = model.clone();
    match scope {
        PruneScope::Global => {
            let mut entries: Vec<Candidate<T>> = Vec::with_capacity(model.weight_count());
            for (l, layer) in model.layers.iter().enumerate() {
                for (k, &w) in layer.w.iter().enumerate() {
                    entries.push(Candidate::new(l, k, w, model.mask[l][k]));
                }
            }
            let k = (total_ratio * entries.len() as f64).round() as usize;
            mask_smallest(&mut out, entries, k);
        }
        PruneScope::PerLayer => {
            for (l, layer) in model.layers.iter().enumerate() {
                let entries: Vec<Candidate<T>> = layer
                    .w
                    .iter()
                    .enumerate()
                    .map(|(k, &w)| Candidate::new(l, k, w, model.mask[l][k]))
                    .collect();
                let k = (total_ratio * entries.len() as f64).round() as usize;
                mask_smallest(&mut out, entries, k);
            }
        }
    }
    out.apply_mask();

    for (l, mask) in out.mask.iter().enumerate() {
        if !mask.iter().any(|&k| k) {
            return Err(Error::Structural(format!(
                "pruning to {total_ratio} would remove every weight of layer {l}"
            )));
        }
    }
    Ok(out)
}

struct Candidate<T> {
    layer: usize,
    index: usize,
    magnitude: T,
    pruned: bool,
}

impl<T: Real> Candidate<T> {
    fn new(layer: usize, index: usize, w: T, kept: bool) -> Self {
        Self {
            layer,
            index,
            magnitude: w.abs(),
            pruned: !kept,
        }
    }
}

fn mask_smallest<T: Real>(model: &mut InrModel<T>, mut entries: Vec<Candidate<T>>, k: usize) {
    // already-pruned entries rank first so they count toward k
    entries.sort_by(|a, b| {
        b.pruned
            .cmp(&a.pruned)
            .then(a.magnitude.partial_cmp(&b.magnitude).unwrap_or(std::cmp::Ordering::Equal))
            .then(a.layer.cmp(&b.layer))
            .then(a.index.cmp(&b.index))
    });
    for c in entries.into_iter().take(k) {
        model.mask[c.layer][c.index] = false;
    }
}
