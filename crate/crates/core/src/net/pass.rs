//! Forward evaluation and analytic backpropagation.
//!
//! All reductions run in a fixed order (pixels, then output rows, then input
//! columns) so results are bit-identical however the caller partitions work
//! across threads.

use super::{CoordinateGrid, InrModel, LayerWeights, Real};
use crate::error::{Error, Result};

/// How the squared error is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    /// Sum over all pixels and channels divided by `3n` (MSE).
    #[default]
    Mean,
    /// Plain sum of squared errors.
    Sum,
}

/// Reusable activation buffers for one batch size.
#[derive(Debug, Clone)]
pub struct Workspace<T> {
    n: usize,
    /// `acts[l]` is the `n x dims[l]` input of layer `l`; the last entry is the output.
    acts: Vec<Vec<T>>,
    /// `omega * cos(omega * z)` for every hidden unit, indexed like `acts[1..]`.
    dacts: Vec<Vec<T>>,
    delta: Vec<T>,
    delta_prev: Vec<T>,
}

impl<T: Real> Workspace<T> {
    pub fn new(dims: &[usize], n: usize) -> Self {
        let acts = dims.iter().map(|&d| vec![T::zero(); n * d]).collect();
        let dacts = dims[1..dims.len() - 1]
            .iter()
            .map(|&d| vec![T::zero(); n * d])
            .collect();
        let max = dims.iter().copied().max().unwrap_or(0);
        Self {
            n,
            acts,
            dacts,
            delta: vec![T::zero(); n * max],
            delta_prev: vec![T::zero(); n * max],
        }
    }

    pub fn batch_size(&self) -> usize {
        self.n
    }

    /// Output of the most recent forward pass (`n x 3`).
    pub fn output(&self) -> &[T] {
        self.acts.last().unwrap()
    }

    fn fits(&self, dims: &[usize], n: usize) -> bool {
        self.n == n
            && self.acts.len() == dims.len()
            && self.acts.iter().zip(dims).all(|(a, &d)| a.len() == n * d)
    }
}

fn check_shapes<T: Real>(model: &InrModel<T>, input: &[T]) -> Result<usize> {
    let dims = model.arch.dims();
    if !input.len().is_multiple_of(dims[0]) {
        return Err(Error::invalid(format!(
            "input length {} is not a multiple of {}",
            input.len(),
            dims[0]
        )));
    }
    if model.layers.len() != dims.len() - 1 {
        return Err(Error::invalid("layer count does not match architecture"));
    }
    for (l, layer) in model.layers.iter().enumerate() {
        if layer.in_dim != dims[l]
            || layer.out_dim != dims[l + 1]
            || layer.w.len() != layer.in_dim * layer.out_dim
            || layer.b.len() != layer.out_dim
        {
            return Err(Error::invalid(format!("layer {l} shape does not match architecture")));
        }
    }
    Ok(input.len() / dims[0])
}

/// Runs the network over a flat `n x 2` input, filling `ws`.
pub(crate) fn forward_into<T: Real>(
    model: &InrModel<T>,
    input: &[T],
    ws: &mut Workspace<T>,
) -> Result<()> {
    let n = check_shapes(model, input)?;
    let dims = model.arch.dims();
    if !ws.fits(dims, n) {
        *ws = Workspace::new(dims, n);
    }
    ws.acts[0].copy_from_slice(input);
    let omega = T::of(model.arch.omega());
    let last = model.layers.len() - 1;

    for (l, layer) in model.layers.iter().enumerate() {
        let (head, tail) = ws.acts.split_at_mut(l + 1);
        let x = &head[l];
        let y = &mut tail[0];
        let (in_dim, out_dim) = (layer.in_dim, layer.out_dim);
        if l == last {
            for p in 0..n {
                let xp = &x[p * in_dim..(p + 1) * in_dim];
                let yp = &mut y[p * out_dim..(p + 1) * out_dim];
                for o in 0..out_dim {
                    let row = &layer.w[o * in_dim..(o + 1) * in_dim];
                    let mut acc = layer.b[o];
                    for i in 0..in_dim {
                        acc = acc + row[i] * xp[i];
                    }
                    yp[o] = acc;
                }
            }
        } else {
            let d = &mut ws.dacts[l];
            for p in 0..n {
                let xp = &x[p * in_dim..(p + 1) * in_dim];
                for o in 0..out_dim {
                    let row = &layer.w[o * in_dim..(o + 1) * in_dim];
                    let mut acc = layer.b[o];
                    for i in 0..in_dim {
                        acc = acc + row[i] * xp[i];
                    }
                    let (s, c) = (omega * acc).sin_cos();
                    y[p * out_dim + o] = s;
                    d[p * out_dim + o] = omega * c;
                }
            }
        }
    }
    Ok(())
}

/// Evaluates the network at every grid location. Returns `n x 3` raw
/// (unclamped) predictions, row-major.
pub fn forward<T: Real>(model: &InrModel<T>, grid: &CoordinateGrid) -> Result<Vec<T>> {
    let input = grid.to_input::<T>();
    let mut ws = Workspace::new(model.arch.dims(), grid.len());
    forward_into(model, &input, &mut ws)?;
    Ok(ws.output().to_vec())
}

/// Raw predictions for rows `rows` of an `h x w` raster.
pub(crate) fn forward_rows<T: Real>(
    model: &InrModel<T>,
    h: usize,
    w: usize,
    rows: std::ops::Range<usize>,
) -> Result<Vec<T>> {
    let grid = CoordinateGrid::rows(h, w, rows);
    forward(model, &grid)
}

/// Mean squared error and its gradient with respect to every weight and
/// bias. Gradients of pruned weights are exactly zero.
pub fn loss_and_grad<T: Real>(
    model: &InrModel<T>,
    grid: &CoordinateGrid,
    targets: &[T],
) -> Result<(T, Vec<LayerWeights<T>>)> {
    let input = grid.to_input::<T>();
    let mut ws = Workspace::new(model.arch.dims(), grid.len());
    let mut grads = model.zeros_like();
    let loss = loss_and_grad_with(model, &input, targets, Reduction::Mean, &mut ws, &mut grads)?;
    Ok((loss, grads))
}

/// Allocation-free variant of [`loss_and_grad`]; `grads` is overwritten.
pub fn loss_and_grad_with<T: Real>(
    model: &InrModel<T>,
    input: &[T],
    targets: &[T],
    reduction: Reduction,
    ws: &mut Workspace<T>,
    grads: &mut [LayerWeights<T>],
) -> Result<T> {
    if input.iter().chain(targets).any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite coordinates or targets".into()));
    }
    forward_into(model, input, ws)?;
    let n = ws.n;
    let out_dim = *model.arch.dims().last().unwrap();
    if targets.len() != n * out_dim {
        return Err(Error::invalid(format!(
            "expected {} target values, got {}",
            n * out_dim,
            targets.len()
        )));
    }
    if grads.len() != model.layers.len() {
        return Err(Error::invalid("gradient buffer layer count mismatch"));
    }

    let scale = match reduction {
        Reduction::Mean => T::one() / T::of((n * out_dim) as f64),
        Reduction::Sum => T::one(),
    };
    let two = T::of(2.0);
    let mut sum = T::zero();
    {
        let out = ws.acts.last().unwrap();
        for (k, (&o, &t)) in out.iter().zip(targets).enumerate() {
            let r = o - t;
            sum = sum + r * r;
            ws.delta[k] = two * r * scale;
        }
    }

    for l in (0..model.layers.len()).rev() {
        let layer = &model.layers[l];
        let (in_dim, out_dim) = (layer.in_dim, layer.out_dim);
        let g = &mut grads[l];
        g.fill_zero();
        let x = &ws.acts[l];
        for p in 0..n {
            let dp = &ws.delta[p * out_dim..(p + 1) * out_dim];
            let xp = &x[p * in_dim..(p + 1) * in_dim];
            for o in 0..out_dim {
                let d = dp[o];
                g.b[o] = g.b[o] + d;
                let row = &mut g.w[o * in_dim..(o + 1) * in_dim];
                for i in 0..in_dim {
                    row[i] = row[i] + d * xp[i];
                }
            }
        }
        for (gw, &keep) in g.w.iter_mut().zip(&model.mask[l]) {
            if !keep {
                *gw = T::zero();
            }
        }
        if l > 0 {
            let dact = &ws.dacts[l - 1];
            for p in 0..n {
                for i in 0..in_dim {
                    let mut acc = T::zero();
                    for o in 0..out_dim {
                        acc = acc + layer.w[o * in_dim + i] * ws.delta[p * out_dim + o];
                    }
                    ws.delta_prev[p * in_dim + i] = acc * dact[p * in_dim + i];
                }
            }
            std::mem::swap(&mut ws.delta, &mut ws.delta_prev);
        }
    }

    Ok(sum * scale)
}
