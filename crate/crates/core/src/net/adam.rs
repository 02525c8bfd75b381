use super::{InrModel, LayerWeights, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Adam moment state for one model.
#[derive(Debug, Clone)]
pub struct Adam<T> {
    cfg: AdamConfig,
    step: u64,
    m: Vec<LayerWeights<T>>,
    v: Vec<LayerWeights<T>>,
}

impl<T: Real> Adam<T> {
    pub fn new(model: &InrModel<T>) -> Self {
        Self::with_config(model, AdamConfig::default())
    }

    pub fn with_config(model: &InrModel<T>, cfg: AdamConfig) -> Self {
        Self {
            cfg,
            step: 0,
            m: model.zeros_like(),
            v: model.zeros_like(),
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    /// One bias-corrected Adam update. Pruned weights are pinned to zero
    /// afterwards regardless of their moment history.
    pub fn step(&mut self, model: &mut InrModel<T>, grads: &[LayerWeights<T>], lr: f64) {
        self.step += 1;
        let b1 = T::of(self.cfg.beta1);
        let b2 = T::of(self.cfg.beta2);
        let one = T::one();
        let eps = T::of(self.cfg.eps);
        let bc1 = one - b1.powi(self.step as i32);
        let bc2 = one - b2.powi(self.step as i32);
        let lr = T::of(lr);

        let update = |p: &mut [T], g: &[T], m: &mut [T], v: &mut [T]| {
            for k in 0..p.len() {
                let gk = g[k];
                m[k] = b1 * m[k] + (one - b1) * gk;
                v[k] = b2 * v[k] + (one - b2) * gk * gk;
                let m_hat = m[k] / bc1;
                let v_hat = v[k] / bc2;
                p[k] = p[k] - lr * m_hat / (v_hat.sqrt() + eps);
            }
        };

        for (l, layer) in model.layers.iter_mut().enumerate() {
            let (m, v) = (&mut self.m[l], &mut self.v[l]);
            update(&mut layer.w, &grads[l].w, &mut m.w, &mut v.w);
            update(&mut layer.b, &grads[l].b, &mut m.b, &mut v.b);
        }
        model.apply_mask();
    }
}

/// Cosine decay from `lr0` at step 0 to exactly 0 at step `total`.
pub fn cosine_lr(lr0: f64, step: usize, total: usize) -> f64 {
    if total == 0 || step >= total {
        return 0.0;
    }
    0.5 * lr0 * (1.0 + (std::f64::consts::PI * step as f64 / total as f64).cos())
}
