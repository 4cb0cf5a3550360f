use std::collections::BTreeMap;

use super::graph::Gradients;
use super::nn::ParamSet;
use super::tensor::Tensor;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamWConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
}

impl Default for AdamWConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 0.01,
        }
    }
}

/// Moment estimates for AdamW with decoupled weight decay.
#[derive(Clone, Debug)]
pub struct AdamWState {
    pub config: AdamWConfig,
    moments: BTreeMap<String, (Tensor, Tensor)>,
    step: u64,
}

impl AdamWState {
    pub fn new(config: AdamWConfig, params: &ParamSet) -> Self {
        let moments = params
            .iter()
            .map(|(name, p)| {
                let shape = p.value.shape();
                (name.clone(), (Tensor::zeros(shape), Tensor::zeros(shape)))
            })
            .collect();
        Self {
            config,
            moments,
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn moments(&self, name: &str) -> Option<(&Tensor, &Tensor)> {
        self.moments.get(name).map(|(m, v)| (m, v))
    }
}

/// One AdamW update with bias correction. Parameters flagged no-decay skip
/// the decoupled `lr·wd·p` shrinkage.
pub fn adamw_step(params: &mut ParamSet, grads: &Gradients, state: &mut AdamWState) -> Result<()> {
    let cfg = state.config;
    if !(cfg.lr > 0.0) {
        return Err(Error::Contract(format!("learning rate must be positive, got {}", cfg.lr)));
    }
    for (name, p) in params.iter() {
        let g = grads
            .get(name)
            .ok_or_else(|| Error::Contract(format!("no gradient for parameter {name}")))?;
        p.value.expect_same_shape(g)?;
        if !g.all_finite() {
            return Err(Error::Numeric(format!("non-finite gradient for parameter {name}")));
        }
        if !state.moments.contains_key(name) {
            return Err(Error::Contract(format!("optimizer has no state for {name}")));
        }
    }

    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - cfg.beta1.powi(t);
    let bc2 = 1.0 - cfg.beta2.powi(t);

    for (name, p) in params.iter_mut() {
        let g = &grads[name];
        let (m, v) = state.moments.get_mut(name).expect("checked above");
        let decay = if p.decay { cfg.lr * cfg.weight_decay } else { 0.0 };
        let values = p.value.data_mut();
        for (((w, &gi), mi), vi) in values
            .iter_mut()
            .zip(g.data())
            .zip(m.data_mut())
            .zip(v.data_mut())
        {
            *w -= decay * *w;
            *mi = cfg.beta1 * *mi + (1.0 - cfg.beta1) * gi;
            *vi = cfg.beta2 * *vi + (1.0 - cfg.beta2) * gi * gi;
            let m_hat = *mi / bc1;
            let v_hat = *vi / bc2;
            *w -= cfg.lr * m_hat / (v_hat.sqrt() + cfg.eps);
        }
    }
    Ok(())
}
