//! Three-term objective `L_R + α·L_KLD + η·L_T` and its weight schedule.

use serde::{Deserialize, Serialize};

use crate::diffcore::{log_sigmoid, Graph, NodeId, Tensor};
use crate::error::{Error, Result};

/// Loss weighting. α and η are always derived from `gamma` and `m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    pub gamma: f64,
    pub m: usize,
    /// α/10 during the first epoch.
    pub warmup: bool,
    /// η/2 during the last epoch.
    pub final_halving: bool,
    /// Adds the `(1 − T)·ln(1 − sigmoid(μ))` term to the topic loss.
    pub symmetric_topic: bool,
    /// Train only the encoder on the topic loss (no reconstruction, no KLD).
    pub encoder_only: bool,
}

impl LossConfig {
    pub fn new(gamma: f64, m: usize) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Contract(format!("gamma must be positive, got {gamma}")));
        }
        if m == 0 {
            return Err(Error::Contract("M must be positive".into()));
        }
        Ok(Self {
            gamma,
            m,
            warmup: true,
            final_halving: true,
            symmetric_topic: false,
            encoder_only: false,
        })
    }

    /// Same weights with both schedule adjustments off.
    pub fn without_schedule(mut self) -> Self {
        self.warmup = false;
        self.final_halving = false;
        self
    }

    pub fn alpha(&self) -> f64 {
        0.1 * self.gamma.sqrt()
    }

    pub fn eta(&self) -> f64 {
        0.1 * self.gamma * self.m as f64
    }

    /// `(α, η)` in effect during `epoch` of `total_epochs`.
    pub fn effective(&self, epoch: usize, total_epochs: usize) -> (f64, f64) {
        let mut alpha = self.alpha();
        let mut eta = self.eta();
        if self.warmup && epoch == 0 {
            alpha /= 10.0;
        }
        if self.final_halving && total_epochs > 0 && epoch == total_epochs - 1 {
            eta /= 2.0;
        }
        (alpha, eta)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub total: f64,
    pub recon: f64,
    pub kld: f64,
    pub topic: f64,
    pub alpha: f64,
    pub eta: f64,
}

/// Per-sample KL divergence of `N(μ, σ²)` from `N(0, I)`, averaged over rows.
pub fn kld(mu: &Tensor, logvar: &Tensor) -> Result<f64> {
    mu.expect_same_shape(logvar)?;
    let total: f64 = mu
        .data()
        .iter()
        .zip(logvar.data())
        .map(|(&m, &lv)| 0.5 * (m * m + lv.exp() - lv - 1.0))
        .sum();
    Ok(total / mu.rows() as f64)
}

pub fn topic_loss(mu: &Tensor, t: &Tensor, symmetric: bool) -> Result<f64> {
    mu.expect_same_shape(t)?;
    check_guidance(t)?;
    let total: f64 = mu
        .data()
        .iter()
        .zip(t.data())
        .map(|(&m, &ti)| {
            let pos = ti * log_sigmoid(m);
            if symmetric {
                pos + (1.0 - ti) * log_sigmoid(-m)
            } else {
                pos
            }
        })
        .sum();
    Ok(-total / mu.numel() as f64)
}

fn check_guidance(t: &Tensor) -> Result<()> {
    if let Some(v) = t.data().iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Contract(format!("guidance value {v} outside [0, 1]")));
    }
    Ok(())
}

/// Evaluates the objective on given tensors. `e_hat` is ignored in
/// encoder-only mode.
#[allow(clippy::too_many_arguments)]
pub fn loss(
    e: &Tensor,
    e_hat: &Tensor,
    mu: &Tensor,
    logvar: &Tensor,
    t: &Tensor,
    cfg: &LossConfig,
    epoch: usize,
    total_epochs: usize,
) -> Result<LossBreakdown> {
    if total_epochs > 0 && epoch >= total_epochs {
        return Err(Error::Contract(format!("epoch {epoch} outside [0, {total_epochs})")));
    }
    let (alpha, eta) = cfg.effective(epoch, total_epochs);
    let topic = topic_loss(mu, t, cfg.symmetric_topic)?;
    if cfg.encoder_only {
        return Ok(LossBreakdown {
            total: eta * topic,
            recon: 0.0,
            kld: 0.0,
            topic,
            alpha,
            eta,
        });
    }
    e.expect_same_shape(e_hat)?;
    let recon = e
        .data()
        .iter()
        .zip(e_hat.data())
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / e.numel() as f64;
    let kld = kld(mu, logvar)?;
    Ok(LossBreakdown {
        total: recon + alpha * kld + eta * topic,
        recon,
        kld,
        topic,
        alpha,
        eta,
    })
}

/// Node ids of the recorded loss terms.
pub(crate) struct LossNodes {
    pub total: NodeId,
    pub recon: Option<NodeId>,
    pub kld: Option<NodeId>,
    pub topic: NodeId,
}

/// Records the objective on `g`. `e_hat` is `None` in encoder-only mode.
pub(crate) fn loss_node(
    g: &mut Graph,
    e: NodeId,
    e_hat: Option<NodeId>,
    mu: NodeId,
    logvar: NodeId,
    t: &Tensor,
    cfg: &LossConfig,
    (alpha, eta): (f64, f64),
) -> Result<LossNodes> {
    check_guidance(t)?;
    let t_node = g.constant(t.clone());
    let ls = g.log_sigmoid(mu);
    let mut inner = g.mul(t_node, ls)?;
    if cfg.symmetric_topic {
        let one_minus = g.constant(t.map(|v| 1.0 - v));
        let neg = g.scale(mu, -1.0);
        let ls_neg = g.log_sigmoid(neg);
        let term = g.mul(one_minus, ls_neg)?;
        inner = g.add(inner, term)?;
    }
    let mean = g.mean(inner);
    let topic = g.scale(mean, -1.0);
    let weighted_topic = g.scale(topic, eta);

    let Some(e_hat) = e_hat else {
        return Ok(LossNodes {
            total: weighted_topic,
            recon: None,
            kld: None,
            topic,
        });
    };
    let diff = g.sub(e, e_hat)?;
    let sq = g.square(diff);
    let recon = g.mean(sq);

    let m = g.value(mu).cols() as f64;
    let mu2 = g.square(mu);
    let ev = g.exp(logvar);
    let a = g.add(mu2, ev)?;
    let a = g.sub(a, logvar)?;
    let ones = g.constant(Tensor::full(g.value(mu).shape(), 1.0));
    let a = g.sub(a, ones)?;
    let mean_kl = g.mean(a);
    let kld = g.scale(mean_kl, 0.5 * m);

    let weighted_kld = g.scale(kld, alpha);
    let total = g.add(recon, weighted_kld)?;
    let total = g.add(total, weighted_topic)?;
    Ok(LossNodes {
        total,
        recon: Some(recon),
        kld: Some(kld),
        topic,
    })
}
