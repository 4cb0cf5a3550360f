use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::loss::{loss_node, LossBreakdown, LossConfig};
use super::model::{decode_node, encode_node, VaeDims, VaeModel};
use crate::diffcore::{adamw_step, AdamWConfig, AdamWState, Gradients, Graph, Tensor};
use crate::error::{Error, Result};
use crate::guidance::GuidanceMatrix;
use crate::ingest::EmbeddingMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VaeTrainConfig {
    pub lr: f64,
    pub epochs: usize,
    pub batch: usize,
    pub weight_decay: f64,
    pub h1: usize,
    pub h2: usize,
    pub seed: u64,
}

impl Default for VaeTrainConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            epochs: 10,
            batch: 64,
            weight_decay: 0.01,
            h1: super::model::DEFAULT_H1,
            h2: super::model::DEFAULT_H2,
            seed: 0,
        }
    }
}

/// Loss and gradients for one batch with injected reparameterization noise.
pub fn batch_loss_and_grad(
    model: &VaeModel,
    e: &Tensor,
    t: &Tensor,
    noise: &Tensor,
    cfg: &LossConfig,
    weights: (f64, f64),
) -> Result<(LossBreakdown, Gradients)> {
    model.check_width(e)?;
    let m = model.dims().m;
    if t.shape() != [e.rows(), m] || noise.shape() != [e.rows(), m] {
        return Err(Error::Dimension(format!(
            "guidance {:?} and noise {:?} must be {}×{m}",
            t.shape(),
            noise.shape(),
            e.rows()
        )));
    }
    let mut g = Graph::new();
    let p = model.params().bind(&mut g);
    let en = g.constant(e.clone());
    let (mu, logvar) = encode_node(&mut g, &p, en)?;
    let e_hat = if cfg.encoder_only {
        None
    } else {
        let sd = g.scale(logvar, 0.5);
        let sd = g.exp(sd);
        let eps = g.constant(noise.clone());
        let z = g.mul(sd, eps)?;
        let z = g.add(mu, z)?;
        Some(decode_node(&mut g, &p, z)?)
    };
    let nodes = loss_node(&mut g, en, e_hat, mu, logvar, t, cfg, weights)?;
    let scalar = |id: Option<_>| id.map(|i| g.value(i).data()[0]).unwrap_or(0.0);
    let breakdown = LossBreakdown {
        total: scalar(Some(nodes.total)),
        recon: scalar(nodes.recon),
        kld: scalar(nodes.kld),
        topic: scalar(Some(nodes.topic)),
        alpha: weights.0,
        eta: weights.1,
    };
    Ok((breakdown, g.backward(nodes.total)?))
}

/// Mean of the minibatch loss terms over one epoch.
pub type EpochLoss = LossBreakdown;

/// Minibatch AdamW training with per-epoch shuffling.
pub fn train(
    e: &EmbeddingMatrix,
    t: &GuidanceMatrix,
    cfg: &LossConfig,
    tc: &VaeTrainConfig,
) -> Result<(VaeModel, Vec<EpochLoss>)> {
    let n = e.n();
    if t.n() != n {
        return Err(Error::Contract(format!(
            "embeddings have {n} rows but guidance has {}",
            t.n()
        )));
    }
    if t.m() != cfg.m {
        return Err(Error::Contract(format!(
            "loss configured for M = {} but guidance has {} topics",
            cfg.m,
            t.m()
        )));
    }
    if tc.batch == 0 {
        return Err(Error::Contract("batch size must be positive".into()));
    }
    let dims = VaeDims {
        v: e.dim(),
        m: t.m(),
        h1: tc.h1,
        h2: tc.h2,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(tc.seed);
    let mut model = VaeModel::init(dims, rng.random())?;
    let mut state = AdamWState::new(
        AdamWConfig {
            lr: tc.lr,
            weight_decay: tc.weight_decay,
            ..AdamWConfig::default()
        },
        model.params(),
    );
    let mut order: Vec<usize> = (0..n).collect();
    let mut trace = Vec::with_capacity(tc.epochs);
    for epoch in 0..tc.epochs {
        order.shuffle(&mut rng);
        let weights = cfg.effective(epoch, tc.epochs);
        let mut acc = LossBreakdown {
            alpha: weights.0,
            eta: weights.1,
            ..Default::default()
        };
        let mut seen = 0usize;
        for (step, idx) in order.chunks(tc.batch).enumerate() {
            let eb = e.values().select_rows(idx);
            let tb = t.values().select_rows(idx);
            let noise: Vec<f64> = (0..idx.len() * dims.m)
                .map(|_| rng.sample(StandardNormal))
                .collect();
            let noise = Tensor::new(vec![idx.len(), dims.m], noise)?;
            let diverged = |msg: String| Error::Training { epoch, step, msg };
            let (l, grads) = batch_loss_and_grad(&model, &eb, &tb, &noise, cfg, weights)
                .map_err(|e| diverged(e.to_string()))?;
            if !l.total.is_finite() {
                return Err(diverged(format!("loss is {}", l.total)));
            }
            adamw_step(model.params_mut(), &grads, &mut state).map_err(|e| diverged(e.to_string()))?;
            let w = idx.len() as f64;
            acc.total += w * l.total;
            acc.recon += w * l.recon;
            acc.kld += w * l.kld;
            acc.topic += w * l.topic;
            seen += idx.len();
        }
        let s = seen as f64;
        acc.total /= s;
        acc.recon /= s;
        acc.kld /= s;
        acc.topic /= s;
        log::info!(
            "vae epoch {epoch}: total {:.6} recon {:.6} kld {:.6} topic {:.6}",
            acc.total,
            acc.recon,
            acc.kld,
            acc.topic
        );
        trace.push(acc);
    }
    Ok((model, trace))
}
