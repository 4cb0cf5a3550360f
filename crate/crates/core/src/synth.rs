//! Synthetic multi-label corpora with known latent topics.
//!
//! Each document embedding is `offset + Σ_j y_j·d_j + noise`, with `d_j`
//! orthonormal topic directions and anisotropic Gaussian noise whose
//! covariance has eigenvalues spread geometrically over a condition number.

use nalgebra::DMatrix;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::diffcore::Tensor;
use crate::error::{Error, Result};
use crate::guidance::{GuidanceMatrix, GuidanceSource};
use crate::ingest::table::default_doc_ids;
use crate::ingest::{EmbeddingMatrix, LabelMatrix, Provenance, TokenDoc, TokenEmbeddingSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n: usize,
    pub m: usize,
    pub v: usize,
    /// One probability per topic, or a single value for all.
    pub topic_prior: Vec<f64>,
    pub noise_scale: f64,
    /// Ratio of largest to smallest noise covariance eigenvalue.
    pub anisotropy: f64,
    /// Norm of the shift shared by every embedding.
    pub offset: f64,
    /// Rate at which dense guidance entries are replaced by `U(0.25, 1)`.
    pub blur: f64,
    /// Flip rate of sparse guidance entries; positives are then dropped with
    /// probability `min(1, 4·flip)`.
    pub flip: f64,
    /// Number of layers to emit; layers after the first add isotropic noise.
    pub layers: usize,
    pub layer_noise: f64,
    /// Token counts per document, inclusive; `None` skips token output.
    pub tokens: Option<(usize, usize)>,
    pub token_jitter: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n: 2000,
            m: 4,
            v: 32,
            topic_prior: vec![0.3],
            noise_scale: 0.2,
            anisotropy: 10.0,
            offset: 1.0,
            blur: 0.2,
            flip: 0.05,
            layers: 1,
            layer_noise: 0.0,
            tokens: None,
            token_jitter: 0.1,
            seed: 0,
        }
    }
}

impl SynthConfig {
    fn prior(&self, j: usize) -> f64 {
        if self.topic_prior.len() == 1 {
            self.topic_prior[0]
        } else {
            self.topic_prior[j]
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n == 0 || self.m == 0 || self.layers == 0 {
            return bad("n, m and layers must be positive".into());
        }
        if self.v < self.m {
            return bad(format!("need V ≥ M, got V = {} < M = {}", self.v, self.m));
        }
        if self.topic_prior.len() != 1 && self.topic_prior.len() != self.m {
            return bad(format!("topic_prior needs 1 or {} entries", self.m));
        }
        if self.topic_prior.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
            return bad("topic priors must lie in (0, 1)".into());
        }
        if !(self.noise_scale >= 0.0) || !(self.anisotropy >= 1.0) || !(self.offset >= 0.0) {
            return bad("noise_scale ≥ 0, anisotropy ≥ 1 and offset ≥ 0 required".into());
        }
        if !(0.0..=1.0).contains(&self.blur) || !(0.0..=1.0).contains(&self.flip) {
            return bad("blur and flip must lie in [0, 1]".into());
        }
        if let Some((lo, hi)) = self.tokens {
            if lo == 0 || hi < lo {
                return bad(format!("token range ({lo}, {hi}) is invalid"));
            }
        }
        Ok(())
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.m).map(|j| format!("topic{j}")).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthData {
    /// One matrix per layer; layer 0 is the noiseless-layer embedding.
    pub layers: Vec<EmbeddingMatrix>,
    pub labels: LabelMatrix,
    /// Dense, aggressive guidance (probability-like).
    pub guidance_a: GuidanceMatrix,
    /// Sparse, conservative guidance.
    pub guidance_b: GuidanceMatrix,
    /// `M × V` orthonormal topic directions.
    pub directions: Tensor,
    pub offset: Vec<f64>,
    /// The anisotropic noise added to each embedding, `N × V`.
    pub noise: Tensor,
    /// Per layer token sets, present when tokens were requested.
    pub tokens: Option<Vec<TokenEmbeddingSet>>,
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
}

/// Columns of an orthonormal `r × c` basis (`c ≤ r`).
fn orthonormal(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    gaussian_matrix(rng, r, c).qr().q()
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthData> {
    cfg.validate()?;
    let (n, m, v) = (cfg.n, cfg.m, cfg.v);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let dirs = orthonormal(&mut rng, v, m);
    let rotation = orthonormal(&mut rng, v, v);
    let offset_dir: Vec<f64> = (0..v).map(|_| rng.sample(StandardNormal)).collect();
    let norm = offset_dir.iter().map(|x| x * x).sum::<f64>().sqrt();
    let offset: Vec<f64> = offset_dir.iter().map(|x| cfg.offset * x / norm).collect();
    let sd: Vec<f64> = (0..v)
        .map(|k| {
            let frac = if v > 1 { k as f64 / (v - 1) as f64 } else { 0.5 };
            cfg.noise_scale * cfg.anisotropy.powf(-0.25 + 0.5 * frac)
        })
        .collect();

    let mut labels = Vec::with_capacity(n);
    let mut base = Vec::with_capacity(n * v);
    let mut noise = Vec::with_capacity(n * v);
    for _ in 0..n {
        let y: Vec<u8> = (0..m).map(|j| u8::from(rng.random_bool(cfg.prior(j)))).collect();
        let eps: Vec<f64> = (0..v).map(|k| sd[k] * rng.sample::<f64, _>(StandardNormal)).collect();
        for r in 0..v {
            let nz: f64 = (0..v).map(|c| rotation[(r, c)] * eps[c]).sum();
            let signal: f64 = (0..m).filter(|&j| y[j] == 1).map(|j| dirs[(r, j)]).sum();
            noise.push(nz);
            base.push(offset[r] + signal + nz);
        }
        labels.push(y);
    }

    let names = cfg.names();
    let ids = default_doc_ids(n);
    let labels = LabelMatrix::new(ids.clone(), names.clone(), labels)?;

    let mut a = Vec::with_capacity(n * m);
    let mut b = Vec::with_capacity(n * m);
    let drop = (4.0 * cfg.flip).min(1.0);
    for i in 0..n {
        for j in 0..m {
            let y = labels.get(i, j);
            a.push(if rng.random_bool(cfg.blur) {
                rng.random_range(0.25..1.0)
            } else {
                f64::from(u8::from(y))
            });
            let mut bit = y ^ rng.random_bool(cfg.flip);
            if bit && rng.random_bool(drop) {
                bit = false;
            }
            b.push(f64::from(u8::from(bit)));
        }
    }
    let guidance_a = GuidanceMatrix::new(ids.clone(), names.clone(), Tensor::new(vec![n, m], a)?, GuidanceSource::ZeroShot)?;
    let guidance_b =
        GuidanceMatrix::new(ids, names, Tensor::new(vec![n, m], b)?, GuidanceSource::SeededTopic)?;

    let mut layer_values = vec![Tensor::new(vec![n, v], base)?];
    for _ in 1..cfg.layers {
        let extra = layer_values[0].map(|x| x + cfg.layer_noise * rng.sample::<f64, _>(StandardNormal));
        layer_values.push(extra);
    }

    let tokens = match cfg.tokens {
        None => None,
        Some(range) => Some(
            layer_values
                .iter()
                .enumerate()
                .map(|(l, e)| token_set(e, &labels, range, cfg.token_jitter, l, &mut rng))
                .collect::<Result<Vec<_>>>()?,
        ),
    };

    let layers = layer_values
        .into_iter()
        .enumerate()
        .map(|(l, t)| {
            EmbeddingMatrix::new(
                t,
                Provenance {
                    layers: vec![l],
                    ..Provenance::default()
                },
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let directions = Tensor::new(vec![m, v], (0..m).flat_map(|j| (0..v).map(move |r| (j, r))).map(|(j, r)| dirs[(r, j)]).collect())?;
    Ok(SynthData {
        layers,
        labels,
        guidance_a,
        guidance_b,
        directions,
        offset,
        noise: Tensor::new(vec![n, v], noise)?,
        tokens,
    })
}

const FILLER: usize = 40;
const WORDS_PER_TOPIC: usize = 6;

/// Token vectors around each document embedding, centered so their plain
/// mean equals the embedding.
fn token_set(
    e: &Tensor,
    labels: &LabelMatrix,
    (lo, hi): (usize, usize),
    jitter: f64,
    layer: usize,
    rng: &mut ChaCha8Rng,
) -> Result<TokenEmbeddingSet> {
    let v = e.cols();
    let mut docs = Vec::with_capacity(e.rows());
    for i in 0..e.rows() {
        let t = rng.random_range(lo..=hi);
        let topics: Vec<usize> = (0..labels.m()).filter(|&j| labels.get(i, j)).collect();
        let tokens: Vec<String> = (0..t)
            .map(|_| match topics.choose(rng) {
                Some(&j) if rng.random_bool(0.5) => {
                    format!("topic{j}_w{}", rng.random_range(0..WORDS_PER_TOPIC))
                }
                _ => format!("w{}", rng.random_range(0..FILLER)),
            })
            .collect();
        let mut vecs: Vec<Vec<f64>> = (0..t)
            .map(|_| (0..v).map(|_| jitter * rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        for k in 0..v {
            let mean = vecs.iter().map(|r| r[k]).sum::<f64>() / t as f64;
            for r in vecs.iter_mut() {
                r[k] += e.get(i, k) - mean;
            }
        }
        docs.push(TokenDoc {
            tokens,
            vectors: Tensor::from_rows(&vecs)?,
        });
    }
    TokenEmbeddingSet::new(docs, layer)
}
