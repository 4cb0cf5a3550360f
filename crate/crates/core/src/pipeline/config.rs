//! Run configuration: a TOML file with documented keys, overridable field by
//! field.
//!
//! ```toml
//! seed = 7                      # falls back to $BFV_SEED, then 0
//! pooling = "cls"               # cls | mean | tfidf
//! calibration = "flow"          # flow | whiten | none
//! layers = [0, 1, 5]            # indices into the per-layer input lists
//! flow_order = "per-layer"      # per-layer | averaged
//! omega = 0.5
//! gamma = 1.0
//! test_fraction = 0.2
//! threshold = 0.5
//!
//! [inputs]
//! embeddings = ["layer0.bfve", "layer1.bfve"]   # used by cls pooling
//! tokens = ["layer0.bfvt", "layer1.bfvt"]       # used by mean / tfidf
//! guidance_a = "zeroshot.csv"
//! guidance_a_probability = true
//! guidance_b = "seeded.csv"
//! guidance_b_probability = false
//! labels = "labels.csv"
//! output = "out"
//!
//! [loss]
//! encoder_only = false
//! symmetric_topic = false
//! warmup = true
//! final_halving = true
//!
//! [flow]
//! steps = 16
//! epochs = 5
//! lr = 1e-3
//! batch = 64
//! weight_decay = 0.01
//! linear_decay = true
//!
//! [train]
//! epochs = 10
//! lr = 1e-3
//! batch = 64
//! weight_decay = 0.01
//! h1 = 512
//! h2 = 256
//!
//! [sweep]
//! gammas = [0.1, 0.5, 1, 2, 5, 20]
//! omegas = [0, 0.25, 0.5, 0.75, 1]
//! ```
//!
//! Relative paths resolve against the directory holding the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::calib::flow::{DEFAULT_FLOW_BATCH, DEFAULT_STEPS};
use crate::calib::{Calibration, FlowTrainConfig};
use crate::error::{Error, Result};
use crate::ingest::{Pooling, DEFAULT_LAYER_SELECTION};
use crate::vae::model::{DEFAULT_H1, DEFAULT_H2};
use crate::vae::{LossConfig, VaeTrainConfig, DEFAULT_THRESHOLD};

pub const SEED_ENV: &str = "BFV_SEED";

/// Whether each selected layer gets its own flow before averaging, or the
/// averaged embedding is calibrated once.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowOrder {
    #[default]
    PerLayer,
    Averaged,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    pub embeddings: Vec<PathBuf>,
    pub tokens: Vec<PathBuf>,
    pub guidance_a: PathBuf,
    pub guidance_a_probability: bool,
    pub guidance_b: Option<PathBuf>,
    pub guidance_b_probability: bool,
    pub labels: PathBuf,
    pub output: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossOptions {
    pub encoder_only: bool,
    pub symmetric_topic: bool,
    pub warmup: bool,
    pub final_halving: bool,
}

impl Default for LossOptions {
    fn default() -> Self {
        Self {
            encoder_only: false,
            symmetric_topic: false,
            warmup: true,
            final_halving: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowOptions {
    pub steps: usize,
    pub epochs: usize,
    pub lr: f64,
    pub batch: usize,
    pub weight_decay: f64,
    pub linear_decay: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        let d = FlowTrainConfig::default();
        Self {
            steps: DEFAULT_STEPS,
            epochs: d.epochs,
            lr: d.lr,
            batch: DEFAULT_FLOW_BATCH,
            weight_decay: d.weight_decay,
            linear_decay: d.linear_decay,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainOptions {
    pub epochs: usize,
    pub lr: f64,
    pub batch: usize,
    pub weight_decay: f64,
    pub h1: usize,
    pub h2: usize,
}

impl Default for TrainOptions {
    fn default() -> Self {
        let d = VaeTrainConfig::default();
        Self {
            epochs: d.epochs,
            lr: d.lr,
            batch: d.batch,
            weight_decay: d.weight_decay,
            h1: DEFAULT_H1,
            h2: DEFAULT_H2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepOptions {
    pub gammas: Vec<f64>,
    pub omegas: Vec<f64>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            gammas: vec![0.1, 0.5, 1.0, 2.0, 5.0, 20.0],
            omegas: vec![0.0, 0.25, 0.5, 0.75, 1.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub pooling: Pooling,
    pub calibration: Calibration,
    pub layers: Vec<usize>,
    pub flow_order: FlowOrder,
    pub omega: f64,
    pub gamma: f64,
    pub test_fraction: f64,
    pub threshold: f64,
    pub inputs: Inputs,
    pub loss: LossOptions,
    pub flow: FlowOptions,
    pub train: TrainOptions,
    pub sweep: SweepOptions,
    /// Directory that relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: None,
            pooling: Pooling::Cls,
            calibration: Calibration::Flow,
            layers: DEFAULT_LAYER_SELECTION.to_vec(),
            flow_order: FlowOrder::PerLayer,
            omega: 0.5,
            gamma: 1.0,
            test_fraction: 0.2,
            threshold: DEFAULT_THRESHOLD,
            inputs: Inputs {
                guidance_a_probability: true,
                ..Inputs::default()
            },
            loss: LossOptions::default(),
            flow: FlowOptions::default(),
            train: TrainOptions::default(),
            sweep: SweepOptions::default(),
            base_dir: PathBuf::from("."),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub gamma: Option<f64>,
    pub omega: Option<f64>,
    pub seed: Option<u64>,
    pub pooling: Option<Pooling>,
    pub calibration: Option<Calibration>,
    pub epochs: Option<usize>,
}

/// The seed in `$BFV_SEED`, if set.
pub fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("{SEED_ENV}={s:?} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

/// Hex SHA-256 of a string.
pub fn digest_str(s: &str) -> String {
    Sha256::digest(s.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunConfig {
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.base_dir = base_dir.into();
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Applies overrides, then falls back to `$BFV_SEED` when no seed is set.
    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(v) = o.gamma {
            self.gamma = v;
        }
        if let Some(v) = o.omega {
            self.omega = v;
        }
        if let Some(v) = o.seed {
            self.seed = Some(v);
        }
        if let Some(v) = o.pooling {
            self.pooling = v;
        }
        if let Some(v) = o.calibration {
            self.calibration = v;
        }
        if let Some(v) = o.epochs {
            self.train.epochs = v;
        }
        if self.seed.is_none() {
            self.seed = env_seed()?;
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.inputs.output)
    }

    /// SHA-256 of the serialized configuration, hex encoded.
    pub fn digest(&self) -> String {
        digest_str(&self.to_toml())
    }

    /// Per-layer input files for the configured pooling.
    pub fn layer_paths(&self) -> &[PathBuf] {
        match self.pooling {
            Pooling::Cls => &self.inputs.embeddings,
            Pooling::Mean | Pooling::Tfidf => &self.inputs.tokens,
        }
    }

    pub fn loss_config(&self, gamma: f64, m: usize) -> Result<LossConfig> {
        let mut c = LossConfig::new(gamma, m)?;
        c.encoder_only = self.loss.encoder_only;
        c.symmetric_topic = self.loss.symmetric_topic;
        c.warmup = self.loss.warmup;
        c.final_halving = self.loss.final_halving;
        Ok(c)
    }

    pub fn train_config(&self) -> VaeTrainConfig {
        VaeTrainConfig {
            lr: self.train.lr,
            epochs: self.train.epochs,
            batch: self.train.batch,
            weight_decay: self.train.weight_decay,
            h1: self.train.h1,
            h2: self.train.h2,
            seed: self.seed(),
        }
    }

    pub fn flow_config(&self, seed: u64) -> FlowTrainConfig {
        FlowTrainConfig {
            lr: self.flow.lr,
            epochs: self.flow.epochs,
            batch: self.flow.batch,
            weight_decay: self.flow.weight_decay,
            linear_decay: self.flow.linear_decay,
            seed,
        }
    }

    /// Checks value ranges and that every referenced input exists.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be positive, got {}", self.gamma));
        }
        if !(0.0..=1.0).contains(&self.omega) {
            return bad(format!("omega {} outside [0, 1]", self.omega));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return bad(format!("test_fraction {} outside (0, 1)", self.test_fraction));
        }
        if !(0.0..1.0).contains(&self.threshold) {
            return bad(format!("threshold {} outside [0, 1)", self.threshold));
        }
        if self.layers.is_empty() {
            return bad("layer selection is empty".into());
        }
        let paths = self.layer_paths();
        if let Some(&l) = self.layers.iter().find(|&&l| l >= paths.len()) {
            return bad(format!(
                "layer {l} selected but {} {} inputs listed",
                paths.len(),
                if self.pooling == Pooling::Cls { "embedding" } else { "token" }
            ));
        }
        if self.inputs.guidance_b.is_none() && self.omega != 1.0 {
            return bad("guidance_b is required unless omega = 1".into());
        }
        if self.flow.steps == 0 || self.flow.batch == 0 || self.train.batch == 0 {
            return bad("flow steps and batch sizes must be positive".into());
        }
        if self.train.h1 == 0 || self.train.h2 == 0 {
            return bad("hidden widths must be positive".into());
        }
        let mut required: Vec<&Path> = self.layers.iter().map(|&l| paths[l].as_path()).collect();
        required.push(&self.inputs.guidance_a);
        required.push(&self.inputs.labels);
        if let Some(b) = &self.inputs.guidance_b {
            required.push(b);
        }
        for p in required {
            let full = self.resolve(p);
            if !full.is_file() {
                return bad(format!("input {} does not exist", full.display()));
            }
        }
        Ok(())
    }
}
