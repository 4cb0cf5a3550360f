//! Topic-guided VAE over calibrated embeddings.

pub mod loss;
pub mod model;
pub mod train;

use std::path::Path;

use crate::diffcore::{sigmoid, Tensor};
use crate::error::{Error, Result};
use crate::guidance::{write_guidance, GuidanceMatrix, GuidanceSource};
use crate::ingest::{write_labels, LabelMatrix};

pub use loss::{kld, loss, topic_loss, LossBreakdown, LossConfig};
pub use model::{decode, encode, read_model, reparameterize, write_model, VaeDims, VaeModel};
pub use train::{train, VaeTrainConfig};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Topic probabilities and their thresholded labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub probabilities: Tensor,
    pub binary: LabelMatrix,
}

impl Prediction {
    /// Thresholds `probabilities` with a strict `>`.
    pub fn from_probabilities(
        doc_ids: Vec<String>,
        names: Vec<String>,
        probabilities: Tensor,
        threshold: f64,
    ) -> Result<Self> {
        let (n, m) = probabilities.expect_rank2("probabilities")?;
        let rows = (0..n)
            .map(|i| (0..m).map(|j| u8::from(probabilities.get(i, j) > threshold)).collect())
            .collect();
        let binary = LabelMatrix::new(doc_ids, names, rows)?;
        Ok(Self {
            probabilities,
            binary,
        })
    }

    /// Thresholded guidance as a prediction.
    pub fn from_guidance(g: &GuidanceMatrix, threshold: f64) -> Result<Self> {
        Self::from_probabilities(g.doc_ids().to_vec(), g.names().to_vec(), g.values().clone(), threshold)
    }

    pub fn n(&self) -> usize {
        self.binary.n()
    }

    pub fn m(&self) -> usize {
        self.binary.m()
    }

    /// Writes probabilities in the guidance format and binary labels alongside.
    pub fn write(&self, probs: &Path, labels: &Path, comment: Option<&str>) -> Result<()> {
        let g = GuidanceMatrix::new(
            self.binary.doc_ids().to_vec(),
            self.binary.names().to_vec(),
            self.probabilities.clone(),
            GuidanceSource::Mixed,
        )?;
        write_guidance(probs, &g, comment)?;
        write_labels(labels, &self.binary, comment)
    }
}

/// `sigmoid(μ)` thresholded with a strict `>`.
pub fn predict(
    model: &VaeModel,
    e: &Tensor,
    doc_ids: Vec<String>,
    names: Vec<String>,
    threshold: f64,
) -> Result<Prediction> {
    if names.len() != model.dims().m {
        return Err(Error::Dimension(format!(
            "{} topic names for a model with M = {}",
            names.len(),
            model.dims().m
        )));
    }
    let (mu, _) = encode(model, e)?;
    Prediction::from_probabilities(doc_ids, names, mu.map(sigmoid), threshold)
}
