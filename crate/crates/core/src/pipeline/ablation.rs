//! The six cumulative pipeline stages, from thresholded backend guidance to
//! the full model with the hyper-parameter schedule.

use crate::error::{Error, Result};
use crate::guidance::GuidanceMatrix;
use crate::ingest::{EmbeddingMatrix, LabelMatrix};
use crate::vae::{LossConfig, Prediction, VaeTrainConfig};

use super::fit_predict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    /// Mixed guidance thresholded directly.
    Backend,
    /// Encoder trained on the topic loss only, uncalibrated embeddings.
    Encoder,
    /// Adds calibration.
    Flow,
    /// Adds reconstruction and KL terms.
    Vae,
    /// Switches to TF-IDF pooling.
    Tfidf,
    /// Adds the warm-up and final-epoch weight schedule.
    Hps,
}

impl Stage {
    pub const ALL: [Stage; 6] = [Stage::Backend, Stage::Encoder, Stage::Flow, Stage::Vae, Stage::Tfidf, Stage::Hps];

    /// 1-based position.
    pub fn index(self) -> usize {
        self as usize + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Stage::Backend => "backend",
            Stage::Encoder => "encoder",
            Stage::Flow => "flow",
            Stage::Vae => "vae",
            Stage::Tfidf => "tfidf",
            Stage::Hps => "hps",
        }
    }

    pub fn from_index(i: usize) -> Result<Self> {
        Stage::ALL
            .get(i.wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::Contract(format!("ablation stage {i} outside 1..=6")))
    }
}

/// Everything the stages draw on. Embeddings cover all documents; `train`
/// and `test` index into them.
#[derive(Clone, Debug)]
pub struct AblationInputs {
    pub labels: LabelMatrix,
    pub guidance: GuidanceMatrix,
    /// Base pooling, uncalibrated.
    pub raw: Option<EmbeddingMatrix>,
    /// Base pooling, calibrated.
    pub calibrated: Option<EmbeddingMatrix>,
    /// TF-IDF pooling, calibrated.
    pub tfidf: Option<EmbeddingMatrix>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub gamma: f64,
    pub symmetric_topic: bool,
    pub train_config: VaeTrainConfig,
    pub threshold: f64,
}

fn need<'a>(e: &'a Option<EmbeddingMatrix>, stage: Stage, what: &str) -> Result<&'a EmbeddingMatrix> {
    e.as_ref()
        .ok_or_else(|| Error::Contract(format!("stage {} needs {what} embeddings", stage.index())))
}

/// Test-set prediction of one stage.
pub fn ablation_variants(stage: Stage, inputs: &AblationInputs) -> Result<Prediction> {
    if stage == Stage::Backend {
        return Prediction::from_guidance(&inputs.guidance.select_rows(&inputs.test), inputs.threshold);
    }
    let e = match stage {
        Stage::Encoder => need(&inputs.raw, stage, "uncalibrated")?,
        Stage::Flow | Stage::Vae => need(&inputs.calibrated, stage, "calibrated")?,
        _ => need(&inputs.tfidf, stage, "TF-IDF pooled")?,
    };
    let mut loss = LossConfig::new(inputs.gamma, inputs.labels.m())?;
    loss.symmetric_topic = inputs.symmetric_topic;
    loss.encoder_only = matches!(stage, Stage::Encoder | Stage::Flow);
    if stage != Stage::Hps {
        loss = loss.without_schedule();
    }
    let (_, _, pred) = fit_predict(
        e,
        &inputs.guidance,
        &inputs.labels,
        &inputs.train,
        &inputs.test,
        &loss,
        &inputs.train_config,
        inputs.threshold,
    )?;
    Ok(pred)
}
