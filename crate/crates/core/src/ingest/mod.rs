//! On-disk formats, pooling of token embeddings into sentence embeddings,
//! layer averaging, category filtering and the stratified split.

pub mod format;
pub mod labels;
pub mod pooling;
pub mod split;
pub mod table;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diffcore::Tensor;
use crate::error::{Error, Result};

pub use format::{read_embeddings, read_tokens, write_embeddings, write_tokens};
pub use labels::{filter_categories, read_labels, read_seeds, write_labels, LabelMatrix, SeedSpec};
pub use pooling::{document_frequencies, mean_pool, tfidf_pool};
pub use split::split;

/// How sentence embeddings were obtained from a language model's output.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pooling {
    /// Precomputed sentence vectors (e.g. the `[CLS]` token), used as-is.
    #[default]
    Cls,
    Mean,
    Tfidf,
}

impl fmt::Display for Pooling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pooling::Cls => "cls",
            Pooling::Mean => "mean",
            Pooling::Tfidf => "tfidf",
        })
    }
}

impl std::str::FromStr for Pooling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cls" => Ok(Pooling::Cls),
            "mean" => Ok(Pooling::Mean),
            "tfidf" => Ok(Pooling::Tfidf),
            other => Err(Error::Config(format!("unknown pooling mode {other:?}"))),
        }
    }
}

/// Where an embedding matrix came from.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Provenance {
    pub layers: Vec<usize>,
    pub pooling: Option<Pooling>,
    pub calibration: Option<String>,
}

/// `N × V` sentence embeddings.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix {
    values: Tensor,
    pub provenance: Provenance,
}

impl EmbeddingMatrix {
    pub fn new(values: Tensor, provenance: Provenance) -> Result<Self> {
        values.expect_rank2("embedding matrix")?;
        if let Some(i) = (0..values.rows()).find(|&i| values.row(i).iter().any(|v| !v.is_finite()))
        {
            return Err(Error::Numeric(format!("embedding row {i} is not finite")));
        }
        Ok(Self { values, provenance })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Tensor::from_rows(rows)?, Provenance::default())
    }

    pub fn n(&self) -> usize {
        self.values.rows()
    }

    pub fn dim(&self) -> usize {
        self.values.cols()
    }

    pub fn values(&self) -> &Tensor {
        &self.values
    }

    pub fn into_values(self) -> Tensor {
        self.values
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self {
            values: self.values.select_rows(idx),
            provenance: self.provenance.clone(),
        }
    }
}

/// One document's token vectors and surface strings.
#[derive(Clone, Debug, PartialEq)]
pub struct TokenDoc {
    pub tokens: Vec<String>,
    /// `T × V` token embeddings.
    pub vectors: Tensor,
}

/// Token-level embeddings for a corpus, taken from one model layer.
#[derive(Clone, Debug, PartialEq)]
pub struct TokenEmbeddingSet {
    docs: Vec<TokenDoc>,
    dim: usize,
    pub layer: usize,
}

impl TokenEmbeddingSet {
    pub fn new(docs: Vec<TokenDoc>, layer: usize) -> Result<Self> {
        let first = docs
            .first()
            .ok_or_else(|| Error::Contract("token set has no documents".into()))?;
        let dim = first.vectors.cols();
        for (i, d) in docs.iter().enumerate() {
            let (t, v) = d.vectors.expect_rank2("token matrix")?;
            if v != dim {
                return Err(Error::Dimension(format!(
                    "document {i} has width {v}, expected {dim}"
                )));
            }
            if t != d.tokens.len() {
                return Err(Error::Dimension(format!(
                    "document {i} has {t} vectors for {} tokens",
                    d.tokens.len()
                )));
            }
        }
        Ok(Self { docs, dim, layer })
    }

    pub fn docs(&self) -> &[TokenDoc] {
        &self.docs
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }
}

/// Elementwise mean of the selected layers.
pub fn average_layers(layers: &[EmbeddingMatrix], selection: &[usize]) -> Result<EmbeddingMatrix> {
    if selection.is_empty() {
        return Err(Error::Contract("empty layer selection".into()));
    }
    for &s in selection {
        if s >= layers.len() {
            return Err(Error::Contract(format!(
                "layer {s} selected but only {} layers provided",
                layers.len()
            )));
        }
    }
    let first = &layers[selection[0]];
    let shape = first.values().shape().to_vec();
    let mut acc = Tensor::zeros(&shape);
    for &s in selection {
        let m = &layers[s];
        if m.values().shape() != shape.as_slice() {
            return Err(Error::Dimension(format!(
                "layer {s} has shape {:?}, expected {shape:?}",
                m.values().shape()
            )));
        }
        for (a, v) in acc.data_mut().iter_mut().zip(m.values().data()) {
            *a += v;
        }
    }
    let k = selection.len() as f64;
    acc.data_mut().iter_mut().for_each(|v| *v /= k);
    let provenance = Provenance {
        layers: selection.to_vec(),
        ..first.provenance.clone()
    };
    EmbeddingMatrix::new(acc, provenance)
}

/// Layers averaged when the corpus provides all seven outputs of a
/// six-block encoder (index 0 is the word-embedding layer).
pub const DEFAULT_LAYER_SELECTION: [usize; 3] = [0, 1, 5];
