use std::collections::{HashMap, HashSet};

use super::{EmbeddingMatrix, Pooling, Provenance, TokenEmbeddingSet};
use crate::diffcore::Tensor;
use crate::error::{Error, Result};

/// Share of the uniform weight in the blended TF-IDF pooling weights.
pub const MEAN_WEIGHT_SHARE: f64 = 0.1;

fn weighted_rows(vectors: &Tensor, weights: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; vectors.cols()];
    for (t, &w) in weights.iter().enumerate() {
        for (o, v) in out.iter_mut().zip(vectors.row(t)) {
            *o += w * v;
        }
    }
    out
}

fn pooled(tokens: &TokenEmbeddingSet, rows: Vec<f64>, mode: Pooling) -> Result<EmbeddingMatrix> {
    let t = Tensor::new(vec![tokens.len(), tokens.dim()], rows)?;
    EmbeddingMatrix::new(
        t,
        Provenance {
            layers: vec![tokens.layer],
            pooling: Some(mode),
            calibration: None,
        },
    )
}

/// Unweighted mean of each document's token vectors.
pub fn mean_pool(tokens: &TokenEmbeddingSet) -> Result<EmbeddingMatrix> {
    let mut rows = Vec::with_capacity(tokens.len() * tokens.dim());
    for (i, d) in tokens.docs().iter().enumerate() {
        let t = d.vectors.rows();
        if t == 0 {
            return Err(Error::Contract(format!("document {i} has no tokens")));
        }
        rows.extend(weighted_rows(&d.vectors, &vec![1.0 / t as f64; t]));
    }
    pooled(tokens, rows, Pooling::Mean)
}

/// Number of documents each token string occurs in.
pub fn document_frequencies(tokens: &TokenEmbeddingSet) -> HashMap<String, usize> {
    let mut df = HashMap::new();
    for d in tokens.docs() {
        let distinct: HashSet<&String> = d.tokens.iter().collect();
        for tok in distinct {
            *df.entry(tok.clone()).or_insert(0) += 1;
        }
    }
    df
}

/// Per-position pooling weights for one document.
///
/// Term weight is `tf · (ln((1+N)/(1+df)) + 1)` with `tf` the raw count,
/// L2-normalized over the document's distinct terms; each position gets its
/// term's normalized weight `u`, and the final weight is
/// `0.1/T + 0.9·u/Σu`, renormalized to sum to one.
pub fn tfidf_weights(tokens: &[String], doc_freq: &HashMap<String, usize>, n_corpus: usize) -> Vec<f64> {
    let t = tokens.len();
    let mut tf: HashMap<&str, f64> = HashMap::new();
    for tok in tokens {
        *tf.entry(tok.as_str()).or_insert(0.0) += 1.0;
    }
    let idf = |tok: &str| {
        let df = doc_freq.get(tok).copied().unwrap_or(0) as f64;
        ((1.0 + n_corpus as f64) / (1.0 + df)).ln() + 1.0
    };
    let mut terms: Vec<&str> = tf.keys().copied().collect();
    terms.sort_unstable();
    let norm = terms
        .iter()
        .map(|&term| (tf[term] * idf(term)).powi(2))
        .sum::<f64>()
        .sqrt();
    let uniform = vec![1.0 / t as f64; t];
    if !(norm > 0.0) {
        log::warn!("document has an all-zero tf-idf vector; using mean pooling");
        return uniform;
    }
    let u: Vec<f64> = tokens
        .iter()
        .map(|tok| tf[tok.as_str()] * idf(tok) / norm)
        .collect();
    blend_weights(&u)
}

/// `0.1/T + 0.9·u_j/Σu` per position, renormalized to sum to one.
pub fn blend_weights(u: &[f64]) -> Vec<f64> {
    let t = u.len() as f64;
    let total: f64 = u.iter().sum();
    let mut w: Vec<f64> = u
        .iter()
        .map(|&uj| MEAN_WEIGHT_SHARE / t + (1.0 - MEAN_WEIGHT_SHARE) * uj / total)
        .collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    w
}

/// TF-IDF weighted pooling blended with mean pooling.
pub fn tfidf_pool(
    tokens: &TokenEmbeddingSet,
    doc_freq: &HashMap<String, usize>,
    n_corpus: usize,
) -> Result<EmbeddingMatrix> {
    let mut rows = Vec::with_capacity(tokens.len() * tokens.dim());
    for (i, d) in tokens.docs().iter().enumerate() {
        if d.tokens.is_empty() {
            return Err(Error::Contract(format!("document {i} has no tokens")));
        }
        let w = tfidf_weights(&d.tokens, doc_freq, n_corpus);
        rows.extend(weighted_rows(&d.vectors, &w));
    }
    pooled(tokens, rows, Pooling::Tfidf)
}
