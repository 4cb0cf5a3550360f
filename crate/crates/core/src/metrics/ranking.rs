//! Score-based metrics: average precision, ROC-AUC and MAP@k.

use crate::diffcore::Tensor;
use crate::error::{Error, Result};
use crate::ingest::LabelMatrix;

/// Indices sorted by descending score; ties keep input order.
fn ranked(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    idx
}

/// Step-wise average precision `Σ (R_n − R_{n−1})·P_n`. `None` when the
/// column has no positives.
pub fn average_precision(gold: &[bool], scores: &[f64]) -> Result<Option<f64>> {
    if gold.len() != scores.len() {
        return Err(Error::Contract(format!(
            "{} labels for {} scores",
            gold.len(),
            scores.len()
        )));
    }
    let positives = gold.iter().filter(|&&g| g).count();
    if positives == 0 {
        return Ok(None);
    }
    let mut hits = 0usize;
    let mut ap = 0.0;
    for (k, &i) in ranked(scores).iter().enumerate() {
        if gold[i] {
            hits += 1;
            ap += hits as f64 / (k + 1) as f64;
        }
    }
    Ok(Some(ap / positives as f64))
}

/// Midranks (1-based) of `scores`, ascending.
fn midranks(scores: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut ranks = vec![0.0; scores.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && scores[idx[end]] == scores[idx[start]] {
            end += 1;
        }
        let mid = (start + 1 + end) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = mid;
        }
        start = end;
    }
    ranks
}

/// Rank-statistic ROC-AUC. `None` when only one class is present.
pub fn roc_auc(gold: &[bool], scores: &[f64]) -> Result<Option<f64>> {
    if gold.len() != scores.len() {
        return Err(Error::Contract(format!(
            "{} labels for {} scores",
            gold.len(),
            scores.len()
        )));
    }
    let p = gold.iter().filter(|&&g| g).count();
    let q = gold.len() - p;
    if p == 0 || q == 0 {
        return Ok(None);
    }
    let ranks = midranks(scores);
    let sum: f64 = gold.iter().zip(&ranks).filter(|(g, _)| **g).map(|(_, r)| r).sum();
    let (p, q) = (p as f64, q as f64);
    Ok(Some((sum - p * (p + 1.0) / 2.0) / (p * q)))
}

fn column(gold: &LabelMatrix, j: usize) -> Vec<bool> {
    (0..gold.n()).map(|i| gold.get(i, j)).collect()
}

fn check(gold: &LabelMatrix, scores: &Tensor) -> Result<()> {
    if scores.shape() != [gold.n(), gold.m()] {
        return Err(Error::Contract(format!(
            "scores {:?} do not match labels {}×{}",
            scores.shape(),
            gold.n(),
            gold.m()
        )));
    }
    Ok(())
}

fn macro_mean(
    gold: &LabelMatrix,
    scores: &Tensor,
    what: &str,
    f: fn(&[bool], &[f64]) -> Result<Option<f64>>,
) -> Result<f64> {
    check(gold, scores)?;
    let mut vals = Vec::new();
    for j in 0..gold.m() {
        let s: Vec<f64> = (0..gold.n()).map(|i| scores.get(i, j)).collect();
        match f(&column(gold, j), &s)? {
            Some(v) => vals.push(v),
            None => log::warn!("{what}: class {:?} skipped (undefined)", gold.names()[j]),
        }
    }
    if vals.is_empty() {
        return Ok(f64::NAN);
    }
    Ok(vals.iter().sum::<f64>() / vals.len() as f64)
}

/// Mean average precision over classes with at least one positive.
pub fn macro_average_precision(gold: &LabelMatrix, scores: &Tensor) -> Result<f64> {
    macro_mean(gold, scores, "average precision", average_precision)
}

/// Mean ROC-AUC over classes with both outcomes present.
pub fn macro_roc_auc(gold: &LabelMatrix, scores: &Tensor) -> Result<f64> {
    macro_mean(gold, scores, "roc auc", roc_auc)
}

/// Average precision at `k` of one ranked topic list.
pub fn apk(actual: &[usize], predicted: &[usize], k: usize) -> f64 {
    if actual.is_empty() {
        return 0.0;
    }
    let mut hits = 0usize;
    let mut score = 0.0;
    for (i, p) in predicted.iter().take(k).enumerate() {
        if actual.contains(p) && !predicted[..i].contains(p) {
            hits += 1;
            score += hits as f64 / (i + 1) as f64;
        }
    }
    score / actual.len().min(k) as f64
}

/// Mean of `apk` over examples with a non-empty gold set, topics ranked by
/// descending score.
pub fn map_at_k(gold: &LabelMatrix, scores: &Tensor, k: usize) -> Result<f64> {
    check(gold, scores)?;
    if k == 0 {
        return Err(Error::Contract("k must be at least 1".into()));
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for i in 0..gold.n() {
        let actual: Vec<usize> = (0..gold.m()).filter(|&j| gold.get(i, j)).collect();
        if actual.is_empty() {
            continue;
        }
        let predicted = ranked(scores.row(i));
        total += apk(&actual, &predicted, k);
        count += 1;
    }
    if count == 0 {
        log::warn!("map@k: every example has an empty gold set");
        return Ok(f64::NAN);
    }
    Ok(total / count as f64)
}
