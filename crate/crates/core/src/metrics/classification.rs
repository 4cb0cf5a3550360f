//! Example-based and per-class (macro) scores on binary label matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::LabelMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleMetrics {
    pub acc: f64,
    pub hamming_score: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub(crate) fn check_shapes(gold: &LabelMatrix, pred: &LabelMatrix) -> Result<()> {
    if gold.n() != pred.n() || gold.m() != pred.m() {
        return Err(Error::Contract(format!(
            "gold is {}×{} but predictions are {}×{}",
            gold.n(),
            gold.m(),
            pred.n(),
            pred.m()
        )));
    }
    Ok(())
}

/// Per-example set scores, averaged. An example whose gold and predicted
/// sets are both empty scores 1 on all five; an empty prediction against a
/// non-empty gold set scores 0 precision.
pub fn example_metrics(gold: &LabelMatrix, pred: &LabelMatrix) -> Result<ExampleMetrics> {
    check_shapes(gold, pred)?;
    let n = gold.n();
    let mut s = ExampleMetrics {
        acc: 0.0,
        hamming_score: 0.0,
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    };
    for i in 0..n {
        let (y, p) = (gold.row(i), pred.row(i));
        let inter = y.iter().zip(p).filter(|(a, b)| **a == 1 && **b == 1).count() as f64;
        let ny = y.iter().filter(|&&v| v == 1).count() as f64;
        let np = p.iter().filter(|&&v| v == 1).count() as f64;
        let union = ny + np - inter;
        if union == 0.0 {
            s.acc += 1.0;
            s.hamming_score += 1.0;
            s.precision += 1.0;
            s.recall += 1.0;
            s.f1 += 1.0;
            continue;
        }
        if y == p {
            s.acc += 1.0;
        }
        s.hamming_score += inter / union;
        if np > 0.0 {
            s.precision += inter / np;
        }
        if ny > 0.0 {
            s.recall += inter / ny;
        }
        s.f1 += 2.0 * inter / (ny + np);
    }
    let k = n as f64;
    Ok(ExampleMetrics {
        acc: s.acc / k,
        hamming_score: s.hamming_score / k,
        precision: s.precision / k,
        recall: s.recall / k,
        f1: s.f1 / k,
    })
}

/// `(tp, fp, fn)` for one class.
pub fn confusion(gold: &LabelMatrix, pred: &LabelMatrix, j: usize) -> (usize, usize, usize) {
    let mut c = (0, 0, 0);
    for i in 0..gold.n() {
        match (gold.get(i, j), pred.get(i, j)) {
            (true, true) => c.0 += 1,
            (false, true) => c.1 += 1,
            (true, false) => c.2 += 1,
            (false, false) => {}
        }
    }
    c
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Unweighted mean over classes of binary precision, recall and F1, each 0
/// when undefined.
pub fn macro_prf(gold: &LabelMatrix, pred: &LabelMatrix) -> Result<(f64, f64, f64)> {
    check_shapes(gold, pred)?;
    let m = gold.m();
    let (mut p, mut r, mut f) = (0.0, 0.0, 0.0);
    for j in 0..m {
        let (tp, fp, fn_) = confusion(gold, pred, j);
        if tp + fp + fn_ == 0 {
            log::warn!(
                "class {:?} has no gold or predicted positives; scored 0",
                gold.names()[j]
            );
        }
        p += ratio(tp, tp + fp);
        r += ratio(tp, tp + fn_);
        f += ratio(2 * tp, 2 * tp + fp + fn_);
    }
    let k = m as f64;
    Ok((p / k, r / k, f / k))
}
