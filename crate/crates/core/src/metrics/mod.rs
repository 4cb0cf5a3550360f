//! Multi-label evaluation: example-based, per-class, ranking and clustering
//! scores.
//!
//! Text report: one `metric = value` line per field, six decimals, in
//! [`MetricsReport::KEYS`] order; undefined values print as `NaN`. The JSON
//! report carries the same keys, with undefined values as `null`.

pub mod classification;
pub mod clustering;
pub mod ranking;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::LabelMatrix;
use crate::vae::Prediction;

pub use classification::{example_metrics, macro_prf, ExampleMetrics};
pub use clustering::{clustering_metrics, ClusteringMetrics};
pub use ranking::{apk, average_precision, macro_average_precision, macro_roc_auc, map_at_k, roc_auc};

pub const MAP_K: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub acc: f64,
    pub hamming_score: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub aps: f64,
    pub auc: f64,
    /// Mean average precision over the top 3 ranked topics.
    pub p_at_3: f64,
    pub homogeneity: f64,
    pub completeness: f64,
    pub nmi: f64,
    pub adjusted_mi: f64,
    pub adjusted_rand: f64,
}

impl MetricsReport {
    pub const KEYS: [&'static str; 16] = [
        "acc",
        "hamming_score",
        "precision",
        "recall",
        "f1",
        "macro_precision",
        "macro_recall",
        "macro_f1",
        "aps",
        "auc",
        "p_at_3",
        "homogeneity",
        "completeness",
        "nmi",
        "adjusted_mi",
        "adjusted_rand",
    ];

    pub fn values(&self) -> [f64; 16] {
        [
            self.acc,
            self.hamming_score,
            self.precision,
            self.recall,
            self.f1,
            self.macro_precision,
            self.macro_recall,
            self.macro_f1,
            self.aps,
            self.auc,
            self.p_at_3,
            self.homogeneity,
            self.completeness,
            self.nmi,
            self.adjusted_mi,
            self.adjusted_rand,
        ]
    }

    pub fn to_text(&self) -> String {
        Self::KEYS
            .iter()
            .zip(self.values())
            .map(|(k, v)| format!("{k} = {v:.6}\n"))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain struct serializes") + "\n"
    }

    /// Writes `<stem>.txt` and `<stem>.json`, each preceded by `header`
    /// (comment lines in the text file, a `provenance` field in JSON).
    pub fn write(&self, dir: &Path, stem: &str, header: &str) -> Result<()> {
        let mut text = String::new();
        for line in header.lines() {
            text.push_str(&format!("# {line}\n"));
        }
        text.push_str(&self.to_text());
        let txt = dir.join(format!("{stem}.txt"));
        std::fs::write(&txt, text).map_err(|e| Error::io(&txt, e))?;
        let mut value = serde_json::to_value(self).expect("plain struct serializes");
        value["provenance"] = serde_json::Value::String(header.to_string());
        let json = dir.join(format!("{stem}.json"));
        let body = serde_json::to_string_pretty(&value).expect("json value serializes") + "\n";
        std::fs::write(&json, body).map_err(|e| Error::io(&json, e))
    }
}

/// Gold class indices and argmax predictions for examples with exactly one
/// gold label.
pub fn single_label_assignments(gold: &LabelMatrix, pred: &Prediction) -> (Vec<usize>, Vec<usize>) {
    let mut g = Vec::new();
    let mut p = Vec::new();
    for i in 0..gold.n() {
        let row = gold.row(i);
        if row.iter().filter(|&&v| v == 1).count() != 1 {
            continue;
        }
        g.push(row.iter().position(|&v| v == 1).expect("one positive"));
        let probs = pred.probabilities.row(i);
        let best = (0..probs.len())
            .fold(0, |best, j| if probs[j] > probs[best] { j } else { best });
        p.push(best);
    }
    (g, p)
}

pub fn evaluate(gold: &LabelMatrix, pred: &Prediction) -> Result<MetricsReport> {
    if gold.names() != pred.binary.names() {
        return Err(Error::Alignment(format!(
            "gold topics {:?} differ from predicted topics {:?}",
            gold.names(),
            pred.binary.names()
        )));
    }
    let ex = example_metrics(gold, &pred.binary)?;
    let (macro_precision, macro_recall, macro_f1) = macro_prf(gold, &pred.binary)?;
    let aps = macro_average_precision(gold, &pred.probabilities)?;
    let auc = macro_roc_auc(gold, &pred.probabilities)?;
    let p_at_3 = map_at_k(gold, &pred.probabilities, MAP_K)?;
    let (g, p) = single_label_assignments(gold, pred);
    let cl = if g.len() >= 2 {
        clustering_metrics(&g, &p)?
    } else {
        log::warn!("fewer than 2 single-label examples; clustering scores undefined");
        ClusteringMetrics {
            homogeneity: f64::NAN,
            completeness: f64::NAN,
            nmi: f64::NAN,
            adjusted_mi: f64::NAN,
            adjusted_rand: f64::NAN,
        }
    };
    Ok(MetricsReport {
        acc: ex.acc,
        hamming_score: ex.hamming_score,
        precision: ex.precision,
        recall: ex.recall,
        f1: ex.f1,
        macro_precision,
        macro_recall,
        macro_f1,
        aps,
        auc,
        p_at_3,
        homogeneity: cl.homogeneity,
        completeness: cl.completeness,
        nmi: cl.nmi,
        adjusted_mi: cl.adjusted_mi,
        adjusted_rand: cl.adjusted_rand,
    })
}
