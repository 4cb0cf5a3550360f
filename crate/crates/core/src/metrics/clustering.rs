//! Partition agreement scores from a contingency table.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusteringMetrics {
    pub homogeneity: f64,
    pub completeness: f64,
    pub nmi: f64,
    pub adjusted_mi: f64,
    pub adjusted_rand: f64,
}

struct Contingency {
    n: usize,
    cells: Vec<Vec<usize>>,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

fn dense_ids(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = BTreeMap::new();
    for &l in labels {
        let next = map.len();
        map.entry(l).or_insert(next);
    }
    (labels.iter().map(|l| map[l]).collect(), map.len())
}

fn contingency(gold: &[usize], pred: &[usize]) -> Contingency {
    let (g, nc) = dense_ids(gold);
    let (p, nk) = dense_ids(pred);
    let mut cells = vec![vec![0usize; nk]; nc];
    for (&a, &b) in g.iter().zip(&p) {
        cells[a][b] += 1;
    }
    let rows = cells.iter().map(|r| r.iter().sum()).collect();
    let cols = (0..nk).map(|k| cells.iter().map(|r| r[k]).sum()).collect();
    Contingency {
        n: gold.len(),
        cells,
        rows,
        cols,
    }
}

fn entropy(counts: &[usize], n: usize) -> f64 {
    let n = n as f64;
    -counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum::<f64>()
}

fn mutual_info(c: &Contingency) -> f64 {
    let n = c.n as f64;
    let mut mi = 0.0;
    for (i, row) in c.cells.iter().enumerate() {
        for (k, &nij) in row.iter().enumerate() {
            if nij > 0 {
                let nij = nij as f64;
                mi += nij / n * (n * nij / (c.rows[i] as f64 * c.cols[k] as f64)).ln();
            }
        }
    }
    mi.max(0.0)
}

/// Expected mutual information under the hypergeometric model of random
/// labelings with fixed marginals.
fn expected_mutual_info(c: &Contingency) -> f64 {
    let n = c.n;
    let mut log_fact = vec![0.0f64; n + 1];
    for k in 1..=n {
        log_fact[k] = log_fact[k - 1] + (k as f64).ln();
    }
    let nf = n as f64;
    let mut emi = 0.0;
    for &a in &c.rows {
        for &b in &c.cols {
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            for nij in lo..=hi {
                let x = nij as f64;
                let term = x / nf * (nf * x / (a as f64 * b as f64)).ln();
                let log_p = log_fact[a] + log_fact[b] + log_fact[n - a] + log_fact[n - b]
                    - log_fact[n]
                    - log_fact[nij]
                    - log_fact[a - nij]
                    - log_fact[b - nij]
                    - log_fact[n + nij - a - b];
                emi += term * log_p.exp();
            }
        }
    }
    emi
}

fn pairs(k: usize) -> f64 {
    let k = k as f64;
    k * (k - 1.0) / 2.0
}

fn adjusted_rand(c: &Contingency) -> f64 {
    let index: f64 = c.cells.iter().flatten().map(|&x| pairs(x)).sum();
    let sa: f64 = c.rows.iter().map(|&x| pairs(x)).sum();
    let sb: f64 = c.cols.iter().map(|&x| pairs(x)).sum();
    let expected = sa * sb / pairs(c.n);
    let max = (sa + sb) / 2.0;
    if max == expected {
        return 1.0;
    }
    (index - expected) / (max - expected)
}

/// Homogeneity, completeness, v-measure, adjusted MI (arithmetic-mean
/// normalizer) and adjusted Rand index.
pub fn clustering_metrics(gold: &[usize], pred: &[usize]) -> Result<ClusteringMetrics> {
    if gold.len() != pred.len() {
        return Err(Error::Contract(format!(
            "{} gold labels for {} predictions",
            gold.len(),
            pred.len()
        )));
    }
    if gold.len() < 2 {
        return Err(Error::Contract("clustering metrics need at least 2 examples".into()));
    }
    let c = contingency(gold, pred);
    let (nc, nk) = (c.rows.len(), c.cols.len());
    if nc == 1 && nk == 1 {
        return Ok(ClusteringMetrics {
            homogeneity: 1.0,
            completeness: 1.0,
            nmi: 1.0,
            adjusted_mi: 1.0,
            adjusted_rand: 1.0,
        });
    }
    let hc = entropy(&c.rows, c.n);
    let hk = entropy(&c.cols, c.n);
    let mi = mutual_info(&c);
    let homogeneity = if hc == 0.0 { 1.0 } else { mi / hc };
    let completeness = if hk == 0.0 { 1.0 } else { mi / hk };
    let nmi = if homogeneity + completeness == 0.0 {
        0.0
    } else {
        2.0 * homogeneity * completeness / (homogeneity + completeness)
    };
    let emi = expected_mutual_info(&c);
    let mut denom = (hc + hk) / 2.0 - emi;
    if denom.abs() < 1e-12 {
        // both partitions all singletons: identical up to relabeling
        return Ok(ClusteringMetrics {
            homogeneity,
            completeness,
            nmi,
            adjusted_mi: 1.0,
            adjusted_rand: adjusted_rand(&c),
        });
    }
    denom = if denom < 0.0 {
        denom.min(-f64::EPSILON)
    } else {
        denom.max(f64::EPSILON)
    };
    Ok(ClusteringMetrics {
        homogeneity,
        completeness,
        nmi,
        adjusted_mi: (mi - emi) / denom,
        adjusted_rand: adjusted_rand(&c),
    })
}
