//! Independent reference implementations used as test oracles, plus small
//! data generators. Nothing here calls into the metric code under test.
#![allow(dead_code)]

pub mod sweep;

use std::collections::{BTreeMap, BTreeSet};

use flowvae_core::diffcore::Tensor;
use flowvae_core::ingest::{EmbeddingMatrix, LabelMatrix};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
pub use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn lm(rows: Vec<Vec<u8>>) -> LabelMatrix {
    let m = rows[0].len();
    LabelMatrix::from_rows((0..m).map(|j| format!("c{j}")).collect(), rows).unwrap()
}

/// Bits of `code` laid out as an `n × m` 0/1 matrix, row-major.
pub fn bits(code: u64, n: usize, m: usize) -> Vec<Vec<u8>> {
    (0..n)
        .map(|i| (0..m).map(|j| ((code >> (i * m + j)) & 1) as u8).collect())
        .collect()
}

/// Base-`levels` digits of `code` as scores.
pub fn levels(mut code: usize, n: usize, base: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push((code % base) as f64 / base as f64);
        code /= base;
    }
    out
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a.is_nan() && b.is_nan()) || (a - b).abs() <= tol
}

// ---- example-based scores, written from the set definitions ----

fn set(row: &[u8]) -> BTreeSet<usize> {
    row.iter().enumerate().filter(|(_, &v)| v == 1).map(|(j, _)| j).collect()
}

/// `[acc, hamming score, precision, recall, f1]`.
pub fn example_oracle(gold: &[Vec<u8>], pred: &[Vec<u8>]) -> [f64; 5] {
    let mut sums = [0.0; 5];
    for (g, p) in gold.iter().zip(pred) {
        let (y, yh) = (set(g), set(p));
        let inter = y.intersection(&yh).count() as f64;
        let union = y.union(&yh).count() as f64;
        let both_empty = y.is_empty() && yh.is_empty();
        sums[0] += (y == yh) as u8 as f64;
        sums[1] += if both_empty { 1.0 } else { inter / union };
        sums[2] += if both_empty {
            1.0
        } else if yh.is_empty() {
            0.0
        } else {
            inter / yh.len() as f64
        };
        sums[3] += if both_empty {
            1.0
        } else if y.is_empty() {
            0.0
        } else {
            inter / y.len() as f64
        };
        sums[4] += if both_empty {
            1.0
        } else {
            2.0 * inter / (y.len() + yh.len()) as f64
        };
    }
    sums.map(|s| s / gold.len() as f64)
}

/// Per-class precision, recall and F1 averaged over classes; 0 when a
/// denominator vanishes.
pub fn macro_oracle(gold: &[Vec<u8>], pred: &[Vec<u8>]) -> [f64; 3] {
    let m = gold[0].len();
    let mut out = [0.0; 3];
    for j in 0..m {
        let col = |x: &[Vec<u8>]| -> BTreeSet<usize> { (0..x.len()).filter(|&i| x[i][j] == 1).collect() };
        let (g, p) = (col(gold), col(pred));
        let tp = g.intersection(&p).count() as f64;
        let div = |a: f64, b: usize| if b == 0 { 0.0 } else { a / b as f64 };
        out[0] += div(tp, p.len());
        out[1] += div(tp, g.len());
        out[2] += div(2.0 * tp, g.len() + p.len());
    }
    out.map(|s| s / m as f64)
}

// ---- ranking scores ----

/// Items placed at or above position of `i` in a descending, stable ranking.
fn at_or_above(scores: &[f64], i: usize) -> impl Iterator<Item = usize> + '_ {
    (0..scores.len()).filter(move |&k| scores[k] > scores[i] || (scores[k] == scores[i] && k <= i))
}

/// Mean over positives of the precision of the prefix ending at that positive.
pub fn ap_oracle(gold: &[bool], scores: &[f64]) -> Option<f64> {
    let pos: Vec<usize> = (0..gold.len()).filter(|&i| gold[i]).collect();
    if pos.is_empty() {
        return None;
    }
    let total: f64 = pos
        .iter()
        .map(|&i| {
            let prefix: Vec<usize> = at_or_above(scores, i).collect();
            prefix.iter().filter(|&&k| gold[k]).count() as f64 / prefix.len() as f64
        })
        .sum();
    Some(total / pos.len() as f64)
}

/// Fraction of (positive, negative) pairs ordered correctly, ties as one half.
pub fn auc_oracle(gold: &[bool], scores: &[f64]) -> Option<f64> {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for i in 0..gold.len() {
        for k in 0..gold.len() {
            if gold[i] && !gold[k] {
                pairs += 1.0;
                wins += if scores[i] > scores[k] {
                    1.0
                } else if scores[i] == scores[k] {
                    0.5
                } else {
                    0.0
                };
            }
        }
    }
    (pairs > 0.0).then(|| wins / pairs)
}

/// Topics by descending score, ties in index order.
pub fn rank_topics(scores: &[f64]) -> Vec<usize> {
    let mut placed: Vec<(usize, usize)> = (0..scores.len())
        .map(|j| (at_or_above(scores, j).count(), j))
        .collect();
    placed.sort();
    placed.into_iter().map(|(_, j)| j).collect()
}

/// Average precision at k over a ranked list, as in the ml_metrics package.
pub fn apk_oracle(actual: &BTreeSet<usize>, predicted: &[usize], k: usize) -> f64 {
    let predicted = &predicted[..predicted.len().min(k)];
    let mut hits = 0.0;
    let mut score = 0.0;
    for (i, p) in predicted.iter().enumerate() {
        if actual.contains(p) && !predicted[..i].contains(p) {
            hits += 1.0;
            score += hits / (i as f64 + 1.0);
        }
    }
    if actual.is_empty() {
        return 0.0;
    }
    score / actual.len().min(k) as f64
}

/// Mean `apk` over examples with a non-empty gold set.
pub fn map_oracle(gold: &[Vec<u8>], scores: &[Vec<f64>], k: usize) -> f64 {
    let vals: Vec<f64> = gold
        .iter()
        .zip(scores)
        .filter(|(g, _)| g.contains(&1))
        .map(|(g, s)| apk_oracle(&set(g), &rank_topics(s), k))
        .collect();
    if vals.is_empty() {
        f64::NAN
    } else {
        vals.iter().sum::<f64>() / vals.len() as f64
    }
}

pub fn column(rows: &[Vec<u8>], j: usize) -> Vec<bool> {
    rows.iter().map(|r| r[j] == 1).collect()
}

/// Mean of a per-class oracle over classes where it is defined.
pub fn macro_ranking_oracle(
    gold: &[Vec<u8>],
    scores: &[Vec<f64>],
    f: fn(&[bool], &[f64]) -> Option<f64>,
) -> f64 {
    let vals: Vec<f64> = (0..gold[0].len())
        .filter_map(|j| {
            let s: Vec<f64> = scores.iter().map(|r| r[j]).collect();
            f(&column(gold, j), &s)
        })
        .collect();
    if vals.is_empty() {
        f64::NAN
    } else {
        vals.iter().sum::<f64>() / vals.len() as f64
    }
}

// ---- partition agreement ----

fn entropy_of(labels: &[usize]) -> f64 {
    let n = labels.len() as f64;
    let mut counts = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_insert(0usize) += 1;
    }
    counts.values().map(|&c| -(c as f64 / n) * (c as f64 / n).ln()).sum()
}

/// `H(a | b)` from the joint distribution.
fn conditional_entropy(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let mut joint = BTreeMap::new();
    let mut marg = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_insert(0usize) += 1;
        *marg.entry(y).or_insert(0usize) += 1;
    }
    joint
        .iter()
        .map(|(&(_, y), &c)| -(c as f64 / n) * (c as f64 / marg[&y] as f64).ln())
        .sum()
}

fn mi_of(a: &[usize], b: &[usize]) -> f64 {
    entropy_of(a) - conditional_entropy(a, b)
}

/// Heap's algorithm over all orderings of `items`.
fn for_each_permutation(items: &mut [usize], k: usize, f: &mut impl FnMut(&[usize])) {
    if k <= 1 {
        f(items);
        return;
    }
    for i in 0..k {
        for_each_permutation(items, k - 1, f);
        let j = if k % 2 == 0 { i } else { 0 };
        items.swap(j, k - 1);
    }
}

/// Mutual information averaged over every reordering of `b`.
pub fn permutation_emi(a: &[usize], b: &[usize]) -> f64 {
    let mut items = b.to_vec();
    let (mut total, mut count) = (0.0, 0.0);
    let len = items.len();
    for_each_permutation(&mut items, len, &mut |p| {
        total += mi_of(a, p);
        count += 1.0;
    });
    total / count
}

fn same_pairs(labels: &[usize]) -> f64 {
    let mut c = 0.0;
    for i in 0..labels.len() {
        for k in i + 1..labels.len() {
            c += (labels[i] == labels[k]) as u8 as f64;
        }
    }
    c
}

/// `[homogeneity, completeness, nmi, ami, ari]`.
pub fn clustering_oracle(gold: &[usize], pred: &[usize]) -> [f64; 5] {
    clustering_oracle_with(gold, pred, &mut |a, b| permutation_emi(a, b))
}

/// Cluster sizes in descending order.
pub fn size_profile(labels: &[usize]) -> Vec<usize> {
    let mut counts = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_insert(0usize) += 1;
    }
    let mut v: Vec<usize> = counts.into_values().collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

/// As `clustering_oracle`, with the expected mutual information supplied by
/// `emi` (which sees both labelings).
pub fn clustering_oracle_with(gold: &[usize], pred: &[usize], emi: &mut impl FnMut(&[usize], &[usize]) -> f64) -> [f64; 5] {
    let (hc, hk) = (entropy_of(gold), entropy_of(pred));
    let distinct = |x: &[usize]| x.iter().collect::<BTreeSet<_>>().len();
    if distinct(gold) == 1 && distinct(pred) == 1 {
        return [1.0; 5];
    }
    let h = if hc == 0.0 { 1.0 } else { 1.0 - conditional_entropy(gold, pred) / hc };
    let c = if hk == 0.0 { 1.0 } else { 1.0 - conditional_entropy(pred, gold) / hk };
    let nmi = if h + c == 0.0 { 0.0 } else { 2.0 * h * c / (h + c) };
    let emi = emi(gold, pred);
    let denom = (hc + hk) / 2.0 - emi;
    let ami = if denom.abs() < 1e-12 { 1.0 } else { (mi_of(gold, pred) - emi) / denom };

    let n = gold.len();
    let total = (n * (n - 1) / 2) as f64;
    let mut both = 0.0;
    for i in 0..n {
        for k in i + 1..n {
            both += (gold[i] == gold[k] && pred[i] == pred[k]) as u8 as f64;
        }
    }
    let (sa, sb) = (same_pairs(gold), same_pairs(pred));
    let expected = sa * sb / total;
    let max = (sa + sb) / 2.0;
    let ari = if max == expected { 1.0 } else { (both - expected) / (max - expected) };
    [h, c, nmi, ami, ari]
}

// ---- generators ----

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_tensor(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> Tensor {
    Tensor::new(vec![rows, cols], (0..rows * cols).map(|_| r.sample(StandardNormal)).collect()).unwrap()
}

/// Rotated Gaussian with covariance eigenvalues spaced geometrically from 1
/// to `kappa`, centred away from the origin.
pub fn anisotropic_gaussian(n: usize, v: usize, kappa: f64, seed: u64) -> EmbeddingMatrix {
    let mut r = rng(seed);
    let g = DMatrix::from_fn(v, v, |_, _| r.sample::<f64, _>(StandardNormal));
    let q = g.qr().q();
    let sd: Vec<f64> = (0..v)
        .map(|j| kappa.powf(j as f64 / (v - 1).max(1) as f64).sqrt())
        .collect();
    let mean: Vec<f64> = (0..v).map(|j| 2.0 + 0.5 * j as f64).collect();
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let eps: Vec<f64> = sd.iter().map(|s| s * r.sample::<f64, _>(StandardNormal)).collect();
        rows.push((0..v).map(|a| mean[a] + (0..v).map(|b| q[(a, b)] * eps[b]).sum::<f64>()).collect());
    }
    EmbeddingMatrix::from_rows(&rows).unwrap()
}

/// Per-column mean and (population) variance.
pub fn moments(x: &Tensor) -> (Vec<f64>, Vec<f64>) {
    let n = x.rows() as f64;
    let mean: Vec<f64> = (0..x.cols()).map(|j| (0..x.rows()).map(|i| x.get(i, j)).sum::<f64>() / n).collect();
    let var = (0..x.cols())
        .map(|j| (0..x.rows()).map(|i| (x.get(i, j) - mean[j]).powi(2)).sum::<f64>() / n)
        .collect();
    (mean, var)
}

/// Unbiased sample covariance, computed directly from the sums.
pub fn covariance(x: &Tensor) -> Vec<Vec<f64>> {
    let (mean, _) = moments(x);
    let n = x.rows();
    (0..x.cols())
        .map(|a| {
            (0..x.cols())
                .map(|b| (0..n).map(|i| (x.get(i, a) - mean[a]) * (x.get(i, b) - mean[b])).sum::<f64>() / (n - 1) as f64)
                .collect()
        })
        .collect()
}

/// Composite Simpson rule on `[a, b]` with `intervals` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let h = (b - a) / intervals as f64;
    let mut s = f(a) + f(b);
    for k in 1..intervals {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// `KL(N(μ, σ²) || N(0, 1))` by quadrature of `q·ln(q/p)`.
pub fn kl_quadrature(mu: f64, sigma: f64) -> f64 {
    let q = |x: f64| (-(x - mu).powi(2) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let log_ratio = |x: f64| -(x - mu).powi(2) / (2.0 * sigma * sigma) - sigma.ln() + x * x / 2.0;
    simpson(|x| q(x) * log_ratio(x), mu - 14.0 * sigma, mu + 14.0 * sigma, 20_000)
}
