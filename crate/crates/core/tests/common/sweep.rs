//! Metric-versus-oracle comparisons over enumerated and random instances.
//! Each returns how many instances were checked and the worst difference.

use flowvae_core::diffcore::Tensor;
use flowvae_core::metrics::{
    average_precision, clustering_metrics, example_metrics, macro_average_precision, macro_prf, macro_roc_auc,
    map_at_k, roc_auc,
};
use rand::Rng;

use super::*;

pub struct Tally {
    pub cases: usize,
    pub worst: f64,
}

impl Tally {
    fn new() -> Self {
        Tally { cases: 0, worst: 0.0 }
    }

    fn see(&mut self, got: f64, want: f64) {
        let d = if got.is_nan() && want.is_nan() {
            0.0
        } else if got.is_nan() || want.is_nan() {
            f64::INFINITY
        } else {
            (got - want).abs()
        };
        self.worst = self.worst.max(d);
    }
}

/// Shapes with at most 8 rows and 4 columns whose full gold × prediction
/// space has at most 4^6 pairs.
fn small_shapes() -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for n in 1..=8 {
        for m in 1..=4 {
            if n * m <= 6 {
                out.push((n, m));
            }
        }
    }
    out
}

fn random_matrix(r: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Vec<u8>> {
    (0..n).map(|_| (0..m).map(|_| r.random_range(0..2u8)).collect()).collect()
}

fn random_scores(r: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Vec<f64>> {
    // few distinct values so ties are common
    (0..n).map(|_| (0..m).map(|_| r.random_range(0..4) as f64 / 4.0).collect()).collect()
}

fn tensor(rows: &[Vec<f64>]) -> Tensor {
    Tensor::from_rows(rows).unwrap()
}

fn check_binary(t: &mut Tally, g: &[Vec<u8>], p: &[Vec<u8>]) {
    let (gm, pm) = (lm(g.to_vec()), lm(p.to_vec()));
    let e = example_metrics(&gm, &pm).unwrap();
    let want = example_oracle(g, p);
    for (got, want) in [e.acc, e.hamming_score, e.precision, e.recall, e.f1].iter().zip(want) {
        t.see(*got, want);
    }
    let (mp, mr, mf) = macro_prf(&gm, &pm).unwrap();
    for (got, want) in [mp, mr, mf].iter().zip(macro_oracle(g, p)) {
        t.see(*got, want);
    }
    t.cases += 1;
}

/// Example-based and macro scores: every gold/prediction pair on the small
/// shapes, every column pair up to 8 rows, then random 8 × 4 instances.
pub fn binary_scores(random: usize, seed: u64) -> Tally {
    let mut t = Tally::new();
    for (n, m) in small_shapes() {
        let cells = n * m;
        for a in 0..1u64 << cells {
            for b in 0..1u64 << cells {
                check_binary(&mut t, &bits(a, n, m), &bits(b, n, m));
            }
        }
    }
    for n in 7..=8 {
        for a in 0..1u64 << n {
            for b in 0..1u64 << n {
                check_binary(&mut t, &bits(a, n, 1), &bits(b, n, 1));
            }
        }
    }
    let mut r = rng(seed);
    for _ in 0..random {
        let (n, m) = (r.random_range(1..=8), r.random_range(1..=4));
        check_binary(&mut t, &random_matrix(&mut r, n, m), &random_matrix(&mut r, n, m));
    }
    t
}

/// Per-class AP and AUC on every gold column and every score vector over a
/// small tie-heavy alphabet, then macro averages on random matrices.
pub fn ranking_scores(random: usize, seed: u64) -> Tally {
    let mut t = Tally::new();
    for n in 1..=8 {
        let base: usize = if n <= 7 { 3 } else { 2 };
        for a in 0..1u64 << n {
            let gold: Vec<bool> = (0..n).map(|i| (a >> i) & 1 == 1).collect();
            for code in 0..base.pow(n as u32) {
                let s = levels(code, n, base);
                let ap = average_precision(&gold, &s).unwrap();
                let auc = roc_auc(&gold, &s).unwrap();
                t.see(ap.unwrap_or(f64::NAN), ap_oracle(&gold, &s).unwrap_or(f64::NAN));
                t.see(auc.unwrap_or(f64::NAN), auc_oracle(&gold, &s).unwrap_or(f64::NAN));
                t.cases += 1;
            }
        }
    }
    let mut r = rng(seed);
    for _ in 0..random {
        let (n, m) = (r.random_range(1..=8), r.random_range(1..=4));
        let g = random_matrix(&mut r, n, m);
        let s = random_scores(&mut r, n, m);
        let (gm, st) = (lm(g.clone()), tensor(&s));
        t.see(macro_average_precision(&gm, &st).unwrap(), macro_ranking_oracle(&g, &s, ap_oracle));
        t.see(macro_roc_auc(&gm, &st).unwrap(), macro_ranking_oracle(&g, &s, auc_oracle));
        t.cases += 1;
    }
    t
}

/// MAP@3: every gold row and score row up to 4 topics, then random matrices.
pub fn map_scores(random: usize, seed: u64) -> Tally {
    let mut t = Tally::new();
    for m in 1..=4 {
        for a in 0..1u64 << m {
            let g = bits(a, 1, m);
            for code in 0..3usize.pow(m as u32) {
                let s = vec![levels(code, m, 3)];
                t.see(map_at_k(&lm(g.clone()), &tensor(&s), 3).unwrap(), map_oracle(&g, &s, 3));
                t.cases += 1;
            }
        }
    }
    let mut r = rng(seed);
    for _ in 0..random {
        let (n, m) = (r.random_range(1..=8), r.random_range(1..=4));
        let g = random_matrix(&mut r, n, m);
        let s = random_scores(&mut r, n, m);
        t.see(map_at_k(&lm(g.clone()), &tensor(&s), 3).unwrap(), map_oracle(&g, &s, 3));
        t.cases += 1;
    }
    t
}

fn check_partition(t: &mut Tally, g: &[usize], p: &[usize]) {
    let c = clustering_metrics(g, p).unwrap();
    let got = [c.homogeneity, c.completeness, c.nmi, c.adjusted_mi, c.adjusted_rand];
    for (a, b) in got.iter().zip(clustering_oracle(g, p)) {
        t.see(*a, b);
    }
    t.cases += 1;
}

fn digits(mut code: usize, n: usize, base: usize) -> Vec<usize> {
    (0..n)
        .map(|_| {
            let d = code % base;
            code /= base;
            d
        })
        .collect()
}

/// Clustering scores: every pair of labelings with up to 4 examples and 4
/// classes, then random labelings of 5 to 8 examples.
pub fn partition_scores(random: usize, seed: u64) -> Tally {
    let mut t = Tally::new();
    for n in 2..=4 {
        let total = 4usize.pow(n as u32);
        for a in 0..total {
            for b in 0..total {
                check_partition(&mut t, &digits(a, n, 4), &digits(b, n, 4));
            }
        }
    }
    let mut r = rng(seed);
    for _ in 0..random {
        let n = r.random_range(5..=8);
        let g: Vec<usize> = (0..n).map(|_| r.random_range(0..4)).collect();
        let p: Vec<usize> = (0..n).map(|_| r.random_range(0..4)).collect();
        check_partition(&mut t, &g, &p);
    }
    t
}

/// Labelings of `n` items into at most `k` classes with first occurrences
/// in increasing order: one per partition, every other labeling is a
/// relabeling of one of these.
pub fn canonical_labelings(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn grow(cur: &mut Vec<usize>, n: usize, k: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let next = cur.iter().max().map_or(0, |m| m + 1);
        for l in 0..=next.min(k - 1) {
            cur.push(l);
            grow(cur, n, k, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), n, k, &mut out);
    out
}

/// Clustering scores on every pair of partitions of `2..=max_n` items into
/// at most 4 classes. The permutation expectation of the mutual information
/// is a function of the two size profiles alone, so it is enumerated once per
/// profile pair.
pub fn all_partition_scores(max_n: usize) -> Tally {
    let mut t = Tally::new();
    let mut emi_cache = std::collections::HashMap::new();
    let mut emi = |a: &[usize], b: &[usize]| {
        *emi_cache
            .entry((size_profile(a), size_profile(b)))
            .or_insert_with(|| permutation_emi(a, b))
    };
    for n in 2..=max_n {
        let parts = canonical_labelings(n, 4);
        for g in &parts {
            for p in &parts {
                let c = clustering_metrics(g, p).unwrap();
                let got = [c.homogeneity, c.completeness, c.nmi, c.adjusted_mi, c.adjusted_rand];
                for (a, b) in got.iter().zip(clustering_oracle_with(g, p, &mut emi)) {
                    t.see(*a, b);
                }
                t.cases += 1;
            }
        }
    }
    t
}

/// Largest `|ARI|` and `|AMI|` over independent uniform labelings.
pub fn chance_adjusted(n: usize, k: usize, trials: usize, seed: u64) -> (f64, f64) {
    let mut r = rng(seed);
    let (mut ari, mut ami) = (0.0f64, 0.0f64);
    for _ in 0..trials {
        let g: Vec<usize> = (0..n).map(|_| r.random_range(0..k)).collect();
        let p: Vec<usize> = (0..n).map(|_| r.random_range(0..k)).collect();
        let c = clustering_metrics(&g, &p).unwrap();
        ari = ari.max(c.adjusted_rand.abs());
        ami = ami.max(c.adjusted_mi.abs());
    }
    (ari, ami)
}
