use nalgebra::{DMatrix, SymmetricEigen};

use crate::diffcore::Tensor;
use crate::error::{Error, Result};
use crate::ingest::EmbeddingMatrix;

/// Eigenvalues at or below this fraction of the largest are discarded.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Closed-form whitening: `(x − mean) · transform`.
#[derive(Clone, Debug, PartialEq)]
pub struct WhiteningTransform {
    pub mean: Vec<f64>,
    /// `V × k`, one column per retained eigen-direction scaled by `1/√λ`.
    pub transform: Tensor,
}

impl WhiteningTransform {
    pub fn rank(&self) -> usize {
        self.transform.cols()
    }
}

fn centered(x: &Tensor, mean: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(x.rows(), x.cols(), |i, j| x.get(i, j) - mean[j])
}

pub fn whiten_fit(x: &EmbeddingMatrix) -> Result<WhiteningTransform> {
    let (n, v) = (x.n(), x.dim());
    if n < 2 {
        return Err(Error::Contract(format!("whitening needs N ≥ 2, got {n}")));
    }
    let vals = x.values();
    let mean: Vec<f64> = (0..v)
        .map(|j| (0..n).map(|i| vals.get(i, j)).sum::<f64>() / n as f64)
        .collect();
    let c = centered(vals, &mean);
    let cov = (c.transpose() * &c) / (n as f64 - 1.0);
    let eig = SymmetricEigen::new(cov);
    let lmax = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    if !(lmax > 0.0) {
        return Err(Error::Contract("data has rank 0; cannot whiten".into()));
    }
    let mut keep: Vec<usize> = (0..v)
        .filter(|&j| eig.eigenvalues[j] > RANK_TOLERANCE * lmax)
        .collect();
    keep.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let k = keep.len();
    let mut t = Tensor::zeros(&[v, k]);
    for (col, &j) in keep.iter().enumerate() {
        let inv = 1.0 / eig.eigenvalues[j].sqrt();
        // fix the sign so the largest-magnitude loading is positive
        let u = eig.eigenvectors.column(j);
        let pivot = u.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for r in 0..v {
            t.set(r, col, sign * u[r] * inv);
        }
    }
    Ok(WhiteningTransform { mean, transform: t })
}

pub fn whiten_apply(t: &WhiteningTransform, x: &EmbeddingMatrix) -> Result<EmbeddingMatrix> {
    if x.dim() != t.mean.len() {
        return Err(Error::Dimension(format!(
            "whitening expects width {}, got {}",
            t.mean.len(),
            x.dim()
        )));
    }
    let c = centered(x.values(), &t.mean);
    let mut rows = Vec::with_capacity(x.n() * t.rank());
    let tm = DMatrix::from_fn(t.transform.rows(), t.rank(), |i, j| t.transform.get(i, j));
    let out = c * tm;
    for i in 0..x.n() {
        rows.extend(out.row(i).iter().copied());
    }
    let mut prov = x.provenance.clone();
    prov.calibration = Some("whiten".into());
    EmbeddingMatrix::new(Tensor::new(vec![x.n(), t.rank()], rows)?, prov)
}

/// Sample covariance (N−1 denominator) of the rows of `x`.
pub fn sample_covariance(x: &Tensor) -> DMatrix<f64> {
    let n = x.rows();
    let mean: Vec<f64> = (0..x.cols())
        .map(|j| (0..n).map(|i| x.get(i, j)).sum::<f64>() / n as f64)
        .collect();
    let c = centered(x, &mean);
    (c.transpose() * &c) / (n as f64 - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn gaussian(n: usize, scales: &[f64], seed: u64) -> EmbeddingMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| scales.iter().map(|s| s * rng.sample::<f64, _>(StandardNormal) + 1.5).collect())
            .collect();
        EmbeddingMatrix::from_rows(&rows).unwrap()
    }

    fn identity_error(x: &EmbeddingMatrix) -> f64 {
        let c = sample_covariance(x.values());
        let k = c.nrows();
        (c - DMatrix::<f64>::identity(k, k)).abs().max()
    }

    #[test]
    fn diag_four_one_becomes_identity() {
        let x = gaussian(500, &[2.0, 1.0], 1);
        let w = whiten_fit(&x).unwrap();
        assert!(identity_error(&whiten_apply(&w, &x).unwrap()) < 1e-6);
    }

    #[test]
    fn white_data_gives_near_orthogonal_transform() {
        let x = gaussian(4000, &[1.0, 1.0, 1.0], 2);
        let w = whiten_fit(&x).unwrap();
        assert!(identity_error(&whiten_apply(&w, &x).unwrap()) < 1e-8);
        let t = DMatrix::from_fn(3, 3, |i, j| w.transform.get(i, j));
        let gram = t.transpose() * &t;
        assert!((gram - DMatrix::<f64>::identity(3, 3)).abs().max() < 0.15);
    }

    #[test]
    fn fewer_rows_than_columns() {
        let x = gaussian(4, &[1.0; 10], 3);
        let w = whiten_fit(&x).unwrap();
        assert!(w.rank() <= 3);
        assert!(identity_error(&whiten_apply(&w, &x).unwrap()) < 1e-6);
    }

    #[test]
    fn constant_data_is_rank_zero() {
        let x = EmbeddingMatrix::from_rows(&[vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        assert!(matches!(whiten_fit(&x), Err(Error::Contract(_))));
    }
}
