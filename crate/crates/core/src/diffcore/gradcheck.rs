//! Central finite-difference check of analytic gradients.

use super::tensor::Tensor;
use crate::error::{Error, Result};

/// Relative error with a floored denominator, `|a − n| / max(|a|, |n|, 1e-8)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

/// Central-difference gradient of a scalar function at `x`.
pub fn numeric_gradient<F>(mut f: F, x: &Tensor, h: f64) -> Result<Tensor>
where
    F: FnMut(&Tensor) -> Result<f64>,
{
    if !(1e-7..=1e-3).contains(&h) {
        return Err(Error::Contract(format!("probe step {h} outside [1e-7, 1e-3]")));
    }
    let mut probe = x.clone();
    let mut out = Tensor::zeros(x.shape());
    for i in 0..x.numel() {
        let orig = probe.data()[i];
        probe.data_mut()[i] = orig + h;
        let up = f(&probe)?;
        probe.data_mut()[i] = orig - h;
        let down = f(&probe)?;
        probe.data_mut()[i] = orig;
        if !up.is_finite() || !down.is_finite() {
            return Err(Error::Numeric(format!("function not finite near coordinate {i}")));
        }
        out.data_mut()[i] = (up - down) / (2.0 * h);
    }
    Ok(out)
}

/// Maximum relative error between `analytic` and the central-difference
/// gradient of `f` at `x`.
pub fn numeric_grad_check<F>(f: F, x: &Tensor, analytic: &Tensor, h: f64) -> Result<f64>
where
    F: FnMut(&Tensor) -> Result<f64>,
{
    x.expect_same_shape(analytic)?;
    let numeric = numeric_gradient(f, x, h)?;
    Ok(analytic
        .data()
        .iter()
        .zip(numeric.data())
        .map(|(&a, &n)| relative_error(a, n))
        .fold(0.0, f64::max))
}
