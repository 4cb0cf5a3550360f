//! Parameter containers and the dense building block shared by the flow and
//! the VAE: `PReLU(LayerNorm(x·W + b))`.

use std::collections::BTreeMap;

use rand::Rng;

use super::graph::{layer_norm_rows, prelu_scalar, Graph, NodeId};
use super::tensor::{matmul, Tensor};
use crate::error::{Error, Result};

/// Initial PReLU slope.
pub const PRELU_INIT: f64 = 0.25;

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub value: Tensor,
    /// Whether decoupled weight decay applies (false for biases and
    /// LayerNorm gains/biases).
    pub decay: bool,
}

/// Named trainable parameters, iterated in name order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamSet {
    params: BTreeMap<String, Param>,
}

impl ParamSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Tensor, decay: bool) -> Result<()> {
        let name = name.into();
        if self.params.contains_key(&name) {
            return Err(Error::Contract(format!("duplicate parameter {name}")));
        }
        self.params.insert(name, Param { value, decay });
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Param> {
        self.params.get(name)
    }

    pub fn tensor(&self, name: &str) -> Result<&Tensor> {
        self.params
            .get(name)
            .map(|p| &p.value)
            .ok_or_else(|| Error::Contract(format!("missing parameter {name}")))
    }

    pub fn tensor_mut(&mut self, name: &str) -> Result<&mut Tensor> {
        self.params
            .get_mut(name)
            .map(|p| &mut p.value)
            .ok_or_else(|| Error::Contract(format!("missing parameter {name}")))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Param)> {
        self.params.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&String, &mut Param)> {
        self.params.iter_mut()
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn num_scalars(&self) -> usize {
        self.params.values().map(|p| p.value.numel()).sum()
    }

    /// Registers every parameter as a graph leaf.
    pub fn bind(&self, g: &mut Graph) -> Bound {
        Bound(
            self.params
                .iter()
                .map(|(name, p)| (name.clone(), g.param(name.clone(), p.value.clone())))
                .collect(),
        )
    }
}

/// Graph node ids of a bound [`ParamSet`].
#[derive(Debug)]
pub struct Bound(BTreeMap<String, NodeId>);

impl Bound {
    pub fn id(&self, name: &str) -> Result<NodeId> {
        self.0
            .get(name)
            .copied()
            .ok_or_else(|| Error::Contract(format!("parameter {name} not bound")))
    }
}

/// PyTorch-style uniform init in `±1/√fan_in` for weight and bias.
pub fn init_linear<R: Rng>(
    params: &mut ParamSet,
    prefix: &str,
    din: usize,
    dout: usize,
    rng: &mut R,
) -> Result<()> {
    let bound = 1.0 / (din as f64).sqrt();
    let w: Vec<f64> = (0..din * dout)
        .map(|_| rng.random_range(-bound..bound))
        .collect();
    let b: Vec<f64> = (0..dout).map(|_| rng.random_range(-bound..bound)).collect();
    params.insert(format!("{prefix}.w"), Tensor::new(vec![din, dout], w)?, true)?;
    params.insert(format!("{prefix}.b"), Tensor::new(vec![dout], b)?, false)?;
    Ok(())
}

/// Linear layer whose weight and bias start at zero.
pub fn init_linear_zero(params: &mut ParamSet, prefix: &str, din: usize, dout: usize) -> Result<()> {
    params.insert(format!("{prefix}.w"), Tensor::zeros(&[din, dout]), true)?;
    params.insert(format!("{prefix}.b"), Tensor::zeros(&[dout]), false)?;
    Ok(())
}

pub fn init_mlp_block<R: Rng>(
    params: &mut ParamSet,
    prefix: &str,
    din: usize,
    dout: usize,
    rng: &mut R,
) -> Result<()> {
    init_linear(params, prefix, din, dout, rng)?;
    params.insert(format!("{prefix}.ln_gain"), Tensor::full(&[dout], 1.0), false)?;
    params.insert(format!("{prefix}.ln_bias"), Tensor::zeros(&[dout]), false)?;
    params.insert(format!("{prefix}.prelu"), Tensor::scalar(PRELU_INIT), true)?;
    Ok(())
}

pub fn linear_node(g: &mut Graph, p: &Bound, prefix: &str, x: NodeId) -> Result<NodeId> {
    let w = p.id(&format!("{prefix}.w"))?;
    let b = p.id(&format!("{prefix}.b"))?;
    g.linear(x, w, b)
}

pub fn mlp_block_node(g: &mut Graph, p: &Bound, prefix: &str, x: NodeId) -> Result<NodeId> {
    let h = linear_node(g, p, prefix, x)?;
    let gain = p.id(&format!("{prefix}.ln_gain"))?;
    let bias = p.id(&format!("{prefix}.ln_bias"))?;
    let h = g.layer_norm(h, gain, bias)?;
    let slope = p.id(&format!("{prefix}.prelu"))?;
    g.prelu(h, slope)
}

/// Gradient-free evaluation of one block.
pub fn mlp_block_forward(
    x: &Tensor,
    w: &Tensor,
    b: &Tensor,
    ln_gain: &Tensor,
    ln_bias: &Tensor,
    prelu_a: f64,
) -> Result<Tensor> {
    if !x.all_finite() {
        return Err(Error::Numeric("mlp block input is not finite".into()));
    }
    let (_, dout) = w.expect_rank2("weight")?;
    if b.numel() != dout || ln_gain.numel() != dout || ln_bias.numel() != dout {
        return Err(Error::Dimension(format!(
            "bias/gain/shift must have {dout} entries"
        )));
    }
    let mut h = matmul(x, w)?;
    for i in 0..h.rows() {
        for (v, bv) in h.row_mut(i).iter_mut().zip(b.data()) {
            *v += bv;
        }
    }
    let (mut y, _) = layer_norm_rows(&h);
    for i in 0..y.rows() {
        let row = y.row_mut(i);
        for ((v, gv), bv) in row.iter_mut().zip(ln_gain.data()).zip(ln_bias.data()) {
            *v = prelu_scalar(*v * gv + bv, prelu_a);
        }
    }
    Ok(y)
}

/// Plain forward of a named block stored in `params`.
pub fn mlp_block_eval(params: &ParamSet, prefix: &str, x: &Tensor) -> Result<Tensor> {
    mlp_block_forward(
        x,
        params.tensor(&format!("{prefix}.w"))?,
        params.tensor(&format!("{prefix}.b"))?,
        params.tensor(&format!("{prefix}.ln_gain"))?,
        params.tensor(&format!("{prefix}.ln_bias"))?,
        params.tensor(&format!("{prefix}.prelu"))?.data()[0],
    )
}

/// Plain forward of a named linear layer stored in `params`.
pub fn linear_eval(params: &ParamSet, prefix: &str, x: &Tensor) -> Result<Tensor> {
    let mut h = matmul(x, params.tensor(&format!("{prefix}.w"))?)?;
    let b = params.tensor(&format!("{prefix}.b"))?;
    for i in 0..h.rows() {
        for (v, bv) in h.row_mut(i).iter_mut().zip(b.data()) {
            *v += bv;
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn eye(n: usize) -> Tensor {
        let mut t = Tensor::zeros(&[n, n]);
        for i in 0..n {
            t.set(i, i, 1.0);
        }
        t
    }

    #[test]
    fn zero_input_gives_zero_output() {
        let x = Tensor::zeros(&[3, 4]);
        let w = Tensor::full(&[4, 5], 0.3);
        let y = mlp_block_forward(
            &x,
            &w,
            &Tensor::zeros(&[5]),
            &Tensor::full(&[5], 1.0),
            &Tensor::zeros(&[5]),
            PRELU_INIT,
        )
        .unwrap();
        assert!(y.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn two_wide_row_normalizes_then_leaks() {
        let x = Tensor::new(vec![1, 2], vec![1.0, -1.0]).unwrap();
        let y = mlp_block_forward(
            &x,
            &eye(2),
            &Tensor::zeros(&[2]),
            &Tensor::full(&[2], 1.0),
            &Tensor::zeros(&[2]),
            0.25,
        )
        .unwrap();
        assert!((y.data()[0] - 1.0).abs() < 1e-12);
        assert!((y.data()[1] + 0.25).abs() < 1e-12);
    }

    #[test]
    fn layer_norm_rows_are_standardized() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = Tensor::new(vec![4, 3], (0..12).map(|_| rng.random_range(-5.0..5.0)).collect())
            .unwrap();
        let (y, _) = layer_norm_rows(&x);
        for i in 0..4 {
            let r = y.row(i);
            let mean = r.iter().sum::<f64>() / 3.0;
            let var = r.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 3.0;
            assert!(mean.abs() < 1e-12);
            assert!((var - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let x = Tensor::new(vec![1, 2], vec![f64::NAN, 0.0]).unwrap();
        let err = mlp_block_forward(
            &x,
            &eye(2),
            &Tensor::zeros(&[2]),
            &Tensor::full(&[2], 1.0),
            &Tensor::zeros(&[2]),
            0.25,
        );
        assert!(matches!(err, Err(Error::Numeric(_))));
    }

    #[test]
    fn shape_mismatch_is_a_dimension_error() {
        let x = Tensor::zeros(&[1, 3]);
        let err = mlp_block_forward(
            &x,
            &eye(2),
            &Tensor::zeros(&[2]),
            &Tensor::full(&[2], 1.0),
            &Tensor::zeros(&[2]),
            0.25,
        );
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn graph_block_matches_plain_forward() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut ps = ParamSet::new();
        init_mlp_block(&mut ps, "l1", 3, 4, &mut rng).unwrap();
        let x = Tensor::new(vec![2, 3], (0..6).map(|_| rng.random_range(-1.0..1.0)).collect())
            .unwrap();
        let plain = mlp_block_eval(&ps, "l1", &x).unwrap();
        let mut g = Graph::new();
        let bound = ps.bind(&mut g);
        let xn = g.constant(x);
        let y = mlp_block_node(&mut g, &bound, "l1", xn).unwrap();
        assert!(plain.max_abs_diff(g.value(y)) < 1e-14);
    }
}
