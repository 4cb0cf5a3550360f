//! Tape-based reverse-mode differentiation over dense tensors.
//!
//! A [`Graph`] records every operation applied during a forward pass. Node
//! ids are handed out in creation order, so each node's inputs always have
//! smaller ids and a single reverse sweep visits the tape in topological
//! order.

use std::collections::BTreeMap;

use super::sigmoid;
use super::tensor::{gemm, Tensor};
use crate::error::{Error, Result};

/// LayerNorm rows whose standard deviation falls below this floor are
/// divided by the floor instead; exactly constant rows normalize to zero.
pub const LAYER_NORM_EPS: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(usize);

#[derive(Debug)]
enum Op {
    Constant,
    Param(String),
    MatMul(NodeId, NodeId),
    AddBias(NodeId, NodeId),
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Scale(NodeId, f64),
    Exp(NodeId),
    Tanh(NodeId),
    Square(NodeId),
    LogSigmoid(NodeId),
    Sum(NodeId),
    Mean(NodeId),
    SumCols(NodeId),
    SliceCols(NodeId, usize, usize),
    ConcatCols(NodeId, NodeId),
    GatherCols(NodeId, Vec<usize>),
    LayerNorm {
        x: NodeId,
        gain: NodeId,
        bias: NodeId,
        xhat: Tensor,
        inv_std: Vec<f64>,
    },
    PRelu(NodeId, NodeId),
}

#[derive(Debug)]
struct Node {
    value: Tensor,
    op: Op,
}

/// Recorded computation.
#[derive(Debug, Default)]
pub struct Graph {
    nodes: Vec<Node>,
}

/// Gradients keyed by parameter name.
pub type Gradients = BTreeMap<String, Tensor>;

/// Numerically stable `ln(sigmoid(x))`.
pub fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Row-wise normalization kernel shared by the graph op and plain forward.
pub(crate) fn layer_norm_rows(x: &Tensor) -> (Tensor, Vec<f64>) {
    let (rows, cols) = (x.rows(), x.cols());
    let mut xhat = Tensor::zeros(&[rows, cols]);
    let mut inv_std = vec![0.0; rows];
    for i in 0..rows {
        let row = x.row(i);
        let mean = row.iter().sum::<f64>() / cols as f64;
        let var = row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / cols as f64;
        let std = var.sqrt();
        let out = xhat.row_mut(i);
        if var == 0.0 {
            // constant row: output stays zero, no gradient through x
            continue;
        }
        let inv = 1.0 / std.max(LAYER_NORM_EPS);
        inv_std[i] = inv;
        for (o, v) in out.iter_mut().zip(row) {
            *o = (v - mean) * inv;
        }
    }
    (xhat, inv_std)
}

pub(crate) fn prelu_scalar(x: f64, slope: f64) -> f64 {
    if x >= 0.0 {
        x
    } else {
        slope * x
    }
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor, op: Op) -> NodeId {
        self.nodes.push(Node { value, op });
        NodeId(self.nodes.len() - 1)
    }

    pub fn value(&self, id: NodeId) -> &Tensor {
        &self.nodes[id.0].value
    }

    /// Input data that receives no gradient.
    pub fn constant(&mut self, value: Tensor) -> NodeId {
        self.push(value, Op::Constant)
    }

    /// Trainable leaf; its gradient is reported under `name`.
    pub fn param(&mut self, name: impl Into<String>, value: Tensor) -> NodeId {
        self.push(value, Op::Param(name.into()))
    }

    pub fn matmul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let (m, k) = self.value(a).expect_rank2("matmul lhs")?;
        let (k2, n) = self.value(b).expect_rank2("matmul rhs")?;
        if k != k2 {
            return Err(Error::Dimension(format!("matmul inner dims {k} vs {k2}")));
        }
        let mut out = vec![0.0; m * n];
        gemm(
            m,
            k,
            n,
            self.value(a).data(),
            false,
            self.value(b).data(),
            false,
            &mut out,
            false,
        );
        Ok(self.push(Tensor::new(vec![m, n], out)?, Op::MatMul(a, b)))
    }

    /// Adds a bias vector to every row.
    pub fn add_bias(&mut self, x: NodeId, b: NodeId) -> Result<NodeId> {
        let (_, cols) = self.value(x).expect_rank2("add_bias input")?;
        if self.value(b).numel() != cols {
            return Err(Error::Dimension(format!(
                "bias of {} entries for width {cols}",
                self.value(b).numel()
            )));
        }
        let mut out = self.value(x).clone();
        let bias = self.value(b).data().to_vec();
        for i in 0..out.rows() {
            for (o, bv) in out.row_mut(i).iter_mut().zip(&bias) {
                *o += bv;
            }
        }
        Ok(self.push(out, Op::AddBias(x, b)))
    }

    /// `x·W + b`.
    pub fn linear(&mut self, x: NodeId, w: NodeId, b: NodeId) -> Result<NodeId> {
        let xw = self.matmul(x, w)?;
        self.add_bias(xw, b)
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let v = self.value(a).zip_map(self.value(b), |x, y| x + y)?;
        Ok(self.push(v, Op::Add(a, b)))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let v = self.value(a).zip_map(self.value(b), |x, y| x - y)?;
        Ok(self.push(v, Op::Sub(a, b)))
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let v = self.value(a).zip_map(self.value(b), |x, y| x * y)?;
        Ok(self.push(v, Op::Mul(a, b)))
    }

    pub fn scale(&mut self, a: NodeId, k: f64) -> NodeId {
        let v = self.value(a).map(|x| x * k);
        self.push(v, Op::Scale(a, k))
    }

    pub fn exp(&mut self, a: NodeId) -> NodeId {
        let v = self.value(a).map(f64::exp);
        self.push(v, Op::Exp(a))
    }

    pub fn tanh(&mut self, a: NodeId) -> NodeId {
        let v = self.value(a).map(f64::tanh);
        self.push(v, Op::Tanh(a))
    }

    pub fn square(&mut self, a: NodeId) -> NodeId {
        let v = self.value(a).map(|x| x * x);
        self.push(v, Op::Square(a))
    }

    pub fn log_sigmoid(&mut self, a: NodeId) -> NodeId {
        let v = self.value(a).map(log_sigmoid);
        self.push(v, Op::LogSigmoid(a))
    }

    pub fn sum(&mut self, a: NodeId) -> NodeId {
        let v = Tensor::scalar(self.value(a).sum());
        self.push(v, Op::Sum(a))
    }

    pub fn mean(&mut self, a: NodeId) -> NodeId {
        let t = self.value(a);
        let v = Tensor::scalar(t.sum() / t.numel() as f64);
        self.push(v, Op::Mean(a))
    }

    /// Per-row sums of a rank-2 tensor, as a length-`rows` vector.
    pub fn sum_cols(&mut self, a: NodeId) -> Result<NodeId> {
        let (rows, _) = self.value(a).expect_rank2("sum_cols input")?;
        let t = self.value(a);
        let data: Vec<f64> = (0..rows).map(|i| t.row(i).iter().sum()).collect();
        Ok(self.push(Tensor::new(vec![rows], data)?, Op::SumCols(a)))
    }

    /// Columns `start..end`.
    pub fn slice_cols(&mut self, a: NodeId, start: usize, end: usize) -> Result<NodeId> {
        let (rows, cols) = self.value(a).expect_rank2("slice_cols input")?;
        if start >= end || end > cols {
            return Err(Error::Dimension(format!(
                "column slice {start}..{end} of width {cols}"
            )));
        }
        let t = self.value(a);
        let mut data = Vec::with_capacity(rows * (end - start));
        for i in 0..rows {
            data.extend_from_slice(&t.row(i)[start..end]);
        }
        let v = Tensor::new(vec![rows, end - start], data)?;
        Ok(self.push(v, Op::SliceCols(a, start, end)))
    }

    pub fn concat_cols(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let (ra, ca) = self.value(a).expect_rank2("concat lhs")?;
        let (rb, cb) = self.value(b).expect_rank2("concat rhs")?;
        if ra != rb {
            return Err(Error::Dimension(format!("concat rows {ra} vs {rb}")));
        }
        let (ta, tb) = (self.value(a), self.value(b));
        let mut data = Vec::with_capacity(ra * (ca + cb));
        for i in 0..ra {
            data.extend_from_slice(ta.row(i));
            data.extend_from_slice(tb.row(i));
        }
        let v = Tensor::new(vec![ra, ca + cb], data)?;
        Ok(self.push(v, Op::ConcatCols(a, b)))
    }

    /// `out[:, j] = a[:, perm[j]]`.
    pub fn gather_cols(&mut self, a: NodeId, perm: &[usize]) -> Result<NodeId> {
        let (rows, cols) = self.value(a).expect_rank2("gather_cols input")?;
        if perm.iter().any(|&p| p >= cols) {
            return Err(Error::Dimension(format!(
                "column index out of range for width {cols}"
            )));
        }
        let t = self.value(a);
        let mut data = Vec::with_capacity(rows * perm.len());
        for i in 0..rows {
            let row = t.row(i);
            data.extend(perm.iter().map(|&p| row[p]));
        }
        let v = Tensor::new(vec![rows, perm.len()], data)?;
        Ok(self.push(v, Op::GatherCols(a, perm.to_vec())))
    }

    /// Row-wise LayerNorm followed by gain and bias.
    pub fn layer_norm(&mut self, x: NodeId, gain: NodeId, bias: NodeId) -> Result<NodeId> {
        let (rows, cols) = self.value(x).expect_rank2("layer_norm input")?;
        if self.value(gain).numel() != cols || self.value(bias).numel() != cols {
            return Err(Error::Dimension(format!(
                "layer_norm affine params must have {cols} entries"
            )));
        }
        let (xhat, inv_std) = layer_norm_rows(self.value(x));
        let g = self.value(gain).data();
        let b = self.value(bias).data();
        let mut out = xhat.clone();
        for i in 0..rows {
            for ((o, gv), bv) in out.row_mut(i).iter_mut().zip(g).zip(b) {
                *o = *o * gv + bv;
            }
        }
        Ok(self.push(
            out,
            Op::LayerNorm {
                x,
                gain,
                bias,
                xhat,
                inv_std,
            },
        ))
    }

    /// Parametric ReLU with a single shared slope (`slope` holds one entry).
    pub fn prelu(&mut self, x: NodeId, slope: NodeId) -> Result<NodeId> {
        if self.value(slope).numel() != 1 {
            return Err(Error::Dimension("prelu slope must be a single value".into()));
        }
        let a = self.value(slope).data()[0];
        let v = self.value(x).map(|t| prelu_scalar(t, a));
        Ok(self.push(v, Op::PRelu(x, slope)))
    }

    /// Reverse sweep from a scalar `loss`, returning the gradient of every
    /// registered parameter (zeros for parameters the loss does not reach).
    pub fn backward(&self, loss: NodeId) -> Result<Gradients> {
        if !self.value(loss).is_scalar() {
            return Err(Error::Contract(format!(
                "backward needs a scalar loss, got shape {:?}",
                self.value(loss).shape()
            )));
        }
        let mut grads: Vec<Option<Tensor>> = (0..=loss.0).map(|_| None).collect();
        grads[loss.0] = Some(Tensor::full(self.value(loss).shape(), 1.0));

        for id in (0..=loss.0).rev() {
            let Some(g) = grads[id].take() else { continue };
            let node = &self.nodes[id];
            for input in inputs_of(&node.op) {
                if input.0 >= id {
                    return Err(Error::Internal(format!(
                        "node {id} depends on later node {}",
                        input.0
                    )));
                }
            }
            self.propagate(id, &g, &mut grads)?;
            grads[id] = Some(g);
        }

        let mut out = Gradients::new();
        for (id, node) in self.nodes.iter().enumerate() {
            if let Op::Param(name) = &node.op {
                let g = grads
                    .get_mut(id)
                    .and_then(Option::take)
                    .unwrap_or_else(|| Tensor::zeros(node.value.shape()));
                if out.insert(name.clone(), g).is_some() {
                    return Err(Error::Contract(format!("parameter {name} registered twice")));
                }
            }
        }
        Ok(out)
    }

    fn propagate(&self, id: usize, g: &Tensor, grads: &mut [Option<Tensor>]) -> Result<()> {
        let node = &self.nodes[id];
        match &node.op {
            Op::Constant | Op::Param(_) => {}
            Op::MatMul(a, b) => {
                let (av, bv) = (self.value(*a), self.value(*b));
                let (m, k) = (av.rows(), av.cols());
                let n = bv.cols();
                let mut ga = vec![0.0; m * k];
                gemm(m, n, k, g.data(), false, bv.data(), true, &mut ga, false);
                let mut gb = vec![0.0; k * n];
                gemm(k, m, n, av.data(), true, g.data(), false, &mut gb, false);
                accumulate(grads, *a, Tensor::new(vec![m, k], ga)?)?;
                accumulate(grads, *b, Tensor::new(vec![k, n], gb)?)?;
            }
            Op::AddBias(x, b) => {
                let bshape = self.value(*b).shape().to_vec();
                let mut gb = vec![0.0; g.cols()];
                for i in 0..g.rows() {
                    for (acc, v) in gb.iter_mut().zip(g.row(i)) {
                        *acc += v;
                    }
                }
                accumulate(grads, *x, g.clone())?;
                accumulate(grads, *b, Tensor::new(bshape, gb)?)?;
            }
            Op::Add(a, b) => {
                accumulate(grads, *a, g.clone())?;
                accumulate(grads, *b, g.clone())?;
            }
            Op::Sub(a, b) => {
                accumulate(grads, *a, g.clone())?;
                accumulate(grads, *b, g.map(|v| -v))?;
            }
            Op::Mul(a, b) => {
                accumulate(grads, *a, g.zip_map(self.value(*b), |gv, bv| gv * bv)?)?;
                accumulate(grads, *b, g.zip_map(self.value(*a), |gv, av| gv * av)?)?;
            }
            Op::Scale(a, k) => accumulate(grads, *a, g.map(|v| v * k))?,
            Op::Exp(a) => accumulate(grads, *a, g.zip_map(&node.value, |gv, y| gv * y)?)?,
            Op::Tanh(a) => {
                accumulate(grads, *a, g.zip_map(&node.value, |gv, y| gv * (1.0 - y * y))?)?
            }
            Op::Square(a) => {
                accumulate(grads, *a, g.zip_map(self.value(*a), |gv, x| 2.0 * gv * x)?)?
            }
            Op::LogSigmoid(a) => accumulate(
                grads,
                *a,
                g.zip_map(self.value(*a), |gv, x| gv * sigmoid(-x))?,
            )?,
            Op::Sum(a) => {
                let gv = g.data()[0];
                accumulate(grads, *a, Tensor::full(self.value(*a).shape(), gv))?;
            }
            Op::Mean(a) => {
                let t = self.value(*a);
                let gv = g.data()[0] / t.numel() as f64;
                accumulate(grads, *a, Tensor::full(t.shape(), gv))?;
            }
            Op::SumCols(a) => {
                let t = self.value(*a);
                let mut ga = Tensor::zeros(t.shape());
                for i in 0..t.rows() {
                    let gi = g.data()[i];
                    ga.row_mut(i).iter_mut().for_each(|v| *v = gi);
                }
                accumulate(grads, *a, ga)?;
            }
            Op::SliceCols(a, start, end) => {
                let t = self.value(*a);
                let mut ga = Tensor::zeros(t.shape());
                for i in 0..t.rows() {
                    ga.row_mut(i)[*start..*end].copy_from_slice(g.row(i));
                }
                accumulate(grads, *a, ga)?;
            }
            Op::ConcatCols(a, b) => {
                let ca = self.value(*a).cols();
                let rows = g.rows();
                let cb = g.cols() - ca;
                let mut ga = Vec::with_capacity(rows * ca);
                let mut gb = Vec::with_capacity(rows * cb);
                for i in 0..rows {
                    ga.extend_from_slice(&g.row(i)[..ca]);
                    gb.extend_from_slice(&g.row(i)[ca..]);
                }
                accumulate(grads, *a, Tensor::new(vec![rows, ca], ga)?)?;
                accumulate(grads, *b, Tensor::new(vec![rows, cb], gb)?)?;
            }
            Op::GatherCols(a, perm) => {
                let t = self.value(*a);
                let mut ga = Tensor::zeros(t.shape());
                for i in 0..t.rows() {
                    let src = g.row(i);
                    let dst = ga.row_mut(i);
                    for (j, &p) in perm.iter().enumerate() {
                        dst[p] += src[j];
                    }
                }
                accumulate(grads, *a, ga)?;
            }
            Op::LayerNorm {
                x,
                gain,
                bias,
                xhat,
                inv_std,
            } => {
                let gain_v = self.value(*gain).data();
                let (rows, cols) = (xhat.rows(), xhat.cols());
                let mut ggain = vec![0.0; cols];
                let mut gbias = vec![0.0; cols];
                let mut gx = Tensor::zeros(&[rows, cols]);
                let xv = self.value(*x);
                for i in 0..rows {
                    let gi = g.row(i);
                    let xh = xhat.row(i);
                    for j in 0..cols {
                        ggain[j] += gi[j] * xh[j];
                        gbias[j] += gi[j];
                    }
                    let inv = inv_std[i];
                    if inv == 0.0 {
                        continue;
                    }
                    let dxhat: Vec<f64> = gi.iter().zip(gain_v).map(|(a, b)| a * b).collect();
                    let out = gx.row_mut(i);
                    let floored = {
                        let row = xv.row(i);
                        let mean = row.iter().sum::<f64>() / cols as f64;
                        let var =
                            row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / cols as f64;
                        var.sqrt() < LAYER_NORM_EPS
                    };
                    let mean_d = dxhat.iter().sum::<f64>() / cols as f64;
                    if floored {
                        // fixed divisor: only the mean subtraction remains
                        for j in 0..cols {
                            out[j] = inv * (dxhat[j] - mean_d);
                        }
                    } else {
                        let mean_dx =
                            dxhat.iter().zip(xh).map(|(d, h)| d * h).sum::<f64>() / cols as f64;
                        for j in 0..cols {
                            out[j] = inv * (dxhat[j] - mean_d - xh[j] * mean_dx);
                        }
                    }
                }
                let gshape = self.value(*gain).shape().to_vec();
                let bshape = self.value(*bias).shape().to_vec();
                accumulate(grads, *x, gx)?;
                accumulate(grads, *gain, Tensor::new(gshape, ggain)?)?;
                accumulate(grads, *bias, Tensor::new(bshape, gbias)?)?;
            }
            Op::PRelu(x, slope) => {
                let a = self.value(*slope).data()[0];
                let xv = self.value(*x);
                let mut gslope = 0.0;
                let gx = g.zip_map(xv, |gv, t| {
                    if t >= 0.0 {
                        gv
                    } else {
                        gslope += gv * t;
                        gv * a
                    }
                });
                let gx = gx?;
                let sshape = self.value(*slope).shape().to_vec();
                accumulate(grads, *x, gx)?;
                accumulate(grads, *slope, Tensor::new(sshape, vec![gslope])?)?;
            }
        }
        Ok(())
    }
}

fn inputs_of(op: &Op) -> Vec<NodeId> {
    match op {
        Op::Constant | Op::Param(_) => vec![],
        Op::MatMul(a, b)
        | Op::AddBias(a, b)
        | Op::Add(a, b)
        | Op::Sub(a, b)
        | Op::Mul(a, b)
        | Op::ConcatCols(a, b)
        | Op::PRelu(a, b) => vec![*a, *b],
        Op::Scale(a, _)
        | Op::Exp(a)
        | Op::Tanh(a)
        | Op::Square(a)
        | Op::LogSigmoid(a)
        | Op::Sum(a)
        | Op::Mean(a)
        | Op::SumCols(a)
        | Op::SliceCols(a, _, _)
        | Op::GatherCols(a, _) => vec![*a],
        Op::LayerNorm { x, gain, bias, .. } => vec![*x, *gain, *bias],
    }
}

fn accumulate(grads: &mut [Option<Tensor>], id: NodeId, g: Tensor) -> Result<()> {
    match &mut grads[id.0] {
        slot @ None => *slot = Some(g),
        Some(existing) => {
            existing.expect_same_shape(&g)?;
            for (e, v) in existing.data_mut().iter_mut().zip(g.data()) {
                *e += v;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_of_weights_has_unit_gradient() {
        let mut g = Graph::new();
        let w = g.param("w", Tensor::new(vec![2, 3], vec![1., -2., 3., 0.5, 0., 7.]).unwrap());
        let loss = g.sum(w);
        let grads = g.backward(loss).unwrap();
        assert_eq!(grads["w"].data(), &[1.0; 6]);
    }

    #[test]
    fn least_squares_gradient_matches_closed_form() {
        let x = Tensor::new(vec![2, 2], vec![1., 2., 3., 4.]).unwrap();
        let w0 = Tensor::new(vec![2, 2], vec![0.5, -1., 0.25, 2.]).unwrap();
        let y = Tensor::new(vec![2, 2], vec![1., 0., -1., 3.]).unwrap();

        let mut g = Graph::new();
        let xn = g.constant(x.clone());
        let wn = g.param("w", w0.clone());
        let yn = g.constant(y.clone());
        let pred = g.matmul(xn, wn).unwrap();
        let r = g.sub(pred, yn).unwrap();
        let sq = g.square(r);
        let loss = g.sum(sq);
        let grads = g.backward(loss).unwrap();

        // 2·xᵀ(xW − y)
        let resid = super::super::tensor::matmul(&x, &w0)
            .unwrap()
            .zip_map(&y, |a, b| a - b)
            .unwrap();
        let mut expected = [0.0; 4];
        for i in 0..2 {
            for j in 0..2 {
                for r in 0..2 {
                    expected[i * 2 + j] += 2.0 * x.get(r, i) * resid.get(r, j);
                }
            }
        }
        for (a, e) in grads["w"].data().iter().zip(expected) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn unused_param_gets_zero_gradient() {
        let mut g = Graph::new();
        let a = g.param("a", Tensor::scalar(2.0));
        let _b = g.param("b", Tensor::new(vec![3], vec![1., 2., 3.]).unwrap());
        let loss = g.square(a);
        let grads = g.backward(loss).unwrap();
        assert_eq!(grads["a"].data(), &[4.0]);
        assert_eq!(grads["b"].data(), &[0.0; 3]);
    }

    #[test]
    fn non_scalar_loss_is_rejected() {
        let mut g = Graph::new();
        let a = g.param("a", Tensor::zeros(&[2, 2]));
        assert!(matches!(g.backward(a), Err(Error::Contract(_))));
    }

    #[test]
    fn log_sigmoid_is_stable() {
        assert!((log_sigmoid(0.0) - 0.5f64.ln()).abs() < 1e-15);
        assert!(log_sigmoid(800.0).abs() < 1e-300);
        assert!((log_sigmoid(-800.0) + 800.0).abs() < 1e-9);
    }

    #[test]
    fn gather_cols_scatters_gradient() {
        let mut g = Graph::new();
        let a = g.param("a", Tensor::new(vec![1, 3], vec![1., 2., 3.]).unwrap());
        let p = g.gather_cols(a, &[2, 0, 1]).unwrap();
        assert_eq!(g.value(p).data(), &[3., 1., 2.]);
        let w = g.constant(Tensor::new(vec![1, 3], vec![10., 20., 30.]).unwrap());
        let m = g.mul(p, w).unwrap();
        let loss = g.sum(m);
        let grads = g.backward(loss).unwrap();
        assert_eq!(grads["a"].data(), &[20., 30., 10.]);
    }
}
