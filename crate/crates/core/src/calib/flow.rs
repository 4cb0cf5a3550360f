//! Shallow normalizing flow: K steps of a fixed random permutation followed
//! by an affine coupling layer. No multi-scale factor-out, no actnorm.

use std::f64::consts::PI;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diffcore::nn::{
    init_linear_zero, init_mlp_block, linear_eval, linear_node, mlp_block_eval, mlp_block_node,
};
use crate::diffcore::{adamw_step, AdamWConfig, AdamWState, Graph, NodeId, ParamSet, Tensor};
use crate::error::{Error, Result};
use crate::ingest::format::{dim_u32, put_f32s, put_header, put_u32, read_bytes, write_bytes, Reader};
use crate::ingest::EmbeddingMatrix;

pub const FLOW_MAGIC: &[u8; 4] = b"BFVF";
pub const DEFAULT_STEPS: usize = 16;

/// Permutation + affine coupling steps over `V` dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowModel {
    v: usize,
    perms: Vec<Vec<usize>>,
    params: ParamSet,
}

fn step_prefix(k: usize) -> String {
    format!("step{k:03}")
}

/// Hidden width of the coupling nets.
pub fn coupling_width(v: usize) -> usize {
    (2 * v).max(64)
}

/// `(ceil(V/2), floor(V/2))`: conditioning and transformed widths.
pub fn split_sizes(v: usize) -> (usize, usize) {
    (v.div_ceil(2), v / 2)
}

fn check_perm(p: &[usize], v: usize) -> Result<()> {
    let mut seen = vec![false; v];
    if p.len() != v {
        return Err(Error::Contract(format!("permutation has {} entries, expected {v}", p.len())));
    }
    for &i in p {
        if i >= v || std::mem::replace(&mut seen[i], true) {
            return Err(Error::Contract("permutation is not a bijection".into()));
        }
    }
    Ok(())
}

fn fresh_params(v: usize, k: usize, rng: &mut ChaCha8Rng) -> Result<ParamSet> {
    let (na, nb) = split_sizes(v);
    let h = coupling_width(v);
    let mut params = ParamSet::new();
    for step in 0..k {
        let pre = step_prefix(step);
        init_mlp_block(&mut params, &format!("{pre}.h1"), na, h, rng)?;
        init_mlp_block(&mut params, &format!("{pre}.h2"), h, h, rng)?;
        init_linear_zero(&mut params, &format!("{pre}.head"), h, 2 * nb)?;
    }
    Ok(params)
}

/// Random permutations and coupling nets whose output heads are zero, so
/// every step starts as a pure permutation.
pub fn flow_init(v: usize, k: usize, seed: u64) -> Result<FlowModel> {
    if v < 2 {
        return Err(Error::Contract(format!("flow needs V ≥ 2, got {v}")));
    }
    if k == 0 {
        return Err(Error::Contract("flow needs at least one step".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perms = Vec::with_capacity(k);
    for _ in 0..k {
        let mut p: Vec<usize> = (0..v).collect();
        p.shuffle(&mut rng);
        perms.push(p);
    }
    let params = fresh_params(v, k, &mut rng)?;
    Ok(FlowModel { v, perms, params })
}

impl FlowModel {
    /// Builds a model from explicit permutations and parameters.
    pub fn from_parts(v: usize, perms: Vec<Vec<usize>>, params: ParamSet) -> Result<Self> {
        if v < 2 || perms.is_empty() {
            return Err(Error::Contract("flow needs V ≥ 2 and K ≥ 1".into()));
        }
        for p in &perms {
            check_perm(p, v)?;
        }
        let expected = fresh_params(v, perms.len(), &mut ChaCha8Rng::seed_from_u64(0))?;
        for (name, p) in expected.iter() {
            let got = params
                .get(name)
                .ok_or_else(|| Error::Contract(format!("missing flow parameter {name}")))?;
            got.value.expect_same_shape(&p.value)?;
        }
        if params.len() != expected.len() {
            return Err(Error::Contract("unexpected extra flow parameters".into()));
        }
        Ok(Self { v, perms, params })
    }

    pub fn dim(&self) -> usize {
        self.v
    }

    pub fn steps(&self) -> usize {
        self.perms.len()
    }

    pub fn permutation(&self, k: usize) -> &[usize] {
        &self.perms[k]
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParamSet {
        &mut self.params
    }

    fn check_input(&self, x: &Tensor) -> Result<()> {
        let (_, v) = x.expect_rank2("flow input")?;
        if v != self.v {
            return Err(Error::Dimension(format!("flow expects width {}, got {v}", self.v)));
        }
        if !x.all_finite() {
            return Err(Error::Numeric("flow input is not finite".into()));
        }
        Ok(())
    }

    /// Scale and shift for one step given the conditioning half.
    fn coupling(&self, k: usize, xa: &Tensor) -> Result<(Tensor, Tensor)> {
        let pre = step_prefix(k);
        let h = mlp_block_eval(&self.params, &format!("{pre}.h1"), xa)?;
        let h = mlp_block_eval(&self.params, &format!("{pre}.h2"), &h)?;
        let out = linear_eval(&self.params, &format!("{pre}.head"), &h)?;
        let nb = self.v / 2;
        let rows = xa.rows();
        let mut s = Vec::with_capacity(rows * nb);
        let mut t = Vec::with_capacity(rows * nb);
        for i in 0..rows {
            let r = out.row(i);
            s.extend(r[..nb].iter().map(|&raw| bound_scale(raw)));
            t.extend_from_slice(&r[nb..]);
        }
        Ok((Tensor::new(vec![rows, nb], s)?, Tensor::new(vec![rows, nb], t)?))
    }
}

/// `2·tanh(raw/2)`, keeping `|s| < 2`.
pub fn bound_scale(raw: f64) -> f64 {
    2.0 * (raw / 2.0).tanh()
}

fn gather(x: &Tensor, perm: &[usize]) -> Tensor {
    let (n, v) = (x.rows(), x.cols());
    let mut out = Vec::with_capacity(n * v);
    for i in 0..n {
        let r = x.row(i);
        out.extend(perm.iter().map(|&p| r[p]));
    }
    Tensor::new(vec![n, v], out).expect("same shape")
}

fn scatter(y: &Tensor, perm: &[usize]) -> Tensor {
    let (n, v) = (y.rows(), y.cols());
    let mut out = vec![0.0; n * v];
    for i in 0..n {
        let r = y.row(i);
        for (j, &p) in perm.iter().enumerate() {
            out[i * v + p] = r[j];
        }
    }
    Tensor::new(vec![n, v], out).expect("same shape")
}

fn columns(x: &Tensor, start: usize, end: usize) -> Tensor {
    let n = x.rows();
    let mut out = Vec::with_capacity(n * (end - start));
    for i in 0..n {
        out.extend_from_slice(&x.row(i)[start..end]);
    }
    Tensor::new(vec![n, end - start], out).expect("non-empty slice")
}

fn non_finite(what: &str, k: usize) -> Error {
    Error::Numeric(format!("non-finite {what} in flow step {k}"))
}

/// Data → latent direction. Returns `z` and the per-sample log-determinant.
pub fn flow_forward(model: &FlowModel, x: &Tensor) -> Result<(Tensor, Vec<f64>)> {
    model.check_input(x)?;
    let (na, _) = split_sizes(model.v);
    let n = x.rows();
    let mut cur = x.clone();
    let mut log_det = vec![0.0; n];
    for (k, perm) in model.perms.iter().enumerate() {
        let mut y = gather(&cur, perm);
        let xa = columns(&y, 0, na);
        let (s, t) = model.coupling(k, &xa)?;
        for i in 0..n {
            let (sr, tr) = (s.row(i), t.row(i));
            let row = &mut y.row_mut(i)[na..];
            for j in 0..row.len() {
                row[j] = row[j] * sr[j].exp() + tr[j];
            }
            log_det[i] += sr.iter().sum::<f64>();
        }
        if !y.all_finite() {
            return Err(non_finite("output", k));
        }
        cur = y;
    }
    Ok((cur, log_det))
}

/// Latent → data direction, undoing each step in reverse.
pub fn flow_inverse(model: &FlowModel, z: &Tensor) -> Result<Tensor> {
    model.check_input(z)?;
    let (na, _) = split_sizes(model.v);
    let n = z.rows();
    let mut cur = z.clone();
    for (k, perm) in model.perms.iter().enumerate().rev() {
        let xa = columns(&cur, 0, na);
        let (s, t) = model.coupling(k, &xa)?;
        for i in 0..n {
            let (sr, tr) = (s.row(i), t.row(i));
            let row = &mut cur.row_mut(i)[na..];
            for j in 0..row.len() {
                row[j] = (row[j] - tr[j]) * (-sr[j]).exp();
            }
        }
        if !cur.all_finite() {
            return Err(non_finite("inverse output", k));
        }
        cur = scatter(&cur, perm);
    }
    Ok(cur)
}

fn gaussian_const(v: usize) -> f64 {
    0.5 * v as f64 * (2.0 * PI).ln()
}

/// Mean negative log-likelihood under a standard Gaussian prior.
pub fn flow_nll(model: &FlowModel, x: &EmbeddingMatrix) -> Result<f64> {
    let (z, log_det) = flow_forward(model, x.values())?;
    let n = z.rows();
    let total: f64 = (0..n)
        .map(|i| 0.5 * z.row(i).iter().map(|v| v * v).sum::<f64>() - log_det[i])
        .sum();
    Ok(gaussian_const(model.v) + total / n as f64)
}

/// Records the batch NLL (without the Gaussian constant) on `g`.
fn nll_node(model: &FlowModel, g: &mut Graph, x: &Tensor) -> Result<NodeId> {
    let p = model.params.bind(g);
    let (na, _) = split_sizes(model.v);
    let mut cur = g.constant(x.clone());
    let mut log_det: Option<NodeId> = None;
    let nb = model.v / 2;
    for (k, perm) in model.perms.iter().enumerate() {
        let pre = step_prefix(k);
        let y = g.gather_cols(cur, perm)?;
        let xa = g.slice_cols(y, 0, na)?;
        let xb = g.slice_cols(y, na, model.v)?;
        let h = mlp_block_node(g, &p, &format!("{pre}.h1"), xa)?;
        let h = mlp_block_node(g, &p, &format!("{pre}.h2"), h)?;
        let out = linear_node(g, &p, &format!("{pre}.head"), h)?;
        let s_raw = g.slice_cols(out, 0, nb)?;
        let t = g.slice_cols(out, nb, 2 * nb)?;
        let s = g.scale(s_raw, 0.5);
        let s = g.tanh(s);
        let s = g.scale(s, 2.0);
        let es = g.exp(s);
        let yb = g.mul(xb, es)?;
        let yb = g.add(yb, t)?;
        cur = g.concat_cols(xa, yb)?;
        let ld = g.sum_cols(s)?;
        log_det = Some(match log_det {
            None => ld,
            Some(acc) => g.add(acc, ld)?,
        });
    }
    let sq = g.square(cur);
    let sq = g.sum_cols(sq)?;
    let half = g.scale(sq, 0.5);
    let per = g.sub(half, log_det.expect("K ≥ 1"))?;
    Ok(g.mean(per))
}

/// Batch NLL and its gradient with respect to every parameter.
pub fn flow_nll_with_grad(
    model: &FlowModel,
    x: &Tensor,
) -> Result<(f64, crate::diffcore::Gradients)> {
    model.check_input(x)?;
    let mut g = Graph::new();
    let loss = nll_node(model, &mut g, x)?;
    let value = g.value(loss).data()[0] + gaussian_const(model.v);
    Ok((value, g.backward(loss)?))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowTrainConfig {
    pub lr: f64,
    pub epochs: usize,
    pub batch: usize,
    pub weight_decay: f64,
    /// Decay the learning rate linearly to zero over all steps.
    pub linear_decay: bool,
    pub seed: u64,
}

pub const DEFAULT_FLOW_BATCH: usize = 64;

impl Default for FlowTrainConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            epochs: 5,
            batch: DEFAULT_FLOW_BATCH,
            weight_decay: 0.01,
            linear_decay: true,
            seed: 0,
        }
    }
}

/// AdamW minimization of the NLL. The trace holds the full-data NLL before
/// training and after every epoch.
pub fn flow_train(
    model: &FlowModel,
    x: &EmbeddingMatrix,
    cfg: &FlowTrainConfig,
) -> Result<(FlowModel, Vec<f64>)> {
    let n = x.n();
    if cfg.batch == 0 || cfg.batch > n {
        return Err(Error::Contract(format!("batch {} must lie in [1, N = {n}]", cfg.batch)));
    }
    if x.dim() != model.v {
        return Err(Error::Dimension(format!("flow expects width {}, got {}", model.v, x.dim())));
    }
    let mut model = model.clone();
    let mut trace = vec![flow_nll(&model, x)?];
    if cfg.epochs == 0 {
        return Ok((model, trace));
    }
    let mut state = AdamWState::new(
        AdamWConfig {
            lr: cfg.lr,
            weight_decay: cfg.weight_decay,
            ..AdamWConfig::default()
        },
        &model.params,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let per_epoch = n.div_ceil(cfg.batch);
    let total = (per_epoch * cfg.epochs) as f64;
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for (step, idx) in order.chunks(cfg.batch).enumerate() {
            if cfg.linear_decay {
                let done = (epoch * per_epoch + step) as f64;
                state.config.lr = cfg.lr * (1.0 - done / total);
            }
            let batch = x.values().select_rows(idx);
            let diverged = |msg: String| Error::Training { epoch, step, msg };
            let (loss, grads) = flow_nll_with_grad(&model, &batch).map_err(|e| diverged(e.to_string()))?;
            if !loss.is_finite() {
                return Err(diverged(format!("NLL is {loss}")));
            }
            adamw_step(&mut model.params, &grads, &mut state).map_err(|e| diverged(e.to_string()))?;
        }
        let nll = flow_nll(&model, x).map_err(|e| Error::Training {
            epoch,
            step: n.div_ceil(cfg.batch),
            msg: e.to_string(),
        })?;
        log::info!("flow epoch {epoch}: nll {nll:.6}");
        trace.push(nll);
    }
    Ok((model, trace))
}

/// Applies a trained flow to every row.
pub fn flow_apply(model: &FlowModel, x: &EmbeddingMatrix) -> Result<EmbeddingMatrix> {
    let (z, _) = flow_forward(model, x.values())?;
    let mut prov = x.provenance.clone();
    prov.calibration = Some("flow".into());
    EmbeddingMatrix::new(z, prov)
}

pub fn encode_flow(model: &FlowModel) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    put_header(&mut out, FLOW_MAGIC);
    put_u32(&mut out, dim_u32(model.v, "V")?);
    put_u32(&mut out, dim_u32(model.steps(), "K")?);
    for (k, perm) in model.perms.iter().enumerate() {
        for &p in perm {
            put_u32(&mut out, p as u32);
        }
        let pre = format!("{}.", step_prefix(k));
        for (_, p) in model.params.iter().filter(|(n, _)| n.starts_with(&pre)) {
            put_f32s(&mut out, p.value.data());
        }
    }
    Ok(out)
}

pub fn decode_flow(bytes: &[u8], path: &Path) -> Result<FlowModel> {
    let mut r = Reader::new(bytes, path);
    r.magic(FLOW_MAGIC)?;
    let v = r.u32()? as usize;
    let k = r.u32()? as usize;
    if v < 2 || k == 0 {
        return Err(Error::format(path, format!("invalid flow dims V={v} K={k}")));
    }
    let mut params = fresh_params(v, k, &mut ChaCha8Rng::seed_from_u64(0))?;
    let mut perms = Vec::with_capacity(k);
    for step in 0..k {
        let perm = (0..v).map(|_| r.u32().map(|p| p as usize)).collect::<Result<Vec<_>>>()?;
        check_perm(&perm, v).map_err(|e| Error::format(path, e.to_string()))?;
        perms.push(perm);
        let pre = format!("{}.", step_prefix(step));
        for (_, p) in params.iter_mut().filter(|(n, _)| n.starts_with(&pre)) {
            let vals = r.f32s(p.value.numel())?;
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::format(path, format!("non-finite parameter in step {step}")));
            }
            for (d, s) in p.value.data_mut().iter_mut().zip(vals) {
                *d = f64::from(s);
            }
        }
    }
    r.finish()?;
    Ok(FlowModel { v, perms, params })
}

pub fn write_flow(path: impl AsRef<Path>, model: &FlowModel) -> Result<()> {
    write_bytes(path.as_ref(), &encode_flow(model)?)
}

pub fn read_flow(path: impl AsRef<Path>) -> Result<FlowModel> {
    let path = path.as_ref();
    decode_flow(&read_bytes(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn random_x(n: usize, v: usize, seed: u64) -> Tensor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = (0..n * v).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        Tensor::new(vec![n, v], d).unwrap()
    }

    /// Random non-zero head weights so the coupling is non-trivial.
    fn perturbed(v: usize, k: usize, seed: u64, scale: f64) -> FlowModel {
        let mut m = flow_init(v, k, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 1000);
        for (name, p) in m.params_mut().iter_mut() {
            if name.contains(".head") {
                for w in p.value.data_mut() {
                    *w = rng.random_range(-scale..scale);
                }
            }
        }
        m
    }

    fn doubling_model() -> FlowModel {
        let mut m = flow_init(2, 1, 0).unwrap();
        m.perms[0] = vec![0, 1];
        let raw = 2.0 * (2f64.ln() / 2.0).atanh();
        m.params_mut().tensor_mut("step000.head.b").unwrap().data_mut()[0] = raw;
        m
    }

    #[test]
    fn fresh_model_is_a_permutation() {
        let m = flow_init(5, 16, 3).unwrap();
        let x = random_x(7, 5, 1);
        let (z, ld) = flow_forward(&m, &x).unwrap();
        assert!(ld.iter().all(|&v| v == 0.0));
        let mut expected = x.clone();
        for p in &m.perms {
            expected = gather(&expected, p);
        }
        assert_eq!(z, expected);
    }

    #[test]
    fn same_seed_same_permutations() {
        assert_eq!(flow_init(6, 16, 9).unwrap(), flow_init(6, 16, 9).unwrap());
        assert_ne!(flow_init(6, 16, 9).unwrap().perms, flow_init(6, 16, 10).unwrap().perms);
    }

    #[test]
    fn narrow_input_is_rejected() {
        assert!(matches!(flow_init(1, 16, 0), Err(Error::Contract(_))));
    }

    #[test]
    fn doubling_step() {
        let m = doubling_model();
        let x = Tensor::new(vec![1, 2], vec![0.0, 1.0]).unwrap();
        let (z, ld) = flow_forward(&m, &x).unwrap();
        assert!((z.data()[0]).abs() < 1e-15);
        assert!((z.data()[1] - 2.0).abs() < 1e-12);
        assert!((ld[0] - 2f64.ln()).abs() < 1e-12);

        let e = EmbeddingMatrix::from_rows(&[vec![0.0, 1.0]]).unwrap();
        let expected = 0.5 * (2.0 * (2.0 * PI).ln() + 4.0) - 2f64.ln();
        assert!((flow_nll(&m, &e).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn identity_nll_at_origin() {
        let m = flow_init(4, 2, 0).unwrap();
        let e = EmbeddingMatrix::from_rows(&[vec![0.0; 4]]).unwrap();
        assert!((flow_nll(&m, &e).unwrap() - 0.5 * 4.0 * (2.0 * PI).ln()).abs() < 1e-12);
    }

    #[test]
    fn inverse_of_identity_model_is_inverse_permutation() {
        let m = flow_init(4, 3, 5).unwrap();
        let z = random_x(3, 4, 2);
        let mut expected = z.clone();
        for p in m.perms.iter().rev() {
            expected = scatter(&expected, p);
        }
        assert_eq!(flow_inverse(&m, &z).unwrap(), expected);
    }

    #[test]
    fn roundtrip_untrained() {
        for v in [2, 3, 7] {
            let m = perturbed(v, 16, v as u64, 0.3);
            let x = random_x(20, v, 4);
            let (z, _) = flow_forward(&m, &x).unwrap();
            assert!(flow_inverse(&m, &z).unwrap().max_abs_diff(&x) < 1e-8);
        }
    }

    fn jacobian_det(m: &FlowModel, x: &[f64]) -> f64 {
        let v = x.len();
        let h = 1e-6;
        let mut j = nalgebra::DMatrix::<f64>::zeros(v, v);
        for c in 0..v {
            let mut up = x.to_vec();
            let mut dn = x.to_vec();
            up[c] += h;
            dn[c] -= h;
            let (zu, _) = flow_forward(m, &Tensor::new(vec![1, v], up).unwrap()).unwrap();
            let (zd, _) = flow_forward(m, &Tensor::new(vec![1, v], dn).unwrap()).unwrap();
            for r in 0..v {
                j[(r, c)] = (zu.data()[r] - zd.data()[r]) / (2.0 * h);
            }
        }
        j.determinant().abs()
    }

    #[test]
    fn log_det_matches_finite_difference_jacobian() {
        for v in [2, 3, 4] {
            let m = perturbed(v, 16, 10 + v as u64, 0.2);
            let x = random_x(3, v, 11);
            let (_, ld) = flow_forward(&m, &x).unwrap();
            for i in 0..3 {
                let det = jacobian_det(&m, x.row(i));
                let rel = (ld[i].exp() - det).abs() / det;
                assert!(rel < 1e-3, "V={v} rel={rel}");
            }
        }
    }

    #[test]
    fn graph_nll_matches_plain_nll() {
        let m = perturbed(5, 4, 1, 0.3);
        let x = random_x(9, 5, 3);
        let (graph_nll, _) = flow_nll_with_grad(&m, &x).unwrap();
        let e = EmbeddingMatrix::new(x, Default::default()).unwrap();
        assert!((graph_nll - flow_nll(&m, &e).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn nll_gradient_matches_finite_differences() {
        let m = perturbed(3, 2, 7, 0.3);
        let x = random_x(6, 3, 8);
        let (_, grads) = flow_nll_with_grad(&m, &x).unwrap();
        for name in ["step000.head.w", "step001.h1.w", "step001.h2.prelu", "step000.h1.ln_gain"] {
            let base = m.params().tensor(name).unwrap().clone();
            let err = crate::diffcore::numeric_grad_check(
                |probe| {
                    let mut mm = m.clone();
                    *mm.params_mut().tensor_mut(name).unwrap() = probe.clone();
                    Ok(flow_nll_with_grad(&mm, &x)?.0)
                },
                &base,
                &grads[name],
                1e-5,
            )
            .unwrap();
            assert!(err < 1e-4, "{name}: {err}");
        }
    }

    #[test]
    fn zero_epochs_leave_model_unchanged() {
        let m = flow_init(3, 2, 0).unwrap();
        let e = EmbeddingMatrix::new(random_x(10, 3, 0), Default::default()).unwrap();
        let cfg = FlowTrainConfig {
            epochs: 0,
            batch: 5,
            ..Default::default()
        };
        let (trained, trace) = flow_train(&m, &e, &cfg).unwrap();
        assert_eq!(trained, m);
        assert_eq!(trace.len(), 1);
    }

    #[test]
    fn file_roundtrip() {
        let m = perturbed(5, 3, 2, 0.5);
        let bytes = encode_flow(&m).unwrap();
        let back = decode_flow(&bytes, Path::new("mem")).unwrap();
        assert_eq!(back.perms, m.perms);
        assert_eq!(encode_flow(&back).unwrap(), bytes);
        assert!(matches!(
            decode_flow(&bytes[..bytes.len() - 4], Path::new("mem")),
            Err(Error::Length { .. })
        ));
    }
}
