//! Python bindings: run configurations, the coupling flow, synthetic corpora,
//! the embedding file format and the evaluation suite.

use std::collections::BTreeMap;
use std::path::PathBuf;

use flowvae_core::calib::{flow_apply, flow_forward, flow_init, flow_inverse, flow_nll, flow_train};
use flowvae_core::calib::{read_flow, whiten_apply, whiten_fit, write_flow, FlowModel, FlowTrainConfig};
use flowvae_core::diffcore::Tensor;
use flowvae_core::ingest::{read_embeddings as core_read, write_embeddings as core_write, EmbeddingMatrix, LabelMatrix};
use flowvae_core::metrics::{evaluate as core_evaluate, MetricsReport};
use flowvae_core::pipeline::{cmd_ablate, cmd_run, cmd_sweep, write_synth, RunConfig};
use flowvae_core::synth::{generate, SynthConfig};
use flowvae_core::vae::Prediction;
use flowvae_core::Error;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyOSError};
use pyo3::prelude::*;

create_exception!(flowvae, FlowVaeError, PyException);

fn err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => FlowVaeError::new_err(e.to_string()),
    }
}

type Rows = Vec<Vec<f64>>;

fn matrix(rows: &[Vec<f64>]) -> PyResult<EmbeddingMatrix> {
    EmbeddingMatrix::from_rows(rows).map_err(err)
}

fn report(r: &MetricsReport) -> BTreeMap<&'static str, f64> {
    MetricsReport::KEYS.iter().copied().zip(r.values()).collect()
}

/// A run configuration read from TOML.
#[pyclass(name = "Config", skip_from_py_object)]
#[derive(Clone)]
struct PyConfig {
    inner: RunConfig,
}

#[pymethods]
impl PyConfig {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: RunConfig::load(path).map_err(err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (text, base_dir = PathBuf::from(".")))]
    fn parse(text: &str, base_dir: PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: RunConfig::parse(text, base_dir).map_err(err)?,
        })
    }

    fn to_toml(&self) -> String {
        self.inner.to_toml()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed()
    }

    #[getter]
    fn digest(&self) -> String {
        self.inner.digest()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    #[setter]
    fn set_gamma(&mut self, v: f64) {
        self.inner.gamma = v;
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega
    }

    #[setter]
    fn set_omega(&mut self, v: f64) {
        self.inner.omega = v;
    }

    #[getter]
    fn calibration(&self) -> String {
        self.inner.calibration.to_string()
    }

    #[setter]
    fn set_calibration(&mut self, v: &str) -> PyResult<()> {
        self.inner.calibration = v.parse().map_err(err)?;
        Ok(())
    }

    #[getter]
    fn epochs(&self) -> usize {
        self.inner.train.epochs
    }

    #[setter]
    fn set_epochs(&mut self, v: usize) {
        self.inner.train.epochs = v;
    }

    #[getter]
    fn hidden(&self) -> (usize, usize) {
        (self.inner.train.h1, self.inner.train.h2)
    }

    #[setter]
    fn set_hidden(&mut self, v: (usize, usize)) {
        (self.inner.train.h1, self.inner.train.h2) = v;
    }

    #[getter]
    fn symmetric_topic(&self) -> bool {
        self.inner.loss.symmetric_topic
    }

    #[setter]
    fn set_symmetric_topic(&mut self, v: bool) {
        self.inner.loss.symmetric_topic = v;
    }

    #[getter]
    fn output_dir(&self) -> PathBuf {
        self.inner.output_dir()
    }

    /// Trains, predicts and evaluates on the held-out split; writes the
    /// output directory and returns the metrics.
    fn run(&self, py: Python<'_>) -> PyResult<BTreeMap<&'static str, f64>> {
        let cfg = self.inner.clone();
        let r = py.detach(move || cmd_run(&cfg)).map_err(err)?;
        Ok(report(&r))
    }

    /// `(gamma, omega, metrics)` per grid point; metrics is `None` for a
    /// failed point.
    #[allow(clippy::type_complexity)]
    fn sweep(
        &self,
        py: Python<'_>,
        gammas: Vec<f64>,
        omegas: Vec<f64>,
    ) -> PyResult<Vec<(f64, f64, Option<BTreeMap<&'static str, f64>>)>> {
        let cfg = self.inner.clone();
        let rows = py.detach(move || cmd_sweep(&cfg, &gammas, &omegas)).map_err(err)?;
        Ok(rows
            .iter()
            .map(|r| (r.gamma, r.omega, r.result.as_ref().ok().map(report)))
            .collect())
    }

    fn ablate(&self, py: Python<'_>) -> PyResult<Vec<(String, BTreeMap<&'static str, f64>)>> {
        let cfg = self.inner.clone();
        let rows = py.detach(move || cmd_ablate(&cfg)).map_err(err)?;
        Ok(rows.iter().map(|(s, r)| (s.name().to_string(), report(r))).collect())
    }

    fn __repr__(&self) -> String {
        format!("Config(seed={}, digest={})", self.inner.seed(), &self.inner.digest()[..12])
    }
}

/// Stack of affine coupling steps.
#[pyclass(name = "Flow", skip_from_py_object)]
#[derive(Clone)]
struct PyFlow {
    inner: FlowModel,
}

#[pymethods]
impl PyFlow {
    #[new]
    #[pyo3(signature = (dim, steps = 16, seed = 0))]
    fn new(dim: usize, steps: usize, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: flow_init(dim, steps, seed).map_err(err)?,
        })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: read_flow(path).map_err(err)?,
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        write_flow(path, &self.inner).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn steps(&self) -> usize {
        self.inner.steps()
    }

    /// Latent rows and per-row log-determinants.
    fn forward(&self, rows: Rows) -> PyResult<(Rows, Vec<f64>)> {
        let x = Tensor::from_rows(&rows).map_err(err)?;
        let (z, log_det) = flow_forward(&self.inner, &x).map_err(err)?;
        Ok((z.to_rows(), log_det))
    }

    fn inverse(&self, rows: Rows) -> PyResult<Rows> {
        let z = Tensor::from_rows(&rows).map_err(err)?;
        Ok(flow_inverse(&self.inner, &z).map_err(err)?.to_rows())
    }

    fn nll(&self, rows: Rows) -> PyResult<f64> {
        flow_nll(&self.inner, &matrix(&rows)?).map_err(err)
    }

    fn apply(&self, rows: Rows) -> PyResult<Rows> {
        Ok(flow_apply(&self.inner, &matrix(&rows)?).map_err(err)?.values().to_rows())
    }

    /// Trains in place and returns the NLL trace (before training, then
    /// after each epoch).
    #[pyo3(signature = (rows, epochs = 5, lr = 1e-3, batch = 64, seed = 0))]
    fn fit(&mut self, py: Python<'_>, rows: Rows, epochs: usize, lr: f64, batch: usize, seed: u64) -> PyResult<Vec<f64>> {
        let x = matrix(&rows)?;
        let cfg = FlowTrainConfig {
            epochs,
            lr,
            batch,
            seed,
            ..FlowTrainConfig::default()
        };
        let model = self.inner.clone();
        let (trained, trace) = py.detach(move || flow_train(&model, &x, &cfg)).map_err(err)?;
        self.inner = trained;
        Ok(trace)
    }
}

/// Writes a synthetic corpus plus `run.toml` into `dir` and returns the
/// configuration that points at it.
#[pyfunction]
#[pyo3(signature = (dir, n = 500, m = 3, v = 12, seed = 0, noise_scale = None, tokens = None))]
fn synth(
    dir: PathBuf,
    n: usize,
    m: usize,
    v: usize,
    seed: u64,
    noise_scale: Option<f64>,
    tokens: Option<(usize, usize)>,
) -> PyResult<PyConfig> {
    let mut sc = SynthConfig {
        n,
        m,
        v,
        seed,
        tokens,
        ..SynthConfig::default()
    };
    if let Some(s) = noise_scale {
        sc.noise_scale = s;
    }
    let data = generate(&sc).map_err(err)?;
    Ok(PyConfig {
        inner: write_synth(&data, &sc, &dir).map_err(err)?,
    })
}

#[pyfunction]
fn read_embeddings(path: PathBuf) -> PyResult<Rows> {
    Ok(core_read(path).map_err(err)?.values().to_rows())
}

#[pyfunction]
fn write_embeddings(path: PathBuf, rows: Rows) -> PyResult<()> {
    core_write(path, &matrix(&rows)?).map_err(err)
}

/// Whitens `rows` with a transform fitted on them.
#[pyfunction]
fn whiten(rows: Rows) -> PyResult<Rows> {
    let x = matrix(&rows)?;
    let t = whiten_fit(&x).map_err(err)?;
    Ok(whiten_apply(&t, &x).map_err(err)?.values().to_rows())
}

/// Full metric report for 0/1 gold rows against probability rows.
#[pyfunction]
#[pyo3(signature = (gold, probabilities, threshold = 0.5))]
fn evaluate(gold: Vec<Vec<u8>>, probabilities: Rows, threshold: f64) -> PyResult<BTreeMap<&'static str, f64>> {
    let m = gold.first().map_or(0, Vec::len);
    let names: Vec<String> = (0..m).map(|j| format!("t{j}")).collect();
    let labels = LabelMatrix::from_rows(names.clone(), gold).map_err(err)?;
    let probs = Tensor::from_rows(&probabilities).map_err(err)?;
    let pred = Prediction::from_probabilities(labels.doc_ids().to_vec(), names, probs, threshold).map_err(err)?;
    Ok(report(&core_evaluate(&labels, &pred).map_err(err)?))
}

#[pymodule]
fn flowvae(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FlowVaeError", m.py().get_type::<FlowVaeError>())?;
    m.add_class::<PyConfig>()?;
    m.add_class::<PyFlow>()?;
    m.add_function(wrap_pyfunction!(synth, m)?)?;
    m.add_function(wrap_pyfunction!(read_embeddings, m)?)?;
    m.add_function(wrap_pyfunction!(write_embeddings, m)?)?;
    m.add_function(wrap_pyfunction!(whiten, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    Ok(())
}
