//! End-to-end orchestration: pool → calibrate → combine → train → predict →
//! evaluate, plus the γ/ω sweep and the six-stage ablation.
//!
//! Text artifacts start with `# ` comment lines naming the artifact, the
//! config digest and the seed. Binary artifacts are listed with their
//! SHA-256 in `manifest.txt`, which carries the same header.

pub mod ablation;
pub mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::calib::flow::{encode_flow, flow_apply, flow_init, flow_train, FlowModel};
use crate::calib::{whiten_apply, whiten_fit, Calibration};
use crate::error::{Error, Result};
use crate::guidance::{combine, read_guidance, write_guidance, GuidanceMatrix, GuidanceSource};
use crate::ingest::format::{encode_embeddings, write_bytes};
use crate::ingest::{
    average_layers, document_frequencies, mean_pool, read_embeddings, read_labels, read_tokens, split,
    tfidf_pool, EmbeddingMatrix, LabelMatrix, Pooling,
};
use crate::metrics::{evaluate, MetricsReport};
use crate::synth::{SynthConfig, SynthData};
use crate::vae::model::encode_model;
use crate::vae::train::EpochLoss;
use crate::vae::{predict, train, LossConfig, Prediction, VaeModel, VaeTrainConfig};

pub use ablation::{ablation_variants, AblationInputs, Stage};
pub use config::{digest_str, env_seed, FlowOrder, Overrides, RunConfig};

/// Independent seed for a named sub-task.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    seed ^ tag.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

const SPLIT_TAG: u64 = 1;
const FLOW_TAG: u64 = 100;

/// Provenance header lines for an artifact.
pub fn header(cfg: &RunConfig, artifact: &str) -> String {
    provenance(artifact, &cfg.digest(), cfg.seed())
}

pub fn provenance(artifact: &str, digest: &str, seed: u64) -> String {
    format!("flowvae {artifact}\nconfig_digest: {digest}\nseed: {seed}")
}

fn comment_block(header: &str) -> String {
    header.lines().map(|l| format!("# {l}\n")).collect()
}

/// Writes `body` after the header rendered as `# ` comment lines.
pub fn write_text(path: &Path, header: &str, body: &str) -> Result<()> {
    let mut s = comment_block(header);
    s.push_str(body);
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

/// SHA-256 listing of binary artifacts, rewritten after every addition so a
/// failed run keeps an accurate record of what it produced.
pub struct Manifest {
    path: PathBuf,
    header: String,
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(dir: &Path, header: String) -> Self {
        Self::at(dir.join("manifest.txt"), header)
    }

    pub fn at(path: PathBuf, header: String) -> Self {
        Self {
            path,
            header,
            entries: Vec::new(),
        }
    }

    /// Writes `bytes` to `dir/name` and records its hash.
    pub fn add(&mut self, dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
        write_bytes(&dir.join(name), bytes)?;
        let hash: String = Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect();
        let name = name.to_string();
        self.entries.push((hash, name));
        let body: String = self.entries.iter().map(|(h, n)| format!("{h}  {n}\n")).collect();
        write_text(&self.path, &self.header, &body)
    }
}

/// Loads and pools the selected layers, in selection order.
pub fn load_layers(cfg: &RunConfig, pooling: Pooling) -> Result<Vec<EmbeddingMatrix>> {
    let paths = match pooling {
        Pooling::Cls => &cfg.inputs.embeddings,
        Pooling::Mean | Pooling::Tfidf => &cfg.inputs.tokens,
    };
    cfg.layers
        .iter()
        .map(|&l| {
            let p = paths.get(l).ok_or_else(|| {
                Error::Config(format!("layer {l} selected but {} {pooling} inputs listed", paths.len()))
            })?;
            let p = cfg.resolve(p);
            let mut m = match pooling {
                Pooling::Cls => {
                    let mut m = read_embeddings(&p)?;
                    m.provenance.pooling = Some(Pooling::Cls);
                    m
                }
                Pooling::Mean => mean_pool(&read_tokens(&p)?)?,
                Pooling::Tfidf => {
                    let t = read_tokens(&p)?;
                    tfidf_pool(&t, &document_frequencies(&t), t.len())?
                }
            };
            m.provenance.layers = vec![l];
            Ok(m)
        })
        .collect()
}

fn average_selected(cfg: &RunConfig, layers: &[EmbeddingMatrix]) -> Result<EmbeddingMatrix> {
    let idx: Vec<usize> = (0..layers.len()).collect();
    let mut m = average_layers(layers, &idx)?;
    m.provenance.layers = cfg.layers.clone();
    Ok(m)
}

/// A trained flow with its NLL trace and the layer it calibrates (`None`
/// for a flow fitted on the averaged embedding).
#[derive(Clone, Debug)]
pub struct FittedFlow {
    pub layer: Option<usize>,
    pub model: FlowModel,
    pub trace: Vec<f64>,
}

fn fit_flow(cfg: &RunConfig, x: &EmbeddingMatrix, layer: Option<usize>) -> Result<(EmbeddingMatrix, FittedFlow)> {
    let seed = derive_seed(cfg.seed(), FLOW_TAG + layer.map_or(0, |l| l as u64 + 1));
    let init = flow_init(x.dim(), cfg.flow.steps, seed)?;
    let mut fc = cfg.flow_config(seed);
    fc.batch = fc.batch.min(x.n());
    let (model, trace) = flow_train(&init, x, &fc)?;
    let out = flow_apply(&model, x)?;
    Ok((out, FittedFlow { layer, model, trace }))
}

fn calibrate_one(cfg: &RunConfig, mode: Calibration, x: &EmbeddingMatrix, layer: Option<usize>, flows: &mut Vec<FittedFlow>) -> Result<EmbeddingMatrix> {
    match mode {
        Calibration::None => Ok(x.clone()),
        Calibration::Whiten => whiten_apply(&whiten_fit(x)?, x),
        Calibration::Flow => {
            let (out, f) = fit_flow(cfg, x, layer)?;
            flows.push(f);
            Ok(out)
        }
    }
}

/// Calibrates the selected layers and averages them, in the configured
/// order.
pub fn calibrate_layers(
    cfg: &RunConfig,
    mode: Calibration,
    layers: &[EmbeddingMatrix],
) -> Result<(EmbeddingMatrix, Vec<FittedFlow>)> {
    let mut flows = Vec::new();
    let mut out = match cfg.flow_order {
        FlowOrder::PerLayer => {
            let cal = layers
                .iter()
                .zip(&cfg.layers)
                .map(|(x, &l)| calibrate_one(cfg, mode, x, Some(l), &mut flows))
                .collect::<Result<Vec<_>>>()?;
            average_selected(cfg, &cal)?
        }
        FlowOrder::Averaged => {
            let avg = average_selected(cfg, layers)?;
            calibrate_one(cfg, mode, &avg, None, &mut flows)?
        }
    };
    out.provenance.layers = cfg.layers.clone();
    out.provenance.calibration = Some(mode.to_string());
    Ok((out, flows))
}

/// Inputs shared by every grid point of a run or sweep.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub embeddings: EmbeddingMatrix,
    pub labels: LabelMatrix,
    pub guidance_a: GuidanceMatrix,
    pub guidance_b: Option<GuidanceMatrix>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub flows: Vec<FittedFlow>,
}

fn load_supervision(cfg: &RunConfig) -> Result<(LabelMatrix, GuidanceMatrix, Option<GuidanceMatrix>)> {
    let labels = read_labels(cfg.resolve(&cfg.inputs.labels))?;
    let a = read_guidance(
        cfg.resolve(&cfg.inputs.guidance_a),
        cfg.inputs.guidance_a_probability,
        GuidanceSource::ZeroShot,
    )?;
    a.check_labels(&labels)?;
    let b = match &cfg.inputs.guidance_b {
        Some(p) => {
            let b = read_guidance(cfg.resolve(p), cfg.inputs.guidance_b_probability, GuidanceSource::SeededTopic)?;
            b.check_labels(&labels)?;
            Some(b)
        }
        None => None,
    };
    Ok((labels, a, b))
}

fn check_rows(e: &EmbeddingMatrix, labels: &LabelMatrix) -> Result<()> {
    if e.n() != labels.n() {
        return Err(Error::Alignment(format!(
            "{} embedding rows but {} labelled documents",
            e.n(),
            labels.n()
        )));
    }
    Ok(())
}

/// Loads every input, calibrates and splits. Everything here is
/// independent of γ and ω.
pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    cfg.validate().map_err(|e| e.in_stage("config"))?;
    let layers = load_layers(cfg, cfg.pooling).map_err(|e| e.in_stage("pool"))?;
    let (embeddings, flows) =
        calibrate_layers(cfg, cfg.calibration, &layers).map_err(|e| e.in_stage("calibrate"))?;
    let (labels, guidance_a, guidance_b) = load_supervision(cfg).map_err(|e| e.in_stage("combine"))?;
    check_rows(&embeddings, &labels).map_err(|e| e.in_stage("pool"))?;
    let (train, test) =
        split(&labels, cfg.test_fraction, derive_seed(cfg.seed(), SPLIT_TAG)).map_err(|e| e.in_stage("split"))?;
    Ok(Prepared {
        embeddings,
        labels,
        guidance_a,
        guidance_b,
        train,
        test,
        flows,
    })
}

/// Guidance mixture for one ω. At ω = 1 only the first backend is needed.
pub fn mix_guidance(a: &GuidanceMatrix, b: Option<&GuidanceMatrix>, omega: f64) -> Result<GuidanceMatrix> {
    match b {
        Some(b) => combine(a, b, omega),
        None if omega == 1.0 => Ok(a.clone()),
        None => Err(Error::Config(format!("omega = {omega} needs a second guidance matrix"))),
    }
}

/// Trains on the `train` rows and predicts the `test` rows.
#[allow(clippy::too_many_arguments)]
pub fn fit_predict(
    e: &EmbeddingMatrix,
    guidance: &GuidanceMatrix,
    labels: &LabelMatrix,
    train_idx: &[usize],
    test_idx: &[usize],
    loss: &LossConfig,
    tc: &VaeTrainConfig,
    threshold: f64,
) -> Result<(VaeModel, Vec<EpochLoss>, Prediction)> {
    let (model, trace) = train(&e.select_rows(train_idx), &guidance.select_rows(train_idx), loss, tc)
        .map_err(|e| e.in_stage("train"))?;
    let test_labels = labels.select_rows(test_idx);
    let pred = predict(
        &model,
        e.select_rows(test_idx).values(),
        test_labels.doc_ids().to_vec(),
        test_labels.names().to_vec(),
        threshold,
    )
    .map_err(|e| e.in_stage("predict"))?;
    Ok((model, trace, pred))
}

/// Everything one (γ, ω) point produces.
#[derive(Clone, Debug)]
pub struct PointOutcome {
    pub guidance: GuidanceMatrix,
    pub model: VaeModel,
    pub trace: Vec<EpochLoss>,
    pub prediction: Prediction,
    pub report: MetricsReport,
}

pub fn run_point(cfg: &RunConfig, prep: &Prepared, gamma: f64, omega: f64) -> Result<PointOutcome> {
    let guidance = mix_guidance(&prep.guidance_a, prep.guidance_b.as_ref(), omega).map_err(|e| e.in_stage("combine"))?;
    let loss = cfg.loss_config(gamma, prep.labels.m()).map_err(|e| e.in_stage("train"))?;
    let (model, trace, prediction) = fit_predict(
        &prep.embeddings,
        &guidance,
        &prep.labels,
        &prep.train,
        &prep.test,
        &loss,
        &cfg.train_config(),
        cfg.threshold,
    )?;
    let report = evaluate(&prep.labels.select_rows(&prep.test), &prediction).map_err(|e| e.in_stage("evaluate"))?;
    Ok(PointOutcome {
        guidance,
        model,
        trace,
        prediction,
        report,
    })
}

fn output_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e).in_stage("output"))?;
    Ok(dir)
}

pub fn flow_trace_csv(flows: &[FittedFlow]) -> String {
    let mut s = String::from("layer,epochs_done,nll\n");
    for f in flows {
        let layer = f.layer.map_or("avg".to_string(), |l| l.to_string());
        for (k, v) in f.trace.iter().enumerate() {
            let _ = writeln!(s, "{layer},{k},{v}");
        }
    }
    s
}

pub fn loss_trace_csv(trace: &[EpochLoss]) -> String {
    let mut s = String::from("epoch,total,recon,kld,topic,alpha,eta\n");
    for (k, l) in trace.iter().enumerate() {
        let _ = writeln!(s, "{k},{},{},{},{},{},{}", l.total, l.recon, l.kld, l.topic, l.alpha, l.eta);
    }
    s
}

fn split_csv(labels: &LabelMatrix, test: &[usize]) -> String {
    let mut s = String::from("doc_id,set\n");
    let mut is_test = vec![false; labels.n()];
    test.iter().for_each(|&i| is_test[i] = true);
    for (id, t) in labels.doc_ids().iter().zip(is_test) {
        let _ = writeln!(s, "{id},{}", if t { "test" } else { "train" });
    }
    s
}

fn write_prepared(cfg: &RunConfig, dir: &Path, prep: &Prepared, manifest: &mut Manifest) -> Result<()> {
    manifest.add(dir, "embeddings.bfve", &encode_embeddings(&prep.embeddings)?)?;
    for f in &prep.flows {
        let name = f.layer.map_or("flow_avg.bfvf".to_string(), |l| format!("flow_layer{l}.bfvf"));
        manifest.add(dir, &name, &encode_flow(&f.model)?)?;
    }
    if !prep.flows.is_empty() {
        write_text(&dir.join("flow_trace.csv"), &header(cfg, "flow_trace"), &flow_trace_csv(&prep.flows))?;
    }
    write_text(&dir.join("split.csv"), &header(cfg, "split"), &split_csv(&prep.labels, &prep.test))
}

/// Full pipeline run; writes all artifacts to the output directory.
pub fn cmd_run(cfg: &RunConfig) -> Result<MetricsReport> {
    cfg.validate().map_err(|e| e.in_stage("config"))?;
    let dir = output_dir(cfg)?;
    let mut manifest = Manifest::new(&dir, header(cfg, "manifest"));
    let prep = prepare(cfg)?;
    write_prepared(cfg, &dir, &prep, &mut manifest).map_err(|e| e.in_stage("output"))?;
    let guidance = mix_guidance(&prep.guidance_a, prep.guidance_b.as_ref(), cfg.omega).map_err(|e| e.in_stage("combine"))?;
    write_guidance(dir.join("guidance.csv"), &guidance, Some(&header(cfg, "guidance"))).map_err(|e| e.in_stage("output"))?;
    let out = run_point(cfg, &prep, cfg.gamma, cfg.omega)?;
    let mut write = || -> Result<()> {
        manifest.add(&dir, "model.bfvm", &encode_model(&out.model)?)?;
        write_text(&dir.join("loss_trace.csv"), &header(cfg, "loss_trace"), &loss_trace_csv(&out.trace))?;
        out.prediction.write(
            &dir.join("predictions.csv"),
            &dir.join("predicted_labels.csv"),
            Some(&header(cfg, "predictions")),
        )?;
        out.report.write(&dir, "metrics", &header(cfg, "metrics"))
    };
    write().map_err(|e| e.in_stage("output"))?;
    Ok(out.report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub gamma: f64,
    pub omega: f64,
    /// `Err` holds the diagnostic of a failed point.
    pub result: std::result::Result<MetricsReport, String>,
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// One run per (γ, ω), ordered by γ then ω, reusing one calibration.
/// Writes `sweep.csv`.
pub fn cmd_sweep(cfg: &RunConfig, gammas: &[f64], omegas: &[f64]) -> Result<Vec<SweepRow>> {
    if gammas.is_empty() || omegas.is_empty() {
        return Err(Error::Config("sweep grids must be non-empty".into()).in_stage("config"));
    }
    let dir = output_dir(cfg)?;
    let prep = prepare(cfg)?;
    let mut rows = Vec::with_capacity(gammas.len() * omegas.len());
    for &gamma in &sorted(gammas) {
        for &omega in &sorted(omegas) {
            let result = run_point(cfg, &prep, gamma, omega).map(|o| o.report).map_err(|e| {
                log::error!("sweep point gamma={gamma} omega={omega} failed: {e}");
                e.to_string()
            });
            rows.push(SweepRow { gamma, omega, result });
        }
    }
    write_text(&dir.join("sweep.csv"), &header(cfg, "sweep"), &sweep_csv(&rows)).map_err(|e| e.in_stage("output"))?;
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("gamma,omega,f1,precision,recall,status\n");
    for r in rows {
        match &r.result {
            Ok(m) => {
                let _ = writeln!(s, "{},{},{},{},{},ok", r.gamma, r.omega, m.f1, m.precision, m.recall);
            }
            Err(_) => {
                let _ = writeln!(s, "{},{},,,,failed", r.gamma, r.omega);
            }
        }
    }
    s
}

/// Builds the inputs of every ablation stage from a run configuration.
/// Stages 2–4 use mean pooling when the configuration asks for TF-IDF.
pub fn prepare_ablation(cfg: &RunConfig) -> Result<AblationInputs> {
    cfg.validate().map_err(|e| e.in_stage("config"))?;
    let base_pooling = match cfg.pooling {
        Pooling::Tfidf => Pooling::Mean,
        p => p,
    };
    let base = load_layers(cfg, base_pooling).map_err(|e| e.in_stage("pool"))?;
    let raw = average_selected(cfg, &base).map_err(|e| e.in_stage("pool"))?;
    let (calibrated, _) = calibrate_layers(cfg, cfg.calibration, &base).map_err(|e| e.in_stage("calibrate"))?;
    let tfidf = if cfg.inputs.tokens.is_empty() {
        None
    } else {
        let t = load_layers(cfg, Pooling::Tfidf).map_err(|e| e.in_stage("pool"))?;
        Some(calibrate_layers(cfg, cfg.calibration, &t).map_err(|e| e.in_stage("calibrate"))?.0)
    };
    let (labels, a, b) = load_supervision(cfg).map_err(|e| e.in_stage("combine"))?;
    check_rows(&raw, &labels).map_err(|e| e.in_stage("pool"))?;
    let guidance = mix_guidance(&a, b.as_ref(), cfg.omega).map_err(|e| e.in_stage("combine"))?;
    let (train, test) =
        split(&labels, cfg.test_fraction, derive_seed(cfg.seed(), SPLIT_TAG)).map_err(|e| e.in_stage("split"))?;
    Ok(AblationInputs {
        labels,
        guidance,
        raw: Some(raw),
        calibrated: Some(calibrated),
        tfidf,
        train,
        test,
        gamma: cfg.gamma,
        symmetric_topic: cfg.loss.symmetric_topic,
        train_config: cfg.train_config(),
        threshold: cfg.threshold,
    })
}

/// Metrics for stages 1–6, in order. Writes `ablation.csv`.
pub fn cmd_ablate(cfg: &RunConfig) -> Result<Vec<(Stage, MetricsReport)>> {
    let dir = output_dir(cfg)?;
    let inputs = prepare_ablation(cfg)?;
    let gold = inputs.labels.select_rows(&inputs.test);
    let mut rows = Vec::with_capacity(Stage::ALL.len());
    for stage in Stage::ALL {
        let pred = ablation_variants(stage, &inputs).map_err(|e| e.in_stage(stage.name()))?;
        let report = evaluate(&gold, &pred).map_err(|e| e.in_stage("evaluate"))?;
        log::info!("ablation stage {} ({}): f1 {:.4}", stage.index(), stage.name(), report.f1);
        rows.push((stage, report));
    }
    write_text(&dir.join("ablation.csv"), &header(cfg, "ablation"), &ablation_csv(&rows)).map_err(|e| e.in_stage("output"))?;
    Ok(rows)
}

pub fn ablation_csv(rows: &[(Stage, MetricsReport)]) -> String {
    let mut s = format!("stage,name,{}\n", MetricsReport::KEYS.join(","));
    for (stage, m) in rows {
        let vals: Vec<String> = m.values().iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{},{},{}", stage.index(), stage.name(), vals.join(","));
    }
    s
}

/// Writes a synthetic corpus in the ingest formats together with a
/// `run.toml` that points at it, and returns that configuration.
pub fn write_synth(data: &SynthData, sc: &SynthConfig, dir: &Path) -> Result<RunConfig> {
    use crate::guidance::write_guidance;
    use crate::ingest::{write_embeddings, write_labels, write_tokens};

    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let note = format!("flowvae synth\nseed: {}", sc.seed);
    let mut cfg = RunConfig::default();
    for (l, e) in data.layers.iter().enumerate() {
        let name = format!("layer{l}.bfve");
        write_embeddings(dir.join(&name), e)?;
        cfg.inputs.embeddings.push(name.into());
    }
    if let Some(sets) = &data.tokens {
        for (l, t) in sets.iter().enumerate() {
            let name = format!("layer{l}.bfvt");
            write_tokens(dir.join(&name), t)?;
            cfg.inputs.tokens.push(name.into());
        }
    }
    write_labels(dir.join("labels.csv"), &data.labels, Some(&note))?;
    write_guidance(dir.join("guidance_a.csv"), &data.guidance_a, Some(&note))?;
    write_guidance(dir.join("guidance_b.csv"), &data.guidance_b, Some(&note))?;
    cfg.seed = Some(sc.seed);
    cfg.layers = (0..data.layers.len()).collect();
    cfg.inputs.guidance_a = "guidance_a.csv".into();
    cfg.inputs.guidance_b = Some("guidance_b.csv".into());
    cfg.inputs.guidance_b_probability = true;
    cfg.inputs.labels = "labels.csv".into();
    cfg.inputs.output = "out".into();
    let path = dir.join("run.toml");
    std::fs::write(&path, cfg.to_toml()).map_err(|e| Error::io(&path, e))?;
    cfg.base_dir = dir.to_path_buf();
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::generate;

    fn small(dir: &Path, tokens: bool) -> RunConfig {
        let sc = SynthConfig {
            n: 120,
            m: 3,
            v: 6,
            tokens: tokens.then_some((2, 4)),
            seed: 5,
            ..SynthConfig::default()
        };
        let mut cfg = write_synth(&generate(&sc).unwrap(), &sc, dir).unwrap();
        cfg.train.epochs = 2;
        cfg.train.h1 = 16;
        cfg.train.h2 = 8;
        cfg.flow.steps = 2;
        cfg.flow.epochs = 1;
        cfg.flow.batch = 32;
        cfg
    }

    #[test]
    fn run_writes_every_artifact() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(dir.path(), false);
        let report = cmd_run(&cfg).unwrap();
        assert!(report.f1.is_finite());
        let out = cfg.output_dir();
        for f in [
            "embeddings.bfve",
            "flow_layer0.bfvf",
            "flow_trace.csv",
            "split.csv",
            "guidance.csv",
            "model.bfvm",
            "loss_trace.csv",
            "predictions.csv",
            "predicted_labels.csv",
            "metrics.txt",
            "metrics.json",
            "manifest.txt",
        ] {
            let p = out.join(f);
            assert!(p.is_file(), "{f} missing");
        }
        let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
        assert!(manifest.starts_with(&format!("# flowvae manifest\n# config_digest: {}\n", cfg.digest())));
        assert_eq!(manifest.lines().filter(|l| !l.starts_with('#')).count(), 3);
        let preds = std::fs::read_to_string(out.join("predictions.csv")).unwrap();
        assert!(preds.starts_with("# flowvae predictions\n"));
        let n_test = preds.lines().filter(|l| !l.starts_with('#')).count() - 1;
        assert_eq!(n_test, 24);
    }

    #[test]
    fn stage_errors_are_named() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(dir.path(), false);
        cfg.layers = vec![0, 4];
        let err = cmd_run(&cfg).unwrap_err().to_string();
        assert!(err.starts_with("config failed"), "{err}");

        let mut cfg = small(dir.path(), false);
        cfg.train.lr = f64::NAN;
        let err = cmd_run(&cfg).unwrap_err().to_string();
        assert!(err.starts_with("train failed"), "{err}");
        assert!(cfg.output_dir().join("embeddings.bfve").is_file());
    }

    #[test]
    fn sweep_marks_failed_points() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(dir.path(), false);
        let rows = cmd_sweep(&cfg, &[1.0, -1.0], &[1.0, 0.0]).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[0].gamma, rows[0].omega), (-1.0, 0.0));
        assert!(rows[0].result.is_err() && rows[1].result.is_err());
        assert!(rows[2].result.is_ok() && rows[3].result.is_ok());
        let text = std::fs::read_to_string(cfg.output_dir().join("sweep.csv")).unwrap();
        assert!(text.contains("\n-1,0,,,,failed\n"));
    }

    #[test]
    fn ablation_needs_tokens_for_tfidf() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(dir.path(), false);
        let err = cmd_ablate(&cfg).unwrap_err().to_string();
        assert!(err.starts_with("tfidf failed"), "{err}");
    }

    #[test]
    fn ablation_emits_six_rows() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(dir.path(), true);
        let rows = cmd_ablate(&cfg).unwrap();
        let idx: Vec<usize> = rows.iter().map(|(s, _)| s.index()).collect();
        assert_eq!(idx, vec![1, 2, 3, 4, 5, 6]);
        let csv = std::fs::read_to_string(cfg.output_dir().join("ablation.csv")).unwrap();
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 7);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(0, 1), derive_seed(0, 2));
        assert_ne!(derive_seed(0, 1), derive_seed(1, 1));
    }
}
