use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use flowvae_core::calib::flow::{encode_flow, flow_apply, flow_init, flow_train, FlowTrainConfig, DEFAULT_STEPS};
use flowvae_core::calib::{whiten_apply, whiten_fit, Calibration};
use flowvae_core::guidance::{combine, read_guidance, write_guidance, GuidanceSource};
use flowvae_core::ingest::format::encode_embeddings;
use flowvae_core::ingest::table::read_table;
use flowvae_core::ingest::{
    average_layers, document_frequencies, mean_pool, read_embeddings, read_labels, read_tokens, tfidf_pool,
    Pooling,
};
use flowvae_core::metrics::evaluate;
use flowvae_core::pipeline::{
    self, digest_str, env_seed, loss_trace_csv, provenance, write_text, Manifest, Overrides, RunConfig,
};
use flowvae_core::synth::{generate, SynthConfig};
use flowvae_core::vae::model::{encode_model, DEFAULT_H1, DEFAULT_H2};
use flowvae_core::vae::{predict, read_model, train, LossConfig, Prediction, VaeTrainConfig, DEFAULT_THRESHOLD};

/// Weakly-supervised multi-label classification over sentence embeddings.
#[derive(Parser)]
#[command(name = "flowvae", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pool token embeddings (or read sentence embeddings) and average layers.
    Pool(PoolArgs),
    /// Calibrate embeddings with a flow, whitening, or nothing.
    Calibrate(CalibrateArgs),
    /// Mix two guidance matrices.
    Combine(CombineArgs),
    /// Train the VAE on embeddings and guidance.
    Train(TrainArgs),
    /// Topic probabilities and labels from a trained model.
    Predict(PredictArgs),
    /// Score predictions against gold labels.
    Evaluate(EvaluateArgs),
    /// Full pipeline from a config file.
    Run(ConfigArgs),
    /// γ × ω sensitivity grid.
    Sweep(SweepArgs),
    /// The six cumulative pipeline stages.
    Ablate(ConfigArgs),
    /// Write a synthetic corpus and a matching run.toml.
    Synth(SynthArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    pooling: Option<Pooling>,
    #[arg(long)]
    calib: Option<Calibration>,
    /// VAE training epochs.
    #[arg(long)]
    epochs: Option<usize>,
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(&self.config).context("config failed")?;
        cfg.apply(&Overrides {
            gamma: self.gamma,
            omega: self.omega,
            seed: self.seed,
            pooling: self.pooling,
            calibration: self.calib,
            epochs: self.epochs,
        })
        .context("config failed")?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Comma-separated γ grid; defaults to the config's `[sweep]` table.
    #[arg(long, value_delimiter = ',')]
    gammas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    omegas: Option<Vec<f64>>,
}

#[derive(Args)]
struct PoolArgs {
    /// One file per layer: BFVE for `cls`, BFVT otherwise.
    #[arg(long = "input", required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value = "mean")]
    mode: Pooling,
    /// Indices into the inputs to average; all by default.
    #[arg(long, value_delimiter = ',')]
    select: Option<Vec<usize>>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "flow")]
    mode: Calibration,
    #[arg(long)]
    out: PathBuf,
    /// Also save the trained flow.
    #[arg(long)]
    model_out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    steps: usize,
    #[arg(long, default_value_t = FlowTrainConfig::default().epochs)]
    epochs: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scores {
    /// Already in [0, 1].
    Prob,
    /// Unnormalized; min-max scaled per topic.
    Raw,
}

#[derive(Args)]
struct CombineArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long, value_enum, default_value = "prob")]
    a_kind: Scores,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, value_enum, default_value = "raw")]
    b_kind: Scores,
    #[arg(long, default_value_t = 0.5)]
    omega: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    embeddings: PathBuf,
    /// Guidance in [0, 1], one row per embedding.
    #[arg(long)]
    guidance: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = VaeTrainConfig::default().epochs)]
    epochs: usize,
    #[arg(long, default_value_t = VaeTrainConfig::default().batch)]
    batch: usize,
    #[arg(long, default_value_t = VaeTrainConfig::default().lr)]
    lr: f64,
    #[arg(long, default_value_t = DEFAULT_H1)]
    h1: usize,
    #[arg(long, default_value_t = DEFAULT_H2)]
    h2: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    encoder_only: bool,
    /// Add the negative term to the topic loss.
    #[arg(long)]
    symmetric: bool,
    /// Disable the warm-up and final-epoch weight schedule.
    #[arg(long)]
    no_schedule: bool,
    /// Per-epoch loss table.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    embeddings: PathBuf,
    /// Labels or guidance file supplying document ids and topic names.
    #[arg(long)]
    reference: PathBuf,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Probabilities, in the guidance format.
    #[arg(long)]
    out: PathBuf,
    /// Thresholded labels.
    #[arg(long)]
    labels_out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    labels: PathBuf,
    /// Probabilities written by `predict`.
    #[arg(long)]
    predictions: PathBuf,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Directory for `<stem>.txt` and `<stem>.json`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, default_value = "metrics")]
    stem: String,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    m: usize,
    #[arg(long, default_value_t = 32)]
    v: usize,
    #[arg(long, default_value_t = 0.3)]
    prior: f64,
    #[arg(long, default_value_t = SynthConfig::default().noise_scale)]
    noise: f64,
    #[arg(long, default_value_t = 10.0)]
    anisotropy: f64,
    #[arg(long, default_value_t = 0.2)]
    blur: f64,
    #[arg(long, default_value_t = 0.05)]
    flip: f64,
    #[arg(long, default_value_t = 1)]
    layers: usize,
    #[arg(long, default_value_t = 0.0)]
    layer_noise: f64,
    /// Token count range `MIN,MAX`; emits token-level files.
    #[arg(long, value_delimiter = ',')]
    tokens: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
}

fn seed_or_env(flag: Option<u64>) -> Result<u64> {
    Ok(match flag {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    })
}

/// Header for a stage command's outputs, keyed by its arguments.
fn stage_header(artifact: &str, seed: u64) -> String {
    let args: Vec<String> = std::env::args().skip(1).collect();
    provenance(artifact, &digest_str(&args.join("\u{1f}")), seed)
}

fn write_binary(path: &Path, bytes: &[u8], header: String) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().context("output path has no file name")?.to_string_lossy();
    let mut manifest = Manifest::at(dir.join(format!("{name}.manifest.txt")), header);
    manifest.add(dir, &name, bytes)?;
    Ok(())
}

fn cmd_pool(a: &PoolArgs) -> Result<()> {
    let layers = a
        .inputs
        .iter()
        .map(|p| {
            Ok(match a.mode {
                Pooling::Cls => read_embeddings(p)?,
                Pooling::Mean => mean_pool(&read_tokens(p)?)?,
                Pooling::Tfidf => {
                    let t = read_tokens(p)?;
                    tfidf_pool(&t, &document_frequencies(&t), t.len())?
                }
            })
        })
        .collect::<Result<Vec<_>>>()
        .context("pool failed")?;
    let select = a.select.clone().unwrap_or_else(|| (0..layers.len()).collect());
    let out = average_layers(&layers, &select).context("pool failed")?;
    write_binary(&a.out, &encode_embeddings(&out)?, stage_header("pool", 0))
}

fn cmd_calibrate(a: &CalibrateArgs) -> Result<()> {
    let seed = seed_or_env(a.seed)?;
    let x = read_embeddings(&a.input).context("calibrate failed")?;
    let header = stage_header("calibrate", seed);
    let out = match a.mode {
        Calibration::None => x,
        Calibration::Whiten => whiten_apply(&whiten_fit(&x)?, &x).context("calibrate failed")?,
        Calibration::Flow => {
            let init = flow_init(x.dim(), a.steps, seed)?;
            let cfg = FlowTrainConfig {
                epochs: a.epochs,
                batch: FlowTrainConfig::default().batch.min(x.n()),
                seed,
                ..FlowTrainConfig::default()
            };
            let (model, trace) = flow_train(&init, &x, &cfg).context("calibrate failed")?;
            log::info!("flow nll {:?}", trace);
            if let Some(p) = &a.model_out {
                write_binary(p, &encode_flow(&model)?, header.clone())?;
            }
            flow_apply(&model, &x)?
        }
    };
    write_binary(&a.out, &encode_embeddings(&out)?, header)
}

fn read_scores(path: &Path, kind: Scores, source: GuidanceSource) -> Result<flowvae_core::guidance::GuidanceMatrix> {
    Ok(read_guidance(path, matches!(kind, Scores::Prob), source)?)
}

fn cmd_combine(a: &CombineArgs) -> Result<()> {
    let ga = read_scores(&a.a, a.a_kind, GuidanceSource::ZeroShot).context("combine failed")?;
    let gb = read_scores(&a.b, a.b_kind, GuidanceSource::SeededTopic).context("combine failed")?;
    let g = combine(&ga, &gb, a.omega).context("combine failed")?;
    write_guidance(&a.out, &g, Some(&stage_header("guidance", 0)))?;
    Ok(())
}

fn cmd_train(a: &TrainArgs) -> Result<()> {
    let seed = seed_or_env(a.seed)?;
    let e = read_embeddings(&a.embeddings).context("train failed")?;
    let g = read_guidance(&a.guidance, true, GuidanceSource::Mixed).context("train failed")?;
    let mut loss = LossConfig::new(a.gamma, g.m())?;
    loss.encoder_only = a.encoder_only;
    loss.symmetric_topic = a.symmetric;
    if a.no_schedule {
        loss = loss.without_schedule();
    }
    let tc = VaeTrainConfig {
        lr: a.lr,
        epochs: a.epochs,
        batch: a.batch,
        h1: a.h1,
        h2: a.h2,
        seed,
        ..VaeTrainConfig::default()
    };
    let (model, trace) = train(&e, &g, &loss, &tc).context("train failed")?;
    write_binary(&a.out, &encode_model(&model)?, stage_header("model", seed))?;
    if let Some(p) = &a.trace {
        write_text(p, &stage_header("loss_trace", seed), &loss_trace_csv(&trace))?;
    }
    Ok(())
}

fn cmd_predict(a: &PredictArgs) -> Result<()> {
    let model = read_model(&a.model).context("predict failed")?;
    let e = read_embeddings(&a.embeddings).context("predict failed")?;
    let reference = read_table(&a.reference).context("predict failed")?;
    if reference.n() != e.n() {
        bail!("predict failed: reference lists {} documents, embeddings have {}", reference.n(), e.n());
    }
    let pred = predict(&model, e.values(), reference.doc_ids, reference.names, a.threshold).context("predict failed")?;
    pred.write(&a.out, &a.labels_out, Some(&stage_header("predictions", 0)))?;
    Ok(())
}

fn cmd_evaluate(a: &EvaluateArgs) -> Result<()> {
    let gold = read_labels(&a.labels).context("evaluate failed")?;
    let probs = read_guidance(&a.predictions, true, GuidanceSource::Mixed).context("evaluate failed")?;
    if probs.doc_ids() != gold.doc_ids() {
        bail!("evaluate failed: prediction and label documents differ");
    }
    let pred = Prediction::from_guidance(&probs, a.threshold)?;
    let report = evaluate(&gold, &pred).context("evaluate failed")?;
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir)?;
        report.write(dir, &a.stem, &stage_header("metrics", 0))?;
    }
    print!("{}", report.to_text());
    Ok(())
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let tokens = match a.tokens.as_deref() {
        Some([lo, hi]) => Some((*lo, *hi)),
        Some(_) => bail!("--tokens takes MIN,MAX"),
        None => None,
    };
    let sc = SynthConfig {
        n: a.n,
        m: a.m,
        v: a.v,
        topic_prior: vec![a.prior],
        noise_scale: a.noise,
        anisotropy: a.anisotropy,
        blur: a.blur,
        flip: a.flip,
        layers: a.layers,
        layer_noise: a.layer_noise,
        tokens,
        seed: seed_or_env(a.seed)?,
        ..SynthConfig::default()
    };
    let data = generate(&sc).context("synth failed")?;
    pipeline::write_synth(&data, &sc, &a.out).context("synth failed")?;
    println!("{}", a.out.join("run.toml").display());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Pool(a) => cmd_pool(&a),
        Command::Calibrate(a) => cmd_calibrate(&a),
        Command::Combine(a) => cmd_combine(&a),
        Command::Train(a) => cmd_train(&a),
        Command::Predict(a) => cmd_predict(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::Run(a) => {
            let report = pipeline::cmd_run(&a.load()?)?;
            print!("{}", report.to_text());
            Ok(())
        }
        Command::Sweep(a) => {
            let cfg = a.config.load()?;
            let gammas = a.gammas.unwrap_or_else(|| cfg.sweep.gammas.clone());
            let omegas = a.omegas.unwrap_or_else(|| cfg.sweep.omegas.clone());
            let rows = pipeline::cmd_sweep(&cfg, &gammas, &omegas)?;
            print!("{}", pipeline::sweep_csv(&rows));
            Ok(())
        }
        Command::Ablate(a) => {
            let rows = pipeline::cmd_ablate(&a.load()?)?;
            print!("{}", pipeline::ablation_csv(&rows));
            Ok(())
        }
        Command::Synth(a) => cmd_synth(&a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
