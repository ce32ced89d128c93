//! Command-line surface: exact divergence values, variational bounds,
//! sample-based estimation, adversarial training, the verification suite,
//! and a catalog listing.
//!
//! Reproducibility contract: two invocations with identical argv and seed
//! write byte-identical `report.json` files. Wall-clock facts (timestamp,
//! duration) are isolated in `manifest.json`, which also records the fully
//! resolved configuration, the seed, and the package version. Every float in
//! an artifact is rendered with 17 significant digits so doubles round-trip
//! exactly.
//!
//! Exit codes: 0 success, 1 usage or validation failure, 2 mathematically
//! divergent result, 3 numerical failure.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::catalog::{self, DivergenceSpec};
use crate::critic::{CriticConfig, Obs};
use crate::dist::{Distribution, DistributionDescriptor};
use crate::error::{Error, Result};
use crate::estimator::{self, CriticTrainConfig, Target, TargetConfig};
use crate::exact::{self, CriticFunction};
use crate::rng;
use crate::trainer::{self, TrainConfig};
use crate::verify::{self, Fault};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DIVERGENT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Seed fallback when `--seed` is absent.
pub const SEED_ENV: &str = "FDIV_SEED";

/// Bumped when the report layout changes; recorded in every manifest.
const REPORT_FORMAT: u32 = 1;

/// Numerical laboratory for f-divergences: exact values, variational bounds,
/// sample-based estimation, and adversarial fitting.
#[derive(Debug, Parser)]
#[command(name = "fdiv", version, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact divergence between two closed-form distributions.
    Divergence(DivergenceArgs),
    /// Variational lower bound for a chosen critic.
    Bound(BoundArgs),
    /// Estimate a divergence from samples by training a critic.
    Estimate(EstimateArgs),
    /// Fit a generator to a target by adversarial training.
    Train(TrainArgs),
    /// Run the identity verification suite.
    Verify(VerifyArgs),
    /// List the built-in divergences.
    Catalog(CatalogArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// RNG seed; falls back to $FDIV_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory receiving report.json and manifest.json (plus trace.csv
    /// where applicable). Without it only the stdout summary is produced.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DivergenceArgs {
    /// Divergence name (see `fdiv catalog`).
    #[arg(long = "f")]
    pub f: String,
    /// First distribution as JSON, e.g. '{"type":"discrete","probs":[0.5,0.5]}'.
    #[arg(long)]
    pub p: String,
    /// Second distribution as JSON.
    #[arg(long)]
    pub q: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Divergence name (see `fdiv catalog`).
    #[arg(long = "f")]
    pub f: String,
    /// First distribution as JSON.
    #[arg(long)]
    pub p: String,
    /// Second distribution as JSON.
    #[arg(long)]
    pub q: String,
    /// Critic source: optimal | zero | const:<value> | file:<path>.
    /// A critic file holds {"config": <critic recipe>, "params": [..]?}.
    #[arg(long, default_value = "optimal")]
    pub critic: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Divergence name (see `fdiv catalog`).
    #[arg(long = "f")]
    pub f: String,
    /// First distribution as JSON (alternative: --p-samples).
    #[arg(long, conflicts_with = "p_samples")]
    pub p: Option<String>,
    /// File of samples from the first distribution (one record per line).
    #[arg(long)]
    pub p_samples: Option<PathBuf>,
    /// Second distribution as JSON (alternative: --q-samples).
    #[arg(long, conflicts_with = "q_samples")]
    pub q: Option<String>,
    /// File of samples from the second distribution.
    #[arg(long)]
    pub q_samples: Option<PathBuf>,
    /// Critic recipe as JSON, e.g. '{"kind":"mlp","input_dim":1}'; default is
    /// chosen from the sample kind (tabular for discrete, MLP otherwise).
    #[arg(long)]
    pub critic: Option<String>,
    /// Optimization steps.
    #[arg(long, default_value_t = 2000)]
    pub steps: usize,
    /// Samples per side per step.
    #[arg(long, default_value_t = 512)]
    pub batch_size: usize,
    /// Critic learning rate.
    #[arg(long, default_value_t = 0.05)]
    pub learning_rate: f64,
    /// Update rule: momentum | adam.
    #[arg(long, default_value = "momentum")]
    pub optimizer: String,
    /// Momentum coefficient (also Adam's first-moment decay).
    #[arg(long, default_value_t = 0.9)]
    pub momentum: f64,
    /// Trailing steps averaged into the reported estimate.
    #[arg(long, default_value_t = 50)]
    pub window: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run only checks whose name contains this substring.
    #[arg(long)]
    pub filter: Option<String>,
    /// Inject a deliberate fault (supported: catalog) to prove the suite
    /// detects it.
    #[arg(long)]
    pub perturb: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    /// Show a single entry instead of all nine.
    #[arg(long = "f")]
    pub f: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Parses argv and runs; returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

/// Dispatches a parsed command; `Ok` carries the exit code for runs that
/// completed far enough to write a report.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Divergence(args) => run_divergence(args),
        Command::Bound(args) => run_bound(args),
        Command::Estimate(args) => run_estimate(args),
        Command::Train(args) => run_train(args),
        Command::Verify(args) => run_verify(args),
        Command::Catalog(args) => run_catalog(args),
    }
}

/// Maps an error to the exit-code contract: numerical failures (quadrature,
/// non-finite bound terms, diverging optimization) are 3, everything else is
/// a usage/validation failure.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Integration(_) | Error::Evaluation { .. } | Error::Diverged { .. } => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

// ---------------------------------------------------------------------------
// JSON rendering: pretty, with every f64 at 17 significant digits.

/// Pretty JSON formatter printing every float as `{:.16e}` (17 significant
/// digits), which round-trips any finite f64 and is locale-independent.
struct Pretty17 {
    depth: usize,
    has_value: bool,
}

impl Pretty17 {
    fn new() -> Pretty17 {
        Pretty17 {
            depth: 0,
            has_value: false,
        }
    }
}

fn put_indent<W: ?Sized + std::io::Write>(w: &mut W, depth: usize) -> std::io::Result<()> {
    for _ in 0..depth {
        w.write_all(b"  ")?;
    }
    Ok(())
}

impl serde_json::ser::Formatter for Pretty17 {
    fn write_f64<W: ?Sized + std::io::Write>(
        &mut self,
        writer: &mut W,
        value: f64,
    ) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + std::io::Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.depth += 1;
        self.has_value = false;
        writer.write_all(b"[")
    }

    fn end_array<W: ?Sized + std::io::Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.depth -= 1;
        if self.has_value {
            writer.write_all(b"\n")?;
            put_indent(writer, self.depth)?;
        }
        writer.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + std::io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        if !first {
            writer.write_all(b",")?;
        }
        writer.write_all(b"\n")?;
        put_indent(writer, self.depth)
    }

    fn end_array_value<W: ?Sized + std::io::Write>(
        &mut self,
        _writer: &mut W,
    ) -> std::io::Result<()> {
        self.has_value = true;
        Ok(())
    }

    fn begin_object<W: ?Sized + std::io::Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.depth += 1;
        self.has_value = false;
        writer.write_all(b"{")
    }

    fn end_object<W: ?Sized + std::io::Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.depth -= 1;
        if self.has_value {
            writer.write_all(b"\n")?;
            put_indent(writer, self.depth)?;
        }
        writer.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + std::io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        if !first {
            writer.write_all(b",")?;
        }
        writer.write_all(b"\n")?;
        put_indent(writer, self.depth)
    }

    fn begin_object_value<W: ?Sized + std::io::Write>(
        &mut self,
        writer: &mut W,
    ) -> std::io::Result<()> {
        writer.write_all(b": ")
    }

    fn end_object_value<W: ?Sized + std::io::Write>(
        &mut self,
        _writer: &mut W,
    ) -> std::io::Result<()> {
        self.has_value = true;
        Ok(())
    }
}

/// Serializes to pretty JSON with 17-significant-digit floats and a trailing
/// newline.
pub fn to_json_17<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Pretty17::new());
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serializer emits UTF-8"))
}

// ---------------------------------------------------------------------------
// Seed resolution and artifact emission.

fn seed_from_env_text(text: Option<&str>) -> Result<Option<u64>> {
    match text {
        None => Ok(None),
        Some(raw) => raw
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| Error::Config(format!("{SEED_ENV} must be an unsigned integer, got {raw:?}"))),
    }
}

/// `--seed` wins, then $FDIV_SEED; `None` means the caller's default applies.
fn seed_override(flag: Option<u64>) -> Result<Option<u64>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => seed_from_env_text(Some(&text)),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(std::env::VarError::NotUnicode(_)) => Err(Error::Config(format!(
            "{SEED_ENV} is not valid unicode"
        ))),
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    Ok(seed_override(flag)?.unwrap_or(0))
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    /// Fully resolved configuration (defaults applied).
    config: serde_json::Value,
    seed: u64,
    package: &'a str,
    version: &'a str,
    report_format: u32,
    created_unix_seconds: u64,
    duration_seconds: f64,
}

/// Writes report.json, manifest.json, and optionally trace.csv into `out`.
/// The report bytes depend only on argv + seed; timestamps live here in the
/// manifest alone.
fn emit_artifacts(
    out: Option<&Path>,
    command: &str,
    config: serde_json::Value,
    seed: u64,
    started: Instant,
    report_json: &str,
    trace_csv: Option<&[u8]>,
) -> Result<()> {
    let Some(dir) = out else {
        return Ok(());
    };
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), report_json)?;
    if let Some(csv) = trace_csv {
        std::fs::write(dir.join("trace.csv"), csv)?;
    }
    let created = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let manifest = Manifest {
        command,
        config,
        seed,
        package: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        report_format: REPORT_FORMAT,
        created_unix_seconds: created,
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    std::fs::write(dir.join("manifest.json"), to_json_17(&manifest)?)?;
    println!("wrote {}", dir.join("report.json").display());
    Ok(())
}

/// Buckets a computed value into (report status, exit code).
fn classify(value: f64) -> (&'static str, i32) {
    if value.is_nan() {
        ("numerical-failure", EXIT_NUMERICAL)
    } else if value.is_infinite() {
        ("divergent", EXIT_DIVERGENT)
    } else {
        ("ok", EXIT_OK)
    }
}

fn display_value(value: f64) -> String {
    if value.is_finite() {
        format!("{value}")
    } else {
        format!("{value} ({})", classify(value).0)
    }
}

fn out_for_manifest(out: &Option<PathBuf>) -> Option<String> {
    out.as_ref().map(|p| p.display().to_string())
}

// ---------------------------------------------------------------------------
// Subcommands.

/// Report for `divergence` and `bound`.
#[derive(Serialize)]
struct ValueReport<'a> {
    command: &'a str,
    f: &'a str,
    p: &'a DistributionDescriptor,
    q: &'a DistributionDescriptor,
    #[serde(skip_serializing_if = "Option::is_none")]
    critic: Option<&'a str>,
    status: &'a str,
    /// Absent when the result is not finite (see `status`).
    value: Option<f64>,
}

fn run_divergence(args: DivergenceArgs) -> Result<i32> {
    let started = Instant::now();
    let seed = resolve_seed(args.common.seed)?;
    let spec = catalog::builtin_by_name(&args.f)?;
    let p_desc = DistributionDescriptor::parse(&args.p)?;
    let q_desc = DistributionDescriptor::parse(&args.q)?;
    let p = p_desc.build()?;
    let q = q_desc.build()?;
    let value = exact::divergence(&spec, &p, &q)?;
    let (status, code) = classify(value);
    let report = ValueReport {
        command: "divergence",
        f: spec.name(),
        p: &p_desc,
        q: &q_desc,
        critic: None,
        status,
        value: value.is_finite().then_some(value),
    };
    println!("{} = {}", spec.name(), display_value(value));
    let config = json!({
        "f": spec.name(),
        "p": p_desc,
        "q": q_desc,
        "out": out_for_manifest(&args.common.out),
    });
    emit_artifacts(
        args.common.out.as_deref(),
        "divergence",
        config,
        seed,
        started,
        &to_json_17(&report)?,
        None,
    )?;
    Ok(code)
}

/// On-disk critic: a build recipe plus optional trained parameters.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CriticFile {
    config: CriticConfig,
    #[serde(default)]
    params: Option<Vec<f64>>,
}

/// Resolves a `--critic` source string into an evaluable critic function.
fn parse_critic_source(
    source: &str,
    p: &Distribution,
    q: &Distribution,
    seed: u64,
) -> Result<CriticFunction> {
    if source == "optimal" {
        return exact::optimal_critic(p, q);
    }
    if source == "zero" {
        return Ok(CriticFunction::Constant(0.0));
    }
    if let Some(text) = source.strip_prefix("const:") {
        let c: f64 = text
            .parse()
            .map_err(|_| Error::Config(format!("bad constant critic value {text:?}")))?;
        if !c.is_finite() {
            return Err(Error::Config(format!(
                "constant critic value must be finite, got {c}"
            )));
        }
        return Ok(CriticFunction::Constant(c));
    }
    if let Some(path) = source.strip_prefix("file:") {
        let text = std::fs::read_to_string(path)?;
        let file: CriticFile = serde_json::from_str(&text)?;
        let mut critic = file.config.build(&mut rng::substream(seed, rng::STREAM_INIT))?;
        if let Some(params) = file.params {
            if params.len() != critic.n_params() {
                return Err(Error::Config(format!(
                    "critic takes {} parameters, file has {}",
                    critic.n_params(),
                    params.len()
                )));
            }
            critic.params_mut().copy_from_slice(&params);
        }
        return Ok(critic.as_function()?);
    }
    Err(Error::Config(format!(
        "unknown critic source {source:?}; expected optimal | zero | const:<value> | file:<path>"
    )))
}

fn run_bound(args: BoundArgs) -> Result<i32> {
    let started = Instant::now();
    let seed = resolve_seed(args.common.seed)?;
    let spec = catalog::builtin_by_name(&args.f)?;
    let p_desc = DistributionDescriptor::parse(&args.p)?;
    let q_desc = DistributionDescriptor::parse(&args.q)?;
    let p = p_desc.build()?;
    let q = q_desc.build()?;
    let critic = parse_critic_source(&args.critic, &p, &q, seed)?;
    let value = exact::bound_value(&spec, &p, &q, &critic)?;
    let (status, code) = classify(value);
    let report = ValueReport {
        command: "bound",
        f: spec.name(),
        p: &p_desc,
        q: &q_desc,
        critic: Some(&args.critic),
        status,
        value: value.is_finite().then_some(value),
    };
    println!(
        "{} bound [{}] = {}",
        spec.name(),
        args.critic,
        display_value(value)
    );
    let config = json!({
        "f": spec.name(),
        "p": p_desc,
        "q": q_desc,
        "critic": args.critic,
        "out": out_for_manifest(&args.common.out),
    });
    emit_artifacts(
        args.common.out.as_deref(),
        "bound",
        config,
        seed,
        started,
        &to_json_17(&report)?,
        None,
    )?;
    Ok(code)
}

fn target_config(
    inline: Option<&str>,
    file: Option<&Path>,
    side: &str,
) -> Result<TargetConfig> {
    match (inline, file) {
        (Some(j), None) => Ok(TargetConfig::Distribution {
            distribution: DistributionDescriptor::parse(j)?,
        }),
        (None, Some(path)) => Ok(TargetConfig::SampleFile {
            path: path.display().to_string(),
        }),
        _ => Err(Error::Config(format!(
            "exactly one of --{side} / --{side}-samples is required"
        ))),
    }
}

/// A critic shape matching what the sources emit: tabular over a discrete
/// support, otherwise an MLP of the right input width.
fn default_critic_config(target: &Target) -> Result<CriticConfig> {
    let mlp = |input_dim| CriticConfig::Mlp {
        input_dim,
        hidden: vec![32, 32],
    };
    match target {
        Target::Dist(Distribution::Discrete(d)) => Ok(CriticConfig::Tabular { size: d.len() }),
        Target::Dist(Distribution::Gmm1d(_)) => Ok(mlp(1)),
        Target::Data(rows) => match rows.first() {
            Some(Obs::Point1(_)) => Ok(mlp(1)),
            Some(Obs::Point2(_)) => Ok(mlp(2)),
            Some(Obs::Index(_)) => Err(Error::Config(
                "sample files carry continuous records; discrete data needs an explicit critic"
                    .into(),
            )),
            None => Err(Error::Config("empty sample dataset".into())),
        },
    }
}

fn run_estimate(args: EstimateArgs) -> Result<i32> {
    let started = Instant::now();
    let seed = resolve_seed(args.common.seed)?;
    let spec = catalog::builtin_by_name(&args.f)?;
    let p_cfg = target_config(args.p.as_deref(), args.p_samples.as_deref(), "p")?;
    let q_cfg = target_config(args.q.as_deref(), args.q_samples.as_deref(), "q")?;
    let p = p_cfg.build()?;
    let q = q_cfg.build()?;
    let critic_cfg = match &args.critic {
        Some(text) => serde_json::from_str::<CriticConfig>(text)?,
        None => default_critic_config(&q)?,
    };
    let train_cfg = CriticTrainConfig {
        steps: args.steps,
        batch_size: args.batch_size,
        learning_rate: args.learning_rate,
        optimizer: args.optimizer.parse()?,
        momentum: args.momentum,
        window: args.window,
        seed,
    };
    let mut critic = critic_cfg.build(&mut rng::substream(seed, rng::STREAM_INIT))?;
    let report = estimator::train_critic(&spec, &p, &q, &mut critic, &train_cfg)?;
    let mut csv = Vec::new();
    estimator::write_trace_csv(&report.trace, &mut csv)?;
    println!(
        "{} estimate = {} (standard error {}, {} critic, {} steps)",
        spec.name(),
        report.estimate,
        report.standard_error,
        report.critic_kind,
        report.steps
    );
    let config = json!({
        "f": spec.name(),
        "p": p_cfg,
        "q": q_cfg,
        "critic": critic_cfg,
        "train": train_cfg,
        "out": out_for_manifest(&args.common.out),
    });
    emit_artifacts(
        args.common.out.as_deref(),
        "estimate",
        config,
        seed,
        started,
        &to_json_17(&report)?,
        Some(&csv),
    )?;
    Ok(EXIT_OK)
}

fn run_train(args: TrainArgs) -> Result<i32> {
    let started = Instant::now();
    let text = std::fs::read_to_string(&args.config)?;
    let mut cfg = TrainConfig::parse(&text)?;
    if let Some(seed) = seed_override(args.common.seed)? {
        cfg.seed = seed;
    }
    let target = cfg.target.build()?;
    let run = trainer::adversarial_train(&target, &cfg)?;
    let mut csv = Vec::new();
    trainer::write_train_trace_csv(&run, &mut csv)?;
    let code = match &run.aborted {
        Some(abort) => {
            println!(
                "training aborted at step {}: {}",
                abort.step, abort.reason
            );
            EXIT_DIVERGENT
        }
        None => {
            let params = run
                .final_generator_params
                .iter()
                .map(|v| format!("{v}"))
                .collect::<Vec<_>>()
                .join(", ");
            println!(
                "trained {} / {} for {} steps; generator params [{params}]",
                run.f,
                run.h,
                run.records.len()
            );
            EXIT_OK
        }
    };
    let config = json!({
        "config_path": args.config.display().to_string(),
        "resolved": cfg,
        "out": out_for_manifest(&args.common.out),
    });
    emit_artifacts(
        args.common.out.as_deref(),
        "train",
        config,
        cfg.seed,
        started,
        &to_json_17(&run)?,
        Some(&csv),
    )?;
    Ok(code)
}

fn run_verify(args: VerifyArgs) -> Result<i32> {
    let started = Instant::now();
    let seed = resolve_seed(args.common.seed)?;
    let fault = match args.perturb.as_deref() {
        None => Fault::None,
        Some(text) => text.parse::<Fault>()?,
    };
    let report = verify::run_suite(args.filter.as_deref(), fault, seed);
    for check in &report.checks {
        if check.pass {
            println!("PASS {} (gap {:.3e})", check.name, check.gap);
        } else {
            println!("FAIL {} (gap {:.3e}): {}", check.name, check.gap, check.detail);
        }
    }
    println!("verify: {} passed, {} failed", report.passed, report.failed);
    let config = json!({
        "filter": args.filter,
        "perturb": args.perturb,
        "out": out_for_manifest(&args.common.out),
    });
    emit_artifacts(
        args.common.out.as_deref(),
        "verify",
        config,
        seed,
        started,
        &to_json_17(&report)?,
        None,
    )?;
    Ok(if report.all_pass { EXIT_OK } else { EXIT_USAGE })
}

#[derive(Serialize)]
struct CatalogEntry {
    name: String,
    /// Boundary growth orders (left as u→0, right as u→∞).
    tail_weights: (f64, f64),
    curvature_at_one: f64,
    f_at_half: f64,
    f_at_two: f64,
}

#[derive(Serialize)]
struct CatalogReport {
    command: &'static str,
    entries: Vec<CatalogEntry>,
}

fn run_catalog(args: CatalogArgs) -> Result<i32> {
    let started = Instant::now();
    let seed = resolve_seed(args.common.seed)?;
    let specs: Vec<DivergenceSpec> = match &args.f {
        Some(name) => vec![catalog::builtin_by_name(name)?],
        None => catalog::all_builtins(),
    };
    let entries: Vec<CatalogEntry> = specs
        .iter()
        .map(|s| CatalogEntry {
            name: s.name().to_string(),
            tail_weights: s.tail_weights(),
            curvature_at_one: s.curvature_at_one(),
            f_at_half: s.f(0.5),
            f_at_two: s.f(2.0),
        })
        .collect();
    for e in &entries {
        println!(
            "{:<22} tails ({}, {})  f(1/2) = {:.6}  f(2) = {:.6}",
            e.name, e.tail_weights.0, e.tail_weights.1, e.f_at_half, e.f_at_two
        );
    }
    let report = CatalogReport {
        command: "catalog",
        entries,
    };
    let config = json!({
        "f": args.f,
        "out": out_for_manifest(&args.common.out),
    });
    emit_artifacts(
        args.common.out.as_deref(),
        "catalog",
        config,
        seed,
        started,
        &to_json_17(&report)?,
        None,
    )?;
    Ok(EXIT_OK)
}
