//! Sample-based bound evaluation and critic training.
//!
//! `mc_bound` is the Monte Carlo counterpart of the exact bound: mean of
//! `a(d)` over p-samples minus mean of `b(d)` over q-samples. It is unbiased
//! for the true bound and never exceeds the divergence except by sampling
//! noise, so maximizing it over critic parameters estimates the divergence
//! from samples alone.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::DivergenceSpec;
use crate::critic::{samples_to_obs, Critic, Obs};
use crate::dist::{Distribution, DistributionDescriptor};
use crate::error::{Error, Result};
use crate::opt::{Optimizer, OptimizerKind};
use crate::rng;

/// Where samples come from: a known distribution or a fixed dataset.
#[derive(Debug, Clone)]
pub enum Target {
    Dist(Distribution),
    /// Fixed dataset; batches are drawn with replacement.
    Data(Vec<Obs>),
}

impl Target {
    pub fn draw(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Obs>> {
        match self {
            Target::Dist(d) => Ok(samples_to_obs(&d.sample(n, rng)?)),
            Target::Data(data) => {
                if data.is_empty() {
                    return Err(Error::Config("empty sample dataset".into()));
                }
                Ok((0..n)
                    .map(|_| data[rand::Rng::gen_range(rng, 0..data.len())])
                    .collect())
            }
        }
    }

    /// Checks that a critic can read this source's observations.
    pub fn check_critic(&self, critic: &Critic) -> Result<()> {
        match self {
            Target::Dist(d) => critic.check_compatible(d),
            Target::Data(data) => {
                let first = data
                    .first()
                    .copied()
                    .ok_or_else(|| Error::Config("empty sample dataset".into()))?;
                critic.check_reads(first)
            }
        }
    }
}

/// Serializable sample-source recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetConfig {
    Distribution { distribution: DistributionDescriptor },
    SampleFile { path: String },
}

impl TargetConfig {
    pub fn build(&self) -> Result<Target> {
        match self {
            TargetConfig::Distribution { distribution } => {
                Ok(Target::Dist(distribution.build()?))
            }
            TargetConfig::SampleFile { path } => Ok(Target::Data(read_sample_file(
                std::path::Path::new(path),
            )?)),
        }
    }
}

/// Controls for `train_critic`.
#[derive(Debug, Clone, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticTrainConfig {
    pub steps: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    #[serde(default)]
    pub optimizer: OptimizerKind,
    #[serde(default = "default_momentum")]
    pub momentum: f64,
    /// Trailing window averaged into the reported estimate.
    #[serde(default = "default_window")]
    pub window: usize,
    pub seed: u64,
}

fn default_momentum() -> f64 {
    0.9
}

fn default_window() -> usize {
    50
}

impl CriticTrainConfig {
    fn validate(&self) -> Result<()> {
        if self.steps == 0 || self.batch_size == 0 || self.window == 0 {
            return Err(Error::Config(
                "steps, batch_size, and window must be positive".into(),
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        Ok(())
    }
}

/// One optimization step in the training trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub step: usize,
    pub e_f: f64,
    pub grad_norm: f64,
}

/// Outcome of `train_critic`.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub divergence: String,
    pub critic_kind: String,
    /// Mean of `e_f` over the trailing window.
    pub estimate: f64,
    /// Spread of that window mean (treating rows as independent).
    pub standard_error: f64,
    pub critic_params: Vec<f64>,
    pub steps: usize,
    pub batch_size: usize,
    pub samples_per_side: usize,
    pub seed: u64,
    pub trace: Vec<TraceRow>,
}

/// Writes the trace as CSV (`step,e_f,grad_norm`).
pub fn write_trace_csv(trace: &[TraceRow], out: &mut impl std::io::Write) -> Result<()> {
    writeln!(out, "step,e_f,grad_norm")?;
    for row in trace {
        writeln!(out, "{},{:.17e},{:.17e}", row.step, row.e_f, row.grad_norm)?;
    }
    Ok(())
}

fn check_batches(batch_p: &[Obs], batch_q: &[Obs]) -> Result<()> {
    if batch_p.is_empty() || batch_q.is_empty() {
        return Err(Error::Config("sample batches must be nonempty".into()));
    }
    Ok(())
}

/// Monte Carlo bound: `mean_p a(d) − mean_q b(d)`.
pub fn mc_bound(
    spec: &DivergenceSpec,
    batch_p: &[Obs],
    batch_q: &[Obs],
    critic: &Critic,
) -> Result<f64> {
    mc_bound_stats(spec, batch_p, batch_q, critic).map(|(value, _)| value)
}

/// Monte Carlo bound plus its standard error
/// `√(var_p(a)/n_p + var_q(b)/n_q)`.
pub fn mc_bound_stats(
    spec: &DivergenceSpec,
    batch_p: &[Obs],
    batch_q: &[Obs],
    critic: &Critic,
) -> Result<(f64, f64)> {
    check_batches(batch_p, batch_q)?;
    let mut mean_a = 0.0;
    let mut sq_a = 0.0;
    for (k, &x) in batch_p.iter().enumerate() {
        let d = critic.eval(x);
        let a = spec.a(d);
        if !a.is_finite() {
            return Err(Error::Evaluation { d });
        }
        // Streaming mean/variance keeps one pass per batch.
        let delta = a - mean_a;
        mean_a += delta / (k + 1) as f64;
        sq_a += delta * (a - mean_a);
    }
    let mut mean_b = 0.0;
    let mut sq_b = 0.0;
    for (k, &y) in batch_q.iter().enumerate() {
        let d = critic.eval(y);
        let b = spec.b(d);
        if !b.is_finite() {
            return Err(Error::Evaluation { d });
        }
        let delta = b - mean_b;
        mean_b += delta / (k + 1) as f64;
        sq_b += delta * (b - mean_b);
    }
    let var = |sq: f64, n: usize| if n > 1 { sq / (n - 1) as f64 } else { 0.0 };
    let se = (var(sq_a, batch_p.len()) / batch_p.len() as f64
        + var(sq_b, batch_q.len()) / batch_q.len() as f64)
        .sqrt();
    Ok((mean_a - mean_b, se))
}

/// Ascent gradient of `mc_bound` in the critic parameters:
/// `mean_p a1(d)·∇_ν d − mean_q b1(d)·∇_ν d`.
pub fn critic_param_gradient(
    spec: &DivergenceSpec,
    batch_p: &[Obs],
    batch_q: &[Obs],
    critic: &Critic,
) -> Result<Vec<f64>> {
    critic_param_gradient_stats(spec, batch_p, batch_q, critic).map(|(g, _)| g)
}

/// Ascent gradient plus per-component standard errors of the Monte Carlo
/// estimate (p-side and q-side variances combined).
pub fn critic_param_gradient_stats(
    spec: &DivergenceSpec,
    batch_p: &[Obs],
    batch_q: &[Obs],
    critic: &Critic,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_batches(batch_p, batch_q)?;
    let n = critic.n_params();
    let mut buf = vec![0.0; n];
    let mut mean = vec![0.0; n];
    let mut sq = vec![0.0; n];
    let mut accumulate = |scaled: &mut dyn FnMut(&Critic, Obs, &mut [f64]) -> Result<f64>,
                          batch: &[Obs],
                          mean: &mut [f64],
                          sq: &mut [f64]|
     -> Result<()> {
        for (k, &x) in batch.iter().enumerate() {
            let w = scaled(critic, x, &mut buf)?;
            for i in 0..n {
                let v = w * buf[i];
                let delta = v - mean[i];
                mean[i] += delta / (k + 1) as f64;
                sq[i] += delta * (v - mean[i]);
            }
        }
        Ok(())
    };

    accumulate(
        &mut |c, x, buf| {
            let d = c.param_grad(x, buf);
            let a1 = spec.a1(d);
            if !a1.is_finite() {
                return Err(Error::Evaluation { d });
            }
            Ok(a1)
        },
        batch_p,
        &mut mean,
        &mut sq,
    )?;
    let mean_p = mean.clone();
    let var_p: Vec<f64> = sq
        .iter()
        .map(|s| {
            if batch_p.len() > 1 {
                s / (batch_p.len() - 1) as f64
            } else {
                0.0
            }
        })
        .collect();

    mean.fill(0.0);
    sq.fill(0.0);
    accumulate(
        &mut |c, x, buf| {
            let d = c.param_grad(x, buf);
            let b1 = spec.b1(d);
            if !b1.is_finite() {
                return Err(Error::Evaluation { d });
            }
            Ok(b1)
        },
        batch_q,
        &mut mean,
        &mut sq,
    )?;

    let grad: Vec<f64> = mean_p.iter().zip(&mean).map(|(p, q)| p - q).collect();
    let se: Vec<f64> = var_p
        .iter()
        .zip(&sq)
        .map(|(vp, sqq)| {
            let vq = if batch_q.len() > 1 {
                sqq / (batch_q.len() - 1) as f64
            } else {
                0.0
            };
            (vp / batch_p.len() as f64 + vq / batch_q.len() as f64).sqrt()
        })
        .collect();
    Ok((grad, se))
}

/// Maximizes `mc_bound` over the critic parameters with fresh batches each
/// step; the reported estimate averages `e_f` over the trailing window.
pub fn train_critic(
    spec: &DivergenceSpec,
    p: &Target,
    q: &Target,
    critic: &mut Critic,
    cfg: &CriticTrainConfig,
) -> Result<EstimateReport> {
    cfg.validate()?;
    p.check_critic(critic)?;
    q.check_critic(critic)?;

    let mut rng_p = rng::substream(cfg.seed, rng::STREAM_P);
    let mut rng_q = rng::substream(cfg.seed, rng::STREAM_Q);
    let mut opt =
        Optimizer::new(cfg.optimizer, cfg.learning_rate).with_momentum(cfg.momentum);
    let mut trace = Vec::with_capacity(cfg.steps);
    let mut descent = vec![0.0; critic.n_params()];

    for step in 0..cfg.steps {
        let batch_p = p.draw(cfg.batch_size, &mut rng_p)?;
        let batch_q = q.draw(cfg.batch_size, &mut rng_q)?;
        let e_f = mc_bound(spec, &batch_p, &batch_q, critic)?;
        let grad = critic_param_gradient(spec, &batch_p, &batch_q, critic)?;
        let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        trace.push(TraceRow {
            step,
            e_f,
            grad_norm,
        });
        for (d, g) in descent.iter_mut().zip(&grad) {
            *d = -g;
        }
        opt.step(critic.params_mut(), &descent);
        if critic.params().iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged {
                step,
                detail: "critic parameters became non-finite".into(),
            });
        }
    }

    let window = cfg.window.min(trace.len());
    let tail = &trace[trace.len() - window..];
    let estimate = tail.iter().map(|r| r.e_f).sum::<f64>() / window as f64;
    let var = if window > 1 {
        tail.iter()
            .map(|r| (r.e_f - estimate).powi(2))
            .sum::<f64>()
            / (window - 1) as f64
    } else {
        0.0
    };

    Ok(EstimateReport {
        divergence: spec.name().to_string(),
        critic_kind: critic.kind_name().to_string(),
        estimate,
        standard_error: (var / window as f64).sqrt(),
        critic_params: critic.params().to_vec(),
        steps: cfg.steps,
        batch_size: cfg.batch_size,
        samples_per_side: cfg.steps * cfg.batch_size,
        seed: cfg.seed,
        trace,
    })
}

/// Parses a raw sample file: one record per line, 1 or 2 whitespace-separated
/// coordinates, `#` comments and blank lines ignored.
pub fn read_sample_file(path: &std::path::Path) -> Result<Vec<Obs>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    let mut width = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<f64> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| {
                    Error::Config(format!(
                        "{}:{}: not a number: {tok:?}",
                        path.display(),
                        lineno + 1
                    ))
                })
            })
            .collect::<Result<_>>()?;
        let obs = match fields.as_slice() {
            [x] => Obs::Point1(*x),
            [x, y] => Obs::Point2([*x, *y]),
            other => {
                return Err(Error::Config(format!(
                    "{}:{}: expected 1 or 2 coordinates, got {}",
                    path.display(),
                    lineno + 1,
                    other.len()
                )))
            }
        };
        match width {
            None => width = Some(fields.len()),
            Some(w) if w != fields.len() => {
                return Err(Error::Config(format!(
                    "{}:{}: mixed record widths ({w} then {})",
                    path.display(),
                    lineno + 1,
                    fields.len()
                )))
            }
            _ => {}
        }
        out.push(obs);
    }
    if out.is_empty() {
        return Err(Error::Config(format!(
            "{}: no samples found",
            path.display()
        )));
    }
    Ok(out)
}
