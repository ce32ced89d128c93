//! Adversarial bound minimization: generator vs critic.
//!
//! The generator `g_λ` pushes latent noise through a parameterized map; the
//! critic ascends the sample bound while the generator descends it. Generator
//! gradients are pathwise (reparameterized) whenever the family admits
//! `x = g_λ(z)`; the discrete softmax family falls back to a score-function
//! estimator. A hybrid mode lets the critic ascend a different divergence
//! than the generator descends.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as RandDistr, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::catalog::{builtin_by_name, DivergenceSpec};
use crate::critic::{samples_to_obs, Critic, CriticConfig, Obs};
use crate::dist::{Distribution, ParametricFamily, SupportPoint};
use crate::error::{Error, Result};
use crate::estimator::{self, Target, TargetConfig};
use crate::opt::{Optimizer, OptimizerKind};
use crate::rng;

/// Numerically stable `ln(1 + e^r)`.
fn softplus(r: f64) -> f64 {
    r.max(0.0) + (-r.abs()).exp().ln_1p()
}

/// Core map of a generator, before optional output noise.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorCore {
    /// A 1-D (or discrete softmax) parametric family.
    Family {
        family: ParametricFamily,
        lambda: Vec<f64>,
    },
    /// `x = W z + loc` in two dimensions.
    Affine2d { loc: [f64; 2], w: [[f64; 2]; 2] },
}

/// Sample kind a generator produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    Discrete(usize),
    Continuous1d,
    Continuous2d,
}

/// A trainable sampler with flat parameter access.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    core: GeneratorCore,
    /// Unconstrained preimage of the output-noise stddev
    /// (`η = softplus(raw)`), when noise injection is enabled.
    noise_raw: Option<f64>,
}

impl Generator {
    pub fn family(family: ParametricFamily, lambda: Vec<f64>) -> Result<Generator> {
        family.check_dim(&lambda)?;
        Ok(Generator {
            core: GeneratorCore::Family { family, lambda },
            noise_raw: None,
        })
    }

    pub fn affine2d(loc: [f64; 2], w: [[f64; 2]; 2]) -> Generator {
        Generator {
            core: GeneratorCore::Affine2d { loc, w },
            noise_raw: None,
        }
    }

    /// Enables learned output noise `x ← x + softplus(raw)·ζ`, ζ standard
    /// normal. Only meaningful for continuous outputs.
    pub fn with_output_noise(mut self, raw: f64) -> Result<Generator> {
        if matches!(self.output_kind(), OutputKind::Discrete(_)) {
            return Err(Error::Config(
                "output noise requires a continuous generator".into(),
            ));
        }
        self.noise_raw = Some(raw);
        Ok(self)
    }

    pub fn output_kind(&self) -> OutputKind {
        match &self.core {
            GeneratorCore::Family { family, .. } => match family {
                ParametricFamily::SoftmaxDiscrete { support } => OutputKind::Discrete(*support),
                _ => OutputKind::Continuous1d,
            },
            GeneratorCore::Affine2d { .. } => OutputKind::Continuous2d,
        }
    }

    /// Current output-noise stddev, if enabled.
    pub fn noise_stddev(&self) -> Option<f64> {
        self.noise_raw.map(softplus)
    }

    pub fn n_params(&self) -> usize {
        let core = match &self.core {
            GeneratorCore::Family { lambda, .. } => lambda.len(),
            GeneratorCore::Affine2d { .. } => 6,
        };
        core + usize::from(self.noise_raw.is_some())
    }

    pub fn params(&self) -> Vec<f64> {
        let mut p = match &self.core {
            GeneratorCore::Family { lambda, .. } => lambda.clone(),
            GeneratorCore::Affine2d { loc, w } => {
                vec![loc[0], loc[1], w[0][0], w[0][1], w[1][0], w[1][1]]
            }
        };
        if let Some(r) = self.noise_raw {
            p.push(r);
        }
        p
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::Config(format!(
                "generator takes {} parameters, got {}",
                self.n_params(),
                params.len()
            )));
        }
        let (core, noise) = params.split_at(params.len() - usize::from(self.noise_raw.is_some()));
        match &mut self.core {
            GeneratorCore::Family { lambda, .. } => lambda.copy_from_slice(core),
            GeneratorCore::Affine2d { loc, w } => {
                loc.copy_from_slice(&core[..2]);
                w[0] = [core[2], core[3]];
                w[1] = [core[4], core[5]];
            }
        }
        if let Some(r) = noise.first() {
            self.noise_raw = Some(*r);
        }
        Ok(())
    }

    /// Latent dimension for reparameterized sampling; `None` when the
    /// generator cannot be written as `x = g_λ(z)`.
    pub fn latent_dim(&self) -> Option<usize> {
        let base = match &self.core {
            GeneratorCore::Family { family, .. } => match family {
                ParametricFamily::SoftmaxDiscrete { .. } => return None,
                _ => 1,
            },
            GeneratorCore::Affine2d { .. } => 2,
        };
        Some(base + if self.noise_raw.is_some() { base } else { 0 })
    }

    /// Pushes one latent vector through the map, returning the output point
    /// and the Jacobian `∂x_k/∂θ_j` (rows = output dims, cols = params).
    pub fn push(&self, z: &[f64]) -> Result<(Obs, Vec<Vec<f64>>)> {
        let ld = self.latent_dim().ok_or_else(|| {
            Error::UnsupportedGenerator("family has no reparameterized form".into())
        })?;
        if z.len() != ld {
            return Err(Error::Config(format!(
                "latent dimension {} expected, got {}",
                ld,
                z.len()
            )));
        }
        match &self.core {
            GeneratorCore::Family { family, lambda } => {
                let (mut x, mut jac) = family
                    .reparameterize(lambda, z[0])
                    .expect("non-reparameterizable handled above");
                if let Some(r) = self.noise_raw {
                    let zeta = z[1];
                    x += softplus(r) * zeta;
                    // ∂x/∂raw = softplus'(raw)·ζ = sigmoid(raw)·ζ.
                    jac.push(crate::catalog::sigmoid(r) * zeta);
                }
                Ok((Obs::Point1(x), vec![jac]))
            }
            GeneratorCore::Affine2d { loc, w } => {
                let mut x = [
                    loc[0] + w[0][0] * z[0] + w[0][1] * z[1],
                    loc[1] + w[1][0] * z[0] + w[1][1] * z[1],
                ];
                // Params: [loc0, loc1, w00, w01, w10, w11, (raw)].
                let mut j0 = vec![1.0, 0.0, z[0], z[1], 0.0, 0.0];
                let mut j1 = vec![0.0, 1.0, 0.0, 0.0, z[0], z[1]];
                if let Some(r) = self.noise_raw {
                    let (z2, z3) = (z[2], z[3]);
                    let eta = softplus(r);
                    x[0] += eta * z2;
                    x[1] += eta * z3;
                    let s = crate::catalog::sigmoid(r);
                    j0.push(s * z2);
                    j1.push(s * z3);
                }
                Ok((Obs::Point2(x), vec![j0, j1]))
            }
        }
    }

    /// Draws a flat latent batch (standard normal), `n · latent_dim` values.
    pub fn draw_latents(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        let ld = self.latent_dim().ok_or_else(|| {
            Error::UnsupportedGenerator("family has no reparameterized form".into())
        })?;
        Ok((0..n * ld).map(|_| StandardNormal.sample(rng)).collect())
    }

    /// Draws `n` output samples.
    pub fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Obs>> {
        match (&self.core, self.latent_dim()) {
            (_, Some(_)) => {
                let z = self.draw_latents(n, rng)?;
                let ld = self.latent_dim().expect("checked");
                z.chunks_exact(ld)
                    .map(|chunk| self.push(chunk).map(|(x, _)| x))
                    .collect()
            }
            (GeneratorCore::Family { family, lambda }, None) => {
                let dist = family.distribution(lambda)?;
                Ok(samples_to_obs(&dist.sample(n, rng)?))
            }
            _ => unreachable!("affine generators always reparameterize"),
        }
    }

    /// Model density at a point. With output noise the density is the
    /// Gaussian convolution (strictly positive everywhere); without noise a
    /// degenerate map has no density and errors.
    pub fn density(&self, at: Obs) -> Result<f64> {
        let eta2 = self.noise_stddev().map_or(0.0, |e| e * e);
        match (&self.core, at) {
            (GeneratorCore::Family { family, lambda }, Obs::Point1(x)) => match family {
                ParametricFamily::GaussianMean { stddev } => {
                    normal_density(x, lambda[0], (stddev * stddev + eta2).sqrt())
                }
                ParametricFamily::GaussianLocScale => {
                    normal_density(x, lambda[0], (lambda[1] * lambda[1] + eta2).sqrt())
                }
                ParametricFamily::SoftmaxDiscrete { .. } => Err(Error::MixedKinds(
                    "discrete generator has no density at a continuous point".into(),
                )),
            },
            (GeneratorCore::Family { family, lambda }, Obs::Index(i)) => {
                match family.distribution(lambda)? {
                    Distribution::Discrete(d) => Ok(d.density(i)),
                    _ => unreachable!("softmax families are discrete"),
                }
            }
            (GeneratorCore::Affine2d { loc, w }, Obs::Point2(xy)) => {
                // Covariance Σ = WWᵀ + η²I.
                let s00 = w[0][0] * w[0][0] + w[0][1] * w[0][1] + eta2;
                let s01 = w[0][0] * w[1][0] + w[0][1] * w[1][1];
                let s11 = w[1][0] * w[1][0] + w[1][1] * w[1][1] + eta2;
                let det = s00 * s11 - s01 * s01;
                if det <= 1e-300 {
                    return Err(Error::DegenerateSupport(
                        "singular pushforward covariance; enable output noise".into(),
                    ));
                }
                let r = [xy[0] - loc[0], xy[1] - loc[1]];
                let quad =
                    (s11 * r[0] * r[0] - 2.0 * s01 * r[0] * r[1] + s00 * r[1] * r[1]) / det;
                Ok((-0.5 * quad).exp() / (2.0 * std::f64::consts::PI * det.sqrt()))
            }
            (_, at) => Err(Error::MixedKinds(format!(
                "generator output kind {:?} cannot score {at:?}",
                self.output_kind()
            ))),
        }
    }
}

fn normal_density(x: f64, mean: f64, sd: f64) -> Result<f64> {
    if !(sd > 0.0) {
        return Err(Error::DegenerateSupport(
            "zero-width generator output; enable output noise".into(),
        ));
    }
    let z = (x - mean) / sd;
    Ok((-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt()))
}

/// Serializable generator recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorConfig {
    GaussianMean { stddev: f64, init: Vec<f64> },
    GaussianLocScale { init: Vec<f64> },
    SoftmaxDiscrete { support: usize, init: Vec<f64> },
    Affine2d { loc: [f64; 2], w: [[f64; 2]; 2] },
}

impl GeneratorConfig {
    pub fn build(&self, output_noise: bool, noise_init: f64) -> Result<Generator> {
        let gen = match self {
            GeneratorConfig::GaussianMean { stddev, init } => Generator::family(
                ParametricFamily::GaussianMean { stddev: *stddev },
                init.clone(),
            )?,
            GeneratorConfig::GaussianLocScale { init } => {
                Generator::family(ParametricFamily::GaussianLocScale, init.clone())?
            }
            GeneratorConfig::SoftmaxDiscrete { support, init } => Generator::family(
                ParametricFamily::SoftmaxDiscrete { support: *support },
                init.clone(),
            )?,
            GeneratorConfig::Affine2d { loc, w } => Generator::affine2d(*loc, *w),
        };
        if output_noise {
            gen.with_output_noise(noise_init)
        } else {
            Ok(gen)
        }
    }
}

/// Update scheduling for the adversarial loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum UpdateMode {
    /// `critic_steps` ascent steps, then one generator step (default).
    #[default]
    Alternating,
    /// One ascent step and one descent step from the same parameter state.
    Simultaneous,
}

/// Full adversarial training configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    /// Divergence the generator descends.
    pub f: String,
    /// Divergence the critic ascends; defaults to `f` (hybrid when set).
    #[serde(default)]
    pub h: Option<String>,
    pub target: TargetConfig,
    pub generator: GeneratorConfig,
    pub critic: CriticConfig,
    #[serde(default = "default_critic_steps")]
    pub critic_steps: usize,
    pub batch_size: usize,
    pub generator_lr: f64,
    pub critic_lr: f64,
    /// Total generator steps.
    pub steps: usize,
    pub seed: u64,
    #[serde(default)]
    pub mode: UpdateMode,
    #[serde(default)]
    pub optimizer: OptimizerKind,
    #[serde(default)]
    pub output_noise: bool,
    /// Unconstrained init for the noise parameter (stddev = softplus of it).
    #[serde(default = "default_noise_init")]
    pub noise_init: f64,
}

fn default_critic_steps() -> usize {
    5
}

fn default_noise_init() -> f64 {
    -2.0
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        builtin_by_name(&self.f)?;
        if let Some(h) = &self.h {
            builtin_by_name(h)?;
        }
        if self.critic_steps == 0 {
            return Err(Error::Config("critic_steps must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be positive".into()));
        }
        for (name, lr) in [
            ("generator_lr", self.generator_lr),
            ("critic_lr", self.critic_lr),
        ] {
            if !(lr > 0.0 && lr.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {lr}")));
            }
        }
        Ok(())
    }

    pub fn spec_f(&self) -> Result<DivergenceSpec> {
        builtin_by_name(&self.f)
    }

    pub fn spec_h(&self) -> Result<DivergenceSpec> {
        builtin_by_name(self.h.as_deref().unwrap_or(&self.f))
    }

    pub fn parse(json: &str) -> Result<TrainConfig> {
        let cfg: TrainConfig = serde_json::from_str(json)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// One generator step in the trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub e_f: f64,
    pub gen_grad_norm: f64,
    pub critic_grad_norm: f64,
    pub lambda: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Abort {
    pub step: usize,
    pub reason: String,
}

/// Trajectory and outcome of an adversarial run.
#[derive(Debug, Clone, Serialize)]
pub struct TrainRun {
    pub f: String,
    pub h: String,
    pub records: Vec<StepRecord>,
    pub final_generator_params: Vec<f64>,
    pub final_critic_params: Vec<f64>,
    pub seed: u64,
    /// Set when a parameter went non-finite or past the abort threshold;
    /// records stop at the failing step.
    pub aborted: Option<Abort>,
    #[serde(skip)]
    pub wall_clock: std::time::Duration,
}

/// Writes the trajectory as CSV
/// (`step,e_f,gen_grad_norm,critic_grad_norm,lambda_0,…`).
pub fn write_train_trace_csv(run: &TrainRun, out: &mut impl std::io::Write) -> Result<()> {
    let dim = run
        .records
        .first()
        .map_or(run.final_generator_params.len(), |r| r.lambda.len());
    write!(out, "step,e_f,gen_grad_norm,critic_grad_norm")?;
    for i in 0..dim {
        write!(out, ",lambda_{i}")?;
    }
    writeln!(out)?;
    for r in &run.records {
        write!(
            out,
            "{},{:.17e},{:.17e},{:.17e}",
            r.step, r.e_f, r.gen_grad_norm, r.critic_grad_norm
        )?;
        for l in &r.lambda {
            write!(out, ",{l:.17e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

const ABORT_THRESHOLD: f64 = 1e8;

fn params_out_of_range(params: &[f64]) -> bool {
    params.iter().any(|p| !p.is_finite() || p.abs() > ABORT_THRESHOLD)
}

/// Pathwise (reparameterized) gradient of the bound in the generator
/// parameters: `∂E_f/∂λ = −mean_z[ b1(d(x))·(∂d/∂x)·(∂g_λ(z)/∂λ) ]`,
/// evaluated on a frozen latent batch. Descending this gradient shrinks the
/// bound, and at the optimal critic it equals the divergence gradient.
pub fn generator_gradient(
    spec: &DivergenceSpec,
    generator: &Generator,
    latents: &[f64],
    critic: &Critic,
) -> Result<Vec<f64>> {
    generator_gradient_stats(spec, generator, latents, critic).map(|(g, _)| g)
}

/// Pathwise gradient plus per-component standard errors.
pub fn generator_gradient_stats(
    spec: &DivergenceSpec,
    generator: &Generator,
    latents: &[f64],
    critic: &Critic,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let ld = generator.latent_dim().ok_or_else(|| {
        Error::UnsupportedGenerator("family has no reparameterized form".into())
    })?;
    if latents.is_empty() || latents.len() % ld != 0 {
        return Err(Error::Config(format!(
            "latent batch length {} is not a positive multiple of {ld}",
            latents.len()
        )));
    }
    let n_params = generator.n_params();
    let mut mean = vec![0.0; n_params];
    let mut sq = vec![0.0; n_params];
    for (k, z) in latents.chunks_exact(ld).enumerate() {
        let (x, jac) = generator.push(z)?;
        let d = critic.eval(x);
        let b1 = spec.b1(d);
        if !b1.is_finite() {
            return Err(Error::Evaluation { d });
        }
        let din = critic.input_grad(x)?;
        for j in 0..n_params {
            let chain: f64 = din
                .iter()
                .zip(&jac)
                .map(|(dk, row)| dk * row[j])
                .sum();
            let v = -b1 * chain;
            let delta = v - mean[j];
            mean[j] += delta / (k + 1) as f64;
            sq[j] += delta * (v - mean[j]);
        }
    }
    let n = (latents.len() / ld) as f64;
    let se = sq
        .iter()
        .map(|s| if n > 1.0 { (s / (n - 1.0) / n).sqrt() } else { 0.0 })
        .collect();
    Ok((mean, se))
}

/// Score-function gradient for non-reparameterizable generators:
/// `∂E_f/∂λ = −mean_{x~q_λ}[ ∇_λ log q_λ(x) · b(d(x)) ]`.
fn score_generator_gradient_stats(
    spec: &DivergenceSpec,
    family: &ParametricFamily,
    lambda: &[f64],
    samples: &[Obs],
    critic: &Critic,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if samples.is_empty() {
        return Err(Error::Config("empty generator sample batch".into()));
    }
    let n_params = lambda.len();
    let mut mean = vec![0.0; n_params];
    let mut sq = vec![0.0; n_params];
    for (k, &x) in samples.iter().enumerate() {
        let at = match x {
            Obs::Index(i) => SupportPoint::Discrete(i),
            Obs::Point1(v) => SupportPoint::Continuous(v),
            Obs::Point2(_) => {
                return Err(Error::UnsupportedGenerator(
                    "score-function path supports 1-D and discrete outputs".into(),
                ))
            }
        };
        let d = critic.eval(x);
        let b = spec.b(d);
        if !b.is_finite() {
            return Err(Error::Evaluation { d });
        }
        let score = family.log_density_grad(lambda, at)?;
        for j in 0..n_params {
            let v = -score[j] * b;
            let delta = v - mean[j];
            mean[j] += delta / (k + 1) as f64;
            sq[j] += delta * (v - mean[j]);
        }
    }
    let n = samples.len() as f64;
    let se = sq
        .iter()
        .map(|s| if n > 1.0 { (s / (n - 1.0) / n).sqrt() } else { 0.0 })
        .collect();
    Ok((mean, se))
}

/// Generator gradient with automatic fallback: pathwise when possible,
/// score-function otherwise.
fn generator_gradient_auto(
    spec: &DivergenceSpec,
    generator: &Generator,
    n: usize,
    rng: &mut ChaCha8Rng,
    critic: &Critic,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if generator.latent_dim().is_some() {
        let latents = generator.draw_latents(n, rng)?;
        return generator_gradient_stats(spec, generator, &latents, critic);
    }
    match &generator.core {
        GeneratorCore::Family { family, lambda } => {
            let samples = generator.sample(n, rng)?;
            score_generator_gradient_stats(spec, family, lambda, &samples, critic)
        }
        GeneratorCore::Affine2d { .. } => unreachable!("affine generators reparameterize"),
    }
}

/// Comparison of the two gradient routes for `λ ↦ D_f(p, q_λ)`.
#[derive(Debug, Clone, Serialize)]
pub struct MatchReport {
    /// Central finite differences of the exact divergence.
    pub finite_difference: Vec<f64>,
    /// The bound-side gradient at the optimal critic.
    pub bound_gradient: Vec<f64>,
    /// Max-norm difference.
    pub gap: f64,
}

/// Checks that the divergence gradient and the bound gradient at the optimal
/// critic agree.
pub fn gradient_matching_check(
    spec: &DivergenceSpec,
    p: &Distribution,
    family: &ParametricFamily,
    lambda: &[f64],
) -> Result<MatchReport> {
    family.check_dim(lambda)?;
    let bound_gradient = crate::exact::exact_generator_gradient(spec, p, family, lambda)?;
    let mut finite_difference = Vec::with_capacity(lambda.len());
    for i in 0..lambda.len() {
        let h = 1e-4 * (1.0 + lambda[i].abs());
        let mut up = lambda.to_vec();
        up[i] += h;
        let mut dn = lambda.to_vec();
        dn[i] -= h;
        let dup = crate::exact::divergence(spec, p, &family.distribution(&up)?)?;
        let ddn = crate::exact::divergence(spec, p, &family.distribution(&dn)?)?;
        finite_difference.push((dup - ddn) / (2.0 * h));
    }
    let gap = finite_difference
        .iter()
        .zip(&bound_gradient)
        .map(|(l, r)| (l - r).abs())
        .fold(0.0, f64::max);
    Ok(MatchReport {
        finite_difference,
        bound_gradient,
        gap,
    })
}

/// Runs the adversarial loop. Returns the full trajectory; a run that hits
/// the abort threshold comes back truncated with the `aborted` flag set
/// rather than as an error.
pub fn adversarial_train(target: &Target, cfg: &TrainConfig) -> Result<TrainRun> {
    cfg.validate()?;
    let spec_f = cfg.spec_f()?;
    let spec_h = cfg.spec_h()?;
    let mut generator = cfg.generator.build(cfg.output_noise, cfg.noise_init)?;
    let mut init_rng = rng::substream(cfg.seed, rng::STREAM_INIT);
    let mut critic = cfg.critic.build(&mut init_rng)?;
    check_critic_reads(&critic, generator.output_kind())?;

    let mut rng_p = rng::substream(cfg.seed, rng::STREAM_P);
    let mut rng_z = rng::substream(cfg.seed, rng::STREAM_Q);
    let mut opt_gen = Optimizer::new(cfg.optimizer, cfg.generator_lr);
    let mut opt_critic = Optimizer::new(cfg.optimizer, cfg.critic_lr);

    let start = std::time::Instant::now();
    let mut records = Vec::with_capacity(cfg.steps);
    let mut aborted = None;

    'outer: for step in 0..cfg.steps {
        let mut critic_grad_norm = 0.0;
        let critic_rounds = match cfg.mode {
            UpdateMode::Alternating => cfg.critic_steps,
            UpdateMode::Simultaneous => 1,
        };
        // In simultaneous mode both gradients are taken at the same state, so
        // the critic update is deferred until the generator gradient exists.
        let mut pending_critic: Option<Vec<f64>> = None;
        for _ in 0..critic_rounds {
            let batch_p = target.draw(cfg.batch_size, &mut rng_p)?;
            let batch_x = generator.sample(cfg.batch_size, &mut rng_z)?;
            let grad = estimator::critic_param_gradient(&spec_h, &batch_p, &batch_x, &critic)?;
            critic_grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            let descent: Vec<f64> = grad.iter().map(|g| -g).collect();
            match cfg.mode {
                UpdateMode::Alternating => {
                    opt_critic.step(critic.params_mut(), &descent);
                    if params_out_of_range(critic.params()) {
                        aborted = Some(Abort {
                            step,
                            reason: "critic parameters out of range".into(),
                        });
                        break 'outer;
                    }
                }
                UpdateMode::Simultaneous => pending_critic = Some(descent),
            }
        }

        let batch_p = target.draw(cfg.batch_size, &mut rng_p)?;
        let batch_x = generator.sample(cfg.batch_size, &mut rng_z)?;
        let e_f = estimator::mc_bound(&spec_f, &batch_p, &batch_x, &critic)?;
        let (gen_grad, _) = generator_gradient_auto(
            &spec_f,
            &generator,
            cfg.batch_size,
            &mut rng_z,
            &critic,
        )?;
        let gen_grad_norm = gen_grad.iter().map(|g| g * g).sum::<f64>().sqrt();

        let mut gen_params = generator.params();
        opt_gen.step(&mut gen_params, &gen_grad);
        generator.set_params(&gen_params)?;
        if let Some(descent) = pending_critic {
            opt_critic.step(critic.params_mut(), &descent);
        }

        records.push(StepRecord {
            step,
            e_f,
            gen_grad_norm,
            critic_grad_norm,
            lambda: generator.params(),
        });

        if params_out_of_range(&generator.params()) || params_out_of_range(critic.params()) {
            aborted = Some(Abort {
                step,
                reason: "parameters out of range".into(),
            });
            break;
        }
    }

    Ok(TrainRun {
        f: spec_f.name().to_string(),
        h: spec_h.name().to_string(),
        records,
        final_generator_params: generator.params(),
        final_critic_params: critic.params().to_vec(),
        seed: cfg.seed,
        aborted,
        wall_clock: start.elapsed(),
    })
}

fn check_critic_reads(critic: &Critic, kind: OutputKind) -> Result<()> {
    let ok = match (critic, kind) {
        (Critic::Tabular { values }, OutputKind::Discrete(n)) => values.len() == n,
        (Critic::AffineFeature { .. }, OutputKind::Continuous1d) => true,
        (Critic::Mlp(m), OutputKind::Continuous1d) => m.input_dim() == 1,
        (Critic::Mlp(m), OutputKind::Continuous2d) => m.input_dim() == 2,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::MixedKinds(format!(
            "critic {} cannot read generator output {kind:?}",
            critic.kind_name()
        )))
    }
}

/// Gradient norms and noise thresholds at a candidate equilibrium.
#[derive(Debug, Clone, Serialize)]
pub struct FixedPointReport {
    pub generator_grad_norm: f64,
    /// Three standard errors of the generator gradient estimate.
    pub generator_threshold: f64,
    pub critic_grad_norm: f64,
    pub critic_threshold: f64,
    pub generator_pass: bool,
    pub critic_pass: bool,
    pub pass: bool,
}

/// Evaluates both Monte Carlo gradients at the given parameters and compares
/// each norm against three standard errors of its own estimator noise.
pub fn fixed_point_check(
    cfg: &TrainConfig,
    target: &Target,
    generator_params: &[f64],
    critic_params: &[f64],
) -> Result<FixedPointReport> {
    cfg.validate()?;
    let spec_f = cfg.spec_f()?;
    let spec_h = cfg.spec_h()?;
    let mut generator = cfg.generator.build(cfg.output_noise, cfg.noise_init)?;
    generator.set_params(generator_params)?;
    let mut init_rng = rng::substream(cfg.seed, rng::STREAM_INIT);
    let mut critic = cfg.critic.build(&mut init_rng)?;
    if critic_params.len() != critic.n_params() {
        return Err(Error::Config(format!(
            "critic takes {} parameters, got {}",
            critic.n_params(),
            critic_params.len()
        )));
    }
    critic.params_mut().copy_from_slice(critic_params);
    check_critic_reads(&critic, generator.output_kind())?;

    let mut vrng = rng::substream(cfg.seed, rng::STREAM_VERIFY);
    let n = cfg.batch_size;

    let (gen_grad, gen_se) =
        generator_gradient_auto(&spec_f, &generator, n, &mut vrng, &critic)?;
    let batch_p = target.draw(n, &mut vrng)?;
    let batch_x = generator.sample(n, &mut vrng)?;
    let (critic_grad, critic_se) =
        estimator::critic_param_gradient_stats(&spec_h, &batch_p, &batch_x, &critic)?;

    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    // Floor keeps the exact-equilibrium case (zero gradient, zero variance)
    // passing.
    let generator_threshold = 3.0 * norm(&gen_se) + 1e-12;
    let critic_threshold = 3.0 * norm(&critic_se) + 1e-12;
    let generator_grad_norm = norm(&gen_grad);
    let critic_grad_norm = norm(&critic_grad);
    let generator_pass = generator_grad_norm <= generator_threshold;
    let critic_pass = critic_grad_norm <= critic_threshold;
    Ok(FixedPointReport {
        generator_grad_norm,
        generator_threshold,
        critic_grad_norm,
        critic_threshold,
        generator_pass,
        critic_pass,
        pass: generator_pass && critic_pass,
    })
}
