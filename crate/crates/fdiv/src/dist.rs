//! Distributions, parametric families, and Fisher information.
//!
//! Two concrete kinds are supported and never mixed within one computation:
//! finite discrete distributions (indexed support) and 1-D Gaussian mixtures
//! (full real-line support). JSON descriptors give both a stable wire format.
//!
//! Parametric families add closed-form score functions `∂ log q_λ / ∂λ` and,
//! where the family is a pushforward of a fixed base distribution, a
//! reparameterized sampler with its parameter Jacobian.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, QuadConfig};

/// Simplex tolerance for probability/weight vectors.
const SUM_TOL: f64 = 1e-12;
/// `log √(2π)`, the Gaussian normalization constant.
const LOG_SQRT_2PI: f64 = 0.918_938_533_204_672_74;

/// Finite discrete distribution with strictly positive masses.
///
/// The `normalized` flag distinguishes true probability vectors from
/// unnormalized positive measures (allowed for generalized-divergence
/// checks); only the former can be sampled or mixed.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    probs: Vec<f64>,
    normalized: bool,
}

impl DiscreteDistribution {
    /// Builds a probability vector: at least two entries, all strictly
    /// positive and finite, summing to 1 within 1e-12.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::validate_entries(&probs)?;
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {sum}, expected 1 within {SUM_TOL:e}"
            )));
        }
        Ok(DiscreteDistribution {
            probs,
            normalized: true,
        })
    }

    /// Builds an unnormalized positive measure (no sum constraint).
    pub fn unnormalized(weights: Vec<f64>) -> Result<Self> {
        Self::validate_entries(&weights)?;
        Ok(DiscreteDistribution {
            probs: weights,
            normalized: false,
        })
    }

    fn validate_entries(probs: &[f64]) -> Result<()> {
        if probs.len() < 2 {
            return Err(Error::InvalidDistribution(format!(
                "need at least 2 support points, got {}",
                probs.len()
            )));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "strictly positive probs required, entry {i} is {p}"
                )));
            }
        }
        Ok(())
    }

    /// Point masses.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Number of support points.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    /// Always false: at least two support points are required.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Whether the masses sum to 1.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Mass at support point `i`.
    pub fn density(&self, i: usize) -> f64 {
        self.probs[i]
    }

    /// Log-mass at support point `i`.
    pub fn log_density(&self, i: usize) -> f64 {
        self.probs[i].ln()
    }

    /// Draws `n` support indices. Requires a normalized distribution.
    pub fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
        if !self.normalized {
            return Err(Error::InvalidDistribution(
                "cannot sample from an unnormalized measure".to_string(),
            ));
        }
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(sample_index(&self.probs, rng));
        }
        Ok(out)
    }
}

/// Inverse-CDF draw from a positive weight vector summing to ~1.
fn sample_index(probs: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Mixture of 1-D Gaussians: `Σ w_k · N(μ_k, σ_k²)`.
///
/// Zero-weight components are pruned at construction; duplicate components
/// are allowed (they add their weights' densities pointwise).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture1D {
    weights: Vec<f64>,
    means: Vec<f64>,
    stddevs: Vec<f64>,
}

impl GaussianMixture1D {
    /// Builds a mixture: equal-length vectors, weights nonnegative summing to
    /// 1 within 1e-12 (zero weights pruned), stddevs strictly positive.
    pub fn new(weights: Vec<f64>, means: Vec<f64>, stddevs: Vec<f64>) -> Result<Self> {
        if weights.len() != means.len() || weights.len() != stddevs.len() {
            return Err(Error::InvalidDistribution(format!(
                "component vectors disagree in length: {} weights, {} means, {} stddevs",
                weights.len(),
                means.len(),
                stddevs.len()
            )));
        }
        if weights.is_empty() {
            return Err(Error::InvalidDistribution(
                "mixture needs at least one component".to_string(),
            ));
        }
        let mut w = Vec::new();
        let mut m = Vec::new();
        let mut s = Vec::new();
        for k in 0..weights.len() {
            if !(weights[k].is_finite() && weights[k] >= 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "weight {k} is {}, expected nonnegative finite",
                    weights[k]
                )));
            }
            if weights[k] == 0.0 {
                continue;
            }
            if !means[k].is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "mean {k} is {}",
                    means[k]
                )));
            }
            if !(stddevs[k].is_finite() && stddevs[k] > 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "stddev {k} is {}, expected strictly positive",
                    stddevs[k]
                )));
            }
            w.push(weights[k]);
            m.push(means[k]);
            s.push(stddevs[k]);
        }
        if w.is_empty() {
            return Err(Error::InvalidDistribution(
                "all mixture weights are zero".to_string(),
            ));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "mixture weights sum to {sum}, expected 1 within {SUM_TOL:e}"
            )));
        }
        Ok(GaussianMixture1D {
            weights: w,
            means: m,
            stddevs: s,
        })
    }

    /// Single Gaussian `N(mean, stddev²)`.
    pub fn normal(mean: f64, stddev: f64) -> Result<Self> {
        Self::new(vec![1.0], vec![mean], vec![stddev])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn stddevs(&self) -> &[f64] {
        &self.stddevs
    }

    /// Number of (nonzero-weight) components.
    pub fn n_components(&self) -> usize {
        self.weights.len()
    }

    /// Density at `x`.
    pub fn density(&self, x: f64) -> f64 {
        self.log_density(x).exp()
    }

    /// Log-density at `x`, via log-sum-exp over components for stability far
    /// into the tails.
    pub fn log_density(&self, x: f64) -> f64 {
        let mut terms = Vec::with_capacity(self.weights.len());
        let mut max = f64::NEG_INFINITY;
        for k in 0..self.weights.len() {
            let z = (x - self.means[k]) / self.stddevs[k];
            let t = self.weights[k].ln() - 0.5 * z * z - self.stddevs[k].ln() - LOG_SQRT_2PI;
            terms.push(t);
            if t > max {
                max = t;
            }
        }
        if max == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
        max + sum.ln()
    }

    /// Interval outside which all component densities are negligible:
    /// `[min μ − 10·max σ, max μ + 10·max σ]`. Used as the quadrature domain.
    pub fn support_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut smax: f64 = 0.0;
        for k in 0..self.means.len() {
            lo = lo.min(self.means[k]);
            hi = hi.max(self.means[k]);
            smax = smax.max(self.stddevs[k]);
        }
        (lo - 10.0 * smax, hi + 10.0 * smax)
    }

    /// Draws `n` points: component by weight, then the component's Gaussian.
    pub fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let k = sample_index(&self.weights, rng);
            let z: f64 = rng.sample(StandardNormal);
            out.push(self.means[k] + self.stddevs[k] * z);
        }
        out
    }
}

/// A distribution of either supported kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Discrete(DiscreteDistribution),
    Gmm1d(GaussianMixture1D),
}

/// A point in the support of a distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupportPoint {
    Discrete(usize),
    Continuous(f64),
}

/// Batch of draws, matching the distribution kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Samples {
    Discrete(Vec<usize>),
    Continuous(Vec<f64>),
}

impl Samples {
    pub fn len(&self) -> usize {
        match self {
            Samples::Discrete(v) => v.len(),
            Samples::Continuous(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Distribution {
    /// Kind label for error messages.
    pub fn kind(&self) -> &'static str {
        match self {
            Distribution::Discrete(_) => "discrete",
            Distribution::Gmm1d(_) => "gmm1d",
        }
    }

    /// Whether `self` and `other` share a kind (and support size, for
    /// discrete distributions).
    pub fn check_same_kind(&self, other: &Distribution) -> Result<()> {
        match (self, other) {
            (Distribution::Discrete(a), Distribution::Discrete(b)) => {
                if a.len() != b.len() {
                    Err(Error::MixedKinds(format!(
                        "discrete supports differ: {} vs {}",
                        a.len(),
                        b.len()
                    )))
                } else {
                    Ok(())
                }
            }
            (Distribution::Gmm1d(_), Distribution::Gmm1d(_)) => Ok(()),
            (a, b) => Err(Error::MixedKinds(format!(
                "{} vs {}",
                a.kind(),
                b.kind()
            ))),
        }
    }

    /// Density at a support point. Panics if the point kind mismatches.
    pub fn density_at(&self, at: SupportPoint) -> f64 {
        match (self, at) {
            (Distribution::Discrete(d), SupportPoint::Discrete(i)) => d.density(i),
            (Distribution::Gmm1d(g), SupportPoint::Continuous(x)) => g.density(x),
            _ => panic!("support point kind does not match distribution kind"),
        }
    }

    /// Log-density at a support point. Panics if the point kind mismatches.
    pub fn log_density_at(&self, at: SupportPoint) -> f64 {
        match (self, at) {
            (Distribution::Discrete(d), SupportPoint::Discrete(i)) => d.log_density(i),
            (Distribution::Gmm1d(g), SupportPoint::Continuous(x)) => g.log_density(x),
            _ => panic!("support point kind does not match distribution kind"),
        }
    }

    /// Draws `n` points.
    pub fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<Samples> {
        match self {
            Distribution::Discrete(d) => Ok(Samples::Discrete(d.sample(n, rng)?)),
            Distribution::Gmm1d(g) => Ok(Samples::Continuous(g.sample(n, rng))),
        }
    }
}

/// Pointwise mixture `w·p + (1−w)·q` of two same-kind distributions.
pub fn mix(p: &Distribution, q: &Distribution, w: f64) -> Result<Distribution> {
    if !(0.0..=1.0).contains(&w) || !w.is_finite() {
        return Err(Error::InvalidDistribution(format!(
            "mixture weight must lie in [0, 1], got {w}"
        )));
    }
    p.check_same_kind(q)?;
    match (p, q) {
        (Distribution::Discrete(a), Distribution::Discrete(b)) => {
            if !(a.is_normalized() && b.is_normalized()) {
                return Err(Error::InvalidDistribution(
                    "mix requires normalized distributions".to_string(),
                ));
            }
            let probs = a
                .probs()
                .iter()
                .zip(b.probs())
                .map(|(&x, &y)| w * x + (1.0 - w) * y)
                .collect();
            Ok(Distribution::Discrete(DiscreteDistribution::new(probs)?))
        }
        (Distribution::Gmm1d(a), Distribution::Gmm1d(b)) => {
            // Concatenating the component lists realizes the pointwise
            // mixture exactly; zero weights (w = 0 or 1) are pruned.
            let mut weights: Vec<f64> = a.weights().iter().map(|&x| w * x).collect();
            weights.extend(b.weights().iter().map(|&x| (1.0 - w) * x));
            let mut means = a.means().to_vec();
            means.extend_from_slice(b.means());
            let mut stddevs = a.stddevs().to_vec();
            stddevs.extend_from_slice(b.stddevs());
            Ok(Distribution::Gmm1d(GaussianMixture1D::new(
                weights, means, stddevs,
            )?))
        }
        _ => unreachable!("kind checked above"),
    }
}

/// JSON wire format for distributions.
///
/// ```json
/// {"type": "discrete", "probs": [0.5, 0.5]}
/// {"type": "gmm1d", "weights": [1.0], "means": [0.0], "stddevs": [1.0]}
/// ```
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionDescriptor {
    Discrete {
        probs: Vec<f64>,
    },
    Gmm1d {
        weights: Vec<f64>,
        means: Vec<f64>,
        stddevs: Vec<f64>,
    },
}

impl DistributionDescriptor {
    /// Validates and converts to a concrete distribution.
    pub fn build(&self) -> Result<Distribution> {
        match self {
            DistributionDescriptor::Discrete { probs } => Ok(Distribution::Discrete(
                DiscreteDistribution::new(probs.clone())?,
            )),
            DistributionDescriptor::Gmm1d {
                weights,
                means,
                stddevs,
            } => Ok(Distribution::Gmm1d(GaussianMixture1D::new(
                weights.clone(),
                means.clone(),
                stddevs.clone(),
            )?)),
        }
    }

    /// Descriptor for an existing distribution.
    pub fn of(dist: &Distribution) -> Self {
        match dist {
            Distribution::Discrete(d) => DistributionDescriptor::Discrete {
                probs: d.probs().to_vec(),
            },
            Distribution::Gmm1d(g) => DistributionDescriptor::Gmm1d {
                weights: g.weights().to_vec(),
                means: g.means().to_vec(),
                stddevs: g.stddevs().to_vec(),
            },
        }
    }

    /// Parses a descriptor from a JSON string.
    pub fn parse(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

/// A smoothly parameterized family `λ ↦ q_λ`.
#[derive(Debug, Clone, PartialEq)]
pub enum ParametricFamily {
    /// `q_i = softmax(λ)_i` over `support` points; `λ ∈ R^support`.
    SoftmaxDiscrete { support: usize },
    /// `N(λ_0, stddev²)` with fixed scale.
    GaussianMean { stddev: f64 },
    /// `N(λ_0, λ_1²)`; the scale parameter enters through its absolute
    /// value, so any `λ_1 ≠ 0` is valid.
    GaussianLocScale,
}

impl ParametricFamily {
    /// Parameter dimension.
    pub fn dim(&self) -> usize {
        match self {
            ParametricFamily::SoftmaxDiscrete { support } => *support,
            ParametricFamily::GaussianMean { .. } => 1,
            ParametricFamily::GaussianLocScale => 2,
        }
    }

    /// Errors unless `lambda` has exactly `dim()` entries.
    pub fn check_dim(&self, lambda: &[f64]) -> Result<()> {
        if lambda.len() != self.dim() {
            return Err(Error::Config(format!(
                "family expects {} parameters, got {}",
                self.dim(),
                lambda.len()
            )));
        }
        Ok(())
    }

    /// The member distribution `q_λ`.
    pub fn distribution(&self, lambda: &[f64]) -> Result<Distribution> {
        self.check_dim(lambda)?;
        match self {
            ParametricFamily::SoftmaxDiscrete { .. } => Ok(Distribution::Discrete(
                DiscreteDistribution::new(softmax(lambda))?,
            )),
            ParametricFamily::GaussianMean { stddev } => Ok(Distribution::Gmm1d(
                GaussianMixture1D::normal(lambda[0], *stddev)?,
            )),
            ParametricFamily::GaussianLocScale => {
                if lambda[1] == 0.0 {
                    return Err(Error::InvalidDistribution(
                        "scale parameter must be nonzero".to_string(),
                    ));
                }
                Ok(Distribution::Gmm1d(GaussianMixture1D::normal(
                    lambda[0],
                    lambda[1].abs(),
                )?))
            }
        }
    }

    /// Score function `∂ log q_λ(x) / ∂λ` at a support point.
    pub fn log_density_grad(&self, lambda: &[f64], at: SupportPoint) -> Result<Vec<f64>> {
        self.check_dim(lambda)?;
        match (self, at) {
            (ParametricFamily::SoftmaxDiscrete { .. }, SupportPoint::Discrete(i)) => {
                let q = softmax(lambda);
                Ok((0..q.len())
                    .map(|j| if j == i { 1.0 - q[j] } else { -q[j] })
                    .collect())
            }
            (ParametricFamily::GaussianMean { stddev }, SupportPoint::Continuous(x)) => {
                Ok(vec![(x - lambda[0]) / (stddev * stddev)])
            }
            (ParametricFamily::GaussianLocScale, SupportPoint::Continuous(x)) => {
                let (m, s) = (lambda[0], lambda[1]);
                let r = x - m;
                Ok(vec![r / (s * s), r * r / (s * s * s) - 1.0 / s])
            }
            _ => Err(Error::MixedKinds(
                "support point kind does not match family".to_string(),
            )),
        }
    }

    /// Density gradient `∂ q_λ(x) / ∂λ = q_λ(x) · ∂ log q_λ(x) / ∂λ`.
    pub fn density_grad(&self, lambda: &[f64], at: SupportPoint) -> Result<Vec<f64>> {
        let q = self.distribution(lambda)?;
        let dens = q.density_at(at);
        let mut g = self.log_density_grad(lambda, at)?;
        for gi in &mut g {
            *gi *= dens;
        }
        Ok(g)
    }

    /// Reparameterized sample `x(λ, z)` from base noise `z ~ N(0,1)` together
    /// with the Jacobian `∂x/∂λ`, when the family is a pushforward.
    pub fn reparameterize(&self, lambda: &[f64], z: f64) -> Option<(f64, Vec<f64>)> {
        match self {
            ParametricFamily::SoftmaxDiscrete { .. } => None,
            ParametricFamily::GaussianMean { stddev } => {
                Some((lambda[0] + stddev * z, vec![1.0]))
            }
            ParametricFamily::GaussianLocScale => {
                Some((lambda[0] + lambda[1] * z, vec![1.0, z]))
            }
        }
    }
}

/// Numerically stable softmax.
fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Fisher information matrix `F_ij(λ) = E_{q_λ}[∂_i log q_λ · ∂_j log q_λ]`,
/// by exact summation for discrete families and adaptive quadrature for
/// continuous ones.
pub fn fisher_matrix(family: &ParametricFamily, lambda: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = family.dim();
    let mut out = vec![vec![0.0; n]; n];
    match family.distribution(lambda)? {
        Distribution::Discrete(d) => {
            for k in 0..d.len() {
                let g = family.log_density_grad(lambda, SupportPoint::Discrete(k))?;
                let w = d.density(k);
                for i in 0..n {
                    for j in 0..n {
                        out[i][j] += w * g[i] * g[j];
                    }
                }
            }
        }
        Distribution::Gmm1d(g) => {
            let (lo, hi) = g.support_bounds();
            let cfg = QuadConfig::default();
            for i in 0..n {
                for j in i..n {
                    let val = quad::integrate(
                        |x| {
                            let s = family
                                .log_density_grad(lambda, SupportPoint::Continuous(x))
                                .expect("dimension checked");
                            g.density(x) * s[i] * s[j]
                        },
                        lo,
                        hi,
                        &cfg,
                    )?
                    .value;
                    out[i][j] = val;
                    out[j][i] = val;
                }
            }
        }
    }
    Ok(out)
}
