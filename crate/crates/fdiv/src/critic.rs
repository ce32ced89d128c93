//! Critic families: parameterized log-ratio models `d_ν`.
//!
//! Three families share one interface: a per-support-point table for discrete
//! problems, an affine function of fixed polynomial features for 1-D
//! continuous problems, and a small MLP for 1-D or 2-D continuous problems.
//! All expose flat parameter access, parameter gradients, and (for continuous
//! kinds) exact input gradients for pathwise generator training.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::{Distribution, Samples};
use crate::error::{Error, Result};
use crate::exact::CriticFunction;
use crate::mlp::Mlp;

/// One observed point, in whichever space the problem lives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Obs {
    /// Discrete support index.
    Index(usize),
    /// 1-D continuous point.
    Point1(f64),
    /// 2-D continuous point.
    Point2([f64; 2]),
}

impl Obs {
    /// Continuous coordinates, if any.
    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Obs::Index(_) => None,
            Obs::Point1(x) => Some(std::slice::from_ref(x)),
            Obs::Point2(xy) => Some(xy.as_slice()),
        }
    }
}

/// Converts a draw batch into observations.
pub fn samples_to_obs(samples: &Samples) -> Vec<Obs> {
    match samples {
        Samples::Discrete(v) => v.iter().map(|&i| Obs::Index(i)).collect(),
        Samples::Continuous(v) => v.iter().map(|&x| Obs::Point1(x)).collect(),
    }
}

/// A parameterized critic.
#[derive(Debug, Clone, PartialEq)]
pub enum Critic {
    /// One free value per discrete support point.
    Tabular { values: Vec<f64> },
    /// `d(x) = Σ_k c_k x^k`: affine in fixed polynomial features of a 1-D
    /// point (coeffs index = power).
    AffineFeature { coeffs: Vec<f64> },
    /// Smooth network on 1-D or 2-D points.
    Mlp(Mlp),
}

/// Serializable recipe for building a critic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CriticConfig {
    Tabular { size: usize },
    AffineFeature { degree: usize },
    Mlp {
        input_dim: usize,
        #[serde(default = "default_hidden")]
        hidden: Vec<usize>,
    },
}

fn default_hidden() -> Vec<usize> {
    vec![32, 32]
}

impl CriticConfig {
    /// Builds the critic; `rng` drives MLP weight init (tabular and affine
    /// critics start at zero).
    pub fn build(&self, rng: &mut ChaCha8Rng) -> Result<Critic> {
        match self {
            CriticConfig::Tabular { size } => {
                if *size < 2 {
                    return Err(Error::Config(format!(
                        "tabular critic needs at least 2 support points, got {size}"
                    )));
                }
                Ok(Critic::Tabular {
                    values: vec![0.0; *size],
                })
            }
            CriticConfig::AffineFeature { degree } => Ok(Critic::AffineFeature {
                coeffs: vec![0.0; degree + 1],
            }),
            CriticConfig::Mlp { input_dim, hidden } => {
                if !(1..=2).contains(input_dim) {
                    return Err(Error::Config(format!(
                        "mlp critic supports 1-D or 2-D input, got {input_dim}"
                    )));
                }
                Ok(Critic::Mlp(Mlp::new(*input_dim, hidden, rng)))
            }
        }
    }
}

impl Critic {
    pub fn tabular(size: usize) -> Critic {
        Critic::Tabular {
            values: vec![0.0; size],
        }
    }

    pub fn affine_feature(degree: usize) -> Critic {
        Critic::AffineFeature {
            coeffs: vec![0.0; degree + 1],
        }
    }

    pub fn mlp(input_dim: usize, rng: &mut ChaCha8Rng) -> Critic {
        Critic::Mlp(Mlp::new(input_dim, &default_hidden(), rng))
    }

    /// Checks that this critic can read samples of `dist`.
    pub fn check_compatible(&self, dist: &Distribution) -> Result<()> {
        match (self, dist) {
            (Critic::Tabular { values }, Distribution::Discrete(d)) => {
                if values.len() != d.len() {
                    Err(Error::MixedKinds(format!(
                        "tabular critic has {} entries, support has {}",
                        values.len(),
                        d.len()
                    )))
                } else {
                    Ok(())
                }
            }
            (Critic::AffineFeature { .. }, Distribution::Gmm1d(_)) => Ok(()),
            (Critic::Mlp(m), Distribution::Gmm1d(_)) if m.input_dim() == 1 => Ok(()),
            (c, d) => Err(Error::MixedKinds(format!(
                "critic {} cannot read {} samples",
                c.kind_name(),
                d.kind()
            ))),
        }
    }

    /// Checks that this critic can read one observation (e.g. the first
    /// record of a sample file).
    pub fn check_reads(&self, at: Obs) -> Result<()> {
        let ok = match (self, at) {
            (Critic::Tabular { values }, Obs::Index(i)) => i < values.len(),
            (Critic::AffineFeature { .. }, Obs::Point1(_)) => true,
            (Critic::Mlp(m), Obs::Point1(_)) => m.input_dim() == 1,
            (Critic::Mlp(m), Obs::Point2(_)) => m.input_dim() == 2,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::MixedKinds(format!(
                "critic {} cannot read {at:?}",
                self.kind_name()
            )))
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Critic::Tabular { .. } => "tabular",
            Critic::AffineFeature { .. } => "affine_feature",
            Critic::Mlp(_) => "mlp",
        }
    }

    pub fn n_params(&self) -> usize {
        match self {
            Critic::Tabular { values } => values.len(),
            Critic::AffineFeature { coeffs } => coeffs.len(),
            Critic::Mlp(m) => m.n_params(),
        }
    }

    pub fn params(&self) -> &[f64] {
        match self {
            Critic::Tabular { values } => values,
            Critic::AffineFeature { coeffs } => coeffs,
            Critic::Mlp(m) => m.params(),
        }
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        match self {
            Critic::Tabular { values } => values,
            Critic::AffineFeature { coeffs } => coeffs,
            Critic::Mlp(m) => m.params_mut(),
        }
    }

    /// `d_ν` at one observation. Panics on a kind mismatch; gate batches with
    /// `check_compatible` first.
    pub fn eval(&self, at: Obs) -> f64 {
        match (self, at) {
            (Critic::Tabular { values }, Obs::Index(i)) => values[i],
            (Critic::AffineFeature { coeffs }, Obs::Point1(x)) => {
                // Horner evaluation, highest power first.
                coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
            }
            (Critic::Mlp(m), Obs::Point1(x)) if m.input_dim() == 1 => m.eval(&[x]),
            (Critic::Mlp(m), Obs::Point2(xy)) if m.input_dim() == 2 => m.eval(&xy),
            (c, at) => panic!("critic {} cannot evaluate {at:?}", c.kind_name()),
        }
    }

    /// Writes `∂d_ν(at)/∂ν` into `out` (length `n_params`) and returns
    /// `d_ν(at)`.
    pub fn param_grad(&self, at: Obs, out: &mut [f64]) -> f64 {
        assert_eq!(out.len(), self.n_params(), "gradient buffer length");
        match (self, at) {
            (Critic::Tabular { values }, Obs::Index(i)) => {
                out.fill(0.0);
                out[i] = 1.0;
                values[i]
            }
            (Critic::AffineFeature { coeffs }, Obs::Point1(x)) => {
                let mut pow = 1.0;
                let mut val = 0.0;
                for (c, o) in coeffs.iter().zip(out.iter_mut()) {
                    *o = pow;
                    val += c * pow;
                    pow *= x;
                }
                val
            }
            (Critic::Mlp(m), Obs::Point1(x)) if m.input_dim() == 1 => {
                let g = m.grads(&[x]);
                out.copy_from_slice(&g.params);
                g.output
            }
            (Critic::Mlp(m), Obs::Point2(xy)) if m.input_dim() == 2 => {
                let g = m.grads(&xy);
                out.copy_from_slice(&g.params);
                g.output
            }
            (c, at) => panic!("critic {} cannot evaluate {at:?}", c.kind_name()),
        }
    }

    /// `∂d_ν(at)/∂x` for continuous observations (exact, via backprop for the
    /// MLP). Errors for the tabular family, which has no input derivative.
    pub fn input_grad(&self, at: Obs) -> Result<Vec<f64>> {
        match (self, at) {
            (Critic::AffineFeature { coeffs }, Obs::Point1(x)) => {
                let mut pow = 1.0;
                let mut der = 0.0;
                for (k, c) in coeffs.iter().enumerate().skip(1) {
                    der += (k as f64) * c * pow;
                    pow *= x;
                }
                Ok(vec![der])
            }
            (Critic::Mlp(m), Obs::Point1(x)) if m.input_dim() == 1 => Ok(m.grads(&[x]).input),
            (Critic::Mlp(m), Obs::Point2(xy)) if m.input_dim() == 2 => Ok(m.grads(&xy).input),
            (c, at) => Err(Error::MixedKinds(format!(
                "critic {} has no input gradient at {at:?}",
                c.kind_name()
            ))),
        }
    }

    /// View usable by the exact engine.
    pub fn as_function(&self) -> Result<CriticFunction> {
        match self {
            Critic::Tabular { values } => Ok(CriticFunction::Tabular(values.clone())),
            Critic::AffineFeature { .. } => {
                let c = self.clone();
                Ok(CriticFunction::Func(Box::new(move |x| {
                    c.eval(Obs::Point1(x))
                })))
            }
            Critic::Mlp(m) if m.input_dim() == 1 => {
                let m = m.clone();
                Ok(CriticFunction::Func(Box::new(move |x| m.eval(&[x]))))
            }
            Critic::Mlp(_) => Err(Error::MixedKinds(
                "2-D critic has no 1-D function view".into(),
            )),
        }
    }
}
