//! Numerical laboratory for f-divergences.
//!
//! The crate is organized around a small pipeline:
//!
//! * [`catalog`]: closed-form divergence definitions (the generator function
//!   `f` and its derivatives, plus the pair of critic-side transforms used by
//!   the variational lower bound) together with algebraic operations on them
//!   (scaling, convex combination, argument reversal, canonicalization).
//! * [`dist`]: concrete distributions (finite discrete, 1-D Gaussian
//!   mixtures), parametric families with closed-form score functions, and
//!   Fisher information matrices.
//! * [`quad`]: adaptive Gauss-Kronrod quadrature used by every exact
//!   continuous computation.
//! * [`exact`]: exact divergence values, optimal critics, variational bound
//!   evaluation, second-order (Fisher) expansions, and exact generator
//!   gradients.
//! * [`critic`] / [`mlp`]: parametric critic families (tabular, polynomial
//!   feature, multilayer perceptron) with hand-written derivatives.
//! * [`estimator`]: Monte Carlo estimation of divergences by stochastic
//!   ascent of the variational bound.
//! * [`trainer`]: adversarial distribution fitting (pathwise generator
//!   gradients, hybrid objectives, fixed-point diagnostics).
//! * [`verify`]: a self-contained identity suite that re-derives the
//!   catalog's numbers from independent formulations.
//! * [`cli`]: the `fdiv` command-line front end.
//!
//! Determinism: every stochastic routine takes an explicit seed and derives
//! per-purpose RNG substreams through [`rng`]; two runs with the same seed
//! produce bit-identical results.

pub mod catalog;
pub mod cli;
pub mod critic;
pub mod dist;
pub mod error;
pub mod estimator;
pub mod exact;
pub mod mlp;
pub mod opt;
pub mod quad;
pub mod rng;
pub mod trainer;
pub mod verify;

pub use catalog::{builtin, builtin_by_name, Divergence, DivergenceSpec};
pub use dist::{DiscreteDistribution, Distribution, GaussianMixture1D, ParametricFamily};
pub use error::{Error, Result};
