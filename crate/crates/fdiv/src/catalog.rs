//! Closed-form divergence catalog.
//!
//! An f-divergence between densities `p` and `q` is `∫ q·f(p/q)` for a
//! strictly convex generator `f` with `f(1) = 0`. Every entry here is stored
//! in *normalized* form: `f(1) = f'(1) = 0` (affine terms carry no
//! information) and *canonical* scale `f''(1) = 1`, so different entries are
//! directly comparable and all second-order expansions share one constant.
//!
//! Alongside `f` and its first two derivatives, each spec carries the two
//! transforms that turn a critic function `d(x)` into the integrands of the
//! variational lower bound `∫p·a(d) − ∫q·b(d)`:
//!
//! ```text
//! a(d) = f'(e^d)                  a'(d) = u·f''(u)   at u = e^d
//! b(d) = e^d·f'(e^d) − f(e^d)     b'(d) = u²·f''(u)  at u = e^d
//! ```
//!
//! which satisfy `b'(d) = a'(d)·e^d`. The bound is tight exactly at the
//! log-density ratio `d = log p − log q`.
//!
//! All functions are implemented in numerically stable closed form (`expm1`,
//! `log1p`-based log-sigmoid); evaluation stays finite for `|d| ≤ 30` and far
//! beyond for most entries. At the domain edge, `f(0)` is the true limit
//! (finite for some entries, `+∞` for others) rather than an error.
//!
//! | name                 | f''(u)        | tail weights |
//! |----------------------|---------------|--------------|
//! | kl                   | 1/u           | (1, 2)       |
//! | reverse_kl           | 1/u²          | (2, 1)       |
//! | jensen_shannon       | 2/(u(u+1))    | (1, 1)       |
//! | squared_hellinger    | u^(-3/2)      | (3/2, 3/2)   |
//! | jeffreys             | (u+1)/(2u²)   | (2, 2)       |
//! | le_cam               | 8/(1+u)³      | (0, 0)       |
//! | pearson_chi2         | 1             | (0, 3)       |
//! | neymann              | 1/u³          | (3, 0)       |
//! | softened_reverse_kl  | 2/(u²(u+1))   | (2, 0)       |
//!
//! Tail weights are stored metadata describing the asymptotic strength of
//! `f''` at the two domain edges; they are not recomputed from `f`.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::dist::DiscreteDistribution;
use crate::error::{Error, Result};

/// Shared scalar function type for catalog entries.
type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Numerically stable logistic sigmoid `σ(d) = 1/(1+e^(−d))`.
pub fn sigmoid(d: f64) -> f64 {
    if d >= 0.0 {
        1.0 / (1.0 + (-d).exp())
    } else {
        let e = d.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable `log σ(d)`, computed as `−log1p(e^(−|d|)) + min(d, 0)`.
pub fn log_sigmoid(d: f64) -> f64 {
    -(-d.abs()).exp().ln_1p() + d.min(0.0)
}

/// The nine builtin divergences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Divergence {
    Kl,
    ReverseKl,
    JensenShannon,
    SquaredHellinger,
    Jeffreys,
    LeCam,
    PearsonChi2,
    Neymann,
    SoftenedReverseKl,
}

impl Divergence {
    /// All builtin identifiers, in catalog order.
    pub const ALL: [Divergence; 9] = [
        Divergence::Kl,
        Divergence::ReverseKl,
        Divergence::JensenShannon,
        Divergence::SquaredHellinger,
        Divergence::Jeffreys,
        Divergence::LeCam,
        Divergence::PearsonChi2,
        Divergence::Neymann,
        Divergence::SoftenedReverseKl,
    ];

    /// Stable string identifier.
    pub fn name(self) -> &'static str {
        match self {
            Divergence::Kl => "kl",
            Divergence::ReverseKl => "reverse_kl",
            Divergence::JensenShannon => "jensen_shannon",
            Divergence::SquaredHellinger => "squared_hellinger",
            Divergence::Jeffreys => "jeffreys",
            Divergence::LeCam => "le_cam",
            Divergence::PearsonChi2 => "pearson_chi2",
            Divergence::Neymann => "neymann",
            Divergence::SoftenedReverseKl => "softened_reverse_kl",
        }
    }
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Divergence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Divergence::ALL
            .iter()
            .copied()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::UnknownDivergence(s.to_string()))
    }
}

/// A complete divergence definition: generator function, derivatives,
/// bound transforms, and metadata.
///
/// Domain contract: `f` accepts `u ≥ 0` (with `f(0)` equal to the one-sided
/// limit, possibly `+∞`); `f1`/`f2` accept `u > 0`; the `d`-space functions
/// accept any real `d`, with limits at `±∞` taken by continuity.
#[derive(Clone)]
pub struct DivergenceSpec {
    name: String,
    f: ScalarFn,
    f1: ScalarFn,
    f2: ScalarFn,
    a: ScalarFn,
    b: ScalarFn,
    a1: ScalarFn,
    b1: ScalarFn,
    tail_weights: (f64, f64),
    curvature_at_one: f64,
}

impl fmt::Debug for DivergenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DivergenceSpec")
            .field("name", &self.name)
            .field("tail_weights", &self.tail_weights)
            .field("curvature_at_one", &self.curvature_at_one)
            .finish()
    }
}

impl DivergenceSpec {
    /// Builds a spec from its seven functions and tail metadata. The
    /// curvature at 1 is read off `f2` so it can never disagree with it.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        name: impl Into<String>,
        f: ScalarFn,
        f1: ScalarFn,
        f2: ScalarFn,
        a: ScalarFn,
        b: ScalarFn,
        a1: ScalarFn,
        b1: ScalarFn,
        tail_weights: (f64, f64),
    ) -> Self {
        let curvature_at_one = f2(1.0);
        DivergenceSpec {
            name: name.into(),
            f,
            f1,
            f2,
            a,
            b,
            a1,
            b1,
            tail_weights,
            curvature_at_one,
        }
    }

    /// Human-readable name (builtin identifier or derived expression).
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Generator function `f(u)`.
    pub fn f(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    /// First derivative `f'(u)`.
    pub fn f1(&self, u: f64) -> f64 {
        (self.f1)(u)
    }

    /// Second derivative `f''(u)`.
    pub fn f2(&self, u: f64) -> f64 {
        (self.f2)(u)
    }

    /// Bound transform `a(d) = f'(e^d)` applied to a critic value.
    pub fn a(&self, d: f64) -> f64 {
        (self.a)(d)
    }

    /// Bound transform `b(d) = e^d·f'(e^d) − f(e^d)`.
    pub fn b(&self, d: f64) -> f64 {
        (self.b)(d)
    }

    /// Derivative `a'(d) = u·f''(u)` at `u = e^d`.
    pub fn a1(&self, d: f64) -> f64 {
        (self.a1)(d)
    }

    /// Derivative `b'(d) = u²·f''(u)` at `u = e^d`; equals `a'(d)·e^d`.
    pub fn b1(&self, d: f64) -> f64 {
        (self.b1)(d)
    }

    /// Stored asymptotic tail strengths of `f''` at `u → 0` and `u → ∞`.
    pub fn tail_weights(&self) -> (f64, f64) {
        self.tail_weights
    }

    /// `f''(1)`; 1 for canonical specs.
    pub fn curvature_at_one(&self) -> f64 {
        self.curvature_at_one
    }
}

/// Returns the builtin spec for `which`.
pub fn builtin(which: Divergence) -> DivergenceSpec {
    match which {
        Divergence::Kl => DivergenceSpec::from_parts(
            "kl",
            Arc::new(|u: f64| {
                if u == 0.0 {
                    1.0
                } else {
                    u * u.ln() - u + 1.0
                }
            }),
            Arc::new(|u: f64| u.ln()),
            Arc::new(|u: f64| 1.0 / u),
            Arc::new(|d: f64| d),
            Arc::new(|d: f64| d.exp_m1()),
            Arc::new(|_d: f64| 1.0),
            Arc::new(|d: f64| d.exp()),
            (1.0, 2.0),
        ),
        Divergence::ReverseKl => DivergenceSpec::from_parts(
            "reverse_kl",
            Arc::new(|u: f64| u - 1.0 - u.ln()),
            Arc::new(|u: f64| 1.0 - 1.0 / u),
            Arc::new(|u: f64| 1.0 / (u * u)),
            Arc::new(|d: f64| -(-d).exp_m1()),
            Arc::new(|d: f64| d),
            Arc::new(|d: f64| (-d).exp()),
            Arc::new(|_d: f64| 1.0),
            (2.0, 1.0),
        ),
        Divergence::JensenShannon => DivergenceSpec::from_parts(
            "jensen_shannon",
            Arc::new(|u: f64| {
                if u == 0.0 {
                    2.0 * LN_2
                } else {
                    2.0 * u * u.ln() - 2.0 * (u + 1.0) * u.ln_1p() + 2.0 * u * LN_2 + 2.0 * LN_2
                }
            }),
            Arc::new(|u: f64| 2.0 * (LN_2 + u.ln() - u.ln_1p())),
            Arc::new(|u: f64| 2.0 / (u * (u + 1.0))),
            Arc::new(|d: f64| 2.0 * (LN_2 + log_sigmoid(d))),
            Arc::new(|d: f64| -2.0 * (LN_2 + log_sigmoid(-d))),
            Arc::new(|d: f64| 2.0 * sigmoid(-d)),
            Arc::new(|d: f64| 2.0 * sigmoid(d)),
            (1.0, 1.0),
        ),
        Divergence::SquaredHellinger => DivergenceSpec::from_parts(
            "squared_hellinger",
            Arc::new(|u: f64| {
                let r = 1.0 - u.sqrt();
                2.0 * r * r
            }),
            Arc::new(|u: f64| 2.0 - 2.0 / u.sqrt()),
            Arc::new(|u: f64| u.powf(-1.5)),
            Arc::new(|d: f64| -2.0 * (-0.5 * d).exp_m1()),
            Arc::new(|d: f64| 2.0 * (0.5 * d).exp_m1()),
            Arc::new(|d: f64| (-0.5 * d).exp()),
            Arc::new(|d: f64| (0.5 * d).exp()),
            (1.5, 1.5),
        ),
        Divergence::Jeffreys => DivergenceSpec::from_parts(
            "jeffreys",
            Arc::new(|u: f64| 0.5 * (u - 1.0) * u.ln()),
            Arc::new(|u: f64| 0.5 * (u.ln() + 1.0 - 1.0 / u)),
            Arc::new(|u: f64| (u + 1.0) / (2.0 * u * u)),
            Arc::new(|d: f64| 0.5 * (d - (-d).exp_m1())),
            Arc::new(|d: f64| 0.5 * (d + d.exp_m1())),
            Arc::new(|d: f64| 0.5 * (1.0 + (-d).exp())),
            Arc::new(|d: f64| 0.5 * (1.0 + d.exp())),
            (2.0, 2.0),
        ),
        Divergence::LeCam => DivergenceSpec::from_parts(
            "le_cam",
            Arc::new(|u: f64| {
                let r = u - 1.0;
                r * r / (1.0 + u)
            }),
            Arc::new(|u: f64| {
                let s = 1.0 + u;
                (u - 1.0) * (u + 3.0) / (s * s)
            }),
            Arc::new(|u: f64| {
                let s = 1.0 + u;
                8.0 / (s * s * s)
            }),
            // a(d) = 1 − 4σ(−d)² factored as tanh(d/2)·(1 + 2σ(−d)) to keep
            // full precision near d = 0.
            Arc::new(|d: f64| (0.5 * d).tanh() * (1.0 + 2.0 * sigmoid(-d))),
            Arc::new(|d: f64| (0.5 * d).tanh() * (1.0 + 2.0 * sigmoid(d))),
            Arc::new(|d: f64| {
                let s = sigmoid(d);
                let t = sigmoid(-d);
                8.0 * s * t * t
            }),
            Arc::new(|d: f64| {
                let s = sigmoid(d);
                let t = sigmoid(-d);
                8.0 * s * s * t
            }),
            (0.0, 0.0),
        ),
        Divergence::PearsonChi2 => DivergenceSpec::from_parts(
            "pearson_chi2",
            Arc::new(|u: f64| {
                let r = u - 1.0;
                0.5 * r * r
            }),
            Arc::new(|u: f64| u - 1.0),
            Arc::new(|_u: f64| 1.0),
            Arc::new(|d: f64| d.exp_m1()),
            Arc::new(|d: f64| 0.5 * (2.0 * d).exp_m1()),
            Arc::new(|d: f64| d.exp()),
            Arc::new(|d: f64| (2.0 * d).exp()),
            (0.0, 3.0),
        ),
        Divergence::Neymann => DivergenceSpec::from_parts(
            "neymann",
            Arc::new(|u: f64| {
                let r = u - 1.0;
                r * r / (2.0 * u)
            }),
            Arc::new(|u: f64| 0.5 * (1.0 - 1.0 / (u * u))),
            Arc::new(|u: f64| 1.0 / (u * u * u)),
            Arc::new(|d: f64| -0.5 * (-2.0 * d).exp_m1()),
            Arc::new(|d: f64| -(-d).exp_m1()),
            Arc::new(|d: f64| (-2.0 * d).exp()),
            Arc::new(|d: f64| (-d).exp()),
            (3.0, 0.0),
        ),
        Divergence::SoftenedReverseKl => DivergenceSpec::from_parts(
            "softened_reverse_kl",
            // Normalized form: 2(u+1)·log((u+1)/u) − 4·log2 − (2·log2 − 2)(u − 1),
            // the affine correction making f(1) = f'(1) = 0.
            Arc::new(|u: f64| {
                2.0 * (u + 1.0) * (1.0 / u).ln_1p() - 4.0 * LN_2 - (2.0 * LN_2 - 2.0) * (u - 1.0)
            }),
            Arc::new(|u: f64| {
                if u == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    2.0 * (1.0 / u).ln_1p() - 2.0 / u + 2.0 - 2.0 * LN_2
                }
            }),
            Arc::new(|u: f64| 2.0 / (u * u * (u + 1.0))),
            Arc::new(|d: f64| -2.0 * (-d).exp() - 2.0 * log_sigmoid(d) + 2.0 - 2.0 * LN_2),
            Arc::new(|d: f64| 2.0 * (log_sigmoid(d) + LN_2)),
            Arc::new(|d: f64| 2.0 * (-d).exp() * sigmoid(-d)),
            Arc::new(|d: f64| 2.0 * sigmoid(-d)),
            (2.0, 0.0),
        ),
    }
}

/// Looks up a builtin spec by its string identifier.
pub fn builtin_by_name(name: &str) -> Result<DivergenceSpec> {
    Ok(builtin(Divergence::from_str(name)?))
}

/// All nine builtin specs, in catalog order.
pub fn all_builtins() -> Vec<DivergenceSpec> {
    Divergence::ALL.iter().map(|d| builtin(*d)).collect()
}

/// Scales every function of `spec` by `k > 0`. The result defines `k·D_f`;
/// tail weights (asymptotic exponents) are unchanged.
pub fn scale(spec: &DivergenceSpec, k: f64) -> Result<DivergenceSpec> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Catalog(format!(
            "scale factor must be positive and finite, got {k}"
        )));
    }
    let mul = |g: &ScalarFn| -> ScalarFn {
        let g = Arc::clone(g);
        Arc::new(move |x: f64| k * g(x))
    };
    Ok(DivergenceSpec::from_parts(
        format!("scale({}, {})", spec.name, k),
        mul(&spec.f),
        mul(&spec.f1),
        mul(&spec.f2),
        mul(&spec.a),
        mul(&spec.b),
        mul(&spec.a1),
        mul(&spec.b1),
        spec.tail_weights,
    ))
}

/// Convex-cone combination `α·A + β·B` of two specs, applied to all seven
/// functions. Requires `α, β ≥ 0` and `α + β > 0`.
pub fn combine(
    alpha: f64,
    sa: &DivergenceSpec,
    beta: f64,
    sb: &DivergenceSpec,
) -> Result<DivergenceSpec> {
    if !(alpha.is_finite() && beta.is_finite() && alpha >= 0.0 && beta >= 0.0 && alpha + beta > 0.0)
    {
        return Err(Error::Catalog(format!(
            "combination weights must be nonnegative with positive sum, got ({alpha}, {beta})"
        )));
    }
    let mix = |ga: &ScalarFn, gb: &ScalarFn| -> ScalarFn {
        let ga = Arc::clone(ga);
        let gb = Arc::clone(gb);
        Arc::new(move |x: f64| alpha * ga(x) + beta * gb(x))
    };
    // Dominant asymptotics: a zero-weight side contributes nothing.
    let tails = if alpha == 0.0 {
        sb.tail_weights
    } else if beta == 0.0 {
        sa.tail_weights
    } else {
        (
            sa.tail_weights.0.max(sb.tail_weights.0),
            sa.tail_weights.1.max(sb.tail_weights.1),
        )
    };
    Ok(DivergenceSpec::from_parts(
        format!("combine({}*{} + {}*{})", alpha, sa.name, beta, sb.name),
        mix(&sa.f, &sb.f),
        mix(&sa.f1, &sb.f1),
        mix(&sa.f2, &sb.f2),
        mix(&sa.a, &sb.a),
        mix(&sa.b, &sb.b),
        mix(&sa.a1, &sb.a1),
        mix(&sa.b1, &sb.b1),
        tails,
    ))
}

/// Argument reversal: builds `g` with `D_g(p, q) = D_f(q, p)`.
///
/// Closed forms: `g(u) = u·f(1/u)`, `g'(u) = f(1/u) − f'(1/u)/u`,
/// `g''(u) = f''(1/u)/u³`, and in critic space
///
/// ```text
/// a_g(d) = −b_f(−d)      a_g'(d) = b_f'(−d)
/// b_g(d) = −a_f(−d)      b_g'(d) = a_f'(−d)
/// ```
///
/// At `u = 0` the limits `g(0) = lim f(w)/w = a_f(+∞)` and
/// `g'(0) = −b_f(+∞)` are used.
pub fn reverse(spec: &DivergenceSpec) -> DivergenceSpec {
    let f = Arc::clone(&spec.f);
    let f1 = Arc::clone(&spec.f1);
    let f2 = Arc::clone(&spec.f2);
    let (a, b, a1, b1) = (
        Arc::clone(&spec.a),
        Arc::clone(&spec.b),
        Arc::clone(&spec.a1),
        Arc::clone(&spec.b1),
    );
    let a_lim = spec.a(f64::INFINITY);
    let b_lim = spec.b(f64::INFINITY);
    let (tl, tr) = spec.tail_weights;
    DivergenceSpec::from_parts(
        format!("reverse({})", spec.name),
        Arc::new(move |u: f64| if u == 0.0 { a_lim } else { u * f(1.0 / u) }),
        {
            let f = Arc::clone(&spec.f);
            Arc::new(move |u: f64| {
                if u == 0.0 {
                    -b_lim
                } else {
                    let w = 1.0 / u;
                    f(w) - w * f1(w)
                }
            })
        },
        Arc::new(move |u: f64| f2(1.0 / u) / (u * u * u)),
        Arc::new(move |d: f64| -b(-d)),
        Arc::new(move |d: f64| -a(-d)),
        Arc::new(move |d: f64| b1(-d)),
        Arc::new(move |d: f64| a1(-d)),
        (tr, tl),
    )
}

/// Rescales `spec` so that `f''(1) = 1`. Errors if the curvature at 1 is not
/// positive and finite.
pub fn canonicalize(spec: &DivergenceSpec) -> Result<DivergenceSpec> {
    let c = spec.curvature_at_one;
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Catalog(format!(
            "cannot canonicalize '{}': curvature at 1 is {c}",
            spec.name
        )));
    }
    let mut out = scale(spec, 1.0 / c)?;
    out.name = format!("canonicalize({})", spec.name);
    Ok(out)
}

/// Two-point distribution pair with density ratio `u` at the first point.
///
/// For `u > 1`:  `p = (u, u−1)/(2u−1)`, `q = (1, 2(u−1))/(2u−1)`, and every
/// divergence satisfies `(2u−1)·D_f(p, q) = f(u) + 2(u−1)·f(½)`.
/// For `0 < u < 1`: `p = (u, 2(1−u))/(2−u)`, `q = (1, 1−u)/(2−u)`, with
/// `(2−u)·D_f(p, q) = f(u) + (1−u)·f(2)`.
///
/// `u = 1` is rejected (the two points coincide in ratio and the pair
/// degenerates).
pub fn two_point_construction(u: f64) -> Result<(DiscreteDistribution, DiscreteDistribution)> {
    if !(u.is_finite() && u > 0.0) {
        return Err(Error::Catalog(format!(
            "two-point construction needs finite u > 0, got {u}"
        )));
    }
    if u == 1.0 {
        return Err(Error::Catalog(
            "two-point construction is undefined at u = 1".to_string(),
        ));
    }
    let (p, q) = if u > 1.0 {
        let z = 2.0 * u - 1.0;
        (
            vec![u / z, (u - 1.0) / z],
            vec![1.0 / z, 2.0 * (u - 1.0) / z],
        )
    } else {
        let z = 2.0 - u;
        (
            vec![u / z, 2.0 * (1.0 - u) / z],
            vec![1.0 / z, (1.0 - u) / z],
        )
    };
    Ok((
        DiscreteDistribution::new(p)?,
        DiscreteDistribution::new(q)?,
    ))
}
