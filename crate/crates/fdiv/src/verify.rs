//! Self-check suite: every catalog identity, bound property, expansion, and
//! gradient relation as a named, machine-readable check.
//!
//! Each check measures a worst-case deviation and compares it against its own
//! tolerance; the suite never stops early, so one report shows the health of
//! everything at once. A deliberate fault hook (`Fault::Catalog`) perturbs one
//! second derivative by 1% to prove the suite actually has teeth.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog::{
    builtin, combine, reverse, two_point_construction, Divergence, DivergenceSpec,
};
use crate::dist::{mix, DiscreteDistribution, Distribution, GaussianMixture1D, ParametricFamily};
use crate::error::{Error, Result};
use crate::exact::{self, CriticFunction};
use crate::rng;
use crate::trainer;

/// One named check with its measured worst deviation.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    /// Worst measured deviation, in the units stated by `detail`.
    pub gap: f64,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, pass: bool, gap: f64, detail: String) -> CheckResult {
        CheckResult {
            name: name.to_string(),
            pass,
            gap,
            detail,
        }
    }
}

/// Whole-suite outcome.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub passed: usize,
    pub failed: usize,
    pub all_pass: bool,
}

/// Deliberate fault injection for testing the suite itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Multiplies one catalog second derivative (Jensen-Shannon's) by 1.01.
    Catalog,
}

impl std::str::FromStr for Fault {
    type Err = Error;
    fn from_str(s: &str) -> Result<Fault> {
        match s {
            "none" => Ok(Fault::None),
            "catalog" => Ok(Fault::Catalog),
            other => Err(Error::Config(format!(
                "unknown fault {other:?}; expected 'catalog'"
            ))),
        }
    }
}

/// The nine catalog entries, with the fault applied if requested.
fn suite_specs(fault: Fault) -> Vec<DivergenceSpec> {
    Divergence::ALL
        .iter()
        .map(|&which| {
            let spec = builtin(which);
            if fault == Fault::Catalog && which == Divergence::JensenShannon {
                let orig = spec.clone();
                let name = orig.name().to_string();
                let wrap = |g: fn(&DivergenceSpec, f64) -> f64, s: DivergenceSpec| -> Arc<dyn Fn(f64) -> f64 + Send + Sync> {
                    Arc::new(move |x| g(&s, x))
                };
                DivergenceSpec::from_parts(
                    name,
                    wrap(|s, u| s.f(u), orig.clone()),
                    wrap(|s, u| s.f1(u), orig.clone()),
                    {
                        let s = orig.clone();
                        Arc::new(move |u| 1.01 * s.f2(u))
                    },
                    wrap(|s, d| s.a(d), orig.clone()),
                    wrap(|s, d| s.b(d), orig.clone()),
                    wrap(|s, d| s.a1(d), orig.clone()),
                    wrap(|s, d| s.b1(d), orig),
                    spec.tail_weights(),
                )
            } else {
                spec
            }
        })
        .collect()
}

fn by_name<'a>(specs: &'a [DivergenceSpec], name: &str) -> &'a DivergenceSpec {
    specs
        .iter()
        .find(|s| s.name() == name)
        .expect("suite always holds all nine entries")
}

const U_GRID: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 10.0];
const D_GRID: [f64; 5] = [-3.0, -1.0, 0.0, 1.0, 3.0];

fn log_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| 10f64.powf(-6.0 + 12.0 * k as f64 / (n - 1) as f64))
        .collect()
}

fn random_discrete_pair(rng: &mut ChaCha8Rng) -> (Distribution, Distribution) {
    let n = rng.gen_range(2..=6);
    random_discrete_pair_of_dim(rng, n)
}

fn random_discrete_pair_of_dim(rng: &mut ChaCha8Rng, n: usize) -> (Distribution, Distribution) {
    // Entries bounded away from zero keep every ratio p/q well inside the
    // catalog's stable range.
    let draw = |rng: &mut ChaCha8Rng| {
        let probs: Vec<f64> = (0..n).map(|_| 0.05 + rng.gen::<f64>()).collect();
        let total: f64 = probs.iter().sum();
        Distribution::Discrete(
            DiscreteDistribution::new(probs.into_iter().map(|p| p / total).collect()).unwrap(),
        )
    };
    (draw(rng), draw(rng))
}

fn relative(err: f64, scale: f64) -> f64 {
    err / scale.abs().max(1.0)
}

fn check_normalization(specs: &[DivergenceSpec]) -> CheckResult {
    let mut gap = 0.0f64;
    for s in specs {
        gap = gap.max(s.f(1.0).abs()).max(s.f1(1.0).abs());
    }
    CheckResult::new(
        "catalog_normalization",
        gap < 1e-12,
        gap,
        "max |f(1)|, |f'(1)| over all entries; tolerance 1e-12".into(),
    )
}

fn check_curvature(specs: &[DivergenceSpec]) -> CheckResult {
    let mut gap = 0.0f64;
    for s in specs {
        gap = gap.max((s.f2(1.0) - 1.0).abs());
        gap = gap.max((s.curvature_at_one() - s.f2(1.0)).abs());
    }
    CheckResult::new(
        "catalog_canonical_curvature",
        gap < 1e-12,
        gap,
        "max |f''(1) - 1| over all entries; tolerance 1e-12".into(),
    )
}

fn check_convexity(specs: &[DivergenceSpec]) -> CheckResult {
    let mut min_f2 = f64::INFINITY;
    for s in specs {
        for &u in &log_grid(25) {
            min_f2 = min_f2.min(s.f2(u));
        }
    }
    CheckResult::new(
        "catalog_convexity",
        min_f2 > 0.0,
        min_f2,
        "min f''(u) on log grid u in [1e-6, 1e6]; must stay positive".into(),
    )
}

fn check_derivative_consistency(specs: &[DivergenceSpec]) -> CheckResult {
    let mut gap = 0.0f64;
    for s in specs {
        for &u in &U_GRID {
            let h = 1e-5 * u;
            let fd1 = (s.f(u + h) - s.f(u - h)) / (2.0 * h);
            let fd2 = (s.f1(u + h) - s.f1(u - h)) / (2.0 * h);
            gap = gap.max(relative((fd1 - s.f1(u)).abs(), s.f1(u)));
            gap = gap.max(relative((fd2 - s.f2(u)).abs(), s.f2(u)));
        }
    }
    CheckResult::new(
        "catalog_derivative_consistency",
        gap < 1e-6,
        gap,
        "max relative gap between central differences and f', f''; tolerance 1e-6".into(),
    )
}

fn check_transforms(specs: &[DivergenceSpec]) -> CheckResult {
    let mut gap = 0.0f64;
    for s in specs {
        for &d in &D_GRID {
            let u = d.exp();
            gap = gap.max(relative((s.a(d) - s.f1(u)).abs(), s.a(d)));
            gap = gap.max(relative((s.b(d) - (u * s.f1(u) - s.f(u))).abs(), s.b(d)));
            gap = gap.max(relative((s.b1(d) - s.a1(d) * u).abs(), s.b1(d)));
        }
    }
    CheckResult::new(
        "catalog_transform_identities",
        gap < 1e-12,
        gap,
        "a(d)=f'(e^d), b(d)=e^d f'(e^d)-f(e^d), b'(d)=a'(d)e^d on d grid; tolerance 1e-12"
            .into(),
    )
}

fn check_mean_relations(specs: &[DivergenceSpec]) -> CheckResult {
    let kl = by_name(specs, "kl");
    let rkl = by_name(specs, "reverse_kl");
    let js = by_name(specs, "jensen_shannon");
    let hel = by_name(specs, "squared_hellinger");
    let jef = by_name(specs, "jeffreys");
    let mut gap = 0.0f64;
    for &u in &U_GRID {
        let (k, r) = (kl.f2(u), rkl.f2(u));
        let harmonic = 2.0 / (1.0 / k + 1.0 / r);
        let geometric = (k * r).sqrt();
        let arithmetic = 0.5 * (k + r);
        gap = gap.max(relative((js.f2(u) - harmonic).abs(), harmonic));
        gap = gap.max(relative((hel.f2(u) - geometric).abs(), geometric));
        gap = gap.max(relative((jef.f2(u) - arithmetic).abs(), arithmetic));
    }
    CheckResult::new(
        "catalog_mean_relations",
        gap < 1e-12,
        gap,
        "f'' of JS/Hellinger/Jeffreys vs harmonic/geometric/arithmetic mean of KL and \
         reverse-KL f''; tolerance 1e-12"
            .into(),
    )
}

fn check_nonneg_f(specs: &[DivergenceSpec]) -> CheckResult {
    let mut min_off_one = f64::INFINITY;
    for s in specs {
        for &u in &log_grid(25) {
            if (u - 1.0).abs() > 1e-9 {
                min_off_one = min_off_one.min(s.f(u));
            }
        }
    }
    CheckResult::new(
        "catalog_nonnegativity",
        min_off_one > 0.0,
        min_off_one,
        "min f(u) away from u=1; convexity plus normalization forces it positive".into(),
    )
}

fn check_reversal(specs: &[DivergenceSpec]) -> CheckResult {
    let mut gap = 0.0f64;
    let pairs = [
        ("kl", "reverse_kl"),
        ("pearson_chi2", "neymann"),
        ("jensen_shannon", "jensen_shannon"),
    ];
    for (from, to) in pairs {
        let rev = reverse(by_name(specs, from));
        let want = by_name(specs, to);
        for &u in &[0.2, 0.7, 1.0, 2.0, 5.0] {
            gap = gap.max(relative((rev.f(u) - want.f(u)).abs(), want.f(u)));
            gap = gap.max(relative((rev.f2(u) - want.f2(u)).abs(), want.f2(u)));
        }
        for &d in &D_GRID {
            gap = gap.max(relative((rev.a(d) - want.a(d)).abs(), want.a(d)));
            gap = gap.max(relative((rev.b(d) - want.b(d)).abs(), want.b(d)));
        }
    }
    // Involution: reversing twice restores the original.
    for s in specs {
        let twice = reverse(&reverse(s));
        for &u in &[0.3, 1.0, 3.0] {
            gap = gap.max(relative((twice.f(u) - s.f(u)).abs(), s.f(u)));
        }
        for &d in &[-1.5, 0.0, 2.0] {
            gap = gap.max(relative((twice.a(d) - s.a(d)).abs(), s.a(d)));
            gap = gap.max(relative((twice.b1(d) - s.b1(d)).abs(), s.b1(d)));
        }
    }
    CheckResult::new(
        "catalog_reversal",
        gap < 1e-12,
        gap,
        "argument-swapped entries (KL<->reverse KL, Pearson<->Neymann, JS fixed) and \
         double-reversal involution; tolerance 1e-12"
            .into(),
    )
}

fn check_linearity(specs: &[DivergenceSpec], rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let kl = by_name(specs, "kl");
    let rkl = by_name(specs, "reverse_kl");
    let jef = by_name(specs, "jeffreys");
    let mut gap = 0.0f64;
    let half_sum = combine(0.5, kl, 0.5, rkl)?;
    for &u in &U_GRID {
        gap = gap.max(relative((half_sum.f2(u) - jef.f2(u)).abs(), jef.f2(u)));
    }
    let js = by_name(specs, "jensen_shannon");
    let mixed = combine(0.3, kl, 0.7, js)?;
    for _ in 0..5 {
        let (p, q) = random_discrete_pair(rng);
        let lhs = exact::divergence(&mixed, &p, &q)?;
        let rhs = 0.3 * exact::divergence(kl, &p, &q)? + 0.7 * exact::divergence(js, &p, &q)?;
        gap = gap.max(relative((lhs - rhs).abs(), rhs));
    }
    Ok(CheckResult::new(
        "divergence_linearity",
        gap < 1e-10,
        gap,
        "combined entries evaluate to the same linear combination of divergences; \
         tolerance 1e-10"
            .into(),
    ))
}

fn check_divergence_nonneg(specs: &[DivergenceSpec], rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut min_d = f64::INFINITY;
    let mut max_self = 0.0f64;
    for _ in 0..20 {
        let (p, q) = random_discrete_pair(rng);
        for s in specs {
            min_d = min_d.min(exact::divergence(s, &p, &q)?);
            max_self = max_self.max(exact::divergence(s, &p, &p)?.abs());
        }
    }
    let pass = min_d > -1e-10 && max_self < 1e-10;
    Ok(CheckResult::new(
        "divergence_nonnegativity",
        pass,
        min_d.min(-max_self),
        "min divergence over random pairs (must be >= -1e-10) and max self-divergence \
         (must be < 1e-10)"
            .into(),
    ))
}

fn check_tightness(specs: &[DivergenceSpec], rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut gap_discrete = 0.0f64;
    for _ in 0..20 {
        let (p, q) = random_discrete_pair(rng);
        let d_star = exact::optimal_critic(&p, &q)?;
        for s in specs {
            let dv = exact::divergence(s, &p, &q)?;
            let bv = exact::bound_value(s, &p, &q, &d_star)?;
            gap_discrete = gap_discrete.max((dv - bv).abs());
        }
    }
    let mut gap_quad = 0.0f64;
    for (p, q) in gmm_pairs() {
        let d_star = exact::optimal_critic(&p, &q)?;
        for s in specs {
            let dv = exact::divergence(s, &p, &q)?;
            let bv = exact::bound_value(s, &p, &q, &d_star)?;
            gap_quad = gap_quad.max((dv - bv).abs());
        }
    }
    let pass = gap_discrete < 1e-9 && gap_quad < 1e-7;
    Ok(CheckResult::new(
        "bound_tightness",
        pass,
        gap_discrete.max(gap_quad),
        format!(
            "bound at the optimal critic vs divergence: discrete gap {gap_discrete:.3e} \
             (tol 1e-9), quadrature gap {gap_quad:.3e} (tol 1e-7)"
        ),
    ))
}

fn gmm_pairs() -> Vec<(Distribution, Distribution)> {
    let g = |w: &[f64], m: &[f64], s: &[f64]| {
        Distribution::Gmm1d(GaussianMixture1D::new(w.to_vec(), m.to_vec(), s.to_vec()).unwrap())
    };
    vec![
        (g(&[1.0], &[0.0], &[1.0]), g(&[1.0], &[1.0], &[1.2])),
        (
            g(&[0.5, 0.5], &[-1.0, 1.0], &[0.7, 0.7]),
            g(&[1.0], &[0.0], &[1.5]),
        ),
        (
            g(&[0.3, 0.7], &[0.0, 2.0], &[1.0, 0.8]),
            g(&[0.6, 0.4], &[0.5, 1.5], &[1.1, 0.9]),
        ),
    ]
}

fn check_dominance(specs: &[DivergenceSpec], rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut worst = f64::NEG_INFINITY;
    let (p, q) = random_discrete_pair(rng);
    let n = match &p {
        Distribution::Discrete(d) => d.len(),
        Distribution::Gmm1d(_) => unreachable!("random pairs are discrete"),
    };
    for s in specs {
        let dv = exact::divergence(s, &p, &q)?;
        for _ in 0..50 {
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let bv = exact::bound_value(s, &p, &q, &CriticFunction::Tabular(values))?;
            worst = worst.max(bv - dv);
        }
    }
    let pairs = gmm_pairs();
    let (gp, gq) = (&pairs[0].0, &pairs[0].1);
    for s in specs {
        let dv = exact::divergence(s, gp, gq)?;
        for _ in 0..5 {
            // Bounded random critics: |d| stays below ~3 on the whole line,
            // so the bound integrand decays with the densities and every
            // seed produces a quadrature-friendly integral.
            let (c0, c1, c2) = (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let critic = CriticFunction::Func(Box::new(move |x: f64| {
                c0 + c1 * x.tanh() + c2 * (x / 3.0).tanh()
            }));
            let bv = exact::bound_value(s, gp, gq, &critic)?;
            worst = worst.max(bv - dv);
        }
    }
    Ok(CheckResult::new(
        "bound_dominance",
        worst <= 1e-9,
        worst,
        "max (bound - divergence) over random critics; must not exceed 1e-9".into(),
    ))
}

fn check_softening(specs: &[DivergenceSpec], rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let pearson = by_name(specs, "pearson_chi2");
    let neymann = by_name(specs, "neymann");
    let lecam = by_name(specs, "le_cam");
    let rkl = by_name(specs, "reverse_kl");
    let srkl = by_name(specs, "softened_reverse_kl");
    let mut gap = 0.0f64;
    for _ in 0..20 {
        let (p, q) = random_discrete_pair(rng);
        let m = mix(&p, &q, 0.5)?;
        let lc = exact::divergence(lecam, &p, &q)?;
        gap = gap.max((4.0 * exact::divergence(pearson, &p, &m)? - lc).abs());
        gap = gap.max((4.0 * exact::divergence(neymann, &m, &q)? - lc).abs());
        let soft = exact::divergence(srkl, &p, &q)?;
        gap = gap.max((4.0 * exact::divergence(rkl, &p, &m)? - soft).abs());
    }
    Ok(CheckResult::new(
        "softening_relations",
        gap < 1e-9,
        gap,
        "q-softened Pearson and p-softened Neymann vs Le Cam; q-softened reverse KL vs \
         its softened entry; tolerance 1e-9"
            .into(),
    ))
}

fn check_two_point(specs: &[DivergenceSpec]) -> Result<CheckResult> {
    let mut gap = 0.0f64;
    for s in specs {
        for &u in &[1.5, 2.0, 5.0] {
            let (p, q) = two_point_construction(u)?;
            let dv = exact::divergence(
                s,
                &Distribution::Discrete(p),
                &Distribution::Discrete(q),
            )?;
            let lhs = (2.0 * u - 1.0) * dv;
            let rhs = s.f(u) + 2.0 * (u - 1.0) * s.f(0.5);
            gap = gap.max(relative((lhs - rhs).abs(), rhs));
        }
        for &u in &[0.2, 0.5] {
            let (p, q) = two_point_construction(u)?;
            let dv = exact::divergence(
                s,
                &Distribution::Discrete(p),
                &Distribution::Discrete(q),
            )?;
            let lhs = (2.0 - u) * dv;
            let rhs = s.f(u) + (1.0 - u) * s.f(2.0);
            gap = gap.max(relative((lhs - rhs).abs(), rhs));
        }
    }
    Ok(CheckResult::new(
        "two_point_identity",
        gap < 1e-12,
        gap,
        "two-point construction identity at u in {1.5, 2, 5} and {0.2, 0.5}; \
         tolerance 1e-12"
            .into(),
    ))
}

/// Fits the convergence order of the expansion gap as epsilon shrinks;
/// returns the minimum pairwise order, or +inf when gaps sit at the
/// floating-point floor (an exactly-quadratic entry).
fn taylor_order(spec: &DivergenceSpec, q: &Distribution, v: &[f64]) -> Result<f64> {
    let eps = [0.02, 0.01, 0.005];
    let mut gaps = Vec::with_capacity(eps.len());
    for &e in &eps {
        let check = exact::taylor_gap(spec, q, v, e)?;
        gaps.push((check.exact - check.quadratic).abs().max(0.0));
    }
    let floor = 1e-13;
    if gaps.iter().all(|g| *g < floor) {
        return Ok(f64::INFINITY);
    }
    let mut min_order = f64::INFINITY;
    for i in 0..eps.len() - 1 {
        let (g1, g2) = (gaps[i].max(floor), gaps[i + 1].max(floor));
        min_order = min_order.min((g1 / g2).ln() / (eps[i] / eps[i + 1]).ln());
    }
    Ok(min_order)
}

fn check_taylor(specs: &[DivergenceSpec]) -> Result<CheckResult> {
    let q = Distribution::Discrete(DiscreteDistribution::new(vec![0.5, 0.3, 0.2])?);
    let v = [1.0, -0.4, -0.6];
    let mut min_order = f64::INFINITY;
    let mut detail = String::new();
    for s in specs {
        let order = taylor_order(s, &q, &v)?;
        if !detail.is_empty() {
            detail.push_str(", ");
        }
        detail.push_str(&format!("{}={order:.2}", s.name()));
        min_order = min_order.min(order);
    }
    Ok(CheckResult::new(
        "taylor_expansion_order",
        min_order >= 2.7,
        min_order,
        format!("measured gap order per entry (must be >= 2.7): {detail}"),
    ))
}

fn check_parametric_taylor(specs: &[DivergenceSpec]) -> Result<CheckResult> {
    let kl = by_name(specs, "kl");
    let family = ParametricFamily::GaussianMean { stddev: 1.0 };
    let eps = 0.01;
    let check = exact::parametric_taylor(kl, &family, &[0.0], &[1.0], eps)?;
    // Closed form: the divergence between the two Gaussians is eps^2/2.
    let gap = (check.quadratic - eps * eps / 2.0).abs();
    Ok(CheckResult::new(
        "parametric_taylor_quadratic",
        gap < 1e-12,
        gap,
        "Fisher quadratic term vs the closed-form Gaussian mean-shift value; \
         tolerance 1e-12"
            .into(),
    ))
}

fn check_gradient_matching(specs: &[DivergenceSpec], rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut gap = 0.0f64;
    let kl = by_name(specs, "kl");
    let family = ParametricFamily::GaussianMean { stddev: 1.0 };
    let p = Distribution::Gmm1d(GaussianMixture1D::normal(0.0, 1.0)?);
    let report = trainer::gradient_matching_check(kl, &p, &family, &[0.5])?;
    gap = gap.max(report.gap);
    gap = gap.max((report.bound_gradient[0] - 0.5).abs());

    for name in ["jensen_shannon", "squared_hellinger", "kl"] {
        let s = by_name(specs, name);
        let family = ParametricFamily::SoftmaxDiscrete { support: 3 };
        let lambda: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let (p, _) = random_discrete_pair_of_dim(rng, 3);
        let report = trainer::gradient_matching_check(s, &p, &family, &lambda)?;
        gap = gap.max(report.gap);
    }
    Ok(CheckResult::new(
        "gradient_matching",
        gap < 1e-4,
        gap,
        "bound-side generator gradient at the optimal critic vs finite differences of \
         the divergence; tolerance 1e-4"
            .into(),
    ))
}

fn check_generalized_kl(specs: &[DivergenceSpec], rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let kl = by_name(specs, "kl");
    let mut min_d = f64::INFINITY;
    for _ in 0..10 {
        let n = rng.gen_range(2..=5);
        let draw = |rng: &mut ChaCha8Rng| -> Result<Distribution> {
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
            Ok(Distribution::Discrete(DiscreteDistribution::unnormalized(
                w,
            )?))
        };
        let (p, q) = (draw(rng)?, draw(rng)?);
        min_d = min_d.min(exact::divergence(kl, &p, &q)?);
    }
    Ok(CheckResult::new(
        "generalized_kl_nonnegativity",
        min_d > -1e-12,
        min_d,
        "KL entry applied to unnormalized positive measures stays nonnegative".into(),
    ))
}

/// Runs the suite. `filter` keeps checks whose name contains the substring
/// (skipped checks are not executed); `fault` injects the deliberate catalog
/// perturbation; `seed` drives the random pairs and critics.
pub fn run_suite(filter: Option<&str>, fault: Fault, seed: u64) -> VerifyReport {
    let specs = suite_specs(fault);
    let mut rng = rng::substream(seed, rng::STREAM_VERIFY);
    let want = |name: &str| filter.map_or(true, |f| name.contains(f));

    let mut results: Vec<CheckResult> = Vec::new();
    let push = |results: &mut Vec<CheckResult>, name: &str, out: Result<CheckResult>| {
        results.push(out.unwrap_or_else(|e| {
            CheckResult::new(name, false, f64::NAN, format!("check errored: {e}"))
        }));
    };

    macro_rules! gate {
        ($name:literal, $body:expr) => {
            if want($name) {
                push(&mut results, $name, $body);
            }
        };
    }

    gate!("catalog_normalization", Ok(check_normalization(&specs)));
    gate!("catalog_canonical_curvature", Ok(check_curvature(&specs)));
    gate!("catalog_convexity", Ok(check_convexity(&specs)));
    gate!(
        "catalog_derivative_consistency",
        Ok(check_derivative_consistency(&specs))
    );
    gate!("catalog_transform_identities", Ok(check_transforms(&specs)));
    gate!("catalog_mean_relations", Ok(check_mean_relations(&specs)));
    gate!("catalog_nonnegativity", Ok(check_nonneg_f(&specs)));
    gate!("catalog_reversal", Ok(check_reversal(&specs)));
    gate!("divergence_linearity", check_linearity(&specs, &mut rng));
    gate!(
        "divergence_nonnegativity",
        check_divergence_nonneg(&specs, &mut rng)
    );
    gate!("bound_tightness", check_tightness(&specs, &mut rng));
    gate!("bound_dominance", check_dominance(&specs, &mut rng));
    gate!("softening_relations", check_softening(&specs, &mut rng));
    gate!("two_point_identity", check_two_point(&specs));
    gate!("taylor_expansion_order", check_taylor(&specs));
    gate!(
        "parametric_taylor_quadratic",
        check_parametric_taylor(&specs)
    );
    gate!(
        "gradient_matching",
        check_gradient_matching(&specs, &mut rng)
    );
    gate!(
        "generalized_kl_nonnegativity",
        check_generalized_kl(&specs, &mut rng)
    );

    let passed = results.iter().filter(|c| c.pass).count();
    let failed = results.len() - passed;
    VerifyReport {
        all_pass: failed == 0 && !results.is_empty(),
        passed,
        failed,
        checks: results,
    }
}
