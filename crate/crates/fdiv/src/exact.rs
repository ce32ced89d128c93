//! Exact (non-stochastic) evaluation of divergences and variational bounds.
//!
//! Discrete distributions are handled by direct summation; Gaussian mixtures
//! by adaptive quadrature over their joint support window. Divergences that
//! are genuinely infinite come back as `+∞` rather than an error so callers
//! can treat blow-up as a signal.

use crate::catalog::DivergenceSpec;
use crate::dist::{Distribution, GaussianMixture1D, ParametricFamily, SupportPoint};
use crate::error::{Error, Result};
use crate::quad::{self, QuadConfig};

/// A critic (log-ratio model) in a form the exact engine can evaluate.
pub enum CriticFunction {
    /// One value per discrete support index.
    Tabular(Vec<f64>),
    /// The same value everywhere; valid for either kind.
    Constant(f64),
    /// A pointwise function on the real line.
    Func(Box<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for CriticFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CriticFunction::Tabular(v) => f.debug_tuple("Tabular").field(v).finish(),
            CriticFunction::Constant(c) => f.debug_tuple("Constant").field(c).finish(),
            CriticFunction::Func(_) => f.write_str("Func(..)"),
        }
    }
}

impl CriticFunction {
    fn at_index(&self, i: usize, n: usize) -> Result<f64> {
        match self {
            CriticFunction::Tabular(v) => {
                if v.len() != n {
                    Err(Error::MixedKinds(format!(
                        "tabular critic has {} entries, support has {n}",
                        v.len()
                    )))
                } else {
                    Ok(v[i])
                }
            }
            CriticFunction::Constant(c) => Ok(*c),
            CriticFunction::Func(_) => Err(Error::MixedKinds(
                "pointwise critic applied to a discrete distribution".into(),
            )),
        }
    }

    fn at_point(&self, x: f64) -> Result<f64> {
        match self {
            CriticFunction::Func(f) => Ok(f(x)),
            CriticFunction::Constant(c) => Ok(*c),
            CriticFunction::Tabular(_) => Err(Error::MixedKinds(
                "tabular critic applied to a continuous distribution".into(),
            )),
        }
    }
}

/// Joint integration window covering both mixtures.
fn joint_bounds(p: &GaussianMixture1D, q: &GaussianMixture1D) -> (f64, f64) {
    let (plo, phi) = p.support_bounds();
    let (qlo, qhi) = q.support_bounds();
    (plo.min(qlo), phi.max(qhi))
}

/// Pointwise bound integrand `p·a(d) − q·b(d)` from log-densities.
///
/// Underflowed densities contribute nothing: when `exp(lp)` is zero the true
/// product is below the subnormal range for every supported generator, and
/// likewise for `exp(lq)`. A NaN from `∞ − ∞` means both sides overflowed,
/// which only happens when the integrand is astronomically large, so it is
/// mapped to `+∞` and caught by the blow-up detector.
fn bound_term(spec: &DivergenceSpec, lp: f64, lq: f64, d: f64) -> f64 {
    let p = lp.exp();
    let q = lq.exp();
    let pa = if p == 0.0 { 0.0 } else { p * spec.a(d) };
    let qb = if q == 0.0 { 0.0 } else { q * spec.b(d) };
    let t = pa - qb;
    if t.is_nan() {
        f64::INFINITY
    } else {
        t
    }
}

/// Evaluates `D_f(p, q)` exactly. Returns `+∞` for divergent pairs.
///
/// Discrete inputs may be unnormalized measures; the summation form of the
/// divergence extends to them and stays nonnegative with equality only at
/// `p = q`.
pub fn divergence(spec: &DivergenceSpec, p: &Distribution, q: &Distribution) -> Result<f64> {
    p.check_same_kind(q)?;
    match (p, q) {
        (Distribution::Discrete(pd), Distribution::Discrete(qd)) => {
            let mut total = 0.0;
            for (pi, qi) in pd.probs().iter().zip(qd.probs()) {
                total += qi * spec.f(pi / qi);
            }
            Ok(total)
        }
        (Distribution::Gmm1d(pg), Distribution::Gmm1d(qg)) => {
            let (lo, hi) = joint_bounds(pg, qg);
            let r = quad::integrate(
                |x| {
                    let lp = pg.log_density(x);
                    let lq = qg.log_density(x);
                    bound_term(spec, lp, lq, lp - lq)
                },
                lo,
                hi,
                &QuadConfig::default(),
            )?;
            Ok(if r.divergent { f64::INFINITY } else { r.value })
        }
        _ => unreachable!("kind check above"),
    }
}

/// The critic at which the bound is tight: `d*(x) = log p(x) − log q(x)`.
pub fn optimal_critic(p: &Distribution, q: &Distribution) -> Result<CriticFunction> {
    p.check_same_kind(q)?;
    match (p, q) {
        (Distribution::Discrete(pd), Distribution::Discrete(qd)) => Ok(CriticFunction::Tabular(
            (0..pd.len())
                .map(|i| pd.log_density(i) - qd.log_density(i))
                .collect(),
        )),
        (Distribution::Gmm1d(pg), Distribution::Gmm1d(qg)) => {
            let (pg, qg) = (pg.clone(), qg.clone());
            Ok(CriticFunction::Func(Box::new(move |x| {
                pg.log_density(x) - qg.log_density(x)
            })))
        }
        _ => unreachable!("kind check above"),
    }
}

/// Evaluates the variational bound `E_f(p, q, d) = ∫ p·a(d) − ∫ q·b(d)`
/// exactly for a given critic. Never exceeds `divergence(spec, p, q)`, with
/// equality at the optimal critic.
pub fn bound_value(
    spec: &DivergenceSpec,
    p: &Distribution,
    q: &Distribution,
    critic: &CriticFunction,
) -> Result<f64> {
    p.check_same_kind(q)?;
    match (p, q) {
        (Distribution::Discrete(pd), Distribution::Discrete(qd)) => {
            let n = pd.len();
            let mut total = 0.0;
            for i in 0..n {
                let d = critic.at_index(i, n)?;
                let (a, b) = (spec.a(d), spec.b(d));
                if !(a.is_finite() && b.is_finite()) {
                    return Err(Error::Evaluation { d });
                }
                total += pd.density(i) * a - qd.density(i) * b;
            }
            Ok(total)
        }
        (Distribution::Gmm1d(pg), Distribution::Gmm1d(qg)) => {
            // Probe once so a kind-mismatched critic surfaces as an error
            // rather than vanishing inside the integrand closure.
            critic.at_point(0.0)?;
            let (lo, hi) = joint_bounds(pg, qg);
            let r = quad::integrate(
                |x| {
                    let d = critic.at_point(x).expect("probed above");
                    bound_term(spec, pg.log_density(x), qg.log_density(x), d)
                },
                lo,
                hi,
                &QuadConfig::default(),
            )?;
            Ok(if r.divergent { f64::INFINITY } else { r.value })
        }
        _ => unreachable!("kind check above"),
    }
}

/// Both sides of the small-perturbation comparison: the exact divergence and
/// its quadratic approximation.
#[derive(Debug, Clone, Copy)]
pub struct TaylorCheck {
    /// `D_f(q, q + ε·v)` evaluated exactly.
    pub exact: f64,
    /// `½ ε² f''(1) · (squared perturbation norm under q)`.
    pub quadratic: f64,
}

impl TaylorCheck {
    pub fn gap(&self) -> f64 {
        (self.exact - self.quadratic).abs()
    }
}

/// Compares `D_f(q, q + ε·v)` against its quadratic approximation.
///
/// For discrete `q` the perturbation `v` acts on probabilities; for mixtures
/// it acts on component weights. It must sum to zero and keep the perturbed
/// distribution valid.
pub fn taylor_gap(
    spec: &DivergenceSpec,
    q: &Distribution,
    v: &[f64],
    eps: f64,
) -> Result<TaylorCheck> {
    if !eps.is_finite() {
        return Err(Error::Config(format!(
            "perturbation size must be finite, got {eps}"
        )));
    }
    let vsum: f64 = v.iter().sum();
    if vsum.abs() > 1e-9 {
        return Err(Error::Config(format!(
            "perturbation must sum to zero, got {vsum}"
        )));
    }
    match q {
        Distribution::Discrete(qd) => {
            if v.len() != qd.len() {
                return Err(Error::Config(format!(
                    "perturbation has {} entries, support has {}",
                    v.len(),
                    qd.len()
                )));
            }
            let perturbed: Vec<f64> = qd
                .probs()
                .iter()
                .zip(v)
                .map(|(qi, vi)| qi + eps * vi)
                .collect();
            let qp = Distribution::Discrete(crate::dist::DiscreteDistribution::new(perturbed)?);
            let exact = divergence(spec, q, &qp)?;
            let norm: f64 = qd
                .probs()
                .iter()
                .zip(v)
                .map(|(qi, vi)| vi * vi / qi)
                .sum();
            let quadratic = 0.5 * eps * eps * spec.curvature_at_one() * norm;
            Ok(TaylorCheck { exact, quadratic })
        }
        Distribution::Gmm1d(qg) => {
            if v.len() != qg.n_components() {
                return Err(Error::Config(format!(
                    "perturbation has {} entries, mixture has {} components",
                    v.len(),
                    qg.n_components()
                )));
            }
            let weights: Vec<f64> = qg.weights().iter().zip(v).map(|(w, vi)| w + eps * vi).collect();
            let qp = Distribution::Gmm1d(GaussianMixture1D::new(
                weights,
                qg.means().to_vec(),
                qg.stddevs().to_vec(),
            )?);
            let exact = divergence(spec, q, &qp)?;
            // ∫ (Σ_k v_k φ_k(x))² / q(x) dx with φ_k the component densities.
            let components: Vec<GaussianMixture1D> = qg
                .means()
                .iter()
                .zip(qg.stddevs())
                .map(|(&m, &s)| GaussianMixture1D::normal(m, s).expect("valid component"))
                .collect();
            let v = v.to_vec();
            let (lo, hi) = qg.support_bounds();
            let qg2 = qg.clone();
            let norm = quad::integrate(
                move |x| {
                    let q = qg2.density(x);
                    if q == 0.0 {
                        return 0.0;
                    }
                    let vd: f64 = components
                        .iter()
                        .zip(&v)
                        .map(|(c, vi)| vi * c.density(x))
                        .sum();
                    vd * vd / q
                },
                lo,
                hi,
                &QuadConfig::default(),
            )?;
            if norm.divergent {
                return Err(Error::Integration(
                    "perturbation norm integral diverged".into(),
                ));
            }
            let quadratic = 0.5 * eps * eps * spec.curvature_at_one() * norm.value;
            Ok(TaylorCheck { exact, quadratic })
        }
    }
}

/// Compares `D_f(q_λ, q_{λ+ε·v})` against `½ ε² f''(1) vᵀ F(λ) v` with `F`
/// the information matrix of the family.
pub fn parametric_taylor(
    spec: &DivergenceSpec,
    family: &ParametricFamily,
    lambda: &[f64],
    v: &[f64],
    eps: f64,
) -> Result<TaylorCheck> {
    if !eps.is_finite() {
        return Err(Error::Config(format!(
            "perturbation size must be finite, got {eps}"
        )));
    }
    family.check_dim(lambda)?;
    if v.len() != lambda.len() {
        return Err(Error::Config(format!(
            "direction has {} entries, parameter has {}",
            v.len(),
            lambda.len()
        )));
    }
    let moved: Vec<f64> = lambda.iter().zip(v).map(|(l, vi)| l + eps * vi).collect();
    let q0 = family.distribution(lambda)?;
    let q1 = family.distribution(&moved)?;
    let exact = divergence(spec, &q0, &q1)?;
    let fisher = crate::dist::fisher_matrix(family, lambda)?;
    let mut quad_form = 0.0;
    for (i, row) in fisher.iter().enumerate() {
        for (j, fij) in row.iter().enumerate() {
            quad_form += v[i] * fij * v[j];
        }
    }
    let quadratic = 0.5 * eps * eps * spec.curvature_at_one() * quad_form;
    Ok(TaylorCheck { exact, quadratic })
}

/// Exact gradient of `λ ↦ D_f(p, q_λ)`:
/// `∂D/∂λ_i = −∫ (∂q_λ/∂λ_i)(x) · b(d*_λ(x)) dx` with `d*_λ = log p − log q_λ`.
pub fn exact_generator_gradient(
    spec: &DivergenceSpec,
    p: &Distribution,
    family: &ParametricFamily,
    lambda: &[f64],
) -> Result<Vec<f64>> {
    let q = family.distribution(lambda)?;
    p.check_same_kind(&q)?;
    match (&q, p) {
        (Distribution::Discrete(qd), Distribution::Discrete(pd)) => {
            let n = qd.len();
            let mut grad = vec![0.0; lambda.len()];
            for k in 0..n {
                let d = pd.log_density(k) - qd.log_density(k);
                let b = spec.b(d);
                let dq = family.density_grad(lambda, SupportPoint::Discrete(k))?;
                for (gi, dqi) in grad.iter_mut().zip(dq) {
                    *gi -= dqi * b;
                }
            }
            Ok(grad)
        }
        (Distribution::Gmm1d(qg), Distribution::Gmm1d(pg)) => {
            let (lo, hi) = joint_bounds(pg, qg);
            let dim = lambda.len();
            let mut grad = vec![0.0; dim];
            for (i, gi) in grad.iter_mut().enumerate() {
                let r = quad::integrate(
                    |x| {
                        if qg.density(x) == 0.0 {
                            return 0.0;
                        }
                        let d = pg.log_density(x) - qg.log_density(x);
                        let dq = family
                            .density_grad(lambda, SupportPoint::Continuous(x))
                            .expect("dimension checked");
                        -dq[i] * spec.b(d)
                    },
                    lo,
                    hi,
                    &QuadConfig::default(),
                )?;
                if r.divergent {
                    return Err(Error::Integration(format!(
                        "gradient component {i} diverged"
                    )));
                }
                *gi = r.value;
            }
            Ok(grad)
        }
        _ => unreachable!("kind check above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{builtin, Divergence};
    use crate::dist::DiscreteDistribution;

    fn disc(probs: &[f64]) -> Distribution {
        Distribution::Discrete(DiscreteDistribution::new(probs.to_vec()).unwrap())
    }

    fn gauss(mean: f64, sd: f64) -> Distribution {
        Distribution::Gmm1d(GaussianMixture1D::normal(mean, sd).unwrap())
    }

    fn half_half() -> (Distribution, Distribution) {
        (disc(&[0.5, 0.5]), disc(&[0.25, 0.75]))
    }

    #[test]
    fn test_kl_discrete_matches_direct_sum() {
        let (p, q) = half_half();
        let got = divergence(&builtin(Divergence::Kl), &p, &q).unwrap();
        // Independent form: Σ p ln(p/q).
        let oracle = 0.5 * (0.5f64 / 0.25).ln() + 0.5 * (0.5f64 / 0.75).ln();
        assert!((got - oracle).abs() < 1e-15, "{got} vs {oracle}");
        assert!((got - 0.143_841_036_225_890_4).abs() < 1e-13);
    }

    #[test]
    fn test_pearson_discrete_value() {
        let (p, q) = half_half();
        let got = divergence(&builtin(Divergence::PearsonChi2), &p, &q).unwrap();
        // Independent form: ½ Σ (p−q)²/q.
        let oracle = 0.5 * (0.0625 / 0.25 + 0.0625 / 0.75);
        assert!((got - oracle).abs() < 1e-15);
        assert!((got - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn test_squared_hellinger_discrete_value() {
        let (p, q) = half_half();
        let got = divergence(&builtin(Divergence::SquaredHellinger), &p, &q).unwrap();
        // Independent form: 2 Σ (√p − √q)².
        let oracle = 2.0
            * ((0.5f64.sqrt() - 0.25f64.sqrt()).powi(2)
                + (0.5f64.sqrt() - 0.75f64.sqrt()).powi(2));
        assert!((got - oracle).abs() < 1e-15);
    }

    #[test]
    fn test_identical_arguments_give_zero() {
        let p = disc(&[0.2, 0.3, 0.5]);
        let g = gauss(0.7, 1.3);
        for which in Divergence::ALL {
            let spec = builtin(which);
            assert!(
                divergence(&spec, &p, &p).unwrap().abs() <= 1e-15,
                "{which} discrete"
            );
            assert!(
                divergence(&spec, &g, &g).unwrap().abs() <= 1e-10,
                "{which} gmm"
            );
        }
    }

    #[test]
    fn test_jensen_shannon_symmetry() {
        let spec = builtin(Divergence::JensenShannon);
        let (p, q) = half_half();
        let fwd = divergence(&spec, &p, &q).unwrap();
        let bwd = divergence(&spec, &q, &p).unwrap();
        assert!((fwd - bwd).abs() < 1e-15);
        assert!(fwd > 0.0 && fwd < 2.0 * std::f64::consts::LN_2);
    }

    #[test]
    fn test_gaussian_kl_closed_form() {
        // KL(N(μ1,σ1) ‖ N(μ2,σ2)) = ln(σ2/σ1) + (σ1² + (μ1−μ2)²)/(2σ2²) − ½.
        let spec = builtin(Divergence::Kl);
        let got = divergence(&spec, &gauss(0.0, 1.0), &gauss(3.0, 2.0)).unwrap();
        let want = (2.0f64).ln() + (1.0 + 9.0) / 8.0 - 0.5;
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");

        let got = divergence(&spec, &gauss(1.0, 1.0), &gauss(0.0, 1.0)).unwrap();
        assert!((got - 0.5).abs() < 1e-10, "{got}");
    }

    #[test]
    fn test_pearson_blow_up_is_infinite() {
        // p²/q ∝ exp(x²) when the q-side is too narrow: genuinely divergent.
        let spec = builtin(Divergence::PearsonChi2);
        let got = divergence(&spec, &gauss(0.0, 1.0), &gauss(0.0, 0.5)).unwrap();
        assert_eq!(got, f64::INFINITY);
    }

    #[test]
    fn test_unnormalized_generalized_divergence() {
        // Generalized form on measures: nonnegative, zero only at equality.
        let spec = builtin(Divergence::Kl);
        let m1 = Distribution::Discrete(
            DiscreteDistribution::unnormalized(vec![0.4, 0.9, 0.1]).unwrap(),
        );
        let m2 = Distribution::Discrete(
            DiscreteDistribution::unnormalized(vec![0.2, 1.1, 0.3]).unwrap(),
        );
        let d = divergence(&spec, &m1, &m2).unwrap();
        assert!(d > 0.0);
        assert!(divergence(&spec, &m1, &m1).unwrap().abs() <= 1e-15);
        // Frozen independent evaluation of Σ [p ln(p/q) − p + q].
        let oracle: f64 = [(0.4, 0.2), (0.9, 1.1), (0.1, 0.3)]
            .iter()
            .map(|&(p, q): &(f64, f64)| p * (p / q).ln() - p + q)
            .sum();
        assert!((d - oracle).abs() < 1e-15);
    }

    #[test]
    fn test_mixed_kinds_rejected() {
        let spec = builtin(Divergence::Kl);
        let p = disc(&[0.5, 0.5]);
        let g = gauss(0.0, 1.0);
        assert!(matches!(
            divergence(&spec, &p, &g),
            Err(Error::MixedKinds(_))
        ));
        assert!(matches!(
            divergence(&spec, &disc(&[0.5, 0.5]), &disc(&[0.2, 0.3, 0.5])),
            Err(Error::MixedKinds(_))
        ));
    }

    #[test]
    fn test_optimal_critic_values() {
        let (p, q) = half_half();
        match optimal_critic(&p, &q).unwrap() {
            CriticFunction::Tabular(t) => {
                assert!((t[0] - 2.0f64.ln()).abs() < 1e-15);
                assert!((t[1] - (2.0f64 / 3.0).ln()).abs() < 1e-15);
            }
            other => panic!("expected tabular critic, got {other:?}"),
        }

        // N(1,1) vs N(0,1): log-ratio is x − ½.
        let c = optimal_critic(&gauss(1.0, 1.0), &gauss(0.0, 1.0)).unwrap();
        for x in [-2.0, 0.0, 1.3, 4.0] {
            assert!((c.at_point(x).unwrap() - (x - 0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn test_bound_tight_at_optimal_critic() {
        let (p, q) = half_half();
        let dstar = optimal_critic(&p, &q).unwrap();
        let (gp, gq) = (gauss(1.0, 1.0), gauss(0.0, 1.0));
        let gstar = optimal_critic(&gp, &gq).unwrap();
        for which in Divergence::ALL {
            let spec = builtin(which);
            let dv = divergence(&spec, &p, &q).unwrap();
            let bv = bound_value(&spec, &p, &q, &dstar).unwrap();
            assert!((dv - bv).abs() < 1e-12, "{which} discrete: {dv} vs {bv}");

            let dvg = divergence(&spec, &gp, &gq).unwrap();
            let bvg = bound_value(&spec, &gp, &gq, &gstar).unwrap();
            assert!((dvg - bvg).abs() < 1e-9, "{which} gmm: {dvg} vs {bvg}");
        }
    }

    #[test]
    fn test_bound_dominated_by_divergence() {
        let (p, q) = half_half();
        for which in Divergence::ALL {
            let spec = builtin(which);
            let dv = divergence(&spec, &p, &q).unwrap();
            let off = CriticFunction::Tabular(vec![
                2.0f64.ln() + 0.1,
                (2.0f64 / 3.0).ln() - 0.05,
            ]);
            let bv = bound_value(&spec, &p, &q, &off).unwrap();
            assert!(bv < dv, "{which}: perturbed critic bound {bv} ≥ {dv}");
        }
    }

    #[test]
    fn test_zero_critic_gives_zero_bound() {
        let (p, q) = half_half();
        for which in Divergence::ALL {
            let spec = builtin(which);
            let bv = bound_value(&spec, &p, &q, &CriticFunction::Constant(0.0)).unwrap();
            assert!(bv.abs() <= 1e-12, "{which}: {bv}");
        }
    }

    #[test]
    fn test_bound_kind_mismatch_errors() {
        let (p, q) = half_half();
        let spec = builtin(Divergence::Kl);
        let func = CriticFunction::Func(Box::new(|x| x));
        assert!(matches!(
            bound_value(&spec, &p, &q, &func),
            Err(Error::MixedKinds(_))
        ));
        let tab = CriticFunction::Tabular(vec![0.0, 0.0]);
        assert!(matches!(
            bound_value(&spec, &gauss(0.0, 1.0), &gauss(1.0, 1.0), &tab),
            Err(Error::MixedKinds(_))
        ));
        assert!(matches!(
            bound_value(&spec, &p, &q, &CriticFunction::Tabular(vec![0.0; 3])),
            Err(Error::MixedKinds(_))
        ));
    }

    #[test]
    fn test_taylor_gap_discrete_example() {
        let spec = builtin(Divergence::Kl);
        let q = disc(&[0.5, 0.5]);
        let check = taylor_gap(&spec, &q, &[1.0, -1.0], 0.01).unwrap();
        assert!((check.quadratic - 2e-4).abs() < 1e-18);
        assert!(check.gap() < 5e-7, "gap {}", check.gap());
    }

    #[test]
    fn test_taylor_gap_shrinks_cubically() {
        // Halving ε must shrink the gap by ≥ 6x (cubic would be 8x).
        let spec = builtin(Divergence::Kl);
        let q = disc(&[0.4, 0.35, 0.25]);
        let v = [1.0, -0.4, -0.6];
        let wide = taylor_gap(&spec, &q, &v, 0.02).unwrap().gap();
        let tight = taylor_gap(&spec, &q, &v, 0.01).unwrap().gap();
        assert!(wide / tight >= 6.0, "ratio {}", wide / tight);
    }

    #[test]
    fn test_taylor_gap_gmm_weights() {
        let spec = builtin(Divergence::JensenShannon);
        let q = Distribution::Gmm1d(
            GaussianMixture1D::new(vec![0.6, 0.4], vec![-1.0, 2.0], vec![1.0, 0.7]).unwrap(),
        );
        let check = taylor_gap(&spec, &q, &[1.0, -1.0], 0.01).unwrap();
        assert!(check.exact > 0.0);
        // The remainder is one order down in ε from the quadratic term, so at
        // ε = 0.01 the ratio sits near 1e-2 times an O(1) curvature factor.
        assert!(
            check.gap() < 2e-2 * check.quadratic.max(1e-12),
            "gap {} vs quadratic {}",
            check.gap(),
            check.quadratic
        );
    }

    #[test]
    fn test_taylor_gap_validation() {
        let spec = builtin(Divergence::Kl);
        let q = disc(&[0.5, 0.5]);
        assert!(taylor_gap(&spec, &q, &[1.0, 1.0], 0.01).is_err());
        assert!(taylor_gap(&spec, &q, &[1.0, -1.0], f64::NAN).is_err());
        assert!(taylor_gap(&spec, &q, &[1.0, -1.0, 0.0], 0.01).is_err());
        // Zero perturbation size degenerates to the trivial expansion.
        let zero = taylor_gap(&spec, &q, &[1.0, -1.0], 0.0).unwrap();
        assert_eq!((zero.exact, zero.quadratic), (0.0, 0.0));
        let zero = parametric_taylor(
            &spec,
            &ParametricFamily::GaussianMean { stddev: 1.0 },
            &[0.3],
            &[1.0],
            0.0,
        )
        .unwrap();
        assert_eq!((zero.exact, zero.quadratic), (0.0, 0.0));
        // Perturbation that drives an entry negative must be rejected by
        // distribution validation.
        assert!(taylor_gap(&spec, &q, &[60.0, -60.0], 0.01).is_err());
    }

    #[test]
    fn test_parametric_taylor_gaussian_mean() {
        let spec = builtin(Divergence::Kl);
        let family = ParametricFamily::GaussianMean { stddev: 1.0 };
        let check = parametric_taylor(&spec, &family, &[0.0], &[1.0], 0.01).unwrap();
        // Exact divergence is ε²/2 = 5e-5 and the information value is 1.
        assert!((check.quadratic - 5e-5).abs() < 1e-12);
        assert!(check.gap() < 1e-12, "gap {}", check.gap());
    }

    #[test]
    fn test_parametric_taylor_softmax() {
        let spec = builtin(Divergence::SquaredHellinger);
        let family = ParametricFamily::SoftmaxDiscrete { support: 3 };
        let lambda = [0.3, -0.2, 0.0];
        let check = parametric_taylor(&spec, &family, &lambda, &[1.0, -0.5, -0.5], 0.005).unwrap();
        assert!(check.exact > 0.0);
        assert!(
            check.gap() < 1e-3 * check.quadratic,
            "gap {} vs {}",
            check.gap(),
            check.quadratic
        );
    }

    #[test]
    fn test_exact_gradient_zero_at_match() {
        let spec = builtin(Divergence::JensenShannon);
        let family = ParametricFamily::SoftmaxDiscrete { support: 3 };
        let lambda = [0.2, -0.1, 0.4];
        let p = family.distribution(&lambda).unwrap();
        let grad = exact_generator_gradient(&spec, &p, &family, &lambda).unwrap();
        for g in grad {
            assert!(g.abs() < 1e-12, "gradient {g} at the optimum");
        }
    }

    #[test]
    fn test_exact_gradient_gaussian_mean_kl() {
        // D(N(0,1) ‖ N(λ,1)) = λ²/2, so the gradient at λ = 0.5 is 0.5.
        let spec = builtin(Divergence::Kl);
        let family = ParametricFamily::GaussianMean { stddev: 1.0 };
        let p = gauss(0.0, 1.0);
        let grad = exact_generator_gradient(&spec, &p, &family, &[0.5]).unwrap();
        assert_eq!(grad.len(), 1);
        assert!((grad[0] - 0.5).abs() < 1e-7, "{}", grad[0]);
    }

    #[test]
    fn test_exact_gradient_matches_finite_difference() {
        let family = ParametricFamily::SoftmaxDiscrete { support: 4 };
        let lambda = [0.3, -0.5, 0.1, 0.6];
        let p = disc(&[0.3, 0.3, 0.2, 0.2]);
        for which in [
            Divergence::Kl,
            Divergence::LeCam,
            Divergence::PearsonChi2,
            Divergence::SoftenedReverseKl,
        ] {
            let spec = builtin(which);
            let grad = exact_generator_gradient(&spec, &p, &family, &lambda).unwrap();
            for i in 0..lambda.len() {
                let h = 1e-5 * (1.0 + lambda[i].abs());
                let mut up = lambda.to_vec();
                up[i] += h;
                let mut dn = lambda.to_vec();
                dn[i] -= h;
                let dup = divergence(&spec, &p, &family.distribution(&up).unwrap()).unwrap();
                let ddn = divergence(&spec, &p, &family.distribution(&dn).unwrap()).unwrap();
                let fd = (dup - ddn) / (2.0 * h);
                assert!(
                    (grad[i] - fd).abs() < 1e-6 * (1.0 + fd.abs()),
                    "{which} dim {i}: {} vs {fd}",
                    grad[i]
                );
            }
        }
    }

    #[test]
    fn test_exact_gradient_gaussian_loc_scale_fd() {
        let spec = builtin(Divergence::JensenShannon);
        let family = ParametricFamily::GaussianLocScale;
        let lambda = [0.3, 1.2];
        let p = gauss(0.0, 1.0);
        let grad = exact_generator_gradient(&spec, &p, &family, &lambda).unwrap();
        for i in 0..2 {
            let h = 1e-4;
            let mut up = lambda.to_vec();
            up[i] += h;
            let mut dn = lambda.to_vec();
            dn[i] -= h;
            let dup = divergence(&spec, &p, &family.distribution(&up).unwrap()).unwrap();
            let ddn = divergence(&spec, &p, &family.distribution(&dn).unwrap()).unwrap();
            let fd = (dup - ddn) / (2.0 * h);
            assert!(
                (grad[i] - fd).abs() < 1e-3 * (1.0 + fd.abs()),
                "dim {i}: {} vs {fd}",
                grad[i]
            );
        }
    }
}
