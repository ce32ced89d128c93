//! Adaptive Gauss-Kronrod quadrature.
//!
//! Each panel is evaluated with the 15-point Kronrod rule; the embedded
//! 7-point Gauss rule provides the error estimate. The panel with the largest
//! estimated error is bisected until the total estimate drops below the
//! requested absolute tolerance.
//!
//! Divergence handling: integrals in this crate can be genuinely infinite.
//! Rather than failing, a panel whose contribution exceeds `blow_up` (or is
//! non-finite) makes the result `+∞` with the `divergent` flag set, which
//! callers surface as a signal.

use crate::error::{Error, Result};

/// Kronrod-15 abscissae (positive half, descending).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];

/// Kronrod-15 weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];

/// Gauss-7 weights, matching the odd-index abscissae of `XGK`.
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// Quadrature controls.
#[derive(Debug, Clone)]
pub struct QuadConfig {
    /// Target absolute error for the whole integral.
    pub abs_tol: f64,
    /// Maximum number of panels before giving up.
    pub max_panels: usize,
    /// A single panel contribution beyond this magnitude marks the integral
    /// as divergent.
    pub blow_up: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-10,
            max_panels: 4096,
            blow_up: 1e12,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    /// Integral estimate; `+∞` when `divergent` is set.
    pub value: f64,
    /// Total error estimate over all panels (0 when divergent).
    pub error: f64,
    /// Number of panels evaluated.
    pub panels: usize,
    /// Whether a blow-up was detected.
    pub divergent: bool,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

/// Kronrod-15 evaluation of `f` over `[lo, hi]` returning (value, error,
/// non-finite flag).
fn kronrod15(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64, bool) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);

    let fc = f(center);
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    let mut resabs = resk.abs();
    let mut fv = [[0.0f64; 2]; 8];
    fv[7] = [fc, fc];
    let mut nonfinite = !fc.is_finite();

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        nonfinite |= !f1.is_finite() || !f2.is_finite();
        fv[j] = [f1, f2];
        let sum = f1 + f2;
        resk += WGK[j] * sum;
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * sum;
        }
    }

    // QUADPACK-style rescaled error estimate.
    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j][0] - reskh).abs() + (fv[j][1] - reskh).abs());
    }
    resasc *= half.abs();
    let value = resk * half;
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    let round = f64::EPSILON * 50.0 * resabs * half.abs();
    if error < round {
        error = round;
    }
    (value, error, nonfinite)
}

/// Adaptively integrates `f` over `[lo, hi]`.
pub fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    if lo == hi {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            panels: 0,
            divergent: false,
        });
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Integration(format!(
            "invalid interval [{lo}, {hi}]"
        )));
    }

    let divergent = |panels: usize| {
        Ok(QuadResult {
            value: f64::INFINITY,
            error: 0.0,
            panels,
            divergent: true,
        })
    };

    let (value, error, nonfinite) = kronrod15(&f, lo, hi);
    if nonfinite || value.abs() > cfg.blow_up {
        return divergent(1);
    }
    let mut panels = vec![Panel {
        lo,
        hi,
        value,
        error,
    }];

    loop {
        let total_error: f64 = panels.iter().map(|p| p.error).sum();
        if total_error <= cfg.abs_tol {
            break;
        }
        if panels.len() >= cfg.max_panels {
            return Err(Error::Integration(format!(
                "error estimate {total_error:e} above tolerance {:e} after {} panels",
                cfg.abs_tol,
                panels.len()
            )));
        }
        // Bisect the worst panel.
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .map(|(i, _)| i)
            .expect("nonempty panel list");
        let Panel { lo, hi, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        for (l, h) in [(lo, mid), (mid, hi)] {
            let (value, error, nonfinite) = kronrod15(&f, l, h);
            if nonfinite || value.abs() > cfg.blow_up {
                return divergent(panels.len() + 1);
            }
            panels.push(Panel {
                lo: l,
                hi: h,
                value,
                error,
            });
        }
    }

    // Pairwise-style stable accumulation: sort by interval start so the sum
    // order is deterministic regardless of refinement history.
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let error: f64 = panels.iter().map(|p| p.error).sum();
    if !value.is_finite() || value.abs() > cfg.blow_up {
        return divergent(panels.len());
    }
    Ok(QuadResult {
        value,
        error,
        panels: panels.len(),
        divergent: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(x: f64, y: f64, tol: f64, what: &str) {
        assert!(
            (x - y).abs() <= tol,
            "{what}: {x} vs {y} (gap {})",
            (x - y).abs()
        );
    }

    #[test]
    fn test_polynomial_exact() {
        let r = integrate(|x| x * x, 0.0, 1.0, &QuadConfig::default()).unwrap();
        assert_close(r.value, 1.0 / 3.0, 1e-14, "x² on [0,1]");
        assert!(!r.divergent);
    }

    #[test]
    fn test_sine() {
        let r = integrate(|x| x.sin(), 0.0, std::f64::consts::PI, &QuadConfig::default()).unwrap();
        assert_close(r.value, 2.0, 1e-12, "sin on [0,π]");
    }

    #[test]
    fn test_gaussian_mass() {
        let r = integrate(
            |x| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt(),
            -10.0,
            10.0,
            &QuadConfig::default(),
        )
        .unwrap();
        assert_close(r.value, 1.0, 1e-10, "normal mass");
    }

    #[test]
    fn test_oscillatory_forces_adaptivity() {
        let r = integrate(|x| (40.0 * x).cos(), 0.0, 1.0, &QuadConfig::default()).unwrap();
        assert_close(r.value, (40.0f64).sin() / 40.0, 1e-10, "cos(40x)");
        assert!(r.panels > 1, "expected panel refinement, got {}", r.panels);
    }

    #[test]
    fn test_blow_up_detection() {
        // exp(x²) over [0, 26] stays finite pointwise but the integral is
        // astronomically large; the panel threshold must fire.
        let r = integrate(|x| (x * x).exp(), 0.0, 26.0, &QuadConfig::default()).unwrap();
        assert!(r.divergent);
        assert_eq!(r.value, f64::INFINITY);
    }

    #[test]
    fn test_nonfinite_value_is_divergent() {
        let r = integrate(|x| 1.0 / x, -1.0, 1.0, &QuadConfig::default());
        // 1/x hits the node at 0 only if a panel centers there; the midpoint
        // of [-1,1] is exactly 0 → ±∞ node value.
        let r = r.unwrap();
        assert!(r.divergent);
    }

    #[test]
    fn test_nonconvergence_reports_error() {
        // |x|^(-1/2) is integrable but needs unbounded refinement near 0;
        // with a tiny panel budget the failure must be an error, not a wrong
        // answer.
        let cfg = QuadConfig {
            abs_tol: 1e-13,
            max_panels: 8,
            blow_up: 1e12,
        };
        let r = integrate(|x| x.abs().sqrt().recip().min(1e6), 1e-12, 1.0, &cfg);
        assert!(matches!(r, Err(Error::Integration(_))));
    }

    #[test]
    fn test_empty_interval() {
        let r = integrate(|x| x, 2.0, 2.0, &QuadConfig::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(integrate(|x| x, 1.0, 0.0, &QuadConfig::default()).is_err());
        assert!(integrate(|x| x, f64::NEG_INFINITY, 0.0, &QuadConfig::default()).is_err());
    }
}
