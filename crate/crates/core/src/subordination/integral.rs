//! Subordination integrals `∫₀^∞ h(u) Q(t, u) du`.

use std::cell::RefCell;

use super::hitting::HittingLaw;
use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_breaks, integrate_to_inf, Estimate, Tolerance};

const DECADE_LIMIT: usize = 60;
const DIVERGENCE_RATIO: f64 = 0.9;

fn tol() -> Tolerance {
    Tolerance::new(1e-13, 1e-10)
}

/// `∫₀^∞ h(u) Q(t, u) du` with decade-wise refinement toward `u = 0`.
/// Decade contributions that stop shrinking are reported as divergence.
pub fn subordinate_integral(
    h: impl Fn(f64) -> Result<f64>,
    law: &dyn HittingLaw,
    t: f64,
) -> Result<Estimate> {
    if let Some(z) = law.atom(t) {
        return Ok(Estimate { value: h(z)?, error: 0.0 });
    }
    let fail: RefCell<Option<Error>> = RefCell::new(None);
    let f = |u: f64| -> f64 {
        let v = h(u).and_then(|hv| Ok(hv * law.density(t, u)?));
        match v {
            Ok(v) if v.is_finite() => v,
            Ok(v) => {
                fail.borrow_mut().get_or_insert(Error::NonFinite { value: v, at: format!("u = {u}") });
                0.0
            }
            Err(e) => {
                fail.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let (breaks, tail) = law.breaks(t);
    let lo = breaks[0];
    let mut value = 0.0;
    let mut error = 0.0;
    if breaks.len() > 1 {
        let e = integrate_breaks(f, &breaks, Tolerance { max_intervals: 4 * breaks.len() + 4000, ..tol() })?;
        value += e.value;
        error += e.error;
    }
    if tail {
        let e = integrate_to_inf(f, breaks[breaks.len() - 1], tol())?;
        value += e.value;
        error += e.error;
    }
    let mut b = lo;
    let mut prev: Option<f64> = None;
    let mut stalled = 0;
    let mut converged = false;
    for _ in 0..DECADE_LIMIT {
        let a = b / 10.0;
        let piece = integrate(f, a, b, tol())?;
        value += piece.value;
        error += piece.error;
        let m = piece.value.abs();
        if let Some(p) = prev {
            if p > 0.0 && m >= DIVERGENCE_RATIO * p {
                stalled += 1;
            } else {
                stalled = 0;
            }
        }
        if stalled >= 3 {
            return Err(Error::Divergent(format!(
                "decade contributions near u = {a:e} stopped shrinking (last {m:e}) at t = {t}"
            )));
        }
        if m <= 1e-14 * value.abs().max(1e-300) {
            converged = true;
            break;
        }
        prev = Some(m);
        b = a;
    }
    if let Some(e) = fail.into_inner() {
        return Err(e);
    }
    if !converged {
        return Err(Error::Divergent(format!("no convergence toward u = 0 within {DECADE_LIMIT} decades")));
    }
    Ok(Estimate { value, error })
}

/// `g(t, x, y) = ∫₀^∞ T(u, x, y) Q(t, u) du`.
pub fn subordinate_density(
    kernel: impl Fn(f64, f64, f64) -> Result<f64>,
    law: &dyn HittingLaw,
    t: f64,
    x: f64,
    y: f64,
) -> Result<Estimate> {
    subordinate_integral(|u| kernel(u, x, y), law, t)
}

/// `E f(Y(Z(t)))` from `T_u f(x)` as `∫₀^∞ T_u f(x) Q(t, u) du`.
pub fn subordinate_expectation(
    semigroup: impl Fn(f64, f64) -> Result<f64>,
    law: &dyn HittingLaw,
    t: f64,
    x: f64,
) -> Result<Estimate> {
    subordinate_integral(|u| semigroup(u, x), law, t)
}

/// Cauchy transition density with unit scale, the `α = 1` kernel.
pub fn cauchy_kernel(u: f64, x: f64, y: f64) -> Result<f64> {
    let r = y - x;
    Ok(u / (std::f64::consts::PI * (u * u + r * r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable::{mittag_leffler, symmetric_stable_density_1d, StableScale};
    use crate::subordination::hitting::{
        geometric_nodes, hitting_density_from_g, DriftHitting, GGrid, StableHitting, TabulatedHitting,
    };

    // ∫₀^∞ (1/π)(u/(u²+1)) (1/√π) e^{-u²/4} du
    const CAUCHY_HALF_REFERENCE: f64 = 0.120_402_879_068_396_86;

    #[test]
    fn regression_constant() {
        let law = StableHitting::standard(0.5).unwrap();
        let g = subordinate_density(cauchy_kernel, &law, 1.0, 0.0, 1.0).unwrap();
        assert!((g.value - CAUCHY_HALF_REFERENCE).abs() < 1e-10, "{}", g.value);
    }

    #[test]
    fn drift_clock_is_identity() {
        let law = DriftHitting { drift: 1.0 };
        let g = subordinate_density(cauchy_kernel, &law, 0.7, 0.3, -1.1).unwrap();
        assert_eq!(g.value, cauchy_kernel(0.7, 0.3, -1.1).unwrap());
    }

    #[test]
    fn symmetric_in_x_and_y() {
        let law = StableHitting::standard(0.6).unwrap();
        let a = subordinate_density(cauchy_kernel, &law, 1.3, 0.2, 1.7).unwrap();
        let b = subordinate_density(cauchy_kernel, &law, 1.3, 1.7, 0.2).unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
    }

    #[test]
    fn diagonal_divergence_is_reported() {
        let law = StableHitting::standard(0.5).unwrap();
        let r = subordinate_density(cauchy_kernel, &law, 1.0, 0.0, 0.0);
        assert!(matches!(r, Err(Error::Divergent(_))), "{r:?}");
        // α = 1/2 is worse; α = 3/2 stays finite on the diagonal
        let k = |a: f64| move |u: f64, x: f64, y: f64| symmetric_stable_density_1d(u, y - x, StableScale::unit(), a);
        assert!(matches!(subordinate_density(k(0.5), &law, 1.0, 0.0, 0.0), Err(Error::Divergent(_))));
        let ok = subordinate_density(k(1.5), &law, 1.0, 0.0, 0.0).unwrap();
        assert!(ok.value.is_finite() && ok.value > 0.0);
    }

    #[test]
    fn constant_function_integrates_to_one() {
        let one = |_: f64, _: f64| Ok(1.0);
        for &beta in &[0.3, 0.5, 0.7] {
            let law = StableHitting::new(beta, 1.7).unwrap();
            let e = subordinate_expectation(one, &law, 1.3, 0.0).unwrap();
            assert!((e.value - 1.0).abs() < 1e-3);
        }
        let e = subordinate_expectation(one, &DriftHitting { drift: 2.0 }, 1.0, 0.0).unwrap();
        assert_eq!(e.value, 1.0);
        // tabulated profile from the G-grid pipeline
        let du = 0.05;
        let y = geometric_nodes(1e-6 * du * du, 1.0, 60, &[1.0]).unwrap();
        let g = GGrid::stable(0.5, du, 12.0, y).unwrap();
        let tab = TabulatedHitting::from_profile(&hitting_density_from_g(&g, 1.0, true).unwrap());
        let e = subordinate_expectation(one, &tab, 1.0, 0.0).unwrap();
        assert!((e.value - 1.0).abs() < 1e-3, "{}", e.value);
    }

    #[test]
    fn fourier_mode_gives_mittag_leffler() {
        // Cauchy symbol -|p| at p = 1: T_u e^{ipx} = e^{-u} e^{ipx}
        let law = StableHitting::standard(0.5).unwrap();
        let e = subordinate_expectation(|u, _| Ok((-u).exp()), &law, 1.0, 0.0).unwrap();
        let ml = mittag_leffler(0.5, -1.0).unwrap();
        assert!((e.value - 0.427_583_576_155_807).abs() < 1e-3);
        assert!((e.value - ml).abs() < 1e-9);
    }

    #[test]
    fn drift_expectation_is_semigroup() {
        let tf = |u: f64, x: f64| Ok((-u).exp() * x.cos());
        let e = subordinate_expectation(tf, &DriftHitting { drift: 1.0 }, 0.8, 0.4).unwrap();
        assert_eq!(e.value, tf(0.8, 0.4).unwrap());
    }
}
