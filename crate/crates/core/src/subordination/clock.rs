//! Subordinators: increasing Lévy and Lévy-type clocks.

use rand::Rng;
use rand_distr::{Distribution, Open01, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{check_beta, domain, Result};
use crate::quad::{integrate, Tolerance};
use crate::stable::sample_one_sided_stable;
use crate::walk::WalkPath;

/// Neglected small-jump variance per unit time.
pub const SMALL_JUMP_VARIANCE: f64 = 1e-6;

/// Lévy density `ν(y)` on `y > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LevyDensity {
    /// `c y^{-1-β}`.
    Stable { c: f64, beta: f64 },
    /// `c y^{-1-β} e^{-λ y}`.
    Tempered { c: f64, beta: f64, lambda: f64 },
}

impl LevyDensity {
    pub fn validate(&self) -> Result<()> {
        let (c, beta, lambda) = self.params();
        check_beta(beta)?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(domain(format!("Lévy density weight c = {c} must be positive")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(domain(format!("tempering rate lambda = {lambda} must be ≥ 0")));
        }
        Ok(())
    }

    fn params(&self) -> (f64, f64, f64) {
        match *self {
            LevyDensity::Stable { c, beta } => (c, beta, 0.0),
            LevyDensity::Tempered { c, beta, lambda } => (c, beta, lambda),
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let (c, beta, lambda) = self.params();
        c * y.powf(-1.0 - beta) * (-lambda * y).exp()
    }

    /// `(c', β)` with `ν(y) ≥ c' y^{-1-β}` on `(0, 1]`.
    pub fn activity_lower_bound(&self) -> (f64, f64) {
        let (c, beta, lambda) = self.params();
        (c * (-lambda).exp(), beta)
    }

    /// `∫ min(1, y) ν(dy)`.
    pub fn activity_integral(&self) -> Result<f64> {
        let (c, beta, lambda) = self.params();
        // ∫₀¹ y ν: substitute y = s^{1/(1-β)} to remove the singularity
        let p = 1.0 / (1.0 - beta);
        let tol = Tolerance::new(1e-14, 1e-10);
        let near = integrate(|s: f64| (-lambda * s.powf(p)).exp(), 0.0, 1.0, tol)?.value * c * p;
        let far = if lambda == 0.0 {
            c / beta
        } else {
            // ∫₁^∞ c y^{-1-β} e^{-λy} ≤ c/β; integrate y = 1/s
            integrate(|s: f64| if s > 0.0 { s.powf(beta - 1.0) * (-lambda / s).exp() } else { 0.0 }, 0.0, 1.0, tol)?
                .value
                * c
        };
        Ok(near + far)
    }

    /// Cutoff `δ` with `∫₀^δ y² ν < SMALL_JUMP_VARIANCE`.
    pub fn cutoff(&self) -> f64 {
        let (c, beta, _) = self.params();
        stable_cutoff(c, beta)
    }

    /// `∫₀^δ y ν(y) dy`.
    fn compensation(&self, delta: f64) -> Result<f64> {
        let (c, beta, lambda) = self.params();
        let base = c * delta.powf(1.0 - beta) / (1.0 - beta);
        if lambda == 0.0 {
            return Ok(base);
        }
        let p = 1.0 / (1.0 - beta);
        let tol = Tolerance::new(1e-15, 1e-12);
        Ok(base * integrate(|s: f64| (-lambda * delta * s.powf(p)).exp(), 0.0, 1.0, tol)?.value)
    }
}

fn stable_cutoff(c: f64, beta: f64) -> f64 {
    (SMALL_JUMP_VARIANCE * (2.0 - beta) / c).powf(1.0 / (2.0 - beta))
}

/// Parameters of the clock.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SubordinatorSpec {
    /// Standard β-stable subordinator, `E e^{-sX(u)} = e^{-u s^β}`.
    Stable { beta: f64 },
    /// Drift plus jumps with Lévy density.
    Levy {
        drift: f64,
        #[serde(default)]
        density: Option<LevyDensity>,
    },
    /// Jumps `c y^{-1-β(x)}` with `β(x) = β₁ + (β₂ - β₁)(1 + sin x)/2`.
    PositionDependent { drift: f64, c: f64, beta1: f64, beta2: f64 },
}

impl SubordinatorSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            SubordinatorSpec::Stable { beta } => check_beta(*beta),
            SubordinatorSpec::Levy { drift, density } => {
                check_drift(*drift)?;
                match density {
                    Some(nu) => {
                        nu.validate()?;
                        let act = nu.activity_integral()?;
                        if !act.is_finite() {
                            return Err(domain("∫ min(1, y) ν(dy) is not finite"));
                        }
                        Ok(())
                    }
                    None if *drift > 0.0 => Ok(()),
                    None => Err(domain("Lévy subordinator needs a drift or a jump density")),
                }
            }
            SubordinatorSpec::PositionDependent { drift, c, beta1, beta2 } => {
                check_drift(*drift)?;
                check_beta(*beta1)?;
                check_beta(*beta2)?;
                if beta1 > beta2 {
                    return Err(domain(format!("beta1 = {beta1} exceeds beta2 = {beta2}")));
                }
                if !(*c > 0.0 && c.is_finite()) {
                    return Err(domain(format!("jump weight c = {c} must be positive")));
                }
                Ok(())
            }
        }
    }

    /// Index `β(x)` of the position-dependent mode.
    pub fn local_beta(&self, x: f64) -> Option<f64> {
        match *self {
            SubordinatorSpec::PositionDependent { beta1, beta2, .. } => {
                Some(beta1 + (beta2 - beta1) * 0.5 * (1.0 + x.sin()))
            }
            _ => None,
        }
    }

    /// `ν(x, y)`.
    pub fn levy_density(&self, x: f64, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match self {
            SubordinatorSpec::Stable { beta } => {
                beta / statrs::function::gamma::gamma(1.0 - beta) * y.powf(-1.0 - beta)
            }
            SubordinatorSpec::Levy { density, .. } => density.as_ref().map_or(0.0, |nu| nu.eval(y)),
            SubordinatorSpec::PositionDependent { c, .. } => {
                c * y.powf(-1.0 - self.local_beta(x).unwrap_or(0.5))
            }
        }
    }
}

fn check_drift(a: f64) -> Result<()> {
    if a >= 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("drift a = {a} must be ≥ 0")))
    }
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if mean <= 0.0 {
        return Ok(0);
    }
    let d = Poisson::new(mean).map_err(|e| domain(format!("Poisson mean {mean}: {e}")))?;
    Ok(d.sample(rng) as u64)
}

fn pareto_above<R: Rng + ?Sized>(delta: f64, beta: f64, rng: &mut R) -> f64 {
    let o: f64 = Open01.sample(rng);
    delta * o.powf(-1.0 / beta)
}

/// Path of `X` on the mesh `u_k = k u_max / steps`, `X(0) = 0`.
pub fn sample_subordinator_path<R: Rng + ?Sized>(
    spec: &SubordinatorSpec,
    u_max: f64,
    steps: usize,
    rng: &mut R,
) -> Result<WalkPath> {
    spec.validate()?;
    if !(u_max > 0.0 && u_max.is_finite()) || steps == 0 {
        return Err(domain(format!("need u_max > 0 and steps ≥ 1, got {u_max}, {steps}")));
    }
    let du = u_max / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut x = 0.0;
    times.push(0.0);
    states.push(0.0);
    let tempered = match spec {
        SubordinatorSpec::Levy { density: Some(nu), .. } => {
            let delta = nu.cutoff();
            let (c, beta, lambda) = nu.params();
            Some((delta, nu.compensation(delta)?, c * delta.powf(-beta) / beta, beta, lambda))
        }
        _ => None,
    };
    for k in 1..=steps {
        let inc = match spec {
            SubordinatorSpec::Stable { beta } => {
                du.powf(1.0 / beta) * sample_one_sided_stable(*beta, rng)
            }
            SubordinatorSpec::Levy { drift, .. } => {
                let mut inc = drift * du;
                if let Some((delta, comp, rate, beta, lambda)) = tempered {
                    inc += comp * du;
                    // thinning of the stable proposal for the tempered factor
                    for _ in 0..poisson(rate * du, rng)? {
                        let y = pareto_above(delta, beta, rng);
                        let keep: f64 = Open01.sample(rng);
                        if lambda == 0.0 || keep < (-lambda * y).exp() {
                            inc += y;
                        }
                    }
                }
                inc
            }
            SubordinatorSpec::PositionDependent { drift, c, .. } => {
                let beta = spec.local_beta(x).unwrap_or(0.5);
                let delta = stable_cutoff(*c, beta);
                let mut inc = (drift + c * delta.powf(1.0 - beta) / (1.0 - beta)) * du;
                for _ in 0..poisson(c * delta.powf(-beta) / beta * du, rng)? {
                    inc += pareto_above(delta, beta, rng);
                }
                inc
            }
        };
        x += inc;
        times.push(k as f64 * du);
        states.push(x);
    }
    WalkPath::new(1, times, states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replica_stream;
    use crate::stable::subordinator_cdf;
    use crate::walk::{ks_distance, run_replicas};

    #[test]
    fn pure_drift_is_a_line() {
        let spec = SubordinatorSpec::Levy { drift: 2.5, density: None };
        let p = sample_subordinator_path(&spec, 4.0, 40, &mut replica_stream(1, 0)).unwrap();
        for i in 0..p.len() {
            assert!((p.last_coord(i) - 2.5 * p.times()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn stable_mode_matches_levy_law() {
        let spec = SubordinatorSpec::Stable { beta: 0.5 };
        let xs = run_replicas(100_000, 17, |rng| {
            let p = sample_subordinator_path(&spec, 1.0, 4, rng).unwrap();
            p.final_state()[0]
        });
        let d = ks_distance(&xs, |y| subordinator_cdf(1.0, y, 0.5), 50).unwrap();
        assert!(d < 0.01, "KS {d}");
    }

    #[test]
    fn paths_are_non_decreasing() {
        let specs = [
            SubordinatorSpec::Stable { beta: 0.3 },
            SubordinatorSpec::Levy {
                drift: 0.1,
                density: Some(LevyDensity::Tempered { c: 1.0, beta: 0.6, lambda: 2.0 }),
            },
            SubordinatorSpec::PositionDependent { drift: 0.0, c: 0.5, beta1: 0.3, beta2: 0.8 },
        ];
        for (i, spec) in specs.iter().enumerate() {
            for r in 0..20 {
                let p = sample_subordinator_path(spec, 2.0, 200, &mut replica_stream(i as u64, r))
                    .unwrap();
                for k in 1..p.len() {
                    assert!(p.last_coord(k) >= p.last_coord(k - 1));
                }
            }
        }
    }

    #[test]
    fn levy_mode_mean_matches_first_moment() {
        // E X(1) = ∫ y ν(dy) = c λ^{β-1} Γ(1-β) for the tempered density
        let nu = LevyDensity::Tempered { c: 1.0, beta: 0.5, lambda: 1.0 };
        let spec = SubordinatorSpec::Levy { drift: 0.0, density: Some(nu) };
        let xs = run_replicas(20_000, 5, |rng| {
            sample_subordinator_path(&spec, 1.0, 10, rng).unwrap().final_state()[0]
        });
        let m = crate::walk::summarize(&xs);
        let exact = statrs::function::gamma::gamma(0.5);
        assert!((m.mean - exact).abs() < 4.0 * m.std_error, "{} vs {exact}", m.mean);
    }

    #[test]
    fn validation_rules() {
        assert!(SubordinatorSpec::Stable { beta: 1.0 }.validate().is_err());
        assert!(SubordinatorSpec::Levy { drift: 0.0, density: None }.validate().is_err());
        assert!(SubordinatorSpec::Levy { drift: -1.0, density: None }.validate().is_err());
        let bad = SubordinatorSpec::PositionDependent { drift: 0.0, c: 1.0, beta1: 0.7, beta2: 0.4 };
        assert!(bad.validate().is_err());
        let nu = LevyDensity::Stable { c: 2.0, beta: 0.4 };
        // ∫₀¹ y ν + ∫₁^∞ ν = c/(1-β) + c/β
        let act = nu.activity_integral().unwrap();
        assert!((act - (2.0 / 0.6 + 2.0 / 0.4)).abs() < 1e-9);
        let (c, b) = nu.activity_lower_bound();
        assert_eq!((c, b), (2.0, 0.4));
    }

    #[test]
    fn cutoff_controls_neglected_variance() {
        let nu = LevyDensity::Stable { c: 1.0, beta: 0.5 };
        let d = nu.cutoff();
        let var = d.powf(1.5) / 1.5;
        assert!((var - SMALL_JUMP_VARIANCE).abs() < 1e-15);
    }

    #[test]
    fn position_dependent_density_bracketed() {
        let spec = SubordinatorSpec::PositionDependent { drift: 0.0, c: 1.0, beta1: 0.3, beta2: 0.7 };
        for &x in &[-2.0, 0.0, 0.7, 3.0] {
            for &y in &[1e-3, 0.5, 1.0, 7.0] {
                let v = spec.levy_density(x, y);
                let lo = y.powf(-1.3).min(y.powf(-1.7));
                let hi = y.powf(-1.3).max(y.powf(-1.7));
                assert!(v >= lo * (1.0 - 1e-12) && v <= hi * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn spec_serde_round_trip() {
        let s = r#"{"kind":"levy","drift":0.5,"density":{"kind":"tempered","c":1.0,"beta":0.5,"lambda":2.0}}"#;
        let spec: SubordinatorSpec = serde_json::from_str(s).unwrap();
        let back: SubordinatorSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(spec, back);
        assert!(serde_json::from_str::<SubordinatorSpec>(r#"{"kind":"stable","beta":0.5,"x":1}"#).is_err());
    }
}
