//! Hitting-time densities from the G-grid pipeline for indices other than
//! one half, and a position-dependent clock.

use std::sync::OnceLock;

use proptest::prelude::*;

use fracwalk::quad::trapezoid;
use fracwalk::stable::mittag_leffler;
use fracwalk::subordination::hitting::stable_y_nodes;
use fracwalk::subordination::{
    hitting_density_from_g, inverse_stable_density, sample_subordinator_path, subordinate_integral, GGrid,
    HittingProfile, SubordinatorSpec, TabulatedHitting,
};
use fracwalk::walk::{estimate_density, hitting_time_of_path, run_replicas};

const TIMES: [f64; 3] = [0.5, 1.0, 2.0];

/// Accuracy of the pipeline mass.
const MASS_TOLERANCE: f64 = 1e-3;

fn profiles(beta: f64, du: f64) -> Vec<HittingProfile> {
    let y = stable_y_nodes(beta, du, &TIMES).unwrap();
    let g = GGrid::stable(beta, du, 12.0, y).unwrap();
    TIMES.iter().map(|&t| hitting_density_from_g(&g, t, true).unwrap()).collect()
}

// the β = 0.3 grid is the expensive one; share it
fn low_beta() -> &'static [HittingProfile] {
    static P: OnceLock<Vec<HittingProfile>> = OnceLock::new();
    P.get_or_init(|| profiles(0.3, 0.05))
}

fn high_beta() -> &'static [HittingProfile] {
    static P: OnceLock<Vec<HittingProfile>> = OnceLock::new();
    P.get_or_init(|| profiles(0.7, 0.02))
}

fn cases() -> [(f64, &'static [HittingProfile]); 2] {
    [(0.3, low_beta()), (0.7, high_beta())]
}

fn lerp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let i = xs.partition_point(|&v| v <= x);
    if i == 0 || i == xs.len() {
        return 0.0;
    }
    let w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    ys[i - 1] + w * (ys[i] - ys[i - 1])
}

#[test]
fn pipeline_matches_direct_evaluator() {
    for (beta, ps) in cases() {
        for p in ps {
            let mut worst: f64 = 0.0;
            for (&u, &q) in p.u.iter().zip(&p.q).filter(|(u, _)| **u <= 3.0) {
                worst = worst.max((q - inverse_stable_density(p.t, u, beta).unwrap()).abs());
            }
            assert!(worst < 1e-3, "beta={beta} t={}: {worst}", p.t);
            assert!((p.mass() - 1.0).abs() < MASS_TOLERANCE, "beta={beta} t={}: mass {}", p.t, p.mass());
        }
    }
}

#[test]
fn pipeline_is_self_similar() {
    for (beta, ps) in cases() {
        let unit = &ps[1];
        for p in ps {
            let s = p.t.powf(-beta);
            for (&u, &q) in p.u.iter().zip(&p.q).filter(|(u, _)| **u * s <= 3.0) {
                let scaled = s * lerp(&unit.u, &unit.q, u * s);
                assert!((q - scaled).abs() < 1e-3, "beta={beta} t={} u={u}", p.t);
            }
        }
    }
}

#[test]
fn laplace_transform_of_pipeline_profile() {
    for (beta, ps) in cases() {
        let tab = TabulatedHitting::from_profile(&ps[1]);
        let v = subordinate_integral(|u| Ok((-u).exp()), &tab, 1.0).unwrap().value;
        let ml = mittag_leffler(beta, -1.0).unwrap();
        assert!((v - ml).abs() < 2e-3, "beta={beta}: {v} vs {ml}");
    }
}

fn mass_below(p: &HittingProfile, cap: f64) -> f64 {
    let k = p.u.partition_point(|&u| u <= cap);
    trapezoid(&p.u[..k], &p.q[..k])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // P(Z(t) ≤ U) = P(V(U) ≥ t) falls as t grows; near U = ∞ all three
    // masses sit within the pipeline accuracy of 1
    #[test]
    fn hitting_cdf_decreases_in_t(cap in 0.05f64..6.0, high in any::<bool>()) {
        let ps = if high { high_beta() } else { low_beta() };
        let m: Vec<f64> = ps.iter().map(|p| mass_below(p, cap)).collect();
        prop_assert!(m[0] >= m[1] - MASS_TOLERANCE && m[1] >= m[2] - MASS_TOLERANCE, "{m:?}");
    }
}

#[test]
fn position_dependent_hitting_times_have_unit_mass() {
    let (drift, t) = (0.1, 1.0);
    let spec = SubordinatorSpec::PositionDependent { drift, c: 0.5, beta1: 0.4, beta2: 0.7 };
    let z: Vec<f64> = run_replicas(2000, 7, |rng| {
        let path = sample_subordinator_path(&spec, 12.0, 2400, rng).unwrap();
        hitting_time_of_path(&path, t).unwrap()
    });
    // the drift alone reaches t by u = t / drift
    assert!(z.iter().all(|&u| u > 0.0 && u <= t / drift + 1e-9));
    let h = estimate_density(&z, 0.0, t / drift + 0.01, 50).unwrap();
    let integral: f64 = (0..h.bins()).map(|i| h.density(i) * h.width()).sum();
    assert!((integral - 1.0).abs() < 1e-12, "{integral}");
}
