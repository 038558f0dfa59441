//! Monte Carlo laws of `(Y(s), Z(t))` and of `Y(Z(t))`.

use statrs::function::gamma::gamma;

use super::hitting::{HittingLaw, StableHitting};
use super::integral::subordinate_integral;
use crate::error::{domain, Error, Result};
use crate::kernels::{DoubleJumpKernel, WeightFamily};
use crate::stable::{char_exponent, symmetric_stable_cdf_1d, StableScale};
use crate::walk::{hitting_time_of_path, run_replicas, EmpiricalDensity, WalkPath};

/// Fewest paths accepted by the estimators.
pub const MIN_PATHS: usize = 1000;

fn check_paths(n: usize) -> Result<()> {
    if n < MIN_PATHS {
        Err(domain(format!("{n} paths given, at least {MIN_PATHS} needed")))
    } else {
        Ok(())
    }
}

/// Uniform bins on `[lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bins {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Bins {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(hi > lo) || n == 0 {
            return Err(domain(format!("bad bins [{lo}, {hi}) x {n}")));
        }
        Ok(Self { lo, hi, n })
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.n as f64
    }

    pub fn edge(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.width()
    }

    fn index(&self, x: f64) -> Option<usize> {
        if x < self.lo || x >= self.hi {
            None
        } else {
            Some((((x - self.lo) / self.width()) as usize).min(self.n - 1))
        }
    }

    fn histogram(&self) -> EmpiricalDensity {
        EmpiricalDensity::new(self.lo, self.hi, self.n).expect("validated bins")
    }
}

/// Histogram of `(Y(s), Z(t))` with out-of-range pairs counted in `total`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDensity {
    pub y: Bins,
    pub u: Bins,
    /// Row-major in `y`.
    pub counts: Vec<u64>,
    pub y_marginal: Vec<u64>,
    pub u_marginal: Vec<u64>,
    pub total: u64,
}

impl JointDensity {
    pub fn probability(&self, iy: usize, iu: usize) -> f64 {
        self.counts[iy * self.u.n + iu] as f64 / self.total as f64
    }

    pub fn density(&self, iy: usize, iu: usize) -> f64 {
        self.probability(iy, iu) / (self.y.width() * self.u.width())
    }

    /// Binomial standard error of `probability(iy, iu)`.
    pub fn probability_std_error(&self, iy: usize, iu: usize) -> f64 {
        let p = self.probability(iy, iu);
        (p * (1.0 - p) / self.total as f64).sqrt()
    }

    pub fn y_probability(&self, iy: usize) -> f64 {
        self.y_marginal[iy] as f64 / self.total as f64
    }

    pub fn u_probability(&self, iu: usize) -> f64 {
        self.u_marginal[iu] as f64 / self.total as f64
    }
}

/// Histogram estimate of the joint law of `(Y(s), Z(t))` from `(Y, V)` paths.
pub fn empirical_joint_density(
    paths: &[WalkPath],
    s: f64,
    t: f64,
    y: Bins,
    u: Bins,
) -> Result<JointDensity> {
    check_paths(paths.len())?;
    let mut out = JointDensity {
        y,
        u,
        counts: vec![0; y.n * u.n],
        y_marginal: vec![0; y.n],
        u_marginal: vec![0; u.n],
        total: 0,
    };
    for p in paths {
        if p.width() != 2 {
            return Err(domain("joint density needs one spatial coordinate plus V"));
        }
        let ys = p.state_at(s)[0];
        let z = hitting_time_of_path(p, t)?;
        out.total += 1;
        let (iy, iu) = (y.index(ys), u.index(z));
        if let Some(i) = iy {
            out.y_marginal[i] += 1;
        }
        if let Some(j) = iu {
            out.u_marginal[j] += 1;
        }
        if let (Some(i), Some(j)) = (iy, iu) {
            out.counts[i * u.n + j] += 1;
        }
    }
    Ok(out)
}

/// Two estimates of the law of `Y(Z(t))`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityEstimators {
    /// `Y` binned at the last step before `V` reaches `t`.
    pub direct: EmpiricalDensity,
    /// `Σ_k g_{Y(s_k), Z(t)}(y, s_k) Δs`: `Y(s_k)` binned for the `s_k`
    /// grid cell containing the hitting step.
    pub diagonal: EmpiricalDensity,
}

impl DensityEstimators {
    /// Largest `|direct - diagonal| / sqrt(se_direct² + se_diagonal²)`.
    pub fn max_standardized_gap(&self) -> f64 {
        (0..self.direct.bins())
            .filter_map(|i| {
                let d = self.direct.density(i) - self.diagonal.density(i);
                let se = self.direct.density_std_error(i).hypot(self.diagonal.density_std_error(i));
                (se > 0.0).then(|| d.abs() / se)
            })
            .fold(0.0, f64::max)
    }
}

/// Both estimators from stored `(Y, V)` paths with cell width `ds`.
pub fn subordinated_estimators(paths: &[WalkPath], t: f64, ds: f64, bins: Bins) -> Result<DensityEstimators> {
    check_paths(paths.len())?;
    if !(ds > 0.0) {
        return Err(domain(format!("cell width {ds} must be positive")));
    }
    let mut direct = bins.histogram();
    let mut diagonal = bins.histogram();
    for p in paths {
        let n = p.len();
        let hit = (0..n).find(|&i| p.last_coord(i) >= t).ok_or(Error::InsufficientHorizon {
            reached: p.last_coord(n - 1),
            target: t,
            steps: n - 1,
        })?;
        if hit == 0 {
            return Err(domain("path starts at or above t"));
        }
        direct.add(p.state(hit - 1)[0]);
        let u = p.times()[hit - 1];
        let sk = (u / ds + 1e-9).floor() * ds;
        diagonal.add(p.state_at(sk + 1e-9 * ds)[0]);
    }
    Ok(DensityEstimators { direct, diagonal })
}

/// One replica of the double walk in `d = 1`: `(Y_{N_t}, Y_{m⌊N_t/m⌋})`.
fn ctrw_pair<R: rand::Rng + ?Sized>(
    dk: &DoubleJumpKernel,
    tau: f64,
    t: f64,
    stride: usize,
    step_cap: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let (sx, sv) = (tau.powf(1.0 / dk.spatial().alpha()), tau.powf(1.0 / dk.beta()));
    let mut x = [0.0];
    let mut y = [0.0];
    let mut v = 0.0;
    let mut checkpoint = 0.0;
    for n in 0..step_cap {
        if n % stride == 0 {
            checkpoint = x[0];
        }
        let dv = dk.sample_joint_jump_into(&x, v, rng, &mut y);
        v += sv * dv;
        if v >= t {
            return Ok((x[0], checkpoint));
        }
        x[0] += sx * y[0];
    }
    Err(Error::InsufficientHorizon { reached: v, target: t, steps: step_cap })
}

/// Both estimators by streaming `n` double-walk replicas from the origin,
/// with diagonal cells of `stride` steps. Reproducible for fixed `seed`.
#[allow(clippy::too_many_arguments)]
pub fn ctrw_estimators(
    dk: &DoubleJumpKernel,
    tau: f64,
    t: f64,
    stride: usize,
    n: usize,
    seed: u64,
    bins: Bins,
    step_cap: usize,
) -> Result<DensityEstimators> {
    check_paths(n)?;
    if dk.dim() != 1 {
        return Err(domain("density estimators are one-dimensional"));
    }
    if !(tau > 0.0 && tau <= 1.0) || !(t > 0.0) || stride == 0 {
        return Err(domain(format!("need 0 < tau ≤ 1, t > 0, stride ≥ 1; got {tau}, {t}, {stride}")));
    }
    let pairs = run_replicas(n, seed, |rng| ctrw_pair(dk, tau, t, stride, step_cap, rng));
    let mut direct = bins.histogram();
    let mut diagonal = bins.histogram();
    for p in pairs {
        let (a, b) = p?;
        direct.add(a);
        diagonal.add(b);
    }
    Ok(DensityEstimators { direct, diagonal })
}

/// Stable limit of the clock of `dk`: Laplace exponent `w Γ(1-β)/β · s^β`.
pub fn limit_hitting_law(dk: &DoubleJumpKernel) -> Result<StableHitting> {
    match *dk.weight() {
        WeightFamily::Constant { value } => {
            let b = dk.beta();
            StableHitting::new(b, value * gamma(1.0 - b) / b)
        }
        WeightFamily::Modulated { .. } => Err(domain("limit clock needs a constant weight")),
    }
}

/// Scale `σ` of the spatial limit, `E e^{ipY(u)} = e^{-uσ|p|^α}`.
pub fn limit_spatial_scale(dk: &DoubleJumpKernel) -> Result<f64> {
    let k = dk.spatial();
    if !k.spectral().is_homogeneous() || dk.dim() != 1 {
        return Err(domain("limit scale needs a homogeneous one-dimensional kernel"));
    }
    Ok(-char_exponent(&[1.0], &[0.0], k.spectral(), k.alpha())?)
}

/// Probabilities of `Y(Z(t))` for `Y(0) = 0` on `bins`, with the two
/// out-of-range masses appended as `[below, above]`.
pub fn subordinated_bin_probabilities(
    alpha: f64,
    sigma: f64,
    law: &dyn HittingLaw,
    t: f64,
    bins: Bins,
) -> Result<(Vec<f64>, [f64; 2])> {
    let scale = StableScale::new(sigma)?;
    let cdf = |u: f64, x: f64| symmetric_stable_cdf_1d(u, x, scale, alpha);
    let mut inside = Vec::with_capacity(bins.n);
    for i in 0..bins.n {
        let (a, b) = (bins.edge(i), bins.edge(i + 1));
        inside.push(subordinate_integral(|u| Ok(cdf(u, b)? - cdf(u, a)?), law, t)?.value);
    }
    let below = subordinate_integral(|u| cdf(u, bins.lo), law, t)?.value;
    let above = subordinate_integral(|u| Ok(1.0 - cdf(u, bins.hi)?), law, t)?.value;
    Ok((inside, [below, above]))
}

/// `Σ |p̂_b - p_b|` including the two out-of-range masses.
pub fn l1_distance(h: &EmpiricalDensity, probs: &[f64], tails: [f64; 2]) -> Result<f64> {
    if probs.len() != h.bins() {
        return Err(domain("bin count mismatch"));
    }
    let n = h.total as f64;
    let inner: f64 = (0..h.bins()).map(|i| (h.probability(i) - probs[i]).abs()).sum();
    Ok(inner + (h.below as f64 / n - tails[0]).abs() + (h.above as f64 / n - tails[1]).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::JumpKernel;
    use crate::quad::{integrate_to_inf, Tolerance};
    use crate::rng::replica_stream;
    use crate::walk::{run_ctrw_discrete, run_double_walk, run_replicas, DEFAULT_STEP_CAP};

    fn independent() -> DoubleJumpKernel {
        DoubleJumpKernel::independent(JumpKernel::canonical(1, 1.0).unwrap(), 0.5).unwrap()
    }

    #[test]
    fn too_few_paths_rejected() {
        let dk = independent();
        let paths: Vec<WalkPath> =
            (0..10).map(|i| run_double_walk(&dk, &[0.0], 0.0, 0.01, 3.0, &mut replica_stream(1, i)).unwrap()).collect();
        let b = Bins::new(-1.0, 1.0, 4).unwrap();
        assert!(empirical_joint_density(&paths, 0.5, 1.0, b, b).is_err());
        assert!(subordinated_estimators(&paths, 1.0, 0.1, b).is_err());
    }

    #[test]
    fn independent_components_factorize() {
        let dk = independent();
        let paths = run_replicas(20_000, 3, |rng| run_double_walk(&dk, &[0.0], 0.0, 0.02, 12.0, rng).unwrap());
        let (s, t) = (0.5, 1.0);
        let yb = Bins::new(-3.0, 3.0, 4).unwrap();
        let ub = Bins::new(0.0, 2.0, 4).unwrap();
        let j = empirical_joint_density(&paths, s, t, yb, ub).unwrap();
        for iy in 0..yb.n {
            for iu in 0..ub.n {
                let prod = j.y_probability(iy) * j.u_probability(iu);
                let se = (prod * (1.0 - prod) / j.total as f64).sqrt();
                assert!((j.probability(iy, iu) - prod).abs() < 3.0 * se, "bin ({iy}, {iu})");
            }
        }
    }

    #[test]
    fn drift_clock_collapses_on_t() {
        let k = JumpKernel::canonical(1, 1.0).unwrap();
        let paths: Vec<WalkPath> = (0..1000)
            .map(|i| {
                let p = run_ctrw_discrete(&k, &[0.0], 0.1, 3.0, &mut replica_stream(9, i)).unwrap();
                let times = p.times().to_vec();
                let states = (0..p.len()).flat_map(|j| [p.state(j)[0], times[j]]).collect();
                WalkPath::new(2, times, states).unwrap()
            })
            .collect();
        let ub = Bins::new(0.0, 2.0, 20).unwrap();
        let yb = Bins::new(-50.0, 50.0, 10).unwrap();
        let t = paths[0].times()[7];
        let j = empirical_joint_density(&paths, 0.2, t, yb, ub).unwrap();
        let cell = ub.index(t).unwrap();
        assert_eq!(j.u_marginal[cell], 1000);
        assert_eq!(j.u_marginal.iter().sum::<u64>(), 1000);
    }

    #[test]
    fn estimators_for_coupled_kernel() {
        let dk = DoubleJumpKernel::new(
            JumpKernel::canonical(1, 1.0).unwrap(),
            0.5,
            WeightFamily::Constant { value: 0.5 },
            1.0,
        )
        .unwrap();
        let bins = Bins::new(-4.0, 4.0, 16).unwrap();
        // one-step cells make the two estimators identical
        let e = ctrw_estimators(&dk, 1e-2, 1.0, 1, 2000, 11, bins, DEFAULT_STEP_CAP).unwrap();
        assert_eq!(e.direct, e.diagonal);
        let e = ctrw_estimators(&dk, 2e-3, 1.0, 2, 20_000, 11, bins, DEFAULT_STEP_CAP).unwrap();
        let gap = e.max_standardized_gap();
        assert!(gap < 2.0, "gap {gap}");
    }

    #[test]
    fn stored_and_streamed_estimators_coincide() {
        // same streams, same draws: identical histograms
        let dk = independent();
        let bins = Bins::new(-4.0, 4.0, 8).unwrap();
        let streamed = ctrw_estimators(&dk, 0.05, 1.0, 2, 1000, 21, bins, DEFAULT_STEP_CAP).unwrap();
        let paths = run_replicas(1000, 21, |rng| run_double_walk(&dk, &[0.0], 0.0, 0.05, 60.0, rng).unwrap());
        let stored = subordinated_estimators(&paths, 1.0, 0.1, bins).unwrap();
        assert_eq!(streamed, stored);
    }

    #[test]
    fn bin_probabilities_sum_to_one() {
        let law = StableHitting::new(0.5, gamma(0.5)).unwrap();
        let bins = Bins::new(-5.0, 5.0, 10).unwrap();
        let (p, tails) = subordinated_bin_probabilities(1.0, std::f64::consts::FRAC_PI_2, &law, 1.0, bins).unwrap();
        let s: f64 = p.iter().sum::<f64>() + tails[0] + tails[1];
        assert!((s - 1.0).abs() < 1e-9);
        assert!((tails[0] - tails[1]).abs() < 1e-10);
        // the middle pair of bins against a direct double integral of the Cauchy density
        let direct = integrate_to_inf(
            |u| {
                let g = std::f64::consts::FRAC_PI_2 * u;
                law.density(1.0, u).unwrap() * 2.0 * (1.0 / g).atan() / std::f64::consts::PI
            },
            0.0,
            Tolerance::new(1e-13, 1e-11),
        )
        .unwrap()
        .value;
        assert!((p[4] + p[5] - direct).abs() < 1e-8);
    }

    #[test]
    fn limit_parameters_of_canonical_kernel() {
        let dk = independent();
        assert!((limit_spatial_scale(&dk).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let law = limit_hitting_law(&dk).unwrap();
        assert!((law.rate - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }
}
