//! Monte Carlo walks: the exponential-clock jump process, the discrete-step
//! walk, the double-scaled walk `(Y, V)`, hitting times of `V` and the
//! subordinated CTRW.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::kernels::{DoubleJumpKernel, JumpKernel};
use crate::quad::NeumaierSum;
use crate::rng::{replica_stream, Stream};

/// Right-continuous piecewise-constant trajectory.
///
/// `states` is stored flat with `width` coordinates per event; for double
/// walks the last coordinate is `V`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkPath {
    width: usize,
    times: Vec<f64>,
    states: Vec<f64>,
}

impl WalkPath {
    pub fn new(width: usize, times: Vec<f64>, states: Vec<f64>) -> Result<Self> {
        if width == 0 || states.len() != width * times.len() || times.is_empty() {
            return Err(domain("path states must hold `width` coordinates per event time"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times[0] < 0.0 {
            return Err(domain("path event times must be non-negative and strictly increasing"));
        }
        Ok(Self { width, times, states })
    }

    fn start(width: usize, x0: &[f64]) -> Self {
        Self { width, times: vec![0.0], states: x0.to_vec() }
    }

    fn push(&mut self, t: f64, state: &[f64]) {
        self.times.push(t);
        self.states.extend_from_slice(state);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.width..(i + 1) * self.width]
    }

    /// Last coordinate at event `i`.
    pub fn last_coord(&self, i: usize) -> f64 {
        self.states[(i + 1) * self.width - 1]
    }

    /// State in force at time `t` (right-continuous).
    pub fn state_at(&self, t: f64) -> &[f64] {
        let i = self.times.partition_point(|&s| s <= t).saturating_sub(1);
        self.state(i)
    }

    pub fn final_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }
}

fn check_h(h: f64) -> Result<()> {
    if h > 0.0 && h <= 1.0 {
        Ok(())
    } else {
        Err(domain(format!("scale h = {h} must lie in (0, 1]")))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("time {t} must be finite and non-negative")))
    }
}

/// Jump process with exponential waits of rate `h^{-α}` and jumps `h Y`.
pub fn run_ctrw_exponential<R: Rng + ?Sized>(
    k: &JumpKernel,
    x0: &[f64],
    h: f64,
    t_end: f64,
    rng: &mut R,
) -> Result<WalkPath> {
    check_h(h)?;
    check_time(t_end)?;
    let d = k.dim();
    let mean_wait = h.powf(k.alpha());
    let mut path = WalkPath::start(d, x0);
    let mut x = x0.to_vec();
    let mut y = vec![0.0; d];
    let mut t = 0.0;
    loop {
        let w: f64 = Exp1.sample(rng);
        let next = t + mean_wait * w;
        if next > t_end || next <= t {
            break;
        }
        t = next;
        k.sample_jump_into(&x, rng, &mut y);
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi += h * yi;
        }
        path.push(t, &x);
    }
    Ok(path)
}

/// Position of the exponential-clock process at `t_end`, without storing
/// the path.
pub fn ctrw_exponential_endpoint<R: Rng + ?Sized>(
    k: &JumpKernel,
    x0: &[f64],
    h: f64,
    t_end: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_h(h)?;
    check_time(t_end)?;
    let mean_wait = h.powf(k.alpha());
    let mut x = x0.to_vec();
    let mut y = vec![0.0; k.dim()];
    let mut t = 0.0;
    loop {
        let w: f64 = Exp1.sample(rng);
        t += mean_wait * w;
        if t > t_end {
            return Ok(x);
        }
        k.sample_jump_into(&x, rng, &mut y);
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi += h * yi;
        }
    }
}

/// Number of discrete steps `⌊t / h^α⌋`.
pub fn discrete_steps(alpha: f64, h: f64, t: f64) -> usize {
    (t / h.powf(alpha) + 1e-9).floor() as usize
}

/// Walk `S(j) = S(j-1) + h Y_j` at times `j τ`, `τ = h^α`.
pub fn run_ctrw_discrete<R: Rng + ?Sized>(
    k: &JumpKernel,
    x0: &[f64],
    h: f64,
    t_end: f64,
    rng: &mut R,
) -> Result<WalkPath> {
    check_h(h)?;
    check_time(t_end)?;
    let d = k.dim();
    let tau = h.powf(k.alpha());
    let n = discrete_steps(k.alpha(), h, t_end);
    let mut path = WalkPath::start(d, x0);
    let mut x = x0.to_vec();
    let mut y = vec![0.0; d];
    for j in 1..=n {
        k.sample_jump_into(&x, rng, &mut y);
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi += h * yi;
        }
        path.push(j as f64 * tau, &x);
    }
    Ok(path)
}

/// `S(steps)` without storing the path.
pub fn ctrw_discrete_endpoint<R: Rng + ?Sized>(
    k: &JumpKernel,
    x0: &[f64],
    h: f64,
    steps: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_h(h)?;
    let mut x = x0.to_vec();
    let mut y = vec![0.0; k.dim()];
    for _ in 0..steps {
        k.sample_jump_into(&x, rng, &mut y);
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi += h * yi;
        }
    }
    Ok(x)
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau <= 1.0 {
        Ok(())
    } else {
        Err(domain(format!("tau = {tau} must lie in (0, 1]")))
    }
}

/// Double walk with steps `(τ^{1/α} Y_j, τ^{1/β} V_j)` at operational
/// times `j τ`, `j ≤ ⌊t_end / τ⌋`. States are `(x, v)`.
pub fn run_double_walk<R: Rng + ?Sized>(
    dk: &DoubleJumpKernel,
    x0: &[f64],
    u0: f64,
    tau: f64,
    t_end: f64,
    rng: &mut R,
) -> Result<WalkPath> {
    check_tau(tau)?;
    check_time(t_end)?;
    check_time(u0)?;
    let d = dk.dim();
    let (sx, sv) = (tau.powf(1.0 / dk.spatial().alpha()), tau.powf(1.0 / dk.beta()));
    let n = (t_end / tau + 1e-9).floor() as usize;
    let mut state: Vec<f64> = x0.iter().copied().chain(std::iter::once(u0)).collect();
    let mut path = WalkPath::start(d + 1, &state);
    let mut y = vec![0.0; d];
    for j in 1..=n {
        let v = dk.sample_joint_jump_into(&state[..d], state[d], rng, &mut y);
        for (xi, yi) in state[..d].iter_mut().zip(&y) {
            *xi += sx * yi;
        }
        state[d] += sv * v;
        path.push(j as f64 * tau, &state);
    }
    Ok(path)
}

/// First path time at which the last coordinate `V` reaches `t`:
/// `Z = inf{u : V(u) ≥ t}`, so that `Z ≤ u ⟺ V(u) ≥ t` for every `u`.
pub fn hitting_time_of_path(path: &WalkPath, t: f64) -> Result<f64> {
    check_time(t)?;
    let n = path.len();
    let idx = (0..n).find(|&i| path.last_coord(i) >= t);
    match idx {
        Some(i) => Ok(path.times()[i]),
        None => Err(Error::InsufficientHorizon {
            reached: path.last_coord(n - 1),
            target: t,
            steps: n - 1,
        }),
    }
}

/// Step cap for subordinated walks.
pub const DEFAULT_STEP_CAP: usize = 1 << 20;

/// Outcome of one subordinated CTRW replica.
#[derive(Clone, Debug, PartialEq)]
pub struct SubordinatedSample {
    /// `Y` at the last step before `V` reaches `t`.
    pub y: Vec<f64>,
    /// Number of completed steps `N_t`.
    pub steps: usize,
    /// `Z(t) = (N_t + 1) τ`.
    pub hitting_time: f64,
}

/// Simulates `(Y, V)` from `(x0, 0)` until `V ≥ t` and returns `Y` at step
/// `N_t = ⌊Z(t) / τ⌋ - 1`, the last step before `V` reaches `t`.
pub fn run_subordinated_ctrw<R: Rng + ?Sized>(
    dk: &DoubleJumpKernel,
    x0: &[f64],
    tau: f64,
    t: f64,
    step_cap: usize,
    rng: &mut R,
) -> Result<SubordinatedSample> {
    check_tau(tau)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain(format!("physical time {t} must be positive")));
    }
    let d = dk.dim();
    let (sx, sv) = (tau.powf(1.0 / dk.spatial().alpha()), tau.powf(1.0 / dk.beta()));
    let mut x = x0.to_vec();
    let mut y = vec![0.0; d];
    let mut v = 0.0;
    for n in 0..step_cap {
        let dv = dk.sample_joint_jump_into(&x, v, rng, &mut y);
        let next = v + sv * dv;
        if next >= t {
            return Ok(SubordinatedSample {
                y: x,
                steps: n,
                hitting_time: (n + 1) as f64 * tau,
            });
        }
        v = next;
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi += sx * yi;
        }
    }
    Err(Error::InsufficientHorizon { reached: v, target: t, steps: step_cap })
}

/// Mean and standard error of a Monte Carlo estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

/// Mean and standard error of `values` with compensated sums.
pub fn summarize(values: &[f64]) -> McEstimate {
    let n = values.len();
    let mut s = NeumaierSum::default();
    values.iter().for_each(|&v| s.add(v));
    let mean = s.value() / n as f64;
    let mut q = NeumaierSum::default();
    values.iter().for_each(|&v| q.add((v - mean) * (v - mean)));
    let var = if n > 1 { q.value() / (n - 1) as f64 } else { 0.0 };
    McEstimate { mean, std_error: (var / n as f64).sqrt(), n }
}

/// Runs `runner` once per replica on stream `replica_stream(seed, i)`
/// in parallel, returning results in replica order.
pub fn run_replicas<T, F>(n: usize, master_seed: u64, runner: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut Stream) -> T + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|i| runner(&mut replica_stream(master_seed, i as u64)))
        .collect()
}

/// `E f(runner())` over `n` independent replicas. Bit-reproducible for a
/// fixed `(master_seed, n)` regardless of the worker count.
pub fn monte_carlo_expectation<T, F, G>(
    runner: F,
    f: G,
    n: usize,
    master_seed: u64,
) -> Result<McEstimate>
where
    F: Fn(&mut Stream) -> Result<T> + Sync,
    G: Fn(&T) -> f64 + Sync,
    T: Send,
{
    if n < 2 {
        return Err(domain("monte_carlo_expectation needs at least two replicas"));
    }
    let values: Result<Vec<f64>> =
        run_replicas(n, master_seed, |rng| runner(rng).map(|s| f(&s))).into_iter().collect();
    Ok(summarize(&values?))
}

/// Uniform histogram with out-of-range counts.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDensity {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub below: u64,
    pub above: u64,
    pub total: u64,
}

impl EmpiricalDensity {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(hi > lo) || bins < 1 {
            return Err(domain("histogram needs hi > lo and at least one bin"));
        }
        Ok(Self { lo, hi, counts: vec![0; bins], below: 0, above: 0, total: 0 })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn edge(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.width()
    }

    pub fn center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.width()
    }

    pub fn add(&mut self, x: f64) {
        self.total += 1;
        if x < self.lo {
            self.below += 1;
        } else if x >= self.hi {
            self.above += 1;
        } else {
            let last = self.bins() - 1;
            let i = ((x - self.lo) / self.width()) as usize;
            self.counts[i.min(last)] += 1;
        }
    }

    /// Adds the counts of another histogram with identical bins.
    pub fn merge(&mut self, other: &Self) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.below += other.below;
        self.above += other.above;
        self.total += other.total;
    }

    /// `count / (N · width)`.
    pub fn density(&self, i: usize) -> f64 {
        self.counts[i] as f64 / (self.total as f64 * self.width())
    }

    /// Binomial standard error of `density(i)`.
    pub fn density_std_error(&self, i: usize) -> f64 {
        let n = self.total as f64;
        let p = self.counts[i] as f64 / n;
        (p * (1.0 - p) / n).sqrt() / self.width()
    }

    pub fn probability(&self, i: usize) -> f64 {
        self.counts[i] as f64 / self.total as f64
    }

    /// Fraction of samples inside `[lo, hi)`.
    pub fn in_range_fraction(&self) -> f64 {
        self.counts.iter().sum::<u64>() as f64 / self.total as f64
    }
}

/// Histogram density of `samples` on `bins` uniform bins over `[lo, hi)`.
pub fn estimate_density(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Result<EmpiricalDensity> {
    if samples.is_empty() {
        return Err(domain("estimate_density needs at least one sample"));
    }
    let mut h = EmpiricalDensity::new(lo, hi, bins)?;
    samples.iter().for_each(|&x| h.add(x));
    Ok(h)
}

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and
/// `cdf`, evaluating `cdf` at every `stride`-th order statistic and bounding
/// the skipped gaps by monotonicity.
pub fn ks_distance<F: Fn(f64) -> Result<f64>>(samples: &[f64], cdf: F, stride: usize) -> Result<f64> {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n == 0 {
        return Err(domain("ks_distance needs samples"));
    }
    let stride = stride.max(1);
    let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
    if *idx.last().unwrap() != n - 1 {
        idx.push(n - 1);
    }
    let vals: Result<Vec<f64>> = idx.iter().map(|&i| cdf(xs[i])).collect();
    let vals = vals?;
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (k, &i) in idx.iter().enumerate() {
        let f = vals[k];
        d = d.max((i as f64 + 1.0) / nf - f).max(f - i as f64 / nf);
        // between evaluated order statistics the CDF is bracketed by its
        // values at the ends of the gap
        if k + 1 < idx.len() {
            let j = idx[k + 1];
            let fnext = vals[k + 1];
            d = d.max(j as f64 / nf - f).max(fnext - (i as f64 + 1.0) / nf);
        }
    }
    Ok(d)
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}
