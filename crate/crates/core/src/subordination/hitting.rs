//! Hitting-time densities `Q(t, u)` of inverse subordinators.

use std::f64::consts::PI;

use rayon::prelude::*;
use statrs::function::gamma::gamma;

use crate::error::{check_beta, domain, Error, Result};
use crate::quad::trapezoid;
use crate::stable::subordinator_density;

/// Default clipping tolerance for negative mass.
pub const NEGATIVE_MASS_LIMIT: f64 = 1e-3;

/// Samples of `G(u, y)` on a uniform `u`-axis starting at 0 and an
/// increasing positive `y`-axis. Rows are indexed by `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct GGrid {
    u: Vec<f64>,
    y: Vec<f64>,
    values: Vec<f64>,
}

impl GGrid {
    pub fn new(u: Vec<f64>, y: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if u.len() < 3 || u[0] != 0.0 {
            return Err(domain("u-axis needs at least 3 nodes starting at 0"));
        }
        let du = u[1] - u[0];
        if u.windows(2).any(|w| ((w[1] - w[0]) - du).abs() > 1e-9 * du) {
            return Err(domain("u-axis must be uniform"));
        }
        if y.len() < 2 || y[0] <= 0.0 || y.windows(2).any(|w| w[1] <= w[0]) {
            return Err(domain("y-axis must be positive and strictly increasing"));
        }
        if values.len() != u.len() * y.len() {
            return Err(domain("G values do not match the axes"));
        }
        Ok(Self { u, y, values })
    }

    /// `G` of the standard β-stable subordinator via its density.
    pub fn stable(beta: f64, du: f64, u_max: f64, y: Vec<f64>) -> Result<Self> {
        check_beta(beta)?;
        let n = (u_max / du).round() as usize;
        let u: Vec<f64> = (0..=n).map(|i| i as f64 * du).collect();
        let ny = y.len();
        let rows: Result<Vec<Vec<f64>>> = u
            .par_iter()
            .map(|&ui| {
                if ui == 0.0 {
                    return Ok(vec![0.0; ny]);
                }
                y.iter().map(|&yj| subordinator_density(ui, yj, beta)).collect()
            })
            .collect();
        Self::new(u.clone(), y, rows?.concat())
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn row(&self, iu: usize) -> &[f64] {
        let ny = self.y.len();
        &self.values[iu * ny..(iu + 1) * ny]
    }

    pub fn du(&self) -> f64 {
        self.u[1] - self.u[0]
    }
}

/// Geometric nodes from `lo` to `hi` with `per_decade` points per decade,
/// merged with `extra` nodes.
pub fn geometric_nodes(lo: f64, hi: f64, per_decade: usize, extra: &[f64]) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || per_decade == 0 {
        return Err(domain(format!("bad geometric range [{lo}, {hi}]")));
    }
    let n = ((hi / lo).log10() * per_decade as f64).ceil() as usize;
    let r = (hi / lo).powf(1.0 / n as f64);
    let mut v: Vec<f64> = (0..=n).map(|k| lo * r.powi(k as i32)).collect();
    v[n] = hi;
    v.extend(extra.iter().copied().filter(|&e| e > 0.0));
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    Ok(v)
}

/// `y`-nodes resolving the stable density down to the smallest nonzero `u`.
pub fn stable_y_nodes(beta: f64, du: f64, t_values: &[f64]) -> Result<Vec<f64>> {
    check_beta(beta)?;
    let hi = t_values.iter().copied().fold(0.0, f64::max);
    geometric_nodes(1e-6 * du.powf(1.0 / beta), hi, 100, t_values)
}

/// `Q(t, ·)` on the `u`-axis of a [`GGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct HittingProfile {
    pub t: f64,
    pub u: Vec<f64>,
    pub q: Vec<f64>,
    /// Mass removed by clipping negative values.
    pub clipped_mass: f64,
    /// `∫₀^{du} Q`, reported apart from the rest of the profile.
    pub first_cell_mass: f64,
}

impl HittingProfile {
    pub fn mass(&self) -> f64 {
        trapezoid(&self.u, &self.q)
    }
}

/// `Q(t, u) = -∂/∂u ∫₀^t G(u, y) dy`: trapezoid in `ln y`, then second-order
/// differences in `u` with `F(0) = 1`. Negative values are clipped; in
/// strict mode a clipped mass above [`NEGATIVE_MASS_LIMIT`] is an error.
pub fn hitting_density_from_g(g: &GGrid, t: f64, strict: bool) -> Result<HittingProfile> {
    let y = g.y();
    if !(t > 0.0 && t <= y[y.len() - 1]) {
        return Err(domain(format!("t = {t} outside the y-range of the G grid")));
    }
    let k = y.partition_point(|&v| v <= t);
    // trapezoid in ln y: interior errors cancel for the bell-shaped y G(u, y)
    let lny: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let cdf = |iu: usize| -> f64 {
        if iu == 0 {
            return 1.0;
        }
        let row = g.row(iu);
        let w: Vec<f64> = y.iter().zip(row).map(|(a, b)| a * b).collect();
        // G ≈ 0 below the first node
        let mut f = trapezoid(&lny[..k], &w[..k]);
        if k < y.len() && y[k - 1] < t {
            let (l0, l1, lt) = (lny[k - 1], lny[k], t.ln());
            let wt = w[k - 1] + (w[k] - w[k - 1]) * (lt - l0) / (l1 - l0);
            f += 0.5 * (w[k - 1] + wt) * (lt - l0);
        }
        f
    };
    let n = g.u().len();
    let f: Vec<f64> = (0..n).map(cdf).collect();
    let h = g.du();
    let mut q = vec![0.0; n];
    q[0] = -(-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for i in 1..n - 1 {
        q[i] = -(f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    q[n - 1] = -(3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    let mut clipped = 0.0;
    for v in q.iter_mut() {
        if *v < 0.0 {
            clipped += -*v * h;
            *v = 0.0;
        }
    }
    if strict && clipped > NEGATIVE_MASS_LIMIT {
        return Err(Error::NegativeMass { t, mass: clipped, limit: NEGATIVE_MASS_LIMIT });
    }
    let first_cell_mass = 0.5 * (q[0] + q[1]) * h;
    Ok(HittingProfile { t, u: g.u().to_vec(), q, clipped_mass: clipped, first_cell_mass })
}

/// `Q(t, u)` sampled on a `(t, u)` grid. Rows are indexed by `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct HittingDensityGrid {
    t: Vec<f64>,
    u: Vec<f64>,
    values: Vec<f64>,
}

impl HittingDensityGrid {
    pub fn new(t: Vec<f64>, u: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != t.len() * u.len() || t.is_empty() || u.len() < 2 {
            return Err(domain("Q values do not match the axes"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(domain(format!(
                "Q({}, {}) = {} is not a nonnegative number",
                t[i / u.len()],
                u[i % u.len()],
                values[i]
            )));
        }
        Ok(Self { t, u, values })
    }

    pub fn from_fn(t: Vec<f64>, u: Vec<f64>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = t.iter().flat_map(|&ti| u.iter().map(move |&uj| (ti, uj))).map(|(a, b)| f(a, b)).collect();
        Self::new(t, u, values)
    }

    pub fn from_profiles(profiles: &[HittingProfile]) -> Result<Self> {
        let first = profiles.first().ok_or_else(|| domain("no profiles"))?;
        if profiles.iter().any(|p| p.u != first.u) {
            return Err(domain("profiles live on different u-axes"));
        }
        let t = profiles.iter().map(|p| p.t).collect();
        let values = profiles.iter().flat_map(|p| p.q.iter().copied()).collect();
        Self::new(t, first.u.clone(), values)
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, it: usize) -> &[f64] {
        let nu = self.u.len();
        &self.values[it * nu..(it + 1) * nu]
    }

    pub fn value(&self, it: usize, iu: usize) -> f64 {
        self.values[it * self.u.len() + iu]
    }

    /// `∫ Q(t_i, u) du` over the grid.
    pub fn mass(&self, it: usize) -> f64 {
        trapezoid(&self.u, self.row(it))
    }

    /// Linear interpolation in `u` at row `it`; zero outside the axis.
    pub fn interpolate(&self, it: usize, u: f64) -> f64 {
        interpolate(&self.u, self.row(it), u)
    }
}

pub(crate) fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x < xs[0] || x > xs[n - 1] {
        return 0.0;
    }
    let k = xs.partition_point(|&v| v <= x).clamp(1, n - 1);
    let (x0, x1) = (xs[k - 1], xs[k]);
    ys[k - 1] + (ys[k] - ys[k - 1]) * (x - x0) / (x1 - x0)
}

/// Closed form for `β = 1/2`: `(πt)^{-1/2} exp(-u²/(4t))`.
pub fn inverse_half_stable_density(t: f64, u: f64) -> f64 {
    (-u * u / (4.0 * t)).exp() / (PI * t).sqrt()
}

/// Density of `Z(t)` for the standard β-stable subordinator,
/// `Q(t, u) = t^{-β} M(u t^{-β})` with
/// `M(v) = v^{-1-1/β} g(v^{-1/β}) / β` and `M(0) = 1/Γ(1-β)`.
pub fn inverse_stable_density(t: f64, u: f64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if !(t > 0.0 && t.is_finite()) || !(u >= 0.0) {
        return Err(domain(format!("need t > 0 and u ≥ 0, got t = {t}, u = {u}")));
    }
    if beta == 0.5 {
        return Ok(inverse_half_stable_density(t, u));
    }
    let scale = t.powf(-beta);
    let v = u * scale;
    if v < 1e-4 {
        // two leading terms of the series of M
        return Ok(scale * (1.0 / gamma(1.0 - beta) - v / gamma(1.0 - 2.0 * beta)));
    }
    let z = v.powf(-1.0 / beta);
    Ok(scale * v.powf(-1.0 - 1.0 / beta) * subordinator_density(1.0, z, beta)? / beta)
}

/// Source of `Q(t, ·)` for subordination integrals.
pub trait HittingLaw: Sync {
    /// `Q(t, u)`.
    fn density(&self, t: f64, u: f64) -> Result<f64>;

    /// `Some(z)` when `Z(t) = z` is deterministic.
    fn atom(&self, _t: f64) -> Option<f64> {
        None
    }

    /// Breakpoints for quadrature in `u` and whether the support is unbounded
    /// beyond the last one.
    fn breaks(&self, t: f64) -> (Vec<f64>, bool);
}

/// Inverse of a β-stable subordinator with Laplace exponent `K s^β`,
/// i.e. `Q_K(t, u) = K Q(t, K u)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StableHitting {
    pub beta: f64,
    pub rate: f64,
}

impl StableHitting {
    pub fn new(beta: f64, rate: f64) -> Result<Self> {
        check_beta(beta)?;
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(domain(format!("Laplace rate {rate} must be positive")));
        }
        Ok(Self { beta, rate })
    }

    pub fn standard(beta: f64) -> Result<Self> {
        Self::new(beta, 1.0)
    }
}

impl HittingLaw for StableHitting {
    fn density(&self, t: f64, u: f64) -> Result<f64> {
        Ok(self.rate * inverse_stable_density(t, self.rate * u, self.beta)?)
    }

    fn breaks(&self, t: f64) -> (Vec<f64>, bool) {
        let s = t.powf(self.beta) / self.rate;
        (vec![1e-2 * s, 0.3 * s, s, 3.0 * s, 10.0 * s], true)
    }
}

/// Pure-drift clock `X(u) = a u`, so `Z(t) = t / a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriftHitting {
    pub drift: f64,
}

impl HittingLaw for DriftHitting {
    fn density(&self, _t: f64, _u: f64) -> Result<f64> {
        Err(domain("drift clock has no hitting density"))
    }

    fn atom(&self, t: f64) -> Option<f64> {
        Some(t / self.drift)
    }

    fn breaks(&self, t: f64) -> (Vec<f64>, bool) {
        (vec![t / self.drift], false)
    }
}

/// Tabulated `Q(t, ·)` at a single `t`, linear between nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedHitting {
    pub t: f64,
    pub u: Vec<f64>,
    pub q: Vec<f64>,
}

impl TabulatedHitting {
    pub fn new(t: f64, u: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if u.len() != q.len() || u.len() < 2 || u[0] < 0.0 || u.windows(2).any(|w| w[1] <= w[0]) {
            return Err(domain("tabulated Q needs increasing nonnegative nodes"));
        }
        Ok(Self { t, u, q })
    }

    pub fn from_profile(p: &HittingProfile) -> Self {
        Self { t: p.t, u: p.u.clone(), q: p.q.clone() }
    }
}

impl HittingLaw for TabulatedHitting {
    fn density(&self, t: f64, u: f64) -> Result<f64> {
        if (t - self.t).abs() > 1e-12 * self.t.abs().max(1.0) {
            return Err(domain(format!("table holds t = {}, asked for {t}", self.t)));
        }
        Ok(interpolate(&self.u, &self.q, u))
    }

    fn breaks(&self, _t: f64) -> (Vec<f64>, bool) {
        (self.u.iter().copied().filter(|&u| u > 0.0).collect(), false)
    }
}
