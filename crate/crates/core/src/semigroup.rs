//! Grid discretizations of the stable-like generator `L`, the double
//! generator `𝓛` on `(x, u)`, explicit time stepping, the Markov-chain
//! scheme `f_k = R_h^k f` and convergence tables.
//!
//! The spatial integral is written with the symmetrized second difference
//! `D(r) = f(x+r) + f(x-r) - 2 f(x)` as `S(x) ∫ φ(r) r^{1-α} dr` with
//! `φ = D / r²`; `φ` is interpolated linearly between nodes and integrated
//! exactly against `r^{1-α}`, with `φ(0)` replaced by `φ(h)`. Values beyond
//! the grid come from the extension policy, and the remainder of the radial
//! integral past the farthest node is added in closed form.

use rayon::prelude::*;

use crate::error::{check_alpha, check_beta, domain, Error, Result};
use crate::kernels::{DoubleJumpKernel, JumpKernel, WeightFamily};
use crate::quad::{integrate_to_inf, Tolerance};
use crate::stable::SpectralDensity;
use crate::walk::{ctrw_discrete_endpoint, ctrw_exponential_endpoint, discrete_steps, run_replicas, summarize};

/// Uniform axis with `n` nodes on `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    lo: f64,
    hi: f64,
    n: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(domain(format!("axis bounds [{lo}, {hi}] invalid")));
        }
        if n < 16 {
            return Err(domain(format!("axis needs at least 16 nodes, got {n}")));
        }
        Ok(Self { lo, hi, n })
    }

    /// Axis on `[lo, hi]` with the given spacing, which must divide the
    /// length.
    pub fn with_spacing(lo: f64, hi: f64, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(domain(format!("spacing {spacing} must be positive")));
        }
        let cells = (hi - lo) / spacing;
        let n = cells.round();
        if (cells - n).abs() > 1e-6 * n.max(1.0) {
            return Err(domain(format!("spacing {spacing} does not divide [{lo}, {hi}]")));
        }
        Self::new(lo, hi, n as usize + 1)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.hi
        } else {
            self.lo + i as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Index of the node nearest to `x`, if `x` lies on the axis.
    pub fn locate(&self, x: f64) -> Option<usize> {
        let h = self.spacing();
        if x < self.lo - 1e-9 * h || x > self.hi + 1e-9 * h {
            return None;
        }
        Some((((x - self.lo) / h).round() as usize).min(self.n - 1))
    }
}

/// A line `x` or a product `(x, u)` with `u ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum Grid {
    Line(Axis),
    Product { x: Axis, u: Axis },
}

impl Grid {
    pub fn line(lo: f64, hi: f64, spacing: f64) -> Result<Self> {
        Ok(Grid::Line(Axis::with_spacing(lo, hi, spacing)?))
    }

    pub fn product(x: Axis, u: Axis) -> Result<Self> {
        if u.lo() != 0.0 {
            return Err(domain("u-axis of a product grid must start at 0"));
        }
        Ok(Grid::Product { x, u })
    }

    pub fn x_axis(&self) -> &Axis {
        match self {
            Grid::Line(a) => a,
            Grid::Product { x, .. } => x,
        }
    }

    pub fn u_axis(&self) -> Option<&Axis> {
        match self {
            Grid::Line(_) => None,
            Grid::Product { u, .. } => Some(u),
        }
    }

    pub fn len(&self) -> usize {
        self.x_axis().len() * self.u_axis().map_or(1, |u| u.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Value assumed outside the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Extension {
    Zero,
    Constant(f64),
}

impl Extension {
    pub fn value(&self) -> f64 {
        match *self {
            Extension::Zero => 0.0,
            Extension::Constant(c) => c,
        }
    }
}

/// Node values on a grid; product grids are stored with `x` fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
    extension: Extension,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>, extension: Extension) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(domain("value count does not match grid size"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { value: values[i], at: format!("grid node {i}") });
        }
        Ok(Self { grid, values, extension })
    }

    /// Samples `f` on a line grid with zero extension.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = match &grid {
            Grid::Line(a) => a.nodes().into_iter().map(f).collect(),
            Grid::Product { .. } => return Err(domain("from_fn expects a line grid")),
        };
        Self::new(grid, values, Extension::Zero)
    }

    /// Samples `f(x, u)` on a product grid with zero extension.
    pub fn from_fn2(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let (xa, ua) = match &grid {
            Grid::Product { x, u } => (*x, *u),
            Grid::Line(_) => return Err(domain("from_fn2 expects a product grid")),
        };
        let mut values = Vec::with_capacity(xa.len() * ua.len());
        for j in 0..ua.len() {
            for i in 0..xa.len() {
                values.push(f(xa.node(i), ua.node(j)));
            }
        }
        Self::new(grid, values, Extension::Zero)
    }

    pub fn with_extension(mut self, extension: Extension) -> Self {
        self.extension = extension;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `Σ f_i · spacing` on a line grid.
    pub fn mass(&self) -> f64 {
        crate::quad::neumaier_sum(self.values.iter().copied()) * self.grid.x_axis().spacing()
    }
}

/// Linear-interpolation product weights `∫ (1-θ) r^{p}` and `∫ θ r^{p}` on
/// panels `[j h, (j+1) h]`.
fn product_weights(h: f64, power: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let m = power + 1.0;
    let mut a = Vec::with_capacity(panels);
    let mut b = Vec::with_capacity(panels);
    for j in 0..panels {
        let (lo, hi) = (j as f64 * h, (j + 1) as f64 * h);
        let i0 = (hi.powf(m) - lo.powf(m)) / m;
        let i1 = (hi.powf(m + 1.0) - lo.powf(m + 1.0)) / (m + 1.0);
        let bj = (i1 - lo * i0) / h;
        b.push(bj);
        a.push(i0 - bj);
    }
    (a, b)
}

/// Radial weights of the spatial generator for one spacing and index.
#[derive(Clone, Debug)]
struct SpatialStencil {
    interior: Vec<f64>,
    last: Vec<f64>,
    tail: Vec<f64>,
}

impl SpatialStencil {
    fn new(h: f64, alpha: f64, kmax: usize) -> Self {
        let (a, b) = product_weights(h, 1.0 - alpha, kmax + 1);
        let mut interior = vec![0.0; kmax + 1];
        let mut last = vec![0.0; kmax + 1];
        let mut tail = vec![0.0; kmax + 1];
        for k in 1..=kmax {
            let r2 = (k as f64 * h).powi(2);
            interior[k] = if k == 1 { (a[0] + a[1] + b[0]) / r2 } else { (a[k] + b[k - 1]) / r2 };
            last[k] = if k == 1 { (a[0] + b[0]) / r2 } else { b[k - 1] / r2 };
            tail[k] = (k as f64 * h).powf(-alpha) / alpha;
        }
        Self { interior, last, tail }
    }

    fn coef(&self, k: usize, reach: usize) -> f64 {
        if k == reach {
            self.last[k]
        } else {
            self.interior[k]
        }
    }
}

/// Spatial generator on a line with spacing `h`.
struct SpatialOperator {
    n: usize,
    s: Vec<f64>,
    stencil: SpatialStencil,
}

impl SpatialOperator {
    fn new(spec: &SpectralDensity, alpha: f64, axis: &Axis, u: Option<f64>) -> Result<Self> {
        check_alpha(alpha)?;
        if spec.dim() != 1 {
            return Err(domain("grid generators support one spatial dimension"));
        }
        let n = axis.len();
        let s = (0..n)
            .map(|i| {
                let mut pos = vec![axis.node(i)];
                pos.extend(u);
                spec.eval(&pos, &[1.0])
            })
            .collect();
        Ok(Self { n, s, stencil: SpatialStencil::new(axis.spacing(), alpha, n) })
    }

    fn reach(&self, i: usize) -> usize {
        i.max(self.n - 1 - i)
    }

    /// `(L f)_i` for a line of values with outside value `b`.
    fn apply_at(&self, f: &[f64], b: f64, i: usize) -> f64 {
        let reach = self.reach(i);
        let fi = f[i];
        let mut acc = 0.0;
        for k in 1..=reach {
            let right = if i + k < self.n { f[i + k] } else { b };
            let left = if k <= i { f[i - k] } else { b };
            acc += self.stencil.coef(k, reach) * (right + left - 2.0 * fi);
        }
        acc += self.stencil.tail[reach] * (2.0 * b - 2.0 * fi);
        self.s[i] * acc
    }

    /// Diagonal entry of the generator matrix.
    fn diagonal(&self, i: usize) -> f64 {
        let reach = self.reach(i);
        let sum: f64 = (1..=reach).map(|k| self.stencil.coef(k, reach)).sum();
        -2.0 * self.s[i] * (sum + self.stencil.tail[reach])
    }

    /// `(Lᵀ f)_j` with zero extension.
    fn apply_transpose_at(&self, f: &[f64], j: usize) -> f64 {
        let mut acc = self.diagonal(j) * f[j];
        for (i, (&s, &fi)) in self.s.iter().zip(f).enumerate().take(self.n) {
            if i != j {
                acc += s * fi * self.stencil.coef(i.abs_diff(j), self.reach(i));
            }
        }
        acc
    }

    fn max_diagonal(&self) -> f64 {
        (0..self.n).map(|i| self.diagonal(i).abs()).fold(0.0, f64::max)
    }
}

/// One-sided temporal weights for spacing `k` and index `β`.
struct TemporalStencil {
    interior: Vec<f64>,
    last: Vec<f64>,
    tail: Vec<f64>,
}

impl TemporalStencil {
    fn new(k: f64, beta: f64, jmax: usize) -> Self {
        let (a, b) = product_weights(k, -beta, jmax + 1);
        let mut interior = vec![0.0; jmax + 1];
        let mut last = vec![0.0; jmax + 1];
        let mut tail = vec![0.0; jmax + 1];
        // the reach-0 node integrates only past the inner cutoff v = k
        tail[0] = k.powf(-beta) / beta;
        for j in 1..=jmax {
            let v = j as f64 * k;
            interior[j] = if j == 1 { (a[0] + a[1] + b[0]) / v } else { (a[j] + b[j - 1]) / v };
            last[j] = if j == 1 { (a[0] + b[0]) / v } else { b[j - 1] / v };
            tail[j] = v.powf(-beta) / beta;
        }
        Self { interior, last, tail }
    }

    /// `∫₀^∞ (f(u+v) - f(u)) v^{-1-β} dv` at column index `iu` of `col`.
    fn apply_at(&self, col: impl Fn(usize) -> f64, n: usize, b: f64, iu: usize) -> f64 {
        let reach = n - 1 - iu;
        let fu = col(iu);
        let mut acc = 0.0;
        for j in 1..=reach {
            let c = if j == reach { self.last[j] } else { self.interior[j] };
            acc += c * (col(iu + j) - fu);
        }
        acc + self.tail[reach] * (b - fu)
    }
}

fn node_index(axis: &Axis, x: f64) -> Result<usize> {
    axis.locate(x)
        .filter(|&i| (axis.node(i) - x).abs() <= 1e-9 * axis.spacing().max(1.0))
        .ok_or_else(|| domain(format!("point {x} is not a grid node")))
}

/// `L f(x)` at a node of a line grid.
pub fn apply_generator(s: &SpectralDensity, alpha: f64, f: &GridFunction, x: f64) -> Result<f64> {
    let axis = match f.grid() {
        Grid::Line(a) => *a,
        Grid::Product { .. } => return Err(domain("apply_generator expects a line grid")),
    };
    let i = node_index(&axis, x)?;
    let op = SpatialOperator::new(s, alpha, &axis, None)?;
    Ok(op.apply_at(f.values(), f.extension().value(), i))
}

/// `L f` at every node of a line grid.
pub fn apply_generator_all(s: &SpectralDensity, alpha: f64, f: &GridFunction) -> Result<Vec<f64>> {
    let axis = match f.grid() {
        Grid::Line(a) => *a,
        Grid::Product { .. } => return Err(domain("apply_generator expects a line grid")),
    };
    let op = SpatialOperator::new(s, alpha, &axis, None)?;
    let b = f.extension().value();
    Ok((0..axis.len()).into_par_iter().map(|i| op.apply_at(f.values(), b, i)).collect())
}

/// Spatial and temporal parts of `𝓛 f(x, u)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoubleGeneratorValue {
    pub spatial: f64,
    pub temporal: f64,
}

impl DoubleGeneratorValue {
    pub fn total(&self) -> f64 {
        self.spatial + self.temporal
    }
}

/// `𝓛 f(x, u)` at a node of a product grid: the spatial generator along
/// `x` with `S(x, u)` plus `w(x, u) ∫₀^∞ (f(x, u+v) - f(x, u)) v^{-1-β} dv`.
pub fn apply_double_generator(
    s: &SpectralDensity,
    w: &WeightFamily,
    alpha: f64,
    beta: f64,
    f: &GridFunction,
    x: f64,
    u: f64,
) -> Result<DoubleGeneratorValue> {
    check_beta(beta)?;
    let (xa, ua) = match f.grid() {
        Grid::Product { x, u } => (*x, *u),
        Grid::Line(_) => return Err(domain("apply_double_generator expects a product grid")),
    };
    let (ix, iu) = (node_index(&xa, x)?, node_index(&ua, u)?);
    let nx = xa.len();
    let b = f.extension().value();
    let row = &f.values()[iu * nx..(iu + 1) * nx];
    let spatial = SpatialOperator::new(s, alpha, &xa, Some(u))?.apply_at(row, b, ix);
    let ts = TemporalStencil::new(ua.spacing(), beta, ua.len());
    let col = |j: usize| f.values()[j * nx + ix];
    let temporal = w.eval(&[x, u]) * ts.apply_at(col, ua.len(), b, iu);
    Ok(DoubleGeneratorValue { spatial, temporal })
}

/// Direction of explicit time stepping.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `∂f/∂t = L f` for observables.
    Backward,
    /// `∂p/∂t = L* p` for densities (transpose stencil).
    Forward,
}

/// Largest stable explicit step `0.9 / max |L_ii|`.
pub fn stable_time_step(s: &SpectralDensity, alpha: f64, grid: &Grid) -> Result<f64> {
    let op = SpatialOperator::new(s, alpha, grid.x_axis(), None)?;
    Ok(0.9 / op.max_diagonal())
}

/// Forward-Euler evolution of `∂f/∂t = L f` (or its dual) to `t_end`.
pub fn evolve_pde(
    s: &SpectralDensity,
    alpha: f64,
    f0: &GridFunction,
    t_end: f64,
    dt: f64,
    direction: Direction,
) -> Result<GridFunction> {
    let axis = match f0.grid() {
        Grid::Line(a) => *a,
        Grid::Product { .. } => return Err(domain("evolve_pde expects a line grid")),
    };
    if !(t_end >= 0.0) || !(dt > 0.0) {
        return Err(domain("evolve_pde needs t_end ≥ 0 and dt > 0"));
    }
    if direction == Direction::Forward && f0.extension() != Extension::Zero {
        return Err(domain("forward evolution requires zero extension"));
    }
    let op = SpatialOperator::new(s, alpha, &axis, None)?;
    let bound = 0.9 / op.max_diagonal();
    if dt > bound * (1.0 + 1e-12) {
        return Err(Error::Stability { dt, bound });
    }
    let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    let step = if steps > 0 { t_end / steps as f64 } else { 0.0 };
    let b = f0.extension().value();
    let mut f = f0.values().to_vec();
    for _ in 0..steps {
        let lf: Vec<f64> = (0..axis.len())
            .into_par_iter()
            .map(|i| match direction {
                Direction::Backward => op.apply_at(&f, b, i),
                Direction::Forward => op.apply_transpose_at(&f, i),
            })
            .collect();
        for (v, d) in f.iter_mut().zip(lf) {
            *v += step * d;
        }
    }
    GridFunction::new(f0.grid().clone(), f, f0.extension())
}

/// Node weights of `R_h` for one radial scale: `weights[m]` is the
/// probability assigned to offset `m Δ` along one direction; mass beyond
/// the last offset goes to the extension value.
fn markov_weights(k: &JumpKernel, r0: f64, h: f64, delta: f64, offsets: usize) -> Vec<f64> {
    let mut w = vec![0.0; offsets + 1];
    for m in 0..offsets {
        let (a, b) = (m as f64 * delta, (m + 1) as f64 * delta);
        let (mass, first) = k.panel_moments_r0(r0, h, a, b);
        if mass == 0.0 {
            continue;
        }
        // linear interpolation: weight on the right node is E[(z - a)/Δ]
        let right = ((first - a * mass) / delta).clamp(0.0, mass);
        w[m] += mass - right;
        w[m + 1] += right;
    }
    w
}

/// Applies `R_h f(x) = ∫ f(x + h y) p(x; dy)` to a line function.
fn markov_step(k: &JumpKernel, h: f64, f: &GridFunction, cache: &Option<Vec<f64>>) -> Vec<f64> {
    let axis = *f.grid().x_axis();
    let n = axis.len();
    let delta = axis.spacing();
    let b = f.extension().value();
    let vals = f.values();
    let (lo, hi) = vals.iter().fold((b, b), |(l, u), &v| (l.min(v), u.max(v)));
    let spec = k.spectral();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let x = [axis.node(i)];
            let local;
            let w = match cache {
                Some(w) => w,
                None => {
                    local = markov_weights(k, k.r_min(&x), h, delta, n);
                    &local
                }
            };
            let mass = spec.mass(&x);
            let mut total = 0.0;
            for (sign, p) in [(1i64, spec.eval(&x, &[1.0]) / mass), (-1i64, spec.eval(&x, &[-1.0]) / mass)] {
                let mut acc = 0.0;
                let mut used = 0.0;
                for (m, &wm) in w.iter().enumerate() {
                    if wm == 0.0 {
                        continue;
                    }
                    let j = i as i64 + sign * m as i64;
                    let v = if j >= 0 && (j as usize) < n { vals[j as usize] } else { b };
                    acc += wm * v;
                    used += wm;
                }
                acc += (1.0 - used).max(0.0) * b;
                total += p * acc;
            }
            // R_h averages; rounding must not leave the hull of the inputs
            total.clamp(lo, hi)
        })
        .collect()
}

/// `R_h^steps f0` on a line grid.
pub fn evolve_markov_scheme(
    k: &JumpKernel,
    h: f64,
    f0: &GridFunction,
    steps: usize,
) -> Result<GridFunction> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(domain(format!("scale h = {h} must lie in (0, 1]")));
    }
    if k.dim() != 1 || !matches!(f0.grid(), Grid::Line(_)) {
        return Err(domain("Markov scheme supports one-dimensional line grids"));
    }
    let axis = f0.grid().x_axis();
    let cache = if k.spectral().is_homogeneous() {
        Some(markov_weights(k, k.r_min(&[0.0]), h, axis.spacing(), axis.len()))
    } else {
        None
    };
    let mut f = f0.clone();
    for _ in 0..steps {
        let next = markov_step(k, h, &f, &cache);
        f = GridFunction::new(f.grid().clone(), next, f.extension())?;
    }
    Ok(f)
}

/// `∫ f(x + y) p(y) dy` for a density `p` on the line.
pub fn semigroup_by_quadrature(
    density: impl Fn(f64) -> f64,
    f: impl Fn(f64) -> f64,
    x: f64,
) -> Result<f64> {
    let tol = Tolerance::new(1e-12, 1e-10);
    let right = integrate_to_inf(|y| f(x + y) * density(y), 0.0, tol)?.value;
    let left = integrate_to_inf(|y| f(x - y) * density(-y), 0.0, tol)?.value;
    Ok(right + left)
}

/// Approximation scheme for convergence tables.
#[derive(Clone, Debug, PartialEq)]
pub enum Scheme {
    /// `E f(Z^h(t))` for the exponential-clock process.
    ExponentialMc { paths: usize, seed: u64 },
    /// `E f(S^h(⌊t/τ⌋))` for the discrete-step walk.
    DiscreteMc { paths: usize, seed: u64 },
    /// `R_h^{⌊t/τ⌋} f` on a line grid.
    MarkovGrid { grid: Grid },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub error: f64,
    pub std_error: f64,
    pub nodes: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Errors decrease along the table; Monte Carlo rows may rise by at
    /// most two combined standard errors.
    pub monotone: bool,
}

fn monotone_flag(rows: &[ConvergenceRow]) -> bool {
    rows.windows(2).all(|w| {
        let slack = 2.0 * (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
        if slack == 0.0 {
            w[1].error < w[0].error
        } else {
            w[1].error <= w[0].error + slack
        }
    })
}

fn check_h_list(h_list: &[f64]) -> Result<()> {
    if h_list.is_empty() || h_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(domain("h-list must be non-empty and strictly decreasing"));
    }
    Ok(())
}

/// Sup-over-probes error of a scheme against `oracle` for each `h`.
pub fn convergence_table(
    scheme: &Scheme,
    kernel: &JumpKernel,
    f: &(dyn Fn(f64) -> f64 + Sync),
    oracle: &dyn Fn(f64) -> Result<f64>,
    probes: &[f64],
    h_list: &[f64],
    t: f64,
) -> Result<ConvergenceTable> {
    check_h_list(h_list)?;
    if probes.is_empty() {
        return Err(domain("convergence table needs probe points"));
    }
    let exact: Vec<f64> = probes.iter().map(|&x| oracle(x)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for &h in h_list {
        let row = match scheme {
            Scheme::MarkovGrid { grid } => {
                let f0 = GridFunction::from_fn(grid.clone(), f)?;
                let steps = discrete_steps(kernel.alpha(), h, t);
                let ft = evolve_markov_scheme(kernel, h, &f0, steps)?;
                let axis = grid.x_axis();
                let mut err: f64 = 0.0;
                for (&x, &e) in probes.iter().zip(&exact) {
                    let i = node_index(axis, x)?;
                    err = err.max((ft.values()[i] - e).abs());
                }
                ConvergenceRow { h, error: err, std_error: 0.0, nodes: axis.len() }
            }
            Scheme::ExponentialMc { paths, seed } | Scheme::DiscreteMc { paths, seed } => {
                let steps = discrete_steps(kernel.alpha(), h, t);
                let exponential = matches!(scheme, Scheme::ExponentialMc { .. });
                let (mut err, mut se) = (0.0f64, 0.0f64);
                for (p, (&x, &e)) in probes.iter().zip(&exact).enumerate() {
                    let seed = crate::rng::derive_seed(*seed, p as u64);
                    let values: Vec<f64> = run_replicas(*paths, seed, |rng| {
                        let end = if exponential {
                            ctrw_exponential_endpoint(kernel, &[x], h, t, rng)
                        } else {
                            ctrw_discrete_endpoint(kernel, &[x], h, steps, rng)
                        };
                        end.map(|y| f(y[0])).unwrap_or(f64::NAN)
                    });
                    let est = summarize(&values);
                    let d = (est.mean - e).abs();
                    if d >= err {
                        err = d;
                        se = est.std_error;
                    }
                }
                ConvergenceRow { h, error: err, std_error: se, nodes: 0 }
            }
        };
        if !row.error.is_finite() {
            return Err(Error::NonFinite { value: row.error, at: format!("convergence row h = {h}") });
        }
        rows.push(row);
    }
    let monotone = monotone_flag(&rows);
    Ok(ConvergenceTable { rows, monotone })
}

/// Convergence of `E f1(Y^τ) f2(u + V^τ)` after `⌊t/τ⌋` double-walk steps
/// against a product oracle, for each `τ`.
#[allow(clippy::too_many_arguments)]
pub fn double_convergence_table(
    dk: &DoubleJumpKernel,
    f1: &(dyn Fn(f64) -> f64 + Sync),
    f2: &(dyn Fn(f64) -> f64 + Sync),
    oracle: &dyn Fn(f64, f64) -> Result<f64>,
    probes: &[(f64, f64)],
    tau_list: &[f64],
    t: f64,
    paths: usize,
    seed: u64,
) -> Result<ConvergenceTable> {
    check_h_list(tau_list)?;
    let exact: Vec<f64> = probes.iter().map(|&(x, u)| oracle(x, u)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for &tau in tau_list {
        let steps = (t / tau + 1e-9).floor() as usize;
        let (sx, sv) = (tau.powf(1.0 / dk.spatial().alpha()), tau.powf(1.0 / dk.beta()));
        let (mut err, mut se) = (0.0f64, 0.0f64);
        for (p, (&(x0, u0), &e)) in probes.iter().zip(&exact).enumerate() {
            let seed = crate::rng::derive_seed(seed, p as u64);
            let values: Vec<f64> = run_replicas(paths, seed, |rng| {
                let (mut x, mut v) = (vec![x0], u0);
                let mut y = vec![0.0];
                for _ in 0..steps {
                    let dv = dk.sample_joint_jump_into(&x, v, rng, &mut y);
                    x[0] += sx * y[0];
                    v += sv * dv;
                }
                f1(x[0]) * f2(v)
            });
            let est = summarize(&values);
            let d = (est.mean - e).abs();
            if d >= err {
                err = d;
                se = est.std_error;
            }
        }
        rows.push(ConvergenceRow { h: tau, error: err, std_error: se, nodes: 0 });
    }
    let monotone = monotone_flag(&rows);
    Ok(ConvergenceTable { rows, monotone })
}
