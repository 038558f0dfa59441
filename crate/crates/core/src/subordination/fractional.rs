//! Grünwald–Letnikov derivatives and residuals of the fractional equations.

use rayon::prelude::*;
use statrs::function::gamma::gamma;

use super::hitting::HittingDensityGrid;
use crate::error::{check_alpha, domain, Result};
use crate::semigroup::{apply_generator_all, Axis, Extension, Grid, GridFunction};
use crate::stable::{c_alpha, SpectralDensity};

/// `w_k = (-1)^k binom(β, k)`, `k = 0..n`.
pub fn gl_weights(beta: f64, n: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(n + 1);
    w.push(1.0);
    for k in 1..=n {
        let prev = w[k - 1];
        w.push(prev * (1.0 - (beta + 1.0) / k as f64));
    }
    w
}

fn check_order(beta: f64) -> Result<()> {
    if beta > 0.0 && beta <= 1.0 {
        Ok(())
    } else {
        Err(domain(format!("derivative order {beta} outside (0, 1]")))
    }
}

/// Riemann–Liouville derivative of order `β` at `t = node · spacing` from
/// samples on `0, spacing, 2 spacing, ...`, first order in `spacing`.
pub fn fractional_derivative_rl(f: &[f64], spacing: f64, beta: f64, node: usize) -> Result<f64> {
    check_order(beta)?;
    if node == 0 || node >= f.len() {
        return Err(domain(format!("node {node} outside 1..{}", f.len())));
    }
    if !(spacing > 0.0) {
        return Err(domain(format!("spacing {spacing} must be positive")));
    }
    let w = gl_weights(beta, node);
    Ok(gl_sum(&w, |k| f[node - k], node) * spacing.powf(-beta))
}

fn gl_sum(w: &[f64], f: impl Fn(usize) -> f64, node: usize) -> f64 {
    (0..=node).map(|k| w[k] * f(k)).sum()
}

/// `t^{-β} / Γ(1 - β)`, the source strength at time `t`.
pub fn source_strength(t: f64, beta: f64) -> f64 {
    t.powf(-beta) / gamma(1.0 - beta)
}

/// Frozen constant `K` of the first-order bound `K h` for the forward
/// residual of the `α = 1`, `β = 1/2` reference problem on
/// `t ∈ [1/2, 2]`, `|y - x| ∈ [1/2, 3]` (measured `0.314`).
pub const FORWARD_RESIDUAL_CONSTANT: f64 = 0.35;

/// Node-wise residual on a `(t, x)` grid, rows indexed by `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualGrid {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub values: Vec<f64>,
}

impl ResidualGrid {
    pub fn value(&self, it: usize, ix: usize) -> f64 {
        self.values[it * self.x.len() + ix]
    }

    /// `max |r|` over nodes with `keep(t, x)`.
    pub fn max_abs_where(&self, keep: impl Fn(f64, f64) -> bool) -> f64 {
        let nx = self.x.len();
        self.values
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(self.t[i / nx], self.x[i % nx]))
            .map(|(_, r)| r.abs())
            .fold(0.0, f64::max)
    }
}

fn uniform_spacing(v: &[f64], what: &str) -> Result<f64> {
    if v.len() < 3 {
        return Err(domain(format!("{what}-axis needs at least 3 nodes")));
    }
    let h = v[1] - v[0];
    if !(h > 0.0) || v.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return Err(domain(format!("{what}-axis must be uniform and increasing")));
    }
    Ok(h)
}

/// `d^β Q/dt^β + ∂Q/∂u` at interior nodes with `u > 0` and `t > 0`.
/// The `t`-axis must start at 0 and the row at `t = 0` holds `Q(0, u) = 0`.
pub fn residual_inverse_equation(q: &HittingDensityGrid, beta: f64) -> Result<ResidualGrid> {
    check_order(beta)?;
    let (t, u) = (q.t(), q.u());
    if t[0] != 0.0 {
        return Err(domain("t-axis must start at 0"));
    }
    let ht = uniform_spacing(t, "t")?;
    let du = uniform_spacing(u, "u")?;
    let cols: Vec<usize> = (1..u.len() - 1).filter(|&i| u[i] > 0.0).collect();
    let w = gl_weights(beta, t.len());
    let scale = ht.powf(-beta);
    let rows: Vec<Vec<f64>> = (1..t.len())
        .into_par_iter()
        .map(|it| {
            cols.iter()
                .map(|&iu| {
                    let d = gl_sum(&w, |k| q.value(it - k, iu), it) * scale;
                    d + (q.value(it, iu + 1) - q.value(it, iu - 1)) / (2.0 * du)
                })
                .collect()
        })
        .collect();
    Ok(ResidualGrid {
        t: t[1..].to_vec(),
        x: cols.iter().map(|&i| u[i]).collect(),
        values: rows.concat(),
    })
}

/// Values `g(t, y)` on a uniform `t`-axis from 0 and a uniform `y`-axis.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeGrid {
    pub dt: f64,
    pub y: Axis,
    /// Rows indexed by `t = k dt`, `k = 0..nt`.
    pub values: Vec<f64>,
}

impl SpaceTimeGrid {
    pub fn new(dt: f64, y: Axis, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || values.is_empty() || !values.len().is_multiple_of(y.len()) {
            return Err(domain("space-time values do not match the axes"));
        }
        if values.len() / y.len() < 2 {
            return Err(domain("space-time grid needs at least two time rows"));
        }
        Ok(Self { dt, y, values })
    }

    /// Samples `g(t, y)` in parallel over rows; row 0 comes from `initial(y)`.
    pub fn from_fn(
        dt: f64,
        steps: usize,
        y: Axis,
        initial: impl Fn(f64) -> f64 + Sync,
        g: impl Fn(f64, f64) -> Result<f64> + Sync,
    ) -> Result<Self> {
        let ys = y.nodes();
        let rows: Result<Vec<Vec<f64>>> = (0..=steps)
            .into_par_iter()
            .map(|k| {
                if k == 0 {
                    Ok(ys.iter().map(|&v| initial(v)).collect())
                } else {
                    ys.iter().map(|&v| g(k as f64 * dt, v)).collect()
                }
            })
            .collect();
        Self::new(dt, y, rows?.concat())
    }

    pub fn rows(&self) -> usize {
        self.values.len() / self.y.len()
    }

    pub fn row(&self, k: usize) -> &[f64] {
        let n = self.y.len();
        &self.values[k * n..(k + 1) * n]
    }
}

/// `∂^β g/∂t^β - ∂^α g/∂|y|^α` at every node with `t > 0`, the spatial
/// operator having symbol `-|p|^α` and zero extension.
pub fn residual_fractional_forward(g: &SpaceTimeGrid, alpha: f64, beta: f64) -> Result<ResidualGrid> {
    check_alpha(alpha)?;
    check_order(beta)?;
    let s = SpectralDensity::constant(1, 1.0 / (2.0 * c_alpha(alpha)?))?;
    let grid = Grid::Line(g.y);
    let ny = g.y.len();
    let nt = g.rows();
    let w = gl_weights(beta, nt);
    let scale = g.dt.powf(-beta);
    let mut values = Vec::with_capacity((nt - 1) * ny);
    for it in 1..nt {
        let f = GridFunction::new(grid.clone(), g.row(it).to_vec(), Extension::Zero)?;
        let lg = apply_generator_all(&s, alpha, &f)?;
        for (iy, l) in lg.iter().enumerate() {
            let d = gl_sum(&w, |k| g.values[(it - k) * ny + iy], it) * scale;
            values.push(d - l);
        }
    }
    Ok(ResidualGrid {
        t: (1..nt).map(|k| k as f64 * g.dt).collect(),
        x: g.y.nodes(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_2_SQRT_PI;

    use super::*;
    use crate::subordination::hitting::{inverse_half_stable_density, StableHitting};
    use crate::subordination::integral::{cauchy_kernel, subordinate_density};
    use proptest::prelude::*;

    fn samples(f: impl Fn(f64) -> f64, h: f64, t: f64) -> Vec<f64> {
        let n = (t / h).round() as usize;
        (0..=n).map(|k| f(k as f64 * h)).collect()
    }

    #[test]
    fn power_rule() {
        for &h in &[0.01, 0.005] {
            let f = samples(|t| t, h, 1.0);
            let d = fractional_derivative_rl(&f, h, 0.5, f.len() - 1).unwrap();
            assert!((d - FRAC_2_SQRT_PI).abs() < 2.0 * h, "{d}");
            let one = samples(|_| 1.0, h, 1.0);
            let d = fractional_derivative_rl(&one, h, 0.5, one.len() - 1).unwrap();
            assert!((d - 0.5 * FRAC_2_SQRT_PI).abs() < 2.0 * h, "{d}");
        }
    }

    #[test]
    fn near_one_is_difference_quotient() {
        let h = 0.01;
        let f = samples(|t| (2.0 * t).sin() + t * t, h, 1.0);
        let n = f.len() - 1;
        let d = fractional_derivative_rl(&f, h, 0.999, n).unwrap();
        let q = (f[n] - f[n - 1]) / h;
        assert!((d - q).abs() < 0.01 * q.abs(), "{d} vs {q}");
    }

    #[test]
    fn rejects_bad_node() {
        assert!(fractional_derivative_rl(&[1.0, 2.0], 0.1, 0.5, 0).is_err());
        assert!(fractional_derivative_rl(&[1.0, 2.0], 0.1, 0.5, 2).is_err());
        assert!(fractional_derivative_rl(&[1.0, 2.0], 0.1, 1.5, 1).is_err());
    }

    proptest! {
        #[test]
        fn weights_sum_telescopes(beta in 0.05f64..0.95, n in 1usize..200) {
            // Σ_{k≤n} w_k = Π_{k≤n} (1 - β/k)
            let w = gl_weights(beta, n);
            let s: f64 = w.iter().sum();
            let p: f64 = (1..=n).map(|k| 1.0 - beta / k as f64).product();
            prop_assert!((s - p).abs() < 1e-12);
            prop_assert!(w[1..].iter().all(|&x| x < 0.0));
        }
    }

    fn q_grid(h: f64, wrong: f64) -> HittingDensityGrid {
        let t: Vec<f64> = (0..=(2.0 / h).round() as usize).map(|k| k as f64 * h).collect();
        let u: Vec<f64> = (0..=(3.0 / h).round() as usize).map(|k| k as f64 * h).collect();
        HittingDensityGrid::from_fn(t, u, |t, u| {
            if t == 0.0 {
                0.0
            } else {
                inverse_half_stable_density(wrong * t, u) * wrong.sqrt()
            }
        })
        .unwrap()
    }

    fn window_q(r: &ResidualGrid) -> f64 {
        r.max_abs_where(|t, u| (0.5..=2.0).contains(&t) && (0.2..=2.0 + 1e-9).contains(&u))
    }

    #[test]
    fn inverse_equation_residual() {
        let r1 = window_q(&residual_inverse_equation(&q_grid(0.01, 1.0), 0.5).unwrap());
        let r2 = window_q(&residual_inverse_equation(&q_grid(0.005, 1.0), 0.5).unwrap());
        assert!(r1 < 5.0 * 0.01, "{r1}");
        assert!(r2 < 5.0 * 0.005, "{r2}");
        let ratio = r1 / r2;
        assert!((1.5..=3.0).contains(&ratio), "ratio {ratio}");
        let bad = window_q(&residual_inverse_equation(&q_grid(0.01, 2.0), 0.5).unwrap());
        assert!(bad >= 10.0 * r1, "{bad} vs {r1}");
    }

    fn forward_grid(h: f64, x: f64, cauchy_only: bool) -> SpaceTimeGrid {
        let law = StableHitting::standard(0.5).unwrap();
        let y = Axis::with_spacing(-20.0 + h / 2.0, 20.0 - h / 2.0, h).unwrap();
        let steps = (2.0 / h).round() as usize;
        SpaceTimeGrid::from_fn(h, steps, y, |_| 0.0, |t, y| {
            if cauchy_only {
                cauchy_kernel(t, x, y)
            } else {
                Ok(subordinate_density(cauchy_kernel, &law, t, x, y)?.value)
            }
        })
        .unwrap()
    }

    fn window_g(r: &ResidualGrid, x: f64) -> f64 {
        r.max_abs_where(|t, y| (0.5 - 1e-9..=2.0 + 1e-9).contains(&t) && (0.5..=3.0).contains(&(y - x).abs()))
    }

    #[test]
    fn forward_residual_first_order() {
        let r1 = window_g(&residual_fractional_forward(&forward_grid(0.05, 0.0, false), 1.0, 0.5).unwrap(), 0.0);
        let r2 = window_g(&residual_fractional_forward(&forward_grid(0.025, 0.0, false), 1.0, 0.5).unwrap(), 0.0);
        assert!(r1 < FORWARD_RESIDUAL_CONSTANT * 0.05, "{r1}");
        assert!(r2 < FORWARD_RESIDUAL_CONSTANT * 0.025, "{r2}");
        assert!((1.5..=3.0).contains(&(r1 / r2)), "ratio {}", r1 / r2);
        let bad = window_g(&residual_fractional_forward(&forward_grid(0.05, 0.0, true), 1.0, 0.5).unwrap(), 0.0);
        assert!(bad >= 10.0 * r1, "{bad} vs {r1}");
    }

    #[test]
    fn forward_residual_depends_on_differences() {
        let h = 0.1;
        let base = residual_fractional_forward(&forward_grid(h, 0.0, false), 1.0, 0.5).unwrap();
        let moved = residual_fractional_forward(&forward_grid(h, 3.0 * h, false), 1.0, 0.5).unwrap();
        let nx = base.x.len();
        for it in 0..base.t.len() {
            for ix in 0..nx - 3 {
                let d = base.x[ix];
                if base.t[it] >= 0.5 && (0.5..=3.0).contains(&d.abs()) {
                    let diff = (base.value(it, ix) - moved.value(it, ix + 3)).abs();
                    assert!(diff < 1e-4, "t={} y-x={d}: {diff}", base.t[it]);
                }
            }
        }
    }
}
