//! Position-dependent jump kernels.
//!
//! A jump from `x` is `R · s` with direction `s` drawn from `S(x, ·)`
//! normalized on the sphere and radius `R` from a radial law with tail
//! `P(R > n) ~ (∫ S(x, s) ds / α) n^{-α}`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Open01};
use serde::{Deserialize, Serialize};

use crate::error::{check_alpha, check_beta, domain, Result};
use crate::stable::SpectralDensity;

/// Radial law of the jump length, scaled by `r_min(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadialLaw {
    /// `P(R > r) = (r_min / r)^α` for `r ≥ r_min`.
    Pareto,
    /// Pareto plus an independent `Uniform(0, core_width)`; bounded density.
    Glued { core_width: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct JumpKernel {
    alpha: f64,
    spectral: SpectralDensity,
    radial: RadialLaw,
}

fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Open01.sample(rng)
}

/// `∫₀^w P(P > v) dv` for the Pareto survival extended by 1 below `r0`.
fn pareto_phi1(w: f64, r0: f64, alpha: f64) -> f64 {
    if w <= r0 {
        return w;
    }
    if alpha == 1.0 {
        r0 + r0 * (w / r0).ln()
    } else {
        r0 + r0.powf(alpha) * (w.powf(1.0 - alpha) - r0.powf(1.0 - alpha)) / (1.0 - alpha)
    }
}

/// `∫₀^w pareto_phi1`.
fn pareto_phi2(w: f64, r0: f64, alpha: f64) -> f64 {
    if w <= r0 {
        return 0.5 * w * w;
    }
    let d = w - r0;
    let base = 0.5 * r0 * r0 + r0 * d;
    if alpha == 1.0 {
        base + r0 * (w * (w / r0).ln() - d)
    } else {
        let ra = r0.powf(alpha);
        base + ra
            * ((w.powf(2.0 - alpha) - r0.powf(2.0 - alpha)) / ((1.0 - alpha) * (2.0 - alpha))
                - r0.powf(1.0 - alpha) * d / (1.0 - alpha))
    }
}

impl JumpKernel {
    pub fn new(alpha: f64, spectral: SpectralDensity, radial: RadialLaw) -> Result<Self> {
        check_alpha(alpha)?;
        if let RadialLaw::Glued { core_width } = radial {
            if !(core_width > 0.0 && core_width.is_finite()) {
                return Err(domain(format!("core width {core_width} must be positive")));
            }
        }
        Ok(Self { alpha, spectral, radial })
    }

    /// Pareto kernel with `S ≡ α / |S^{d-1}|`, so that `r_min = 1`.
    pub fn canonical(dim: usize, alpha: f64) -> Result<Self> {
        let area = if dim == 1 { 2.0 } else { 2.0 * PI };
        Self::new(alpha, SpectralDensity::constant(dim, alpha / area)?, RadialLaw::Pareto)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.spectral.dim()
    }

    pub fn spectral(&self) -> &SpectralDensity {
        &self.spectral
    }

    pub fn radial(&self) -> &RadialLaw {
        &self.radial
    }

    /// `(∫ S(x, s) ds / α)^{1/α}`.
    pub fn r_min(&self, x: &[f64]) -> f64 {
        (self.spectral.mass(x) / self.alpha).powf(1.0 / self.alpha)
    }

    /// Radial survival `P(R > r)` at position `x`.
    pub fn tail_prob(&self, x: &[f64], r: f64) -> f64 {
        self.survival(self.r_min(x), r)
    }

    fn survival(&self, r0: f64, r: f64) -> f64 {
        let a = self.alpha;
        let pareto = |w: f64| if w <= r0 { 1.0 } else { (r0 / w).powf(a) };
        match self.radial {
            RadialLaw::Pareto => pareto(r),
            RadialLaw::Glued { core_width: c } => {
                if r <= r0 {
                    1.0
                } else {
                    (pareto_phi1(r, r0, a) - pareto_phi1(r - c, r0, a)) / c
                }
            }
        }
    }

    /// `∫_a^b P(R > r) dr`.
    fn survival_integral(&self, r0: f64, a: f64, b: f64) -> f64 {
        let al = self.alpha;
        match self.radial {
            RadialLaw::Pareto => pareto_phi1(b, r0, al) - pareto_phi1(a, r0, al),
            RadialLaw::Glued { core_width: c } => {
                (pareto_phi2(b, r0, al) - pareto_phi2(b - c, r0, al) - pareto_phi2(a, r0, al)
                    + pareto_phi2(a - c, r0, al))
                    / c
            }
        }
    }

    /// Mass and first moment of `h R` restricted to `[a, b]`, with `R`
    /// drawn at position `x`.
    pub fn scaled_panel_moments(&self, x: &[f64], h: f64, a: f64, b: f64) -> (f64, f64) {
        let r0 = self.r_min(x);
        self.panel_moments_r0(r0, h, a, b)
    }

    pub(crate) fn panel_moments_r0(&self, r0: f64, h: f64, a: f64, b: f64) -> (f64, f64) {
        let (sa, sb) = (self.survival(r0, a / h), self.survival(r0, b / h));
        let mass = (sa - sb).max(0.0);
        let lo = r0 * h;
        if b <= lo {
            return (0.0, 0.0);
        }
        // ∫ z dF = a S(a) - b S(b) + ∫_a^b S
        let first = match self.radial {
            RadialLaw::Pareto => {
                let a = a.max(lo);
                let al = self.alpha;
                let za = lo.powf(al);
                if al == 1.0 {
                    za * (b / a).ln()
                } else {
                    al * za * (b.powf(1.0 - al) - a.powf(1.0 - al)) / (1.0 - al)
                }
            }
            RadialLaw::Glued { .. } => {
                a * sa - b * sb + h * self.survival_integral(r0, a / h, b / h)
            }
        };
        (mass, first.clamp(a * mass, b * mass))
    }

    pub fn sample_radius<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> f64 {
        self.radius_from_uniform(self.r_min(x), open01(rng), rng)
    }

    fn radius_from_uniform<R: Rng + ?Sized>(&self, r0: f64, u: f64, rng: &mut R) -> f64 {
        let p = r0 * u.powf(-1.0 / self.alpha);
        match self.radial {
            RadialLaw::Pareto => p,
            RadialLaw::Glued { core_width } => p + core_width * open01(rng),
        }
    }

    /// Writes a direction drawn from `S(x, ·)` into `out`.
    pub fn sample_direction_into<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R, out: &mut [f64]) {
        if self.dim() == 1 {
            let plus = self.spectral.eval(x, &[1.0]);
            let p = plus / self.spectral.mass(x);
            out[0] = if open01(rng) < p { 1.0 } else { -1.0 };
            return;
        }
        let smax = self.spectral.bounds().1;
        loop {
            let th = 2.0 * PI * open01(rng);
            let s = [th.cos(), th.sin()];
            if open01(rng) * smax <= self.spectral.eval(x, &s) {
                out[0] = s[0];
                out[1] = s[1];
                return;
            }
        }
    }

    /// Writes one jump from position `x` into `out`.
    pub fn sample_jump_into<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R, out: &mut [f64]) {
        let r0 = self.r_min(x);
        let u = open01(rng);
        self.jump_with_uniform(x, r0, u, rng, out);
    }

    fn jump_with_uniform<R: Rng + ?Sized>(
        &self,
        x: &[f64],
        r0: f64,
        u: f64,
        rng: &mut R,
        out: &mut [f64],
    ) {
        self.sample_direction_into(x, rng, out);
        let r = self.radius_from_uniform(r0, u, rng);
        for v in out.iter_mut().take(self.dim()) {
            *v *= r;
        }
    }

    /// One-dimensional jump from `x`.
    pub fn sample_jump_1d<R: Rng + ?Sized>(&self, x: f64, rng: &mut R) -> f64 {
        let mut out = [0.0];
        self.sample_jump_into(&[x], rng, &mut out);
        out[0]
    }
}

/// Draws one jump `Y` from position `x`.
pub fn sample_jump<R: Rng + ?Sized>(kernel: &JumpKernel, x: &[f64], rng: &mut R) -> Vec<f64> {
    let mut out = vec![0.0; kernel.dim()];
    kernel.sample_jump_into(x, rng, &mut out);
    out
}

/// Set of directions for tail-ratio checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AngularCap {
    Full,
    /// `s = +1` (one dimension).
    Positive,
    /// `s = -1` (one dimension).
    Negative,
    /// Directions with angle in `[start, end]` (two dimensions).
    Arc { start: f64, end: f64 },
}

impl AngularCap {
    fn contains(&self, s: &[f64]) -> bool {
        match *self {
            AngularCap::Full => true,
            AngularCap::Positive => s[0] > 0.0,
            AngularCap::Negative => s[0] < 0.0,
            AngularCap::Arc { start, end } => {
                let th = s[1].atan2(s[0]).rem_euclid(2.0 * PI);
                let (a, b) = (start.rem_euclid(2.0 * PI), end.rem_euclid(2.0 * PI));
                if a <= b {
                    th >= a && th <= b
                } else {
                    th >= a || th <= b
                }
            }
        }
    }

    /// `∫_Ω S(x, s) ds`.
    fn spectral_mass(&self, s: &SpectralDensity, x: &[f64]) -> Result<f64> {
        match (*self, s.dim()) {
            (AngularCap::Full, _) => Ok(s.mass(x)),
            (AngularCap::Positive, 1) => Ok(s.eval(x, &[1.0])),
            (AngularCap::Negative, 1) => Ok(s.eval(x, &[-1.0])),
            (AngularCap::Arc { start, end }, 2) => {
                let mut end = end;
                while end < start {
                    end += 2.0 * PI;
                }
                Ok(crate::quad::integrate(
                    |th: f64| s.eval(x, &[th.cos(), th.sin()]),
                    start,
                    end,
                    crate::quad::Tolerance::new(1e-13, 1e-12),
                )?
                .value)
            }
            _ => Err(domain("angular cap does not match kernel dimension")),
        }
    }
}

/// Monte Carlo tail ratio with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailRatio {
    pub ratio: f64,
    pub std_error: f64,
}

/// Estimates `P(|Y| > n, Y/|Y| ∈ Ω) / ((1 / (α n^α)) ∫_Ω S(x, s) ds)`.
pub fn tail_ratio<R: Rng + ?Sized>(
    kernel: &JumpKernel,
    x: &[f64],
    n: f64,
    cap: AngularCap,
    samples: usize,
    rng: &mut R,
) -> Result<TailRatio> {
    if !(n > 0.0) || samples == 0 {
        return Err(domain("tail_ratio needs n > 0 and at least one sample"));
    }
    let predicted = cap.spectral_mass(&kernel.spectral, x)? / (kernel.alpha * n.powf(kernel.alpha));
    let mut y = vec![0.0; kernel.dim()];
    let mut hits = 0usize;
    for _ in 0..samples {
        kernel.sample_jump_into(x, rng, &mut y);
        let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r > n && cap.contains(&y) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let se = (p * (1.0 - p) / samples as f64).sqrt();
    Ok(TailRatio { ratio: p / predicted, std_error: se / predicted })
}

/// Exact tail ratio for the full sphere.
pub fn exact_tail_ratio(kernel: &JumpKernel, x: &[f64], n: f64) -> f64 {
    let predicted = kernel.spectral.mass(x) / (kernel.alpha * n.powf(kernel.alpha));
    kernel.tail_prob(x, n) / predicted
}

/// Waiting-time tail weight `w(x, u)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightFamily {
    Constant { value: f64 },
    /// `value · (1 + eps sin x₀)`.
    Modulated { value: f64, eps: f64 },
}

impl WeightFamily {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            WeightFamily::Constant { value } => value,
            WeightFamily::Modulated { value, eps } => value * (1.0 + eps * x[0].sin()),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let (value, eps) = match *self {
            WeightFamily::Constant { value } => (value, 0.0),
            WeightFamily::Modulated { value, eps } => (value, eps),
        };
        if value > 0.0 && value.is_finite() && eps.abs() < 1.0 {
            Ok(())
        } else {
            Err(domain(format!("weight family {self:?} is not positive and bounded")))
        }
    }
}

/// Joint law of a spatial jump and a waiting time.
///
/// `P(V > v) = (w / β) v^{-β}` for `v ≥ v_min = (w / β)^{1/β}`. With
/// probability `rho` the spatial radius and the waiting time share one
/// uniform variate (comonotone); otherwise they are independent.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubleJumpKernel {
    spatial: JumpKernel,
    beta: f64,
    weight: WeightFamily,
    rho: f64,
}

impl DoubleJumpKernel {
    pub fn new(spatial: JumpKernel, beta: f64, weight: WeightFamily, rho: f64) -> Result<Self> {
        check_beta(beta)?;
        weight.validate()?;
        if !(0.0..=1.0).contains(&rho) {
            return Err(domain(format!("coupling rho = {rho} outside [0, 1]")));
        }
        Ok(Self { spatial, beta, weight, rho })
    }

    /// Independent kernel with `w ≡ β`, i.e. `P(V > v) = v^{-β}`, `v ≥ 1`.
    pub fn independent(spatial: JumpKernel, beta: f64) -> Result<Self> {
        Self::new(spatial, beta, WeightFamily::Constant { value: beta }, 0.0)
    }

    pub fn spatial(&self) -> &JumpKernel {
        &self.spatial
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn weight(&self) -> &WeightFamily {
        &self.weight
    }

    pub fn dim(&self) -> usize {
        self.spatial.dim()
    }

    pub fn v_min(&self, x: &[f64]) -> f64 {
        (self.weight.eval(x) / self.beta).powf(1.0 / self.beta)
    }

    /// `P(V > v)` at position `x`.
    pub fn waiting_tail(&self, x: &[f64], v: f64) -> f64 {
        let vm = self.v_min(x);
        if v <= vm {
            1.0
        } else {
            (vm / v).powf(self.beta)
        }
    }

    /// Draws `(Y, V)` from position `(x, u)`; `Y` goes to `out`.
    pub fn sample_joint_jump_into<R: Rng + ?Sized>(
        &self,
        x: &[f64],
        _u: f64,
        rng: &mut R,
        out: &mut [f64],
    ) -> f64 {
        let vm = self.v_min(x);
        let r0 = self.spatial.r_min(x);
        let comonotone = self.rho > 0.0 && (self.rho >= 1.0 || open01(rng) < self.rho);
        let ux = open01(rng);
        let uv = if comonotone { ux } else { open01(rng) };
        self.spatial.jump_with_uniform(x, r0, ux, rng, out);
        vm * uv.powf(-1.0 / self.beta)
    }

    /// Closed-form `w(x, u, A) = lim β n^β P(V > n, |Y| > A)`.
    pub fn tail_limit_w(&self, x: &[f64], a: f64) -> f64 {
        let w = self.weight.eval(x);
        w * ((1.0 - self.rho) * self.spatial.tail_prob(x, a) + self.rho)
    }

    /// Whether `w(x, u, A) → 0` as `A → ∞`, which holds only without
    /// comonotone coupling.
    pub fn satisfies_limit_measure(&self) -> bool {
        self.rho == 0.0
    }
}

/// Draws `(Y, V)`.
pub fn sample_joint_jump<R: Rng + ?Sized>(
    kernel: &DoubleJumpKernel,
    x: &[f64],
    u: f64,
    rng: &mut R,
) -> (Vec<f64>, f64) {
    let mut y = vec![0.0; kernel.dim()];
    let v = kernel.sample_joint_jump_into(x, u, rng, &mut y);
    (y, v)
}

/// Monte Carlo estimate of `β n^β P(V > n, |Y| > A)`.
pub fn validate_tail_limit_w<R: Rng + ?Sized>(
    kernel: &DoubleJumpKernel,
    x: &[f64],
    u: f64,
    a: f64,
    n: f64,
    samples: usize,
    rng: &mut R,
) -> Result<TailRatio> {
    if !(n > 0.0) || samples == 0 || a < 0.0 {
        return Err(domain("validate_tail_limit_w needs n > 0, A ≥ 0 and samples > 0"));
    }
    let mut y = vec![0.0; kernel.dim()];
    let mut hits = 0usize;
    for _ in 0..samples {
        let v = kernel.sample_joint_jump_into(x, u, rng, &mut y);
        let r = y.iter().map(|c| c * c).sum::<f64>().sqrt();
        if v > n && r > a {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let scale = kernel.beta * n.powf(kernel.beta);
    let se = (p * (1.0 - p) / samples as f64).sqrt();
    Ok(TailRatio { ratio: scale * p, std_error: scale * se })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, Tolerance};
    use crate::rng::replica_stream;
    use crate::stable::SpectralFamily;

    #[test]
    fn canonical_kernel_has_unit_rmin_and_pareto_tail() {
        let k = JumpKernel::canonical(1, 1.0).unwrap();
        assert!((k.r_min(&[0.0]) - 1.0).abs() < 1e-15);
        for &n in &[1.0, 10.0, 100.0] {
            assert!((k.tail_prob(&[0.0], n) - 1.0 / n).abs() < 1e-15);
            assert!((exact_tail_ratio(&k, &[0.0], n) - 1.0).abs() < 1e-14);
        }
        let k2 = JumpKernel::canonical(2, 1.5).unwrap();
        assert!((k2.r_min(&[0.3, 0.1]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn glued_tail_ratio_expansion() {
        let s = SpectralDensity::constant(1, 0.5).unwrap();
        let k = JumpKernel::new(1.0, s, RadialLaw::Glued { core_width: 2.0 }).unwrap();
        for &n in &[50.0, 200.0, 1000.0] {
            let r = exact_tail_ratio(&k, &[0.0], n);
            let expansion = 1.0 + 1.0 * 2.0 / (2.0 * n);
            assert!((r - expansion).abs() < 5.0 / (n * n), "n={n}: {r} vs {expansion}");
        }
    }

    #[test]
    fn glued_survival_matches_quadrature() {
        let s = SpectralDensity::constant(1, 0.3).unwrap();
        for &al in &[0.6, 1.0, 1.5] {
            let k = JumpKernel::new(al, s.clone(), RadialLaw::Glued { core_width: 1.5 }).unwrap();
            let r0 = k.r_min(&[0.0]);
            for &r in &[r0 + 0.2, r0 + 1.0, 7.0] {
                // P(P + cU > r) = (1/c) ∫_{r-c}^{r} P(P > w) dw
                let q = integrate(
                    |w: f64| if w <= r0 { 1.0 } else { (r0 / w).powf(al) },
                    r - 1.5,
                    r,
                    Tolerance::default(),
                )
                .unwrap()
                .value
                    / 1.5;
                assert!((k.tail_prob(&[0.0], r) - q).abs() < 1e-12, "al={al} r={r}");
            }
        }
    }

    #[test]
    fn panel_moments_match_quadrature() {
        let s = SpectralDensity::constant(1, 0.4).unwrap();
        for radial in [RadialLaw::Pareto, RadialLaw::Glued { core_width: 0.7 }] {
            for &al in &[0.5, 1.0, 1.7] {
                let k = JumpKernel::new(al, s.clone(), radial.clone()).unwrap();
                let r0 = k.r_min(&[0.0]);
                let h = 0.1;
                // density of hR by differentiating the survival numerically
                let dens = |z: f64| {
                    let e = 1e-6 * z.max(1e-3);
                    (k.tail_prob(&[0.0], (z - e) / h) - k.tail_prob(&[0.0], (z + e) / h)) / (2.0 * e)
                };
                for &(a, b) in &[(0.0, 0.05), (0.05, 0.2), (0.3, 0.9)] {
                    let (m, f) = k.scaled_panel_moments(&[0.0], h, a, b);
                    let lo = a.max(r0 * h);
                    let mut pts = vec![lo, b];
                    if let RadialLaw::Glued { core_width } = radial {
                        let kink = (r0 + core_width) * h;
                        if kink > lo && kink < b {
                            pts.insert(1, kink);
                        }
                    }
                    if b <= lo {
                        assert_eq!((m, f), (0.0, 0.0));
                        continue;
                    }
                    let tol = Tolerance::new(1e-10, 1e-8);
                    let qm = crate::quad::integrate_breaks(dens, &pts, tol).unwrap().value;
                    let qf = crate::quad::integrate_breaks(|z| z * dens(z), &pts, tol).unwrap().value;
                    assert!((m - qm).abs() < 1e-6, "{radial:?} al={al} [{a},{b}]: {m} vs {qm}");
                    assert!((f - qf).abs() < 1e-6, "{radial:?} al={al} [{a},{b}]: {f} vs {qf}");
                }
            }
        }
    }

    #[test]
    fn mc_tail_ratio_one_sided_caps() {
        let s = SpectralDensity::new(1, SpectralFamily::Constant { value: 0.75 }).unwrap();
        let k = JumpKernel::new(1.5, s, RadialLaw::Pareto).unwrap();
        let mut rng = replica_stream(3, 0);
        for cap in [AngularCap::Positive, AngularCap::Negative, AngularCap::Full] {
            let t = tail_ratio(&k, &[0.0], 3.0, cap, 200_000, &mut rng).unwrap();
            assert!((t.ratio - 1.0).abs() < 5.0 * t.std_error, "{cap:?}: {t:?}");
        }
    }

    #[test]
    fn mc_tail_ratio_d2_arc() {
        let s = SpectralDensity::new(2, SpectralFamily::Anisotropic { value: 0.2, eps: 0.6 }).unwrap();
        let k = JumpKernel::new(0.8, s, RadialLaw::Pareto).unwrap();
        let mut rng = replica_stream(4, 0);
        let x = [1.0, 0.0];
        let cap = AngularCap::Arc { start: -0.5, end: 0.9 };
        let n = 5.0 * k.r_min(&x);
        let t = tail_ratio(&k, &x, n, cap, 400_000, &mut rng).unwrap();
        assert!((t.ratio - 1.0).abs() < 5.0 * t.std_error, "{t:?}");
    }

    #[test]
    fn waiting_tail_unit_pareto() {
        let dk = DoubleJumpKernel::independent(JumpKernel::canonical(1, 1.0).unwrap(), 0.5).unwrap();
        assert!((dk.v_min(&[0.0]) - 1.0).abs() < 1e-15);
        assert!((dk.waiting_tail(&[0.0], 10.0) - 10f64.powf(-0.5)).abs() < 1e-15);
        let mut rng = replica_stream(5, 0);
        let n = 200_000;
        let hits = (0..n)
            .filter(|_| sample_joint_jump(&dk, &[0.0], 0.0, &mut rng).1 > 10.0)
            .count();
        let p = hits as f64 / n as f64;
        assert!((p - 0.316_227_766).abs() < 5e-3, "{p}");
    }

    #[test]
    fn tail_limit_w_estimates() {
        let sp = JumpKernel::canonical(1, 1.0).unwrap();
        let dk = DoubleJumpKernel::independent(sp.clone(), 0.5).unwrap();
        let mut rng = replica_stream(6, 0);
        let at0 = validate_tail_limit_w(&dk, &[0.0], 0.0, 0.0, 100.0, 400_000, &mut rng).unwrap();
        assert!((at0.ratio - 0.5).abs() < 5.0 * at0.std_error);
        let far = validate_tail_limit_w(&dk, &[0.0], 0.0, 1e3, 100.0, 400_000, &mut rng).unwrap();
        assert!(far.ratio < 0.01);
        assert!((dk.tail_limit_w(&[0.0], 1e3) - 0.5e-3).abs() < 1e-15);

        let co = DoubleJumpKernel::new(sp, 0.5, WeightFamily::Constant { value: 0.5 }, 1.0).unwrap();
        assert!(!co.satisfies_limit_measure());
        let est = validate_tail_limit_w(&co, &[0.0], 0.0, 5.0, 1e4, 400_000, &mut rng).unwrap();
        assert!((est.ratio - co.tail_limit_w(&[0.0], 5.0)).abs() < 5.0 * est.std_error);
    }

    #[test]
    fn comonotone_coupling_orders_radius_and_wait() {
        let sp = JumpKernel::canonical(1, 1.0).unwrap();
        let dk = DoubleJumpKernel::new(sp, 0.5, WeightFamily::Constant { value: 0.5 }, 1.0).unwrap();
        let mut rng = replica_stream(7, 0);
        for _ in 0..1000 {
            let (y, v) = sample_joint_jump(&dk, &[0.0], 0.0, &mut rng);
            // R = U^{-1}, V = U^{-2}
            assert!((y[0].abs() - v.sqrt()).abs() < 1e-9 * v);
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        let s = SpectralDensity::constant(1, 0.5).unwrap();
        assert!(JumpKernel::new(2.5, s.clone(), RadialLaw::Pareto).is_err());
        assert!(JumpKernel::new(1.0, s, RadialLaw::Glued { core_width: 0.0 }).is_err());
        let sp = JumpKernel::canonical(1, 1.0).unwrap();
        assert!(DoubleJumpKernel::new(sp.clone(), 1.2, WeightFamily::Constant { value: 1.0 }, 0.0).is_err());
        assert!(DoubleJumpKernel::new(sp, 0.5, WeightFamily::Constant { value: 1.0 }, 1.5).is_err());
    }
}
