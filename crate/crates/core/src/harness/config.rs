//! Run configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{RadialLaw, WeightFamily};
use crate::stable::SpectralFamily;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SampleCheck,
    GeneratorCheck,
    SemigroupConverge,
    SubordinationCheck,
    CtrwLimit,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::SampleCheck => "sample-check",
            Experiment::GeneratorCheck => "generator-check",
            Experiment::SemigroupConverge => "semigroup-converge",
            Experiment::SubordinationCheck => "subordination-check",
            Experiment::CtrwLimit => "ctrw-limit",
        }
    }
}

fn default_alpha() -> f64 {
    1.0
}

fn default_beta() -> f64 {
    0.5
}

/// One-dimensional kernel. Missing `spectral` means the constant `α/2`;
/// missing `weight` means `w = β`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub rho: f64,
    #[serde(default)]
    pub spectral: Option<SpectralFamily>,
    #[serde(default)]
    pub weight: Option<WeightFamily>,
    #[serde(default = "default_radial")]
    pub radial: RadialLaw,
}

fn default_radial() -> RadialLaw {
    RadialLaw::Pareto
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self { alpha: 1.0, beta: 0.5, rho: 0.0, spectral: None, weight: None, radial: RadialLaw::Pareto }
    }
}

/// Grid knobs; `None` selects the per-experiment reference value.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Spatial spacing.
    #[serde(default)]
    pub spacing: Option<f64>,
    /// Spatial grid covers `[-half_width, half_width]`.
    #[serde(default)]
    pub half_width: Option<f64>,
    /// `u`-spacing of the G grid.
    #[serde(default)]
    pub du: Option<f64>,
    #[serde(default)]
    pub u_max: Option<f64>,
    /// Times at which `Q(t, ·)` is extracted.
    #[serde(default)]
    pub t_values: Option<Vec<f64>>,
    /// Spacing of the reference grid for the inverse-density residual.
    #[serde(default)]
    pub inverse_residual_spacing: Option<f64>,
    /// Spacing of the reference grid for the forward residual.
    #[serde(default)]
    pub forward_residual_spacing: Option<f64>,
}

fn default_paths() -> usize {
    100_000
}

fn default_bins() -> usize {
    40
}

fn default_range() -> f64 {
    10.0
}

fn default_stride() -> usize {
    5
}

fn default_coupled_tau() -> f64 {
    1e-3
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    #[serde(default = "default_paths")]
    pub paths: usize,
    /// Histogram bins on `[-range, range)`.
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_range")]
    pub range: f64,
    /// Steps per diagonal-sum cell.
    #[serde(default = "default_stride")]
    pub diagonal_stride: usize,
    /// `τ` of the coupled-kernel estimator check.
    #[serde(default = "default_coupled_tau")]
    pub coupled_tau: f64,
    #[serde(default = "default_true")]
    pub coupled_check: bool,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            paths: default_paths(),
            bins: default_bins(),
            range: default_range(),
            diagonal_stride: default_stride(),
            coupled_tau: default_coupled_tau(),
            coupled_check: true,
        }
    }
}

fn default_t() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub experiment: Option<Experiment>,
    pub seed: u64,
    #[serde(default)]
    pub kernel: KernelConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub monte_carlo: MonteCarloConfig,
    #[serde(default)]
    pub h_list: Option<Vec<f64>>,
    #[serde(default)]
    pub tau_list: Option<Vec<f64>>,
    /// Stable indices for the generator check.
    #[serde(default)]
    pub alphas: Option<Vec<f64>>,
    /// Frequencies for the generator check.
    #[serde(default)]
    pub frequencies: Option<Vec<f64>>,
    #[serde(default = "default_t")]
    pub t: f64,
    #[serde(default)]
    pub output_dir: Option<String>,
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn check_open(name: &str, v: f64, lo: f64, hi: f64, rule: &str) -> Result<()> {
    if v > lo && v < hi {
        Ok(())
    } else {
        Err(config_error(format!("{name} = {v} violates {rule}")))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_error(format!("{name} = {v} must be positive")))
    }
}

fn check_decreasing(name: &str, list: &[f64], max: f64) -> Result<()> {
    if list.is_empty() {
        return Err(config_error(format!("{name} must not be empty")));
    }
    for &v in list {
        if !(v > 0.0 && v <= max) {
            return Err(config_error(format!("{name} entry {v} must lie in (0, {max}]")));
        }
    }
    if list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(config_error(format!("{name} must be strictly decreasing")));
    }
    Ok(())
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let k = &self.kernel;
        check_open("kernel.alpha", k.alpha, 0.0, 2.0, "alpha ∈ (0,2)")?;
        check_open("kernel.beta", k.beta, 0.0, 1.0, "beta ∈ (0,1)")?;
        if !(0.0..=1.0).contains(&k.rho) {
            return Err(config_error(format!("kernel.rho = {} violates rho ∈ [0,1]", k.rho)));
        }
        check_positive("t", self.t)?;
        if let Some(h) = &self.h_list {
            check_decreasing("h_list", h, f64::INFINITY)?;
        }
        if let Some(tau) = &self.tau_list {
            check_decreasing("tau_list", tau, 1.0)?;
        }
        for a in self.alphas.iter().flatten() {
            check_open("alphas entry", *a, 0.0, 2.0, "alpha ∈ (0,2)")?;
        }
        for p in self.frequencies.iter().flatten() {
            check_positive("frequencies entry", *p)?;
        }
        let g = &self.grid;
        for (name, v) in [
            ("grid.spacing", g.spacing),
            ("grid.half_width", g.half_width),
            ("grid.du", g.du),
            ("grid.u_max", g.u_max),
            ("grid.inverse_residual_spacing", g.inverse_residual_spacing),
            ("grid.forward_residual_spacing", g.forward_residual_spacing),
        ] {
            if let Some(v) = v {
                check_positive(name, v)?;
            }
        }
        for tv in g.t_values.iter().flatten() {
            check_positive("grid.t_values entry", *tv)?;
        }
        let mc = &self.monte_carlo;
        if mc.paths < 2 {
            return Err(config_error("monte_carlo.paths must be at least 2"));
        }
        if mc.bins == 0 || mc.diagonal_stride == 0 {
            return Err(config_error("monte_carlo.bins and monte_carlo.diagonal_stride must be positive"));
        }
        check_positive("monte_carlo.range", mc.range)?;
        if !(mc.coupled_tau > 0.0 && mc.coupled_tau <= 1.0) {
            return Err(config_error("monte_carlo.coupled_tau must lie in (0, 1]"));
        }
        if let Some(SpectralFamily::Anisotropic { .. }) = k.spectral {
            return Err(config_error("kernel.spectral: anisotropic family needs d = 2; experiments are one-dimensional"));
        }
        if let Some(w) = &k.weight {
            w.validate()?;
        }
        Ok(())
    }

    /// Experiment to run: the CLI choice must agree with the document.
    pub fn resolve_experiment(&self, cli: Option<Experiment>) -> Result<Experiment> {
        match (self.experiment, cli) {
            (Some(a), Some(b)) if a != b => Err(config_error(format!(
                "config names experiment {} but {} was requested",
                a.name(),
                b.name()
            ))),
            (Some(a), _) | (None, Some(a)) => Ok(a),
            (None, None) => Err(config_error("experiment not named")),
        }
    }
}

fn parse_value(value: serde_json::Value) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_value(value).map_err(|e| {
        let msg = e.to_string();
        if msg.contains("missing field `seed`") {
            config_error("missing field `seed`: a master seed is required so that runs are reproducible")
        } else {
            config_error(msg)
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Parses and validates a JSON document; unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| config_error(e.to_string()))?;
    parse_value(value)
}

/// As [`parse_config`], with `seed` replaced when given.
pub fn parse_config_with_seed(text: &str, seed: Option<u64>) -> Result<RunConfig> {
    let mut value: serde_json::Value = serde_json::from_str(text).map_err(|e| config_error(e.to_string()))?;
    if let (Some(s), Some(obj)) = (seed, value.as_object_mut()) {
        obj.insert("seed".into(), serde_json::Value::from(s));
    }
    parse_value(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_gets_defaults() {
        let cfg = parse_config(r#"{"experiment": "sample-check", "seed": 3}"#).unwrap();
        assert_eq!(cfg.experiment, Some(Experiment::SampleCheck));
        assert_eq!(cfg.kernel, KernelConfig::default());
        assert_eq!(cfg.monte_carlo.paths, 100_000);
        assert_eq!(cfg.t, 1.0);
    }

    #[test]
    fn alpha_out_of_range_names_rule() {
        let err = parse_config(r#"{"seed": 1, "kernel": {"alpha": 2.5}}"#).unwrap_err().to_string();
        assert!(err.contains("alpha ∈ (0,2)"), "{err}");
    }

    #[test]
    fn missing_seed_rejected() {
        let err = parse_config(r#"{"experiment": "ctrw-limit"}"#).unwrap_err().to_string();
        assert!(err.contains("seed"), "{err}");
        assert!(parse_config_with_seed(r#"{"experiment": "ctrw-limit"}"#, Some(4)).is_ok());
    }

    #[test]
    fn unknown_key_rejected_by_name() {
        let err = parse_config(r#"{"seed": 1, "monte_carlo": {"path": 10}}"#).unwrap_err().to_string();
        assert!(err.contains("`path`"), "{err}");
        let err = parse_config(r#"{"seed": 1, "colour": "red"}"#).unwrap_err().to_string();
        assert!(err.contains("`colour`"), "{err}");
    }

    #[test]
    fn lists_must_decrease() {
        assert!(parse_config(r#"{"seed": 1, "h_list": [0.1, 0.2]}"#).is_err());
        assert!(parse_config(r#"{"seed": 1, "tau_list": [0.01, 0.01]}"#).is_err());
        assert!(parse_config(r#"{"seed": 1, "tau_list": [2.0, 0.5]}"#).is_err());
        assert!(parse_config(r#"{"seed": 1, "h_list": [0.2, 0.1, 0.05]}"#).is_ok());
    }

    #[test]
    fn experiment_choice_must_agree() {
        let cfg = parse_config(r#"{"experiment": "ctrw-limit", "seed": 1}"#).unwrap();
        assert!(cfg.resolve_experiment(Some(Experiment::SampleCheck)).is_err());
        assert_eq!(cfg.resolve_experiment(None).unwrap(), Experiment::CtrwLimit);
    }
}
