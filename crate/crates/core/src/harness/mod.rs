//! Experiment drivers, output emission and run bookkeeping.
//!
//! A run writes its tables, `config.json` and `summary.json` into the output
//! directory and lists them with checksums in `manifest.json`. Everything
//! except the runtimes in the manifest is a pure function of the
//! configuration.

pub mod config;
pub mod emit;
mod experiments;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
pub use config::{parse_config, parse_config_with_seed, Experiment, RunConfig};
pub use emit::{density_table, emit_density_csv, grid_table, read_table, sha256_file, write_table, Table};

/// Outcome of one acceptance assertion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    /// How `measured` is compared with `threshold`.
    pub relation: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: String,
    pub seed: u64,
    pub assertions: Vec<Assertion>,
    pub warnings: Vec<String>,
    pub all_passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    pub seed: u64,
    pub complete: bool,
    pub files: Vec<FileEntry>,
    /// Wall-clock milliseconds per phase and in total.
    pub runtime_ms: BTreeMap<String, u64>,
    pub threads: usize,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub out_dir: PathBuf,
    pub manifest: Manifest,
    pub summary: Summary,
}

impl RunResult {
    pub fn all_passed(&self) -> bool {
        self.manifest.complete && self.summary.all_passed
    }
}

/// Mutable state of a run shared by the drivers.
pub(crate) struct Run<'a> {
    pub cfg: &'a RunConfig,
    pub experiment: Experiment,
    pub strict: bool,
    out: &'a Path,
    files: Vec<FileEntry>,
    assertions: Vec<Assertion>,
    warnings: Vec<String>,
    runtime_ms: BTreeMap<String, u64>,
}

impl<'a> Run<'a> {
    fn new(cfg: &'a RunConfig, experiment: Experiment, out: &'a Path, strict: bool) -> Self {
        Self {
            cfg,
            experiment,
            strict,
            out,
            files: Vec::new(),
            assertions: Vec::new(),
            warnings: Vec::new(),
            runtime_ms: BTreeMap::new(),
        }
    }

    fn record_file(&mut self, name: &str) -> Result<()> {
        let path = self.out.join(name);
        let bytes = fs::metadata(&path)?.len();
        let sha256 = sha256_file(&path)?;
        self.files.retain(|f| f.name != name);
        self.files.push(FileEntry { name: name.to_string(), sha256, bytes });
        Ok(())
    }

    pub fn emit(&mut self, name: &str, table: &Table) -> Result<()> {
        write_table(table, &self.out.join(name))?;
        self.record_file(name)
    }

    fn emit_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(self.out.join(name), text)?;
        self.record_file(name)
    }

    /// `measured < threshold`.
    pub fn check_below(&mut self, name: &str, measured: f64, threshold: f64) -> Result<()> {
        let m = check_finite(measured, || format!("assertion {name}"))?;
        self.push(name, m < threshold, m, threshold, "<");
        Ok(())
    }

    /// `measured >= threshold`.
    pub fn check_at_least(&mut self, name: &str, measured: f64, threshold: f64) -> Result<()> {
        let m = check_finite(measured, || format!("assertion {name}"))?;
        self.push(name, m >= threshold, m, threshold, ">=");
        Ok(())
    }

    /// `lo <= measured <= hi`, with `hi` reported as the threshold.
    pub fn check_within(&mut self, name: &str, measured: f64, lo: f64, hi: f64) -> Result<()> {
        let m = check_finite(measured, || format!("assertion {name}"))?;
        self.push(name, (lo..=hi).contains(&m), m, hi, &format!("in [{lo}, {hi}]"));
        Ok(())
    }

    /// Boolean property with a count of violations as the measured value.
    pub fn check_exact(&mut self, name: &str, violations: usize) {
        self.push(name, violations == 0, violations as f64, 0.0, "==");
    }

    fn push(&mut self, name: &str, passed: bool, measured: f64, threshold: f64, relation: &str) {
        self.assertions.push(Assertion {
            name: name.to_string(),
            passed,
            measured,
            threshold,
            relation: relation.to_string(),
        });
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    /// Runs one phase, timing it and attaching its name to errors.
    pub fn phase<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f(self);
        self.runtime_ms.insert(name.to_string(), start.elapsed().as_millis() as u64);
        out.map_err(|e| match e {
            e @ (Error::Config(_) | Error::Phase { .. }) => e,
            e => Error::Phase {
                experiment: self.experiment.name().to_string(),
                phase: name.to_string(),
                source: Box::new(e),
            },
        })
    }

    fn summary(&self) -> Summary {
        let warned = self.strict && !self.warnings.is_empty();
        Summary {
            experiment: self.experiment.name().to_string(),
            seed: self.cfg.seed,
            assertions: self.assertions.clone(),
            warnings: self.warnings.clone(),
            all_passed: !warned && self.assertions.iter().all(|a| a.passed),
        }
    }
}

/// Runs `experiment` and writes its outputs into `out_dir`.
///
/// Assertion failures are reported in the result; module errors are
/// returned after a manifest marked incomplete has been written.
pub fn run_experiment(cfg: &RunConfig, experiment: Experiment, out_dir: &Path, strict: bool) -> Result<RunResult> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    let start = Instant::now();
    let mut run = Run::new(cfg, experiment, out_dir, strict);
    let mut outcome = run.emit_json("config.json", cfg);
    if outcome.is_ok() {
        outcome = experiments::dispatch(&mut run);
    }
    let summary = run.summary();
    if outcome.is_ok() {
        outcome = run.emit_json("summary.json", &summary);
    }
    run.runtime_ms.insert("total".into(), start.elapsed().as_millis() as u64);
    let manifest = Manifest {
        experiment: experiment.name().to_string(),
        seed: cfg.seed,
        complete: outcome.is_ok(),
        files: run.files.clone(),
        runtime_ms: run.runtime_ms.clone(),
        threads: rayon::current_num_threads(),
        error: outcome.as_ref().err().map(|e| e.to_string()),
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(out_dir.join("manifest.json"), text)?;
    outcome?;
    Ok(RunResult { out_dir: out_dir.to_path_buf(), manifest, summary })
}

/// Reads `manifest.json` and checks that every listed file exists, matches
/// its checksum and parses back.
pub fn verify_manifest(out_dir: &Path) -> Result<Manifest> {
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json"))?)?;
    for f in &manifest.files {
        let path = out_dir.join(&f.name);
        if sha256_file(&path)? != f.sha256 {
            return Err(Error::Domain(format!("checksum mismatch for {}", f.name)));
        }
        if f.name.ends_with(".csv") {
            read_table(&path)?;
        } else {
            serde_json::from_str::<serde_json::Value>(&fs::read_to_string(&path)?)?;
        }
    }
    Ok(manifest)
}
