use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use fracwalk::harness::{parse_config_with_seed, run_experiment, Experiment};
use fracwalk::rng::{threads_from_env, with_threads};
use fracwalk::Error;

/// Runs one of the canonical studies and writes its tables and summary.
#[derive(Parser, Debug)]
#[command(name = "fracwalk", version)]
struct Cli {
    experiment: Experiment,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed; overrides `seed` in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Treat clipped negative mass and other warnings as failures.
    #[arg(long)]
    strict: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let cfg = fs::read_to_string(&cli.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", cli.config.display())))
        .and_then(|text| parse_config_with_seed(&text, cli.seed))
        .and_then(|cfg| cfg.resolve_experiment(Some(cli.experiment)).map(|x| (cfg, x)));
    let (cfg, experiment) = match cfg {
        Ok(v) => v,
        Err(e) => {
            eprintln!("fracwalk: {e}");
            return ExitCode::from(2);
        }
    };
    let out = cli
        .out
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(experiment.name()));
    let threads = threads_from_env().unwrap_or_else(rayon::current_num_threads);
    let result = with_threads(threads, || run_experiment(&cfg, experiment, &out, cli.strict));
    match result {
        Ok(r) => {
            for a in &r.summary.assertions {
                println!(
                    "{} {}: measured {:.6e} ({} {:.6e})",
                    if a.passed { "PASS" } else { "FAIL" },
                    a.name,
                    a.measured,
                    a.relation,
                    a.threshold
                );
            }
            for w in &r.summary.warnings {
                println!("WARN {w}");
            }
            println!("outputs in {}", out.display());
            if r.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("fracwalk: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("fracwalk: {e}");
            ExitCode::from(1)
        }
    }
}
