use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use weaktype::harness::{self, ExperimentConfig, HarnessError, Subcommand};

/// Weak-type (1,1) experiments for Calderón–Zygmund operators.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    #[arg(value_enum)]
    subcommand: Subcommand,
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// CSV report path; overrides `experiment.output`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Golden report to compare against.
    #[arg(long)]
    golden: Option<PathBuf>,
}

fn read(path: &PathBuf) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

fn execute(cli: &Cli) -> Result<bool, HarnessError> {
    let cfg = ExperimentConfig::parse(&read(&cli.config)?)?;
    let outcome = harness::run(cli.subcommand, &cfg)?;
    let text = outcome.report.render();
    let out = cli.out.clone().or(cfg.experiment.output.as_ref().map(PathBuf::from));
    match &out {
        Some(p) => std::fs::write(p, &text).map_err(|e| HarnessError::Io {
            path: p.display().to_string(),
            reason: e.to_string(),
        })?,
        None => print!("{text}"),
    }
    let mut ok = outcome.passed();
    for f in &outcome.failures {
        eprintln!("FAIL {f}");
    }
    if let Some(g) = &cli.golden {
        let mismatches = harness::golden_check(&outcome.report, g, &harness::tolerances(&cfg, &outcome.report))?;
        for m in &mismatches {
            eprintln!("GOLDEN {m}");
        }
        ok &= mismatches.is_empty();
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
