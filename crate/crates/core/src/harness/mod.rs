//! Command-line experiments: configuration, CSV reports and golden files.

pub mod cases;
mod commands;
pub mod config;
pub mod report;

pub use config::ExperimentConfig;
pub use report::{compare_text, golden_check, parse_csv, Cell, CsvReport, ParsedCsv, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Subcommand {
    Whitney,
    Decompose,
    WeakNorm,
    Hilbert,
    Lemma1,
    Lemma2,
    Ap,
    Params,
    Theorem1,
    Theorem2,
    Axioms,
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error{}: {reason}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, reason: String },
    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
    #[error("report schema mismatch: {0}")]
    Schema(String),
    #[error(transparent)]
    Core(#[from] crate::Error),
}

impl HarnessError {
    /// 2 for usage and configuration problems, 1 for failures during a run.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config { .. } | HarnessError::Io { .. } => 2,
            HarnessError::Schema(_) | HarnessError::Core(_) => 1,
        }
    }
}

/// A report and the invariant failures observed while producing it.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: CsvReport,
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn run(cmd: Subcommand, cfg: &ExperimentConfig) -> Result<Outcome, HarnessError> {
    commands::dispatch(cmd, cfg)
}

/// Golden tolerances from the config, with the report's quadrature columns.
pub fn tolerances(cfg: &ExperimentConfig, report: &CsvReport) -> Tolerances {
    Tolerances {
        default: cfg.golden.tolerance,
        quadrature: cfg.golden.quadrature_tolerance,
        quadrature_columns: report.quadrature_columns.clone(),
        only: cfg.golden.columns.clone(),
        override_tolerance: cfg.golden.override_tolerance,
    }
}
