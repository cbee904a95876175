//! Command implementations behind the `hybrid-minnorm` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{cmd_check_minnorm, cmd_feasible_set, cmd_simulate, cmd_verify_clf, CheckArgs, FeasibleArgs, VerifyArgs};
pub use config::{ModeKind, RunConfig, SystemKind};

/// Exit code for a run that completed and met its criterion.
pub const EXIT_OK: i32 = 0;
/// Configuration, usage or construction errors.
pub const EXIT_CONFIG: i32 = 1;
/// The controller found no admissible input.
pub const EXIT_INFEASIBLE: i32 = 2;
/// The run completed but a check failed or a budget ran out.
pub const EXIT_FAILED: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config key '{key}': {message}")]
    Config { key: String, message: String },
    #[error("construction refused: {0}")]
    Construction(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] hybrid_minnorm::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(hybrid_minnorm::Error::Infeasible { .. }) => EXIT_INFEASIBLE,
            _ => EXIT_CONFIG,
        }
    }
}
