use std::io;
use std::path::PathBuf;

use thiserror::Error;
use udw_core::model::ModelError;
use udw_core::observables::ObservablesError;
use udw_core::oracle::OracleError;
use udw_core::rates::RatesError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_EVALUATION: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    #[error("oracle did not converge: {0}")]
    NonConvergence(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Evaluation(_) | CliError::Io { .. } => EXIT_EVALUATION,
            CliError::NonConvergence(_) => EXIT_NON_CONVERGENCE,
        }
    }

    /// Short machine-readable tag used in JSON error output.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Evaluation(_) => "evaluation",
            CliError::NonConvergence(_) => "non_convergence",
            CliError::Io { .. } => "io",
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<RatesError> for CliError {
    fn from(e: RatesError) -> Self {
        CliError::Evaluation(e.to_string())
    }
}

impl From<ObservablesError> for CliError {
    fn from(e: ObservablesError) -> Self {
        match e {
            ObservablesError::Regime(_) => CliError::Validation(e.to_string()),
            _ => CliError::Evaluation(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::NonConvergence { .. } | OracleError::BudgetExceeded(_) => {
                CliError::NonConvergence(e.to_string())
            }
            OracleError::InvalidConfig(_) | OracleError::InvalidInput(_) => CliError::Validation(e.to_string()),
            _ => CliError::Evaluation(e.to_string()),
        }
    }
}
