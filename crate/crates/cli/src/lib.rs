//! Shell and benchmark driver over `gsql_core`.
//!
//! A [`Session`] owns one graph, the loaded relational tables and the
//! installed queries. [`command::cmd_run`] executes one command line against
//! it; the binary chains command lines or reads them interactively.

pub mod bench;
pub mod command;
pub mod session;

use gsql_core::eval::EvalError;
use thiserror::Error;

pub use command::{cmd_run, repl, Output};
pub use session::Session;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] gsql_core::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// 1 for anything the user can fix, 2 for engine faults.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Core(e.into())
    }
}

impl From<gsql_core::graph::GraphError> for CliError {
    fn from(e: gsql_core::graph::GraphError) -> Self {
        CliError::Core(e.into())
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
