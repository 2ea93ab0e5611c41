//! Command-line front end for `seqaccel`: feeds partial sums from the series
//! catalog, a file or stdin to several transformations side by side and
//! prints the result as a table or JSON.

pub mod config;
pub mod registry;
pub mod table;

use thiserror::Error;

pub use config::{Check, OutputFormat, Params, Precision, RunConfig, Source, TransformSpec};
pub use table::{check, render_json, render_table, run, CheckOutcome, ResultTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
        }
    }
}
