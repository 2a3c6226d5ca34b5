//! Command-line front end for `vortex-core`: fixture generation, simulation
//! drivers, slope analyses, form evaluators and check suites.
//!
//! Exit status is 0 on success, 2 for rejected input and 3 for numerical
//! failures (poor fits, stalled integrators, collapsing meshes, failed
//! checks). Every error message starts with the `module::operation` that
//! raised it.

pub mod args;
pub mod commands;
pub mod scenario;

use std::fmt;
use std::path::Path;

pub use args::Cli;

/// Version string embedded in every report.
pub const VERSION: &str = concat!("vortex ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    Validation,
    Numerical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub op: &'static str,
    pub failure: Failure,
    pub msg: String,
}

impl CliError {
    pub fn invalid(op: &'static str, msg: impl Into<String>) -> Self {
        CliError { op, failure: Failure::Validation, msg: msg.into() }
    }

    pub fn numerical(op: &'static str, msg: impl Into<String>) -> Self {
        CliError { op, failure: Failure::Numerical, msg: msg.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.failure {
            Failure::Validation => 2,
            Failure::Numerical => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.op, self.msg)
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;

/// Attaches the raising operation to a core error.
pub trait Op<T> {
    fn op(self, op: &'static str) -> CliResult<T>;
}

impl<T> Op<T> for vortex_core::Result<T> {
    fn op(self, op: &'static str) -> CliResult<T> {
        self.map_err(|e| CliError {
            op,
            failure: if e.is_numerical() { Failure::Numerical } else { Failure::Validation },
            msg: e.to_string(),
        })
    }
}

pub(crate) fn read_input(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::invalid("cli::read_input", format!("{}: {e}", path.display())))
}

pub(crate) fn write_output(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::invalid("cli::write_output", format!("{}: {e}", path.display())))
}

/// Parses arguments already split into words and runs the command.
pub fn run(cli: Cli) -> CliResult<()> {
    commands::dispatch(cli.command)
}
