//! Command-line front end for the spin Wehrl entropy library: configuration
//! files, scenario runs, method comparisons and parameter sweeps.

use std::fmt;

pub mod compare;
pub mod config;
pub mod plan;
pub mod report;
pub mod sweep;

/// Exit status for a comparison outside tolerance or an output failure.
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration.
    Config(String),
    /// A library routine failed while running.
    Numerical(spin_wehrl::Error),
    /// The scenario offers fewer than two methods for every quantity.
    NothingToCompare(String),
    /// Comparison deviation above tolerance.
    ToleranceExceeded {
        deviation: f64,
        tolerance: f64,
    },
    Io(String),
    /// An error tagged with the sweep point it came from.
    Context(String, Box<CliError>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::NothingToCompare(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::ToleranceExceeded { .. } | CliError::Io(_) => EXIT_FAILURE,
            CliError::Context(_, inner) => inner.exit_code(),
        }
    }

    pub fn context(self, at: &str) -> CliError {
        CliError::Context(at.to_string(), Box::new(self))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error:\n{msg}"),
            CliError::Numerical(e) => write!(f, "numerical failure [{}]: {e}", e.name()),
            CliError::NothingToCompare(msg) => write!(f, "NothingToCompare: {msg}"),
            CliError::ToleranceExceeded {
                deviation,
                tolerance,
            } => {
                write!(
                    f,
                    "method deviation {deviation:e} exceeds tolerance {tolerance:e}"
                )
            }
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
            CliError::Context(at, inner) => write!(f, "at {at}: {inner}"),
        }
    }
}

impl std::error::Error for CliError {}
