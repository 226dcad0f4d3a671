//! Command-line front end for `cqed-core`: TOML configuration, parameter
//! sweeps written as CSV, optional SVG plots and the acceptance suite.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{run, CommandKind, RunContext};
pub use config::Config;
pub use error::{CliError, CliResult};
