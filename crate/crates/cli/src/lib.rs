//! Command-line front end for `quartic-core`: configuration parsing, file
//! formats and the `solve`, `sweep`, `evolve` and `verify` workflows.

pub mod commands;
pub mod complex_text;
pub mod config;
pub mod error;
pub mod io;
pub mod setup;

pub use commands::{execute, run, run_from_args, Cli, Command, CommonArgs};
pub use config::Config;
pub use error::CliError;
