//! Configuration, output formats and commands of the `hvdcsim` CLI.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod range;

pub use config::RunConfig;
pub use error::CliError;
