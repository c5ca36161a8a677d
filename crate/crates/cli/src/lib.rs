//! Command-line front end: run configuration, reports and the on-disk cache.

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use commands::run;
pub use config::{Cli, RunConfig};
pub use error::CliError;
