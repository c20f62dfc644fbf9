//! Command implementations behind the `diclique` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use commands::GlobalOpts;
pub use config::{Format, RunConfig, SCHEMA};
pub use error::CliError;
