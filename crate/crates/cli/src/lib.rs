//! Command implementations behind the `embeval` binary.

pub mod args;
mod commands;
pub mod error;
pub mod manifest;

pub use commands::run;
pub use error::{CliError, CliResult};
