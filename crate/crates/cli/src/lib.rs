//! Command-line harness for the kslab library: subcommands that emit CSV
//! tables, and the acceptance suite.

pub mod commands;
pub mod config;
mod error;
pub mod fields;
pub mod output;
pub mod suite;

pub use error::{CliError, Result};
