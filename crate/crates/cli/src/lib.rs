//! Command-line front end: JSON configuration, the four subcommands and the
//! exit-code contract (0 success, 2 configuration, 3 numerical, 4 failed
//! verification).

pub mod commands;
pub mod config;
pub mod error;

pub use config::{Config, Overrides};
pub use error::{CliError, ErrorKind};
