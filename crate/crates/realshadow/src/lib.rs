//! Command-line front end for `realshadow-core`: polynomial parsing, CSV and
//! JSON output with round-trip precision, PGM/PPM rasters, run configs and
//! manifests.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod format;
pub mod parse;
pub mod raster;

pub use commands::{execute, Cli, Command};
pub use error::{CliError, ParseError};
