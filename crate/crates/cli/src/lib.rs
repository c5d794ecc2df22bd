//! Command-line front end for `optomech-core`: configuration, sweeps,
//! figure datasets, system comparison and the oracle validation suite.

pub mod app;
pub mod compare;
pub mod config;
pub mod dataset;
pub mod error;
pub mod figures;
pub mod models;
pub mod scan;
pub mod validate;

pub use app::{run, Cli, Command};
pub use error::CliError;
