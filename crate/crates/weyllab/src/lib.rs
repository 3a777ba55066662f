//! Experiment runner for `weyllab-core`: symbol literals, `key = value`
//! configs, CSV and JSON artifacts, parallel scans and the acceptance suite.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod literal;
pub mod parallel;
pub mod suite;

pub use commands::{run, Report};
pub use config::{Command, ExperimentConfig};
pub use error::{CliError, CliResult};
