//! Scenario runner for the `modebeam` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod output;
pub mod runner;
pub mod scenario;

pub use error::CliError;
pub use output::run_scenario;
pub use runner::{GridSize, RunOptions};
pub use scenario::{parse_scenario, parse_scenario_str, Configuration, Scenario, Target};

/// Environment variable naming the output directory when `--out` is absent.
pub const OUT_ENV: &str = "MODEBEAM_OUT";
