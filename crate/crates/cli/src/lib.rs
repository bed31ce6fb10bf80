//! Run configuration, commands and deterministic report writing for the
//! `coshlab` binary.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{cmd_monodromy, cmd_report, cmd_solve, cmd_toda, cmd_verify, CliError, Outcome};
pub use config::{load_config, parse_config, Overrides, RunConfig};
