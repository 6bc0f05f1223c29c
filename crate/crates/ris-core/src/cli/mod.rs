//! Batch entry point: INI-style config parsing, the bundled scenario
//! schema, and the run/sweep/compare/truncate commands.

mod commands;
mod config;

pub use commands::{cmd_compare, cmd_run, cmd_sweep, cmd_truncate};
pub use config::{parse_config, parse_config_str, RunConfig};
