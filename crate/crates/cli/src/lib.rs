//! Experiment harness around the `vacuumgas` library: configuration text
//! format, deterministic CSV/JSON outputs, and the run/refine/sweep drivers.
//! Everything here is seed-free; identical configs produce identical bytes.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod runner;
pub mod table;

pub use config::{apply_override, parse_config_text, RunConfig};
pub use error::{CliError, Result};
