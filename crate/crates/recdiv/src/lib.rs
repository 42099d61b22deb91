//! Command-line frontend for `recdiv-core`.
//!
//! Every subcommand writes one report, JSON or CSV, headed by metadata that
//! is enough to rerun it: tool version, schema version, the argument list
//! and the seed. Reports never contain timestamps or thread counts, so a
//! replay reproduces the same bytes.

pub mod cli;
pub mod exec;
pub mod formats;
pub mod report;

pub use cli::{run, run_main, CliError};
pub use exec::RayonExecutor;
