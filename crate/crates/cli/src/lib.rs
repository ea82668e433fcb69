//! Batch front end for the EIT heat-engine simulator.
//!
//! A JSON [`RunConfig`](config::RunConfig) selects parameters, grids and
//! outputs; [`run`](run::run) executes one of the modes and writes CSV/JSON
//! artifacts. The `verify` mode runs the oracle suite in [`verify`].

pub mod config;
pub mod run;
pub mod verify;

pub use config::{validate_config, ConfigError, ConfigErrors, Mode, RunConfig};
pub use run::{run, RunError, RunSummary};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const CONSISTENCY: i32 = 2;
}

/// Exit code for a completed run.
pub fn exit_code(summary: &RunSummary) -> i32 {
    if summary.consistency_failures > 0 {
        exit::CONSISTENCY
    } else {
        exit::SUCCESS
    }
}
