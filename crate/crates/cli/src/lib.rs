//! Experiment harness around the `adamir` solvers: config files, batch runs,
//! multi-seed sweeps and the certificate battery.

pub mod commands;
pub mod config;
pub mod error;
pub mod verify;

pub use commands::{cmd_run, cmd_sweep, output_schemas, RunArtifact, SUMMARY_FILE};
pub use config::{NoiseChoice, OracleSettings, ProblemConfig, RunConfig, SolverArg};
pub use error::{CliError, CliResult};
pub use verify::{cmd_verify, CheckOutcome, VerifyOptions};
