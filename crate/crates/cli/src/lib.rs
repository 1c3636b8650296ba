//! Scenario-driven front end for the `matcons` command.

pub mod commands;
pub mod scenario;

pub use commands::{cmd_analyze, cmd_counterexample, cmd_run, cmd_synth, cmd_verify, Settings};
pub use scenario::{LoadedScenario, Scenario};
