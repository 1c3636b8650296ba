//! Synchronous-round simulation of the consensus algorithms.
//!
//! Every round is a pure function of the previous stacked state
//! `x(t) = (x_1, .., x_m)`; agent `i` only reads the round-`t` snapshot.

mod metrics;
mod run;
mod schedule;
mod spectral;
mod update;
mod weights;

use thiserror::Error;

use crate::graph::GraphError;
use crate::numerics::LinalgError;
use crate::wellconfig::ConfigError;

pub use metrics::{consensus_error, local_agreement_residual, objective, objective_gradient};
pub use run::{
    run_cycle_projection, run_fixed_step, run_general_projection, run_gradient, run_metropolis_tv,
    RunOptions, Trajectory, CONSENSUS_STREAK, CONSENSUS_THRESHOLD,
};
pub use schedule::{Schedule, ScheduleMode, StepsizeSchedule};
pub use spectral::{spectral_report, SpectralReport, UNIT_EIGENVALUE_TOL};
pub use update::{build_update_matrix, Algorithm, RoundInputs};
pub use weights::{metropolis_weights, spanning_weight_matrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0} requires a symmetric graph")]
    NeedsSymmetric(&'static str),
    #[error("cycle projection requires the graph to be a single directed cycle")]
    NotACycle,
    #[error("initial state has length {got}, expected m*n = {expected}")]
    StateLength { got: usize, expected: usize },
    #[error("schedule: {0}")]
    Schedule(String),
    #[error("stepsize: {0}")]
    Stepsize(String),
}
