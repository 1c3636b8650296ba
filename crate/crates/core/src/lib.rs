//! Matrix-weighted consensus: well-configuration checks for weighted
//! neighbor graphs, ear-decomposition weight synthesis, and simulation of
//! the consensus iterations with spectral diagnostics.

pub mod ear;
pub mod graph;
pub mod io;
pub mod numerics;
pub mod simulator;
pub mod wellconfig;

pub use ear::{
    chi, ear_decomposition, symmetric_ear_decomposition, Ear, EarDecomposition, EarKind,
    EnumerationCap,
};
pub use graph::{incidence_matrix, spanning_incidence_matrix, Arc, DirectedGraph, GraphError};
pub use numerics::{LinalgError, Matrix, SubspaceBasis, Vector, DEFAULT_RANK_TOL};
pub use simulator::{Algorithm, SimError, Trajectory};
pub use wellconfig::{
    is_well_configured, synthesize, synthesize_symmetric, synthesize_symmetric_with, ConfigError,
    SynthMode, WeightedNeighborGraph, WellConfigVerdict,
};
