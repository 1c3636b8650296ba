//! Stacked round-update matrices, assembled from incidence, weight and
//! projection matrices rather than from the per-agent rules in `run`.

use serde::{Deserialize, Serialize};

use crate::graph::{incidence_matrix, spanning_incidence_matrix, DirectedGraph};
use crate::numerics::{block_diag, kronecker, projection_matrix, Matrix};
use crate::wellconfig::{stacked_c, WeightedNeighborGraph};

use super::weights::spanning_weight_matrix;
use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Diminishing-stepsize gradient descent on `||C Jbar' x||^2`.
    Gradient,
    /// Degree-scaled fixed step on a symmetric graph.
    FixedStep,
    /// Metropolis-weighted step over time-varying symmetric subgraphs.
    MetropolisTv,
    /// Half-step projection toward the predecessor on a directed cycle.
    CycleProjection,
    /// Projection rule on an arbitrary digraph; not convergent in general.
    GeneralProjection,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Self::Gradient => "gradient",
            Self::FixedStep => "fixed_step",
            Self::MetropolisTv => "metropolis_tv",
            Self::CycleProjection => "cycle_projection",
            Self::GeneralProjection => "general_projection",
        }
    }

    /// Whether the algorithm only makes sense on symmetric graphs.
    pub fn needs_symmetric(self) -> bool {
        matches!(self, Self::Gradient | Self::FixedStep | Self::MetropolisTv)
    }
}

/// Per-round inputs of the time-varying algorithms.
#[derive(Debug, Clone, Default)]
pub struct RoundInputs {
    /// Stepsize `alpha(t)` for [`Algorithm::Gradient`].
    pub stepsize: Option<f64>,
    /// Active spanning subgraph for [`Algorithm::MetropolisTv`]; the whole
    /// graph when absent.
    pub subgraph: Option<DirectedGraph>,
}

pub(crate) fn check_graph(alg: Algorithm, g: &DirectedGraph) -> Result<(), SimError> {
    if alg.needs_symmetric() && !g.is_symmetric() {
        return Err(SimError::NeedsSymmetric(alg.name()));
    }
    if alg == Algorithm::CycleProjection && !g.is_directed_cycle() {
        return Err(SimError::NotACycle);
    }
    Ok(())
}

/// Positive part of the incidence matrix: `+1` at the head of each arc.
fn head_incidence(g: &DirectedGraph) -> Matrix {
    incidence_matrix(g).map(|v| v.max(0.0))
}

fn per_agent_scaling(g: &DirectedGraph, n: usize, f: impl Fn(usize) -> f64) -> Matrix {
    let diag = Matrix::from_fn(g.vertex_count(), g.vertex_count(), |i, j| {
        if i == j {
            f(g.degree(i))
        } else {
            0.0
        }
    });
    kronecker(&diag, &Matrix::identity(n, n))
}

/// The `mn x mn` matrix `M` with `x(t+1) = M x(t)` for one round.
pub fn build_update_matrix(
    alg: Algorithm,
    w: &WeightedNeighborGraph,
    round: &RoundInputs,
    tol: f64,
) -> Result<Matrix, SimError> {
    let g = w.graph();
    check_graph(alg, g)?;
    let (m, n) = (g.vertex_count(), w.n());
    let id = Matrix::identity(m * n, m * n);
    let i_n = Matrix::identity(n, n);
    let jbar = kronecker(&incidence_matrix(g), &i_n);
    match alg {
        Algorithm::Gradient => {
            let alpha = round.stepsize.unwrap_or(1.0);
            let c = stacked_c(w);
            Ok(id - (&jbar * c.transpose() * &c * jbar.transpose()) * alpha)
        }
        Algorithm::FixedStep => {
            let c = stacked_c(&w.row_orthonormalized(tol)?);
            let dbar = per_agent_scaling(g, n, |d| 1.0 / (2.0 * (d as f64 + 1.0)));
            Ok(id - dbar * &jbar * c.transpose() * &c * jbar.transpose())
        }
        Algorithm::MetropolisTv => {
            let ortho = w.row_orthonormalized(tol)?;
            let sub = round.subgraph.as_ref().unwrap_or(g);
            let jt = kronecker(&spanning_incidence_matrix(g, sub)?, &i_n);
            let wt = spanning_weight_matrix(g, sub)?;
            // W (x) I, sized to the row blocks of C.
            let wbar = block_diag(
                &ortho
                    .weights()
                    .iter()
                    .enumerate()
                    .map(|(k, ck)| Matrix::identity(ck.nrows(), ck.nrows()) * wt[(k, k)])
                    .collect::<Vec<_>>(),
            );
            let c = stacked_c(&ortho);
            Ok(id - (&jt * c.transpose() * wbar * &c * jt.transpose()) * 0.5)
        }
        Algorithm::CycleProjection | Algorithm::GeneralProjection => {
            let projections = w
                .weights()
                .iter()
                .map(|c| projection_matrix(c, tol))
                .collect::<Result<Vec<_>, _>>()?;
            let pbar = block_diag(&projections);
            let hbar = kronecker(&head_incidence(g), &i_n);
            let scale = per_agent_scaling(g, n, |d| 1.0 / (d as f64 + 1.0));
            Ok(id - scale * hbar * pbar * jbar.transpose())
        }
    }
}
