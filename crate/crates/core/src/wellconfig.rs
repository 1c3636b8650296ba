//! Well-configuration of matrix-weighted neighbor graphs.
//!
//! A weighted graph is well-configured when local agreement
//! (`C_ji x_i = C_ji x_j` on every arc) forces consensus, i.e. when
//! `kernel(C Jbar') = span(Ibar)`. Two independent verifiers are provided:
//! [`is_well_configured`] compares that kernel with the consensus subspace,
//! [`is_well_configured_via_intersection`] checks
//! `span(Jbar') ∩ kernel(C) = 0`.

use thiserror::Error;

use crate::ear::{symmetric_ear_decomposition, EarDecomposition};
use crate::graph::{incidence_matrix, incidence_matrix_ordered, Arc, DirectedGraph, GraphError};
use crate::numerics::{
    block_diag, consensus_basis, hstack, kernel_basis, kronecker, numerical_rank,
    orthonormalize_rows, range_basis, subspace_family_independent, LinalgError, Matrix,
    SubspaceBasis, Vector,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("graph is not weakly connected: consensus cannot follow from local agreement")]
    NotWeaklyConnected,
    #[error("expected {expected} weight matrices (one per arc), got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("weight on arc {arc} has {cols} columns, expected n = {n}")]
    WeightColumns { arc: Arc, cols: usize, n: usize },
    #[error("no weight matrix given for arc {0}")]
    MissingWeight(Arc),
    #[error("state dimension n must be positive")]
    ZeroDimension,
    #[error(
        "infeasible: ear {} has length {len} > n = {n}; nonzero kernels on every arc need \
         max ear length <= n",
        .ear + 1
    )]
    EarTooLong { ear: usize, len: usize, n: usize },
    #[error("decomposition kind does not match the requested synthesis")]
    DecompositionKind,
}

/// A directed graph with one matrix `C_ji` (n columns) per arc, stored in
/// canonical arc order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedNeighborGraph {
    graph: DirectedGraph,
    n: usize,
    weights: Vec<Matrix>,
}

impl WeightedNeighborGraph {
    /// `weights[k]` belongs to the `k`-th canonical arc.
    pub fn new(graph: DirectedGraph, n: usize, weights: Vec<Matrix>) -> Result<Self, ConfigError> {
        if n == 0 {
            return Err(ConfigError::ZeroDimension);
        }
        if weights.len() != graph.arc_count() {
            return Err(ConfigError::WeightCount {
                expected: graph.arc_count(),
                got: weights.len(),
            });
        }
        for (&arc, c) in graph.arcs().iter().zip(&weights) {
            if c.ncols() != n {
                return Err(ConfigError::WeightColumns {
                    arc,
                    cols: c.ncols(),
                    n,
                });
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(LinalgError::NonFinite.into());
            }
        }
        Ok(Self { graph, n, weights })
    }

    /// Builds from `(arc, C)` pairs in any order; every arc needs exactly one.
    pub fn from_arc_weights(
        graph: DirectedGraph,
        n: usize,
        pairs: impl IntoIterator<Item = (Arc, Matrix)>,
    ) -> Result<Self, ConfigError> {
        let mut slots: Vec<Option<Matrix>> = vec![None; graph.arc_count()];
        for (arc, c) in pairs {
            let idx = graph
                .arc_index(arc)
                .ok_or(GraphError::NotSpanningSubgraph(format!(
                    "arc {arc} is not in the graph"
                )))?;
            if slots[idx].replace(c).is_some() {
                return Err(GraphError::DuplicateArc(arc).into());
            }
        }
        let weights = slots
            .into_iter()
            .zip(graph.arcs())
            .map(|(c, &a)| c.ok_or(ConfigError::MissingWeight(a)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(graph, n, weights)
    }

    /// Every arc weighted by `I_n`.
    pub fn identity(graph: DirectedGraph, n: usize) -> Result<Self, ConfigError> {
        let weights = vec![Matrix::identity(n, n); graph.arc_count()];
        Self::new(graph, n, weights)
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[Matrix] {
        &self.weights
    }

    pub fn weight(&self, arc: Arc) -> Option<&Matrix> {
        self.graph.arc_index(arc).map(|k| &self.weights[k])
    }

    /// Kernels `K_ji` in canonical arc order.
    pub fn kernels(&self, tol: f64) -> Vec<SubspaceBasis> {
        self.weights.iter().map(|c| kernel_basis(c, tol)).collect()
    }

    /// Same graph with each `C_ji` replaced by a row-orthonormal matrix with
    /// the same kernel.
    pub fn row_orthonormalized(&self, tol: f64) -> Result<Self, ConfigError> {
        let weights = self
            .weights
            .iter()
            .map(|c| orthonormalize_rows(c, tol))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            graph: self.graph.clone(),
            n: self.n,
            weights,
        })
    }
}

/// Block-diagonal `C` with the canonical arc order's matrices on the diagonal.
pub fn stacked_c(w: &WeightedNeighborGraph) -> Matrix {
    block_diag(w.weights())
}

/// `C` under an arbitrary arc ordering (`order[k]` is a canonical index).
pub fn stacked_c_ordered(w: &WeightedNeighborGraph, order: &[usize]) -> Matrix {
    block_diag(
        &order
            .iter()
            .map(|&k| w.weights()[k].clone())
            .collect::<Vec<_>>(),
    )
}

/// `Jbar = J (x) I_n`.
pub fn lifted_incidence(g: &DirectedGraph, n: usize) -> Matrix {
    kronecker(&incidence_matrix(g), &Matrix::identity(n, n))
}

/// `C Jbar'`: maps a stacked state to the stacked local disagreement signals.
pub fn disagreement_operator(w: &WeightedNeighborGraph) -> Matrix {
    stacked_c(w) * lifted_incidence(w.graph(), w.n()).transpose()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WellConfigVerdict {
    pub well_configured: bool,
    /// `dim kernel(C Jbar')`; equals `n` exactly when well-configured.
    pub kernel_dim: usize,
    /// Unit-norm stacked state in local agreement but not in consensus,
    /// present when the verdict is negative.
    pub witness: Option<Vector>,
}

fn require_weakly_connected(g: &DirectedGraph) -> Result<(), ConfigError> {
    if g.is_weakly_connected() {
        Ok(())
    } else {
        Err(ConfigError::NotWeaklyConnected)
    }
}

/// Kernel-dimension verdict: `kernel(C Jbar')` must be exactly `span(Ibar)`.
pub fn is_well_configured(
    w: &WeightedNeighborGraph,
    tol: f64,
) -> Result<WellConfigVerdict, ConfigError> {
    let order: Vec<usize> = (0..w.graph().arc_count()).collect();
    is_well_configured_ordered(w, &order, tol)
}

/// [`is_well_configured`] with `C` and `J` assembled under `order`.
pub fn is_well_configured_ordered(
    w: &WeightedNeighborGraph,
    order: &[usize],
    tol: f64,
) -> Result<WellConfigVerdict, ConfigError> {
    let g = w.graph();
    require_weakly_connected(g)?;
    let (m, n) = (g.vertex_count(), w.n());
    let jbar = kronecker(&incidence_matrix_ordered(g, order), &Matrix::identity(n, n));
    let op = stacked_c_ordered(w, order) * jbar.transpose();
    let kernel = kernel_basis(&op, tol);
    let ibar = consensus_basis(m, n);
    // Consensus states always lie in the kernel; check containment anyway so
    // a tolerance too coarse for the data shows up as a failed verdict.
    let contains_consensus = (0..n).all(|c| kernel.residual(&ibar.column(c).into_owned()) <= 1e-8);
    let well_configured = kernel.dim() == n && contains_consensus;
    let witness = if well_configured {
        None
    } else {
        non_consensus_direction(&kernel, m, n)
    };
    Ok(WellConfigVerdict {
        well_configured,
        kernel_dim: kernel.dim(),
        witness,
    })
}

/// The kernel direction farthest from consensus, normalized.
fn non_consensus_direction(kernel: &SubspaceBasis, m: usize, n: usize) -> Option<Vector> {
    let ibar = consensus_basis(m, n);
    // Orthogonal projector onto span(Ibar) is Ibar Ibar' / m.
    let strip = |v: Vector| -> Vector {
        let coeff = ibar.transpose() * &v / m as f64;
        v - &ibar * coeff
    };
    (0..kernel.dim())
        .map(|c| strip(kernel.basis().column(c).into_owned()))
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .filter(|v| v.norm() > 1e-6)
        .map(|v| v.normalize())
}

/// Intersection verdict: `span(Jbar') ∩ kernel(C) = 0`. Equivalent to
/// [`is_well_configured`] for weakly connected graphs.
pub fn is_well_configured_via_intersection(
    w: &WeightedNeighborGraph,
    tol: f64,
) -> Result<bool, ConfigError> {
    let g = w.graph();
    require_weakly_connected(g)?;
    let range = range_basis(&lifted_incidence(g, w.n()).transpose(), tol);
    let kernel = kernel_basis(&stacked_c(w), tol);
    if kernel.dim() == 0 || range.ncols() == 0 {
        return Ok(true);
    }
    let joint = numerical_rank(&hstack(&[range.clone(), kernel.basis().clone()]), tol);
    Ok(range.ncols() + kernel.dim() == joint)
}

/// Directed cycle, kernels listed in cycle order: well-configured iff the
/// kernels form an independent family.
pub fn cycle_criterion(kernels: &[SubspaceBasis], tol: f64) -> Result<bool, ConfigError> {
    Ok(subspace_family_independent(kernels, tol)?)
}

/// Cycle whose arcs flagged in `agreed` are known to join equal states: only
/// the remaining kernels need to be independent.
pub fn reduced_cycle_criterion(
    kernels: &[SubspaceBasis],
    agreed: &[bool],
    tol: f64,
) -> Result<bool, ConfigError> {
    assert_eq!(kernels.len(), agreed.len(), "one flag per cycle arc");
    let free: Vec<SubspaceBasis> = kernels
        .iter()
        .zip(agreed)
        .filter(|(_, &a)| !a)
        .map(|(k, _)| k.clone())
        .collect();
    Ok(subspace_family_independent(&free, tol)?)
}

/// Directed path whose end states are known to agree: well-configured iff
/// the path kernels are independent.
pub fn pinned_path_criterion(kernels: &[SubspaceBasis], tol: f64) -> Result<bool, ConfigError> {
    Ok(subspace_family_independent(kernels, tol)?)
}

/// Three agents with arcs 1->2, 2->1, 3->1, 3->2: well-configured iff
/// `{K12 ∩ K21, K31, K32}` is independent.
pub fn example1_criterion(
    k12: &SubspaceBasis,
    k21: &SubspaceBasis,
    k31: &SubspaceBasis,
    k32: &SubspaceBasis,
    tol: f64,
) -> Result<bool, ConfigError> {
    let family = [k12.intersection(k21, tol), k31.clone(), k32.clone()];
    Ok(subspace_family_independent(&family, tol)?)
}

/// Arcs (1,2), (2,3), (3,1), (2,1) with kernels `K1..K4`: well-configured iff
/// `{K1 ∩ K4, K2, K3}` is independent.
pub fn counterexample_criterion(
    k1: &SubspaceBasis,
    k2: &SubspaceBasis,
    k3: &SubspaceBasis,
    k4: &SubspaceBasis,
    tol: f64,
) -> Result<bool, ConfigError> {
    let family = [k1.intersection(k4, tol), k2.clone(), k3.clone()];
    Ok(subspace_family_independent(&family, tol)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthMode {
    /// Every arc gets a one-dimensional kernel; needs max ear length <= n.
    NonzeroKernels,
    /// Arcs beyond position `n` in an ear get `C = I_n` (trivial kernel).
    Free,
}

/// `(n-1) x n` matrix with orthonormal rows whose kernel is `span{e_axis}`.
pub fn axis_complement(n: usize, axis: usize) -> Matrix {
    let rows: Vec<usize> = (0..n).filter(|&r| r != axis).collect();
    Matrix::from_fn(rows.len(), n, |r, c| if rows[r] == c { 1.0 } else { 0.0 })
}

fn weight_for_position(t: usize, n: usize) -> Matrix {
    if t < n {
        axis_complement(n, t)
    } else {
        Matrix::identity(n, n)
    }
}

fn check_lengths(d: &EarDecomposition, n: usize, mode: SynthMode) -> Result<(), ConfigError> {
    if mode == SynthMode::NonzeroKernels {
        if let Some((ear, e)) = d.ears.iter().enumerate().find(|(_, e)| e.len() > n) {
            return Err(ConfigError::EarTooLong {
                ear,
                len: e.len(),
                n,
            });
        }
    }
    Ok(())
}

/// Weights from an ear decomposition: the `t`-th arc of every ear gets
/// kernel `span{e_t}`, so kernels within an ear are independent.
pub fn synthesize(
    g: &DirectedGraph,
    n: usize,
    decomposition: &EarDecomposition,
    mode: SynthMode,
) -> Result<WeightedNeighborGraph, ConfigError> {
    if n == 0 {
        return Err(ConfigError::ZeroDimension);
    }
    if decomposition.symmetric {
        return Err(ConfigError::DecompositionKind);
    }
    decomposition.validate(g)?;
    check_lengths(decomposition, n, mode)?;
    let pairs = decomposition.ears.iter().flat_map(|ear| {
        ear.forward_arcs()
            .into_iter()
            .enumerate()
            .map(|(t, a)| (a, weight_for_position(t, n)))
            .collect::<Vec<_>>()
    });
    WeightedNeighborGraph::from_arc_weights(g.clone(), n, pairs)
}

/// Weights with `C_ij = C_ji` from a symmetric ear decomposition: each
/// two-length cycle gets one kernel axis, independent within its ear.
pub fn synthesize_symmetric(
    g: &DirectedGraph,
    n: usize,
    mode: SynthMode,
) -> Result<(WeightedNeighborGraph, EarDecomposition), ConfigError> {
    if n == 0 {
        return Err(ConfigError::ZeroDimension);
    }
    let decomposition = symmetric_ear_decomposition(g)?;
    let w = synthesize_symmetric_with(g, n, &decomposition, mode)?;
    Ok((w, decomposition))
}

/// [`synthesize_symmetric`] from a caller-supplied symmetric decomposition.
pub fn synthesize_symmetric_with(
    g: &DirectedGraph,
    n: usize,
    decomposition: &EarDecomposition,
    mode: SynthMode,
) -> Result<WeightedNeighborGraph, ConfigError> {
    if n == 0 {
        return Err(ConfigError::ZeroDimension);
    }
    if !decomposition.symmetric {
        return Err(ConfigError::DecompositionKind);
    }
    decomposition.validate(g)?;
    check_lengths(decomposition, n, mode)?;
    let mut pairs = Vec::with_capacity(g.arc_count());
    for ear in &decomposition.ears {
        for (t, a) in ear.forward_arcs().into_iter().enumerate() {
            let c = weight_for_position(t, n);
            pairs.push((a.reversed(), c.clone()));
            pairs.push((a, c));
        }
    }
    WeightedNeighborGraph::from_arc_weights(g.clone(), n, pairs)
}
