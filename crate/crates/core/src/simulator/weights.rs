use std::collections::BTreeMap;

use crate::graph::{check_spanning, Arc, DirectedGraph};
use crate::numerics::Matrix;

use super::SimError;

/// `w_ij = 1 / (1 + max(d_i, d_j))` for every arc of a symmetric graph.
pub fn metropolis_weights(g: &DirectedGraph) -> Result<BTreeMap<Arc, f64>, SimError> {
    if !g.is_symmetric() {
        return Err(SimError::NeedsSymmetric("Metropolis weights"));
    }
    Ok(g.arcs()
        .iter()
        .map(|&a| {
            let d = g.degree(a.tail).max(g.degree(a.head));
            (a, 1.0 / (1.0 + d as f64))
        })
        .collect())
}

/// `d x d` diagonal matrix over `g`'s arc ordering holding the Metropolis
/// weights of `sub` (computed with `sub`'s degrees), zero for absent arcs.
pub fn spanning_weight_matrix(g: &DirectedGraph, sub: &DirectedGraph) -> Result<Matrix, SimError> {
    check_spanning(g, sub)?;
    let weights = metropolis_weights(sub)?;
    let mut w = Matrix::zeros(g.arc_count(), g.arc_count());
    for (k, a) in g.arcs().iter().enumerate() {
        if let Some(&v) = weights.get(a) {
            w[(k, k)] = v;
        }
    }
    Ok(w)
}
