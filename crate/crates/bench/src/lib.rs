//! Fixture builders shared by the benchmarks.

use matcons_core::numerics::Vector;
use matcons_core::{synthesize_symmetric, DirectedGraph, SynthMode, WeightedNeighborGraph};

/// Symmetric wheel on `m` vertices: a rim cycle plus a hub joined to every
/// rim vertex. 2-connected for `m >= 4`.
pub fn wheel(m: usize) -> DirectedGraph {
    assert!(m >= 4, "wheel needs a hub and at least three rim vertices");
    let rim = m - 1;
    let mut edges: Vec<(usize, usize)> = (0..rim).map(|k| (k, (k + 1) % rim)).collect();
    edges.extend((0..rim).map(|k| (k, rim)));
    DirectedGraph::symmetric_from_edges(m, &edges).expect("valid wheel")
}

/// Synthesized weights on a wheel with state dimension `n`.
pub fn synthesized_wheel(m: usize, n: usize) -> WeightedNeighborGraph {
    synthesize_symmetric(&wheel(m), n, SynthMode::Free)
        .expect("wheel is 2-connected")
        .0
}

/// Deterministic non-consensus initial state of length `len`.
pub fn ramp(len: usize) -> Vector {
    Vector::from_fn(len, |k, _| ((k * 7) % 11) as f64 - 5.0)
}
