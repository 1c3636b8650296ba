use crate::numerics::{Matrix, Vector};
use crate::wellconfig::{
    disagreement_operator, lifted_incidence, stacked_c, WeightedNeighborGraph,
};

/// `max_i || x_i - mean ||_2` over the `n`-blocks of a stacked state.
pub fn consensus_error(x: &Vector, n: usize) -> f64 {
    let m = x.len() / n;
    if m == 0 {
        return 0.0;
    }
    let mut mean = Vector::zeros(n);
    for i in 0..m {
        mean += x.rows(i * n, n);
    }
    mean /= m as f64;
    (0..m)
        .map(|i| (x.rows(i * n, n) - &mean).norm())
        .fold(0.0, f64::max)
}

/// `|| C Jbar' x ||_2`, evaluated arc by arc.
pub fn local_agreement_residual(w: &WeightedNeighborGraph, x: &Vector) -> f64 {
    let n = w.n();
    w.graph()
        .arcs()
        .iter()
        .zip(w.weights())
        .map(|(a, c)| {
            let diff = x.rows(a.head * n, n) - x.rows(a.tail * n, n);
            (c * diff).norm_squared()
        })
        .sum::<f64>()
        .sqrt()
}

/// `|| C Jbar' x ||^2`, the function the gradient algorithm descends.
pub fn objective(w: &WeightedNeighborGraph, x: &Vector) -> f64 {
    (disagreement_operator(w) * x).norm_squared()
}

/// `2 Jbar C' C Jbar' x`.
pub fn objective_gradient(w: &WeightedNeighborGraph, x: &Vector) -> Vector {
    let jbar: Matrix = lifted_incidence(w.graph(), w.n());
    let c = stacked_c(w);
    (&jbar * c.transpose() * (&c * (jbar.transpose() * x))) * 2.0
}
