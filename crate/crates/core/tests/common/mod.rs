#![allow(dead_code)]

use matcons_core::numerics::{Matrix, Vector};
use matcons_core::wellconfig::axis_complement;
use matcons_core::{Arc, DirectedGraph, WeightedNeighborGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rank by Gaussian elimination with partial pivoting.
pub fn ge_rank(a: &Matrix, tol: f64) -> usize {
    let mut rows: Vec<Vec<f64>> = a.row_iter().map(|r| r.iter().copied().collect()).collect();
    let ncols = a.ncols();
    let scale = rows
        .iter()
        .flatten()
        .fold(0.0f64, |s, v| s.max(v.abs()))
        .max(1.0);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) =
            (rank..rows.len()).max_by(|&x, &y| rows[x][col].abs().total_cmp(&rows[y][col].abs()))
        else {
            break;
        };
        if rows[p][col].abs() <= tol * scale {
            continue;
        }
        rows.swap(rank, p);
        let (top, below) = rows.split_at_mut(rank + 1);
        let pivot = &top[rank];
        for row in below {
            let f = row[col] / pivot[col];
            for (x, p) in row[col..ncols].iter_mut().zip(&pivot[col..ncols]) {
                *x -= f * p;
            }
        }
        rank += 1;
    }
    rank
}

/// Incidence matrix written out entry by entry.
pub fn naive_incidence(g: &DirectedGraph) -> Matrix {
    let mut j = Matrix::zeros(g.vertex_count(), g.arc_count());
    for (k, a) in g.arcs().iter().enumerate() {
        j[(a.head, k)] = 1.0;
        j[(a.tail, k)] = -1.0;
    }
    j
}

/// `C Jbar'` assembled block by block: the row block of arc `(j, i)` holds
/// `C_ji` in column block `i` and `-C_ji` in column block `j`.
pub fn naive_disagreement(w: &WeightedNeighborGraph) -> Matrix {
    let n = w.n();
    let rows: usize = w.weights().iter().map(|c| c.nrows()).sum();
    let mut out = Matrix::zeros(rows, w.graph().vertex_count() * n);
    let mut r0 = 0;
    for (a, c) in w.graph().arcs().iter().zip(w.weights()) {
        for r in 0..c.nrows() {
            for k in 0..n {
                out[(r0 + r, a.head * n + k)] += c[(r, k)];
                out[(r0 + r, a.tail * n + k)] -= c[(r, k)];
            }
        }
        r0 += c.nrows();
    }
    out
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

/// A weight matrix drawn from a mix of shapes: identity, a coordinate
/// kernel, a random full-row-rank block, or no rows at all.
pub fn random_weight(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    match rng.gen_range(0..4) {
        0 => Matrix::identity(n, n),
        1 => axis_complement(n, rng.gen_range(0..n)),
        2 => {
            let rows = rng.gen_range(1..=n);
            random_matrix(rng, rows, n)
        }
        _ if n > 1 => {
            // Shared kernel directions make dependent families likely.
            let rows = rng.gen_range(1..n);
            Matrix::identity(n, n).rows(0, rows).into_owned()
        }
        _ => Matrix::zeros(0, n),
    }
}

/// Random spanning tree with random orientations plus extra random arcs.
pub fn random_weakly_connected(rng: &mut ChaCha8Rng, m: usize, extra: usize) -> DirectedGraph {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let mut arcs = Vec::new();
    for k in 1..m {
        let parent = order[rng.gen_range(0..k)];
        let child = order[k];
        arcs.push(if rng.gen_bool(0.5) {
            Arc::new(parent, child)
        } else {
            Arc::new(child, parent)
        });
    }
    add_extra(rng, m, &mut arcs, extra);
    DirectedGraph::new(m, arcs).unwrap()
}

/// Random Hamiltonian cycle plus extra random arcs.
pub fn random_strongly_connected(rng: &mut ChaCha8Rng, m: usize, extra: usize) -> DirectedGraph {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let mut arcs: Vec<Arc> = (0..m)
        .map(|k| Arc::new(order[k], order[(k + 1) % m]))
        .collect();
    add_extra(rng, m, &mut arcs, extra);
    DirectedGraph::new(m, arcs).unwrap()
}

/// Random undirected Hamiltonian cycle plus chords, as a symmetric digraph.
/// 2-connected for `m >= 3`.
pub fn random_two_connected_symmetric(
    rng: &mut ChaCha8Rng,
    m: usize,
    chords: usize,
) -> DirectedGraph {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = (0..m).map(|k| (order[k], order[(k + 1) % m])).collect();
    for _ in 0..chords {
        let (a, b) = (rng.gen_range(0..m), rng.gen_range(0..m));
        if a != b
            && !edges
                .iter()
                .any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
        {
            edges.push((a, b));
        }
    }
    DirectedGraph::symmetric_from_edges(m, &edges).unwrap()
}

fn add_extra(rng: &mut ChaCha8Rng, m: usize, arcs: &mut Vec<Arc>, extra: usize) {
    for _ in 0..extra {
        let a = Arc::new(rng.gen_range(0..m), rng.gen_range(0..m));
        if a.tail != a.head && !arcs.contains(&a) {
            arcs.push(a);
        }
    }
}

pub fn random_weights(rng: &mut ChaCha8Rng, g: &DirectedGraph, n: usize) -> WeightedNeighborGraph {
    let weights = (0..g.arc_count()).map(|_| random_weight(rng, n)).collect();
    WeightedNeighborGraph::new(g.clone(), n, weights).unwrap()
}

pub fn random_state(rng: &mut ChaCha8Rng, len: usize) -> Vector {
    Vector::from_fn(len, |_, _| rng.gen_range(-1.0..1.0))
}
