//! Directed neighbor graphs with a fixed canonical arc ordering.
//!
//! Vertices are `0..m` internally; file formats use 1-based labels. An arc
//! `(tail, head)` means `head` receives from `tail`. Arcs are kept sorted
//! agent-major: by head ascending, then by tail ascending. Every matrix built
//! from a graph indexes arcs in this order.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::numerics::Matrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    NoVertices,
    #[error("self-arc at vertex {0}")]
    SelfArc(usize),
    #[error("duplicate arc {0}")]
    DuplicateArc(Arc),
    #[error("arc {arc} references a vertex outside 1..={m}")]
    VertexOutOfRange { arc: Arc, m: usize },
    #[error("graph is not symmetric")]
    NotSymmetric,
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("symmetric graph is not 2-connected")]
    NotTwoConnected,
    #[error("ear decomposition needs at least two vertices")]
    TooFewVertices,
    #[error("not a spanning subgraph: {0}")]
    NotSpanningSubgraph(String),
    #[error("invalid ear decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("exhaustive enumeration infeasible: {m} vertices / {arcs} arcs exceeds cap of {max_vertices} / {max_arcs}")]
    EnumerationInfeasible {
        m: usize,
        arcs: usize,
        max_vertices: usize,
        max_arcs: usize,
    },
}

/// A directed arc from `tail` to `head` (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
}

impl Arc {
    pub const fn new(tail: usize, head: usize) -> Self {
        Self { tail, head }
    }

    pub const fn reversed(self) -> Self {
        Self {
            tail: self.head,
            head: self.tail,
        }
    }

    fn canonical_key(self) -> (usize, usize) {
        (self.head, self.tail)
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.tail + 1, self.head + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    m: usize,
    arcs: Vec<Arc>,
}

impl DirectedGraph {
    /// Builds a graph, rejecting self-arcs, duplicates and out-of-range
    /// vertices. Input order does not matter.
    pub fn new(m: usize, arcs: impl IntoIterator<Item = Arc>) -> Result<Self, GraphError> {
        if m == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut arcs: Vec<Arc> = arcs.into_iter().collect();
        for &a in &arcs {
            if a.tail >= m || a.head >= m {
                return Err(GraphError::VertexOutOfRange { arc: a, m });
            }
            if a.tail == a.head {
                return Err(GraphError::SelfArc(a.tail + 1));
            }
        }
        arcs.sort_by_key(|a| a.canonical_key());
        if let Some(w) = arcs.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateArc(w[0]));
        }
        Ok(Self { m, arcs })
    }

    /// Convenience constructor from 0-based `(tail, head)` pairs.
    pub fn from_pairs(m: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        Self::new(m, pairs.iter().map(|&(t, h)| Arc::new(t, h)))
    }

    /// Symmetric graph with both arcs for every undirected edge.
    pub fn symmetric_from_edges(m: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        Self::new(
            m,
            edges
                .iter()
                .flat_map(|&(a, b)| [Arc::new(a, b), Arc::new(b, a)]),
        )
    }

    /// Directed cycle `0 -> 1 -> ... -> m-1 -> 0`.
    pub fn cycle(m: usize) -> Result<Self, GraphError> {
        Self::new(m, (0..m).map(|k| Arc::new(k, (k + 1) % m)))
    }

    /// Directed path `0 -> 1 -> ... -> m-1`.
    pub fn path(m: usize) -> Result<Self, GraphError> {
        Self::new(m, (1..m).map(|k| Arc::new(k - 1, k)))
    }

    pub fn complete_symmetric(m: usize) -> Result<Self, GraphError> {
        Self::new(
            m,
            (0..m).flat_map(|t| (0..m).filter(move |&h| h != t).map(move |h| Arc::new(t, h))),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.m
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Arcs in canonical order.
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc_index(&self, arc: Arc) -> Option<usize> {
        self.arcs
            .binary_search_by_key(&arc.canonical_key(), |a| a.canonical_key())
            .ok()
    }

    pub fn has_arc(&self, arc: Arc) -> bool {
        self.arc_index(arc).is_some()
    }

    /// Canonical index range of the arcs entering `head`.
    pub fn in_arc_range(&self, head: usize) -> std::ops::Range<usize> {
        let lo = self.arcs.partition_point(|a| a.head < head);
        let hi = self.arcs.partition_point(|a| a.head <= head);
        lo..hi
    }

    /// The neighbor set of `head`: tails of its incoming arcs, ascending.
    pub fn in_neighbors(&self, head: usize) -> impl Iterator<Item = usize> + '_ {
        self.arcs[self.in_arc_range(head)].iter().map(|a| a.tail)
    }

    /// Number of neighbors of `v` (its in-degree).
    pub fn degree(&self, v: usize) -> usize {
        self.in_arc_range(v).len()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.arcs.iter().filter(|a| a.tail == v).count()
    }

    /// Out-adjacency lists with heads ascending.
    pub fn out_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.m];
        for a in &self.arcs {
            adj[a.tail].push(a.head);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    fn in_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.m];
        for a in &self.arcs {
            adj[a.head].push(a.tail);
        }
        adj
    }

    /// Graph restricted to the arcs accepted by `keep`, same vertex set.
    pub fn filter_arcs(&self, mut keep: impl FnMut(Arc) -> bool) -> Self {
        Self {
            m: self.m,
            arcs: self.arcs.iter().copied().filter(|&a| keep(a)).collect(),
        }
    }

    pub fn is_spanning_subgraph_of(&self, g: &DirectedGraph) -> bool {
        self.m == g.m && self.arcs.iter().all(|&a| g.has_arc(a))
    }

    pub fn is_weakly_connected(&self) -> bool {
        let mut undirected = vec![Vec::new(); self.m];
        for a in &self.arcs {
            undirected[a.tail].push(a.head);
            undirected[a.head].push(a.tail);
        }
        reach(&undirected, 0).iter().all(|&r| r)
    }

    pub fn is_strongly_connected(&self) -> bool {
        reach(&self.out_adjacency(), 0).iter().all(|&r| r)
            && reach(&self.in_adjacency(), 0).iter().all(|&r| r)
    }

    /// Some vertex reaches every other along directed paths.
    pub fn is_rooted(&self) -> bool {
        let adj = self.out_adjacency();
        (0..self.m).any(|root| reach(&adj, root).iter().all(|&r| r))
    }

    pub fn is_symmetric(&self) -> bool {
        self.arcs.iter().all(|a| self.has_arc(a.reversed()))
    }

    /// Directed cycle through all vertices: every vertex has exactly one
    /// incoming and one outgoing arc and the graph is strongly connected.
    pub fn is_directed_cycle(&self) -> bool {
        self.m >= 2
            && self.arcs.len() == self.m
            && (0..self.m).all(|v| self.degree(v) == 1 && self.out_degree(v) == 1)
            && self.is_strongly_connected()
    }

    /// Symmetric graph that stays strongly connected after removing any one
    /// two-length cycle.
    pub fn is_2_connected(&self) -> Result<bool, GraphError> {
        if !self.is_symmetric() {
            return Err(GraphError::NotSymmetric);
        }
        if self.m < 2 || !self.is_strongly_connected() {
            return Ok(false);
        }
        Ok(self.undirected_edges().into_iter().all(|(a, b)| {
            self.filter_arcs(|arc| !(arc == Arc::new(a, b) || arc == Arc::new(b, a)))
                .is_strongly_connected()
        }))
    }

    /// Vertex pairs `(a, b)`, `a < b`, joined by at least one arc, sorted.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .arcs
            .iter()
            .map(|a| (a.tail.min(a.head), a.tail.max(a.head)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }
}

fn reach(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// `m x d` incidence matrix: column `k` has `+1` at the head and `-1` at the
/// tail of the `k`-th canonical arc.
pub fn incidence_matrix(g: &DirectedGraph) -> Matrix {
    incidence_matrix_ordered(g, &(0..g.arc_count()).collect::<Vec<_>>())
}

/// Incidence matrix under an arbitrary arc ordering: column `k` describes
/// arc `order[k]` (a canonical index).
pub fn incidence_matrix_ordered(g: &DirectedGraph, order: &[usize]) -> Matrix {
    let mut j = Matrix::zeros(g.vertex_count(), order.len());
    for (k, &idx) in order.iter().enumerate() {
        let a = g.arcs()[idx];
        j[(a.head, k)] = 1.0;
        j[(a.tail, k)] = -1.0;
    }
    j
}

/// Incidence matrix of a spanning subgraph indexed by `g`'s arc ordering:
/// columns of arcs absent from `sub` are zero.
pub fn spanning_incidence_matrix(
    g: &DirectedGraph,
    sub: &DirectedGraph,
) -> Result<Matrix, GraphError> {
    check_spanning(g, sub)?;
    let mut j = incidence_matrix(g);
    for (k, &a) in g.arcs().iter().enumerate() {
        if !sub.has_arc(a) {
            j.column_mut(k).fill(0.0);
        }
    }
    Ok(j)
}

pub(crate) fn check_spanning(g: &DirectedGraph, sub: &DirectedGraph) -> Result<(), GraphError> {
    if sub.vertex_count() != g.vertex_count() {
        return Err(GraphError::NotSpanningSubgraph(format!(
            "{} vertices, expected {}",
            sub.vertex_count(),
            g.vertex_count()
        )));
    }
    if let Some(a) = sub.arcs().iter().find(|&&a| !g.has_arc(a)) {
        return Err(GraphError::NotSpanningSubgraph(format!(
            "arc {a} is not in the graph"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{numerical_rank, DEFAULT_RANK_TOL};

    fn g(m: usize, pairs: &[(usize, usize)]) -> DirectedGraph {
        // 1-based pairs, as written in the examples
        DirectedGraph::from_pairs(
            m,
            &pairs
                .iter()
                .map(|&(j, i)| (j - 1, i - 1))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn canonical_order_is_agent_major() {
        let graph = g(3, &[(3, 2), (1, 2), (2, 1), (3, 1)]);
        let order: Vec<(usize, usize)> = graph
            .arcs()
            .iter()
            .map(|a| (a.tail + 1, a.head + 1))
            .collect();
        assert_eq!(order, vec![(2, 1), (3, 1), (1, 2), (3, 2)]);
        assert_eq!(graph.degree(0), 2);
        assert_eq!(graph.degree(2), 0);
        assert_eq!(
            (0..3).map(|v| graph.degree(v)).sum::<usize>(),
            graph.arc_count()
        );
        assert_eq!(graph.in_neighbors(1).collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            DirectedGraph::from_pairs(2, &[(0, 0)]),
            Err(GraphError::SelfArc(1))
        );
        assert!(matches!(
            DirectedGraph::from_pairs(2, &[(0, 1), (0, 1)]),
            Err(GraphError::DuplicateArc(_))
        ));
        assert!(matches!(
            DirectedGraph::from_pairs(2, &[(0, 2)]),
            Err(GraphError::VertexOutOfRange { .. })
        ));
        assert_eq!(
            DirectedGraph::from_pairs(0, &[]),
            Err(GraphError::NoVertices)
        );
    }

    #[test]
    fn weak_connectivity() {
        assert!(g(3, &[(1, 2), (2, 3)]).is_weakly_connected());
        assert!(!g(2, &[]).is_weakly_connected());
        assert!(g(3, &[(1, 2), (2, 1), (3, 1), (3, 2)]).is_weakly_connected());
    }

    #[test]
    fn strong_connectivity() {
        assert!(g(3, &[(1, 2), (2, 3), (3, 1)]).is_strongly_connected());
        assert!(!g(3, &[(1, 2), (2, 3)]).is_strongly_connected());
        assert!(g(3, &[(1, 2), (2, 3), (3, 1), (2, 1)]).is_strongly_connected());
    }

    #[test]
    fn rootedness() {
        assert!(g(3, &[(1, 2), (2, 3)]).is_rooted());
        assert!(!g(3, &[(1, 3), (2, 3)]).is_rooted());
        assert!(g(3, &[(1, 2), (2, 1), (3, 1), (3, 2)]).is_rooted());
    }

    #[test]
    fn symmetry() {
        assert!(g(2, &[(1, 2), (2, 1)]).is_symmetric());
        assert!(!g(3, &[(1, 2), (2, 3), (3, 1)]).is_symmetric());
        let k4 = DirectedGraph::complete_symmetric(4).unwrap();
        assert!(k4.is_symmetric());
        assert_eq!(k4.arc_count() % 2, 0);
    }

    #[test]
    fn two_connectivity() {
        let tri = DirectedGraph::complete_symmetric(3).unwrap();
        assert_eq!(tri.is_2_connected(), Ok(true));
        let path = DirectedGraph::symmetric_from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.is_2_connected(), Ok(false));
        let square =
            DirectedGraph::symmetric_from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(square.is_2_connected(), Ok(true));
        assert_eq!(
            DirectedGraph::cycle(3).unwrap().is_2_connected(),
            Err(GraphError::NotSymmetric)
        );
    }

    #[test]
    fn directed_cycle_detection() {
        assert!(DirectedGraph::cycle(4).unwrap().is_directed_cycle());
        assert!(!DirectedGraph::path(4).unwrap().is_directed_cycle());
        assert!(!DirectedGraph::complete_symmetric(3)
            .unwrap()
            .is_directed_cycle());
        assert!(DirectedGraph::complete_symmetric(2)
            .unwrap()
            .is_directed_cycle());
    }

    #[test]
    fn incidence_single_arc() {
        let j = incidence_matrix(&g(2, &[(1, 2)]));
        assert_eq!(j, Matrix::from_column_slice(2, 1, &[-1.0, 1.0]));
    }

    #[test]
    fn incidence_columns_sum_to_zero_and_rank() {
        let graph = g(4, &[(1, 2), (2, 3), (3, 1), (2, 1), (4, 3)]);
        let j = incidence_matrix(&graph);
        for c in 0..j.ncols() {
            assert_eq!(j.column(c).sum(), 0.0);
        }
        assert_eq!(numerical_rank(&j, DEFAULT_RANK_TOL), 3);
    }

    #[test]
    fn spanning_incidence() {
        let graph = DirectedGraph::complete_symmetric(3).unwrap();
        assert_eq!(
            spanning_incidence_matrix(&graph, &graph).unwrap(),
            incidence_matrix(&graph)
        );
        let empty = graph.filter_arcs(|_| false);
        let j = spanning_incidence_matrix(&graph, &empty).unwrap();
        assert_eq!(j.shape(), (3, 6));
        assert_eq!(j.amax(), 0.0);
        let half = graph.filter_arcs(|a| a.tail == 0 || a.head == 0);
        let j = spanning_incidence_matrix(&graph, &half).unwrap();
        assert_eq!(j.shape(), (3, 6));
        let full = incidence_matrix(&graph);
        for (k, &a) in graph.arcs().iter().enumerate() {
            if half.has_arc(a) {
                assert_eq!(j.column(k), full.column(k));
            } else {
                assert_eq!(j.column(k).amax(), 0.0);
            }
        }
        let foreign = g(3, &[(1, 2), (2, 3), (3, 1)]);
        let path = g(3, &[(1, 2)]);
        assert!(spanning_incidence_matrix(&path, &foreign).is_err());
    }
}
