//! Ear decompositions of strongly connected digraphs, symmetric ear
//! decompositions of 2-connected symmetric digraphs, and the exact
//! min-over-decompositions max-ear-length `chi` by exhaustive search.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::graph::{Arc, DirectedGraph, GraphError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EarKind {
    Cycle,
    Path,
}

/// One ear, stored as the vertex walk it traverses. A cycle `[v0, .., vk]`
/// closes back to `v0`; a path runs from `v0` to `vk`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ear {
    pub kind: EarKind,
    pub walk: Vec<usize>,
}

impl Ear {
    pub fn cycle(walk: Vec<usize>) -> Self {
        Self {
            kind: EarKind::Cycle,
            walk,
        }
    }

    pub fn path(walk: Vec<usize>) -> Self {
        Self {
            kind: EarKind::Path,
            walk,
        }
    }

    /// Arcs along the walk, in traversal order.
    pub fn forward_arcs(&self) -> Vec<Arc> {
        let mut arcs: Vec<Arc> = self.walk.windows(2).map(|w| Arc::new(w[0], w[1])).collect();
        if self.kind == EarKind::Cycle {
            if let (Some(&last), Some(&first)) = (self.walk.last(), self.walk.first()) {
                arcs.push(Arc::new(last, first));
            }
        }
        arcs
    }

    /// Number of steps in the walk. For a directed ear this is its arc count;
    /// for a symmetric ear it is the number of two-length cycles it contains.
    pub fn len(&self) -> usize {
        match self.kind {
            EarKind::Cycle => self.walk.len(),
            EarKind::Path => self.walk.len().saturating_sub(1),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn end_vertices(&self) -> (usize, usize) {
        (self.walk[0], *self.walk.last().expect("non-empty walk"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EarDecomposition {
    pub ears: Vec<Ear>,
    /// Ears are symmetric cycles/paths: each step stands for both arcs of a
    /// two-length cycle.
    pub symmetric: bool,
}

impl EarDecomposition {
    /// All arcs belonging to ear `k`: the forward walk, followed by the
    /// reversed arcs when the decomposition is symmetric.
    pub fn ear_arcs(&self, k: usize) -> Vec<Arc> {
        let mut arcs = self.ears[k].forward_arcs();
        if self.symmetric {
            let back: Vec<Arc> = arcs.iter().map(|a| a.reversed()).collect();
            arcs.extend(back);
        }
        arcs
    }

    pub fn len(&self) -> usize {
        self.ears.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ears.is_empty()
    }

    /// Largest ear length `l(E)`: arcs per ear for directed decompositions,
    /// two-length cycles per ear for symmetric ones.
    pub fn max_ear_len(&self) -> usize {
        self.ears.iter().map(Ear::len).max().unwrap_or(0)
    }

    /// Largest number of arcs in any ear.
    pub fn max_ear_arc_count(&self) -> usize {
        (0..self.ears.len())
            .map(|k| self.ear_arcs(k).len())
            .max()
            .unwrap_or(0)
    }

    /// Structural validity against `g`: arc partition, first ear a cycle,
    /// every later cycle meets the earlier ears in exactly one vertex and
    /// every later path meets them exactly at its two end-vertices.
    pub fn validate(&self, g: &DirectedGraph) -> Result<(), GraphError> {
        let bad = |msg: String| Err(GraphError::InvalidDecomposition(msg));
        let m = g.vertex_count();
        if self.ears.is_empty() {
            return bad("no ears".into());
        }
        if self.ears[0].kind != EarKind::Cycle {
            return bad("first ear is not a cycle".into());
        }
        let mut used = vec![false; g.arc_count()];
        let mut covered = vec![false; m];
        for (k, ear) in self.ears.iter().enumerate() {
            if ear.walk.iter().any(|&v| v >= m) {
                return bad(format!("ear {k} references a vertex outside the graph"));
            }
            let mut distinct = ear.walk.clone();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() != ear.walk.len() {
                return bad(format!("ear {k} repeats a vertex"));
            }
            let min_len = match (ear.kind, self.symmetric) {
                (EarKind::Cycle, false) => 2,
                (EarKind::Cycle, true) => 3,
                (EarKind::Path, _) => 1,
            };
            if ear.len() < min_len {
                return bad(format!("ear {k} is too short to be a {:?}", ear.kind));
            }
            if k > 0 {
                match ear.kind {
                    EarKind::Cycle => {
                        let shared = ear.walk.iter().filter(|&&v| covered[v]).count();
                        if shared != 1 {
                            return bad(format!(
                                "cycle ear {k} shares {shared} vertices with earlier ears"
                            ));
                        }
                    }
                    EarKind::Path => {
                        let (s, t) = ear.end_vertices();
                        let interior = &ear.walk[1..ear.walk.len() - 1];
                        if !covered[s] || !covered[t] || interior.iter().any(|&v| covered[v]) {
                            return bad(format!(
                                "path ear {k} does not attach exactly at its end-vertices"
                            ));
                        }
                    }
                }
            }
            for a in self.ear_arcs(k) {
                let Some(idx) = g.arc_index(a) else {
                    return bad(format!("ear {k} uses arc {a} which is not in the graph"));
                };
                if used[idx] {
                    return bad(format!("arc {a} appears in more than one ear"));
                }
                used[idx] = true;
            }
            for &v in &ear.walk {
                covered[v] = true;
            }
        }
        if let Some(idx) = used.iter().position(|&u| !u) {
            return bad(format!("arc {} is not covered", g.arcs()[idx]));
        }
        Ok(())
    }
}

/// Deterministic ear decomposition: the shortest cycle through vertex 1,
/// then repeatedly the first unused arc (canonical order) leaving a covered
/// vertex, extended by a shortest path through uncovered vertices back to
/// the covered set.
pub fn ear_decomposition(g: &DirectedGraph) -> Result<EarDecomposition, GraphError> {
    let m = g.vertex_count();
    if m < 2 {
        return Err(GraphError::TooFewVertices);
    }
    if !g.is_strongly_connected() {
        return Err(GraphError::NotStronglyConnected);
    }
    let adj = g.out_adjacency();
    let mut used = vec![false; g.arc_count()];
    let mut covered = vec![false; m];
    let mut ears = Vec::new();

    let first = shortest_cycle_through(&adj, 0)
        .expect("strongly connected graph has a cycle through every vertex");
    ears.push(Ear::cycle(first));

    loop {
        let last = ears.last().expect("at least one ear");
        for a in last.forward_arcs() {
            used[g.arc_index(a).expect("ear arcs come from the graph")] = true;
        }
        for &v in &last.walk {
            covered[v] = true;
        }
        let Some(start) = g
            .arcs()
            .iter()
            .enumerate()
            .find(|&(k, a)| !used[k] && covered[a.tail])
            .map(|(_, &a)| a)
        else {
            break;
        };
        let (u, v) = (start.tail, start.head);
        if covered[v] {
            ears.push(Ear::path(vec![u, v]));
            continue;
        }
        // Arcs leaving uncovered vertices are never used yet.
        let tail = shortest_path_to_covered(&adj, v, &covered, |_, _| true)
            .expect("strongly connected graph returns to the covered set");
        let end = *tail.last().expect("non-empty");
        let mut walk = vec![u];
        walk.extend_from_slice(&tail[..tail.len() - 1]);
        if end == u {
            ears.push(Ear::cycle(walk));
        } else {
            walk.push(end);
            ears.push(Ear::path(walk));
        }
    }
    debug_assert_eq!(ears.len(), g.arc_count() + 1 - m);
    Ok(EarDecomposition {
        ears,
        symmetric: false,
    })
}

/// Shortest directed cycle through `root`, as a vertex walk starting there.
fn shortest_cycle_through(adj: &[Vec<usize>], root: usize) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::from([root]);
    parent[root] = root;
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if y == root {
                let mut walk = vec![x];
                let mut cur = x;
                while cur != root {
                    cur = parent[cur];
                    walk.push(cur);
                }
                walk.reverse();
                return Some(walk);
            }
            if parent[y] == usize::MAX {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    None
}

/// BFS from the uncovered vertex `start` through uncovered vertices until a
/// covered vertex is reached. Returns the walk `start, .., end` where `end`
/// is the first covered vertex found. `allow(x, y)` filters steps.
fn shortest_path_to_covered(
    adj: &[Vec<usize>],
    start: usize,
    covered: &[bool],
    allow: impl Fn(usize, usize) -> bool,
) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; adj.len()];
    parent[start] = start;
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !allow(x, y) {
                continue;
            }
            if covered[y] {
                let mut walk = vec![y, x];
                let mut cur = x;
                while cur != start {
                    cur = parent[cur];
                    walk.push(cur);
                }
                walk.reverse();
                return Some(walk);
            }
            if parent[y] == usize::MAX {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    None
}

/// Symmetric ear decomposition of a symmetric 2-connected graph. Each ear is
/// an undirected cycle (at least three vertices) or path; both arcs of every
/// traversed pair belong to the ear.
pub fn symmetric_ear_decomposition(g: &DirectedGraph) -> Result<EarDecomposition, GraphError> {
    if !g.is_2_connected()? {
        return Err(GraphError::NotTwoConnected);
    }
    let m = g.vertex_count();
    let edges = g.undirected_edges();
    let mut adj = vec![Vec::new(); m];
    for &(a, b) in &edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut used: HashMap<(usize, usize), bool> = edges.iter().map(|&e| (e, false)).collect();
    let mut covered = vec![false; m];
    let mut ears = Vec::new();

    // First ear: edge {1, v} closed by a shortest path avoiding that edge.
    let v0 = adj[0][0];
    let mut none_covered = vec![false; m];
    none_covered[0] = true;
    let back = shortest_path_to_covered(&adj, v0, &none_covered, |x, y| key(x, y) != key(0, v0))
        .ok_or(GraphError::NotTwoConnected)?;
    let mut walk = vec![0];
    walk.extend_from_slice(&back[..back.len() - 1]);
    ears.push(Ear::cycle(walk));

    loop {
        let last = ears.last().expect("at least one ear");
        for a in last.forward_arcs() {
            used.insert(key(a.tail, a.head), true);
        }
        for &v in &last.walk {
            covered[v] = true;
        }
        let Some(&(a, b)) = edges
            .iter()
            .find(|&&(a, b)| !used[&(a, b)] && (covered[a] || covered[b]))
        else {
            break;
        };
        let (u, v) = if covered[a] { (a, b) } else { (b, a) };
        if covered[v] {
            ears.push(Ear::path(vec![u, v]));
            continue;
        }
        let tail = shortest_path_to_covered(&adj, v, &covered, |x, y| {
            key(x, y) != key(u, v) && !used[&key(x, y)]
        })
        .ok_or(GraphError::NotTwoConnected)?;
        let end = *tail.last().expect("non-empty");
        let mut walk = vec![u];
        walk.extend_from_slice(&tail[..tail.len() - 1]);
        if end == u {
            ears.push(Ear::cycle(walk));
        } else {
            walk.push(end);
            ears.push(Ear::path(walk));
        }
    }
    Ok(EarDecomposition {
        ears,
        symmetric: true,
    })
}

/// Limits for the exhaustive [`chi`] search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationCap {
    pub max_vertices: usize,
    pub max_arcs: usize,
}

impl Default for EnumerationCap {
    fn default() -> Self {
        Self {
            max_vertices: 8,
            max_arcs: 16,
        }
    }
}

/// `chi(g)`: the minimum over all ear decompositions of the largest ear
/// length (in arcs), by memoized exhaustive search over used-arc sets.
pub fn chi(g: &DirectedGraph, cap: EnumerationCap) -> Result<usize, GraphError> {
    let m = g.vertex_count();
    let e = g.arc_count();
    if m > cap.max_vertices || e > cap.max_arcs || e > 63 {
        return Err(GraphError::EnumerationInfeasible {
            m,
            arcs: e,
            max_vertices: cap.max_vertices,
            max_arcs: cap.max_arcs,
        });
    }
    if m < 2 {
        return Err(GraphError::TooFewVertices);
    }
    if !g.is_strongly_connected() {
        return Err(GraphError::NotStronglyConnected);
    }
    let mut search = ChiSearch {
        out: (0..m)
            .map(|v| {
                g.arcs()
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a.tail == v)
                    .map(|(k, a)| (k, a.head))
                    .collect()
            })
            .collect(),
        arcs: g.arcs().to_vec(),
        full: (1u64 << e) - 1,
        memo: HashMap::new(),
    };
    Ok(search.best(0))
}

struct ChiSearch {
    /// Outgoing `(arc index, head)` per vertex.
    out: Vec<Vec<(usize, usize)>>,
    arcs: Vec<Arc>,
    full: u64,
    memo: HashMap<u64, usize>,
}

impl ChiSearch {
    fn covered(&self, mask: u64) -> Vec<bool> {
        let mut covered = vec![false; self.out.len()];
        for (k, a) in self.arcs.iter().enumerate() {
            if mask & (1 << k) != 0 {
                covered[a.tail] = true;
                covered[a.head] = true;
            }
        }
        covered
    }

    /// Minimal achievable max ear length for the arcs not in `mask`.
    fn best(&mut self, mask: u64) -> usize {
        if mask == self.full {
            return 0;
        }
        if let Some(&v) = self.memo.get(&mask) {
            return v;
        }
        let ears = self.candidate_ears(mask);
        let floor = if mask == 0 { 2 } else { 1 };
        let mut best = usize::MAX;
        for (ear_mask, len) in ears {
            if len >= best {
                continue;
            }
            let rest = self.best(mask | ear_mask);
            best = best.min(len.max(rest));
            if best == floor {
                break;
            }
        }
        self.memo.insert(mask, best);
        best
    }

    /// Every ear that may come next, as `(arc mask, length)`.
    fn candidate_ears(&self, mask: u64) -> Vec<(u64, usize)> {
        let mut found = Vec::new();
        if mask == 0 {
            // Simple cycles, each listed once from its smallest vertex.
            for s in 0..self.out.len() {
                let mut on_path = vec![false; self.out.len()];
                on_path[s] = true;
                self.extend(
                    s,
                    0,
                    0,
                    0,
                    &mut on_path,
                    &|v| v == s,
                    &|v| v > s,
                    &mut found,
                );
            }
            return found;
        }
        let covered = self.covered(mask);
        for s in (0..self.out.len()).filter(|&v| covered[v]) {
            let mut on_path = vec![false; self.out.len()];
            on_path[s] = true;
            self.extend(
                s,
                mask,
                0,
                0,
                &mut on_path,
                &|v| covered[v],
                &|_| true,
                &mut found,
            );
        }
        found
    }

    /// Depth-first walk along arcs outside `used`, recording every ear that
    /// reaches a vertex accepted by `closes`.
    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        at: usize,
        used: u64,
        ear_mask: u64,
        len: usize,
        on_path: &mut [bool],
        closes: &dyn Fn(usize) -> bool,
        may_visit: &dyn Fn(usize) -> bool,
        found: &mut Vec<(u64, usize)>,
    ) {
        for &(k, y) in &self.out[at] {
            if used & (1 << k) != 0 {
                continue;
            }
            let next_mask = ear_mask | (1 << k);
            if closes(y) {
                found.push((next_mask, len + 1));
            } else if !on_path[y] && may_visit(y) {
                on_path[y] = true;
                self.extend(
                    y,
                    used,
                    next_mask,
                    len + 1,
                    on_path,
                    closes,
                    may_visit,
                    found,
                );
                on_path[y] = false;
            }
        }
    }
}
