//! File formats: the plain-text arc list, weighted neighbor graph JSON and
//! ear decomposition JSON. All vertex labels in files are 1-based.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ear::{Ear, EarDecomposition, EarKind};
use crate::graph::{Arc, DirectedGraph, GraphError};
use crate::numerics::Matrix;
use crate::wellconfig::{ConfigError, WeightedNeighborGraph};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Invalid(String),
}

/// Parsed arc-list file: header `m n`, then one `j i` arc per line.
/// Blank lines and `#` comments are skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphText {
    pub graph: DirectedGraph,
    /// State dimension declared in the header.
    pub n: usize,
}

fn parse_pair(line: usize, text: &str, what: &str) -> Result<(usize, usize), IoError> {
    let err = |msg: String| IoError::Parse { line, msg };
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(err(format!(
            "expected two integers for {what}, found {:?}",
            text.trim()
        )));
    }
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| err(format!("{what}: {s:?} is not a non-negative integer")))
    };
    Ok((num(fields[0])?, num(fields[1])?))
}

pub fn parse_graph_text(text: &str) -> Result<GraphText, IoError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("")))
        .filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or(IoError::Parse {
        line: 1,
        msg: "missing header \"m n\"".into(),
    })?;
    let (m, n) = parse_pair(hline, header, "header \"m n\"")?;
    if m == 0 || n == 0 {
        return Err(IoError::Parse {
            line: hline,
            msg: "m and n must be positive".into(),
        });
    }
    let mut arcs = Vec::new();
    for (line, body) in lines {
        let (j, i) = parse_pair(line, body, "arc \"j i\"")?;
        if j == 0 || i == 0 || j > m || i > m {
            return Err(IoError::Parse {
                line,
                msg: format!("vertex out of range 1..={m}"),
            });
        }
        let arc = Arc::new(j - 1, i - 1);
        if j == i {
            return Err(IoError::Parse {
                line,
                msg: format!("self-arc at vertex {j}"),
            });
        }
        if arcs.contains(&arc) {
            return Err(IoError::Parse {
                line,
                msg: format!("duplicate arc {arc}"),
            });
        }
        arcs.push(arc);
    }
    Ok(GraphText {
        graph: DirectedGraph::new(m, arcs)?,
        n,
    })
}

pub fn format_graph_text(g: &DirectedGraph, n: usize) -> String {
    let mut out = format!("{} {}\n", g.vertex_count(), n);
    for a in g.arcs() {
        out.push_str(&format!("{} {}\n", a.tail + 1, a.head + 1));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcWeightRecord {
    /// Tail (sender), 1-based.
    pub j: usize,
    /// Head (receiver), 1-based.
    pub i: usize,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedGraphRecord {
    pub m: usize,
    pub n: usize,
    pub arcs: Vec<ArcWeightRecord>,
}

/// Dense row-major rows into a matrix with `n` columns; an empty list is a
/// `0 x n` matrix.
pub fn matrix_from_rows(rows: &[Vec<f64>], n: usize) -> Result<Matrix, IoError> {
    if let Some((k, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(IoError::Invalid(format!(
            "row {} has {} entries, expected {n}",
            k + 1,
            r.len()
        )));
    }
    Ok(Matrix::from_fn(rows.len(), n, |r, c| rows[r][c]))
}

pub fn matrix_to_rows(a: &Matrix) -> Vec<Vec<f64>> {
    a.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl From<&WeightedNeighborGraph> for WeightedGraphRecord {
    fn from(w: &WeightedNeighborGraph) -> Self {
        Self {
            m: w.graph().vertex_count(),
            n: w.n(),
            arcs: w
                .graph()
                .arcs()
                .iter()
                .zip(w.weights())
                .map(|(a, c)| ArcWeightRecord {
                    j: a.tail + 1,
                    i: a.head + 1,
                    c: matrix_to_rows(c),
                })
                .collect(),
        }
    }
}

impl WeightedGraphRecord {
    pub fn into_weighted(self) -> Result<WeightedNeighborGraph, IoError> {
        let mut pairs = Vec::with_capacity(self.arcs.len());
        for (k, rec) in self.arcs.iter().enumerate() {
            if rec.j == 0 || rec.i == 0 || rec.j > self.m || rec.i > self.m {
                return Err(IoError::Invalid(format!(
                    "arc {}: vertex out of range 1..={}",
                    k + 1,
                    self.m
                )));
            }
            let c = matrix_from_rows(&rec.c, self.n)
                .map_err(|e| IoError::Invalid(format!("arc ({}, {}): {e}", rec.j, rec.i)))?;
            pairs.push((Arc::new(rec.j - 1, rec.i - 1), c));
        }
        let graph = DirectedGraph::new(self.m, pairs.iter().map(|(a, _)| *a))?;
        Ok(WeightedNeighborGraph::from_arc_weights(
            graph, self.n, pairs,
        )?)
    }
}

pub fn weights_to_json(w: &WeightedNeighborGraph) -> String {
    serde_json::to_string_pretty(&WeightedGraphRecord::from(w)).expect("plain data serializes")
}

pub fn weights_from_json(text: &str) -> Result<WeightedNeighborGraph, IoError> {
    serde_json::from_str::<WeightedGraphRecord>(text)?.into_weighted()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EarRecord {
    pub kind: EarKind,
    /// Forward arcs `[j, i]`, 1-based, in traversal order. For symmetric
    /// decompositions the reverse arcs are implied.
    pub arcs: Vec<[usize; 2]>,
}

pub fn decomposition_to_records(d: &EarDecomposition) -> Vec<EarRecord> {
    d.ears
        .iter()
        .map(|e| EarRecord {
            kind: e.kind,
            arcs: e
                .forward_arcs()
                .iter()
                .map(|a| [a.tail + 1, a.head + 1])
                .collect(),
        })
        .collect()
}

/// Rebuilds the walks from consecutive arcs. Structural validity against a
/// graph is left to [`EarDecomposition::validate`].
pub fn decomposition_from_records(
    records: &[EarRecord],
    symmetric: bool,
) -> Result<EarDecomposition, IoError> {
    let mut ears = Vec::with_capacity(records.len());
    for (k, rec) in records.iter().enumerate() {
        let bad = |msg: &str| IoError::Invalid(format!("ear {}: {msg}", k + 1));
        if rec.arcs.is_empty() {
            return Err(bad("no arcs"));
        }
        if rec.arcs.iter().flatten().any(|&v| v == 0) {
            return Err(bad("vertex labels are 1-based"));
        }
        let mut walk = vec![rec.arcs[0][0] - 1];
        for (s, pair) in rec.arcs.iter().enumerate() {
            if pair[0] - 1 != *walk.last().expect("non-empty") {
                return Err(bad(&format!("arc {} does not continue the walk", s + 1)));
            }
            walk.push(pair[1] - 1);
        }
        match rec.kind {
            EarKind::Cycle => {
                if walk.last() != walk.first() {
                    return Err(bad("cycle does not close"));
                }
                walk.pop();
                ears.push(Ear::cycle(walk));
            }
            EarKind::Path => ears.push(Ear::path(walk)),
        }
    }
    Ok(EarDecomposition { ears, symmetric })
}

pub fn decomposition_to_json(d: &EarDecomposition) -> String {
    serde_json::to_string_pretty(&decomposition_to_records(d)).expect("plain data serializes")
}

pub fn decomposition_from_json(text: &str, symmetric: bool) -> Result<EarDecomposition, IoError> {
    let records: Vec<EarRecord> = serde_json::from_str(text)?;
    decomposition_from_records(&records, symmetric)
}
