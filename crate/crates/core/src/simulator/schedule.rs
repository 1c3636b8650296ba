use crate::graph::{check_spanning, DirectedGraph};

use super::SimError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleMode {
    /// The first subgraph in every round.
    Fixed,
    /// Cycle through the subgraphs, holding each for `dwell` rounds.
    Periodic { dwell: usize },
    /// Subgraph indices in the given order, repeated indefinitely.
    Scripted(Vec<usize>),
}

/// Which spanning subgraph of the neighbor graph is active in each round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    mode: ScheduleMode,
    subgraphs: Vec<DirectedGraph>,
}

impl Schedule {
    /// Validates that every subgraph is a symmetric spanning subgraph of `g`
    /// and that the mode refers only to listed subgraphs.
    pub fn new(
        g: &DirectedGraph,
        mode: ScheduleMode,
        subgraphs: Vec<DirectedGraph>,
    ) -> Result<Self, SimError> {
        if subgraphs.is_empty() {
            return Err(SimError::Schedule("no subgraphs".into()));
        }
        for (k, sub) in subgraphs.iter().enumerate() {
            check_spanning(g, sub)?;
            if !sub.is_symmetric() {
                return Err(SimError::Schedule(format!("subgraph {k} is not symmetric")));
            }
        }
        match &mode {
            ScheduleMode::Periodic { dwell: 0 } => {
                return Err(SimError::Schedule("dwell must be positive".into()))
            }
            ScheduleMode::Scripted(script) => {
                if script.is_empty() {
                    return Err(SimError::Schedule("empty script".into()));
                }
                if let Some(&bad) = script.iter().find(|&&k| k >= subgraphs.len()) {
                    return Err(SimError::Schedule(format!(
                        "script index {bad} out of range"
                    )));
                }
            }
            _ => {}
        }
        Ok(Self { mode, subgraphs })
    }

    /// The whole graph every round.
    pub fn constant(g: &DirectedGraph) -> Result<Self, SimError> {
        Self::new(g, ScheduleMode::Fixed, vec![g.clone()])
    }

    pub fn subgraphs(&self) -> &[DirectedGraph] {
        &self.subgraphs
    }

    pub fn mode(&self) -> &ScheduleMode {
        &self.mode
    }

    pub fn index_at(&self, t: usize) -> usize {
        match &self.mode {
            ScheduleMode::Fixed => 0,
            ScheduleMode::Periodic { dwell } => (t / dwell) % self.subgraphs.len(),
            ScheduleMode::Scripted(script) => script[t % script.len()],
        }
    }

    pub fn at(&self, t: usize) -> &DirectedGraph {
        &self.subgraphs[self.index_at(t)]
    }

    /// Indices that recur forever under this schedule.
    pub fn recurring(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = match &self.mode {
            ScheduleMode::Fixed => vec![0],
            ScheduleMode::Periodic { .. } => (0..self.subgraphs.len()).collect(),
            ScheduleMode::Scripted(script) => script.clone(),
        };
        idx.sort_unstable();
        idx.dedup();
        idx
    }

    /// Every arc of `g` appears in some recurring subgraph.
    pub fn covers(&self, g: &DirectedGraph) -> bool {
        let recurring = self.recurring();
        g.arcs()
            .iter()
            .all(|&a| recurring.iter().any(|&k| self.subgraphs[k].has_arc(a)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepsizeSchedule {
    /// `a / (t + b)`: divergent sum, summable squares.
    Harmonic {
        a: f64,
        b: f64,
    },
    Constant(f64),
    /// Explicit values; the last one repeats once the script runs out.
    Scripted(Vec<f64>),
}

impl Default for StepsizeSchedule {
    fn default() -> Self {
        Self::Harmonic { a: 1.0, b: 2.0 }
    }
}

impl StepsizeSchedule {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: &str| Err(SimError::Stepsize(msg.into()));
        match self {
            Self::Harmonic { a, b }
                if !(*a > 0.0 && *b >= 1.0 && a.is_finite() && b.is_finite()) =>
            {
                bad("harmonic stepsize needs a > 0 and b >= 1")
            }
            Self::Constant(c) if !(*c > 0.0 && c.is_finite()) => {
                bad("constant stepsize must be positive")
            }
            Self::Scripted(v) if v.is_empty() || v.iter().any(|x| !(*x > 0.0 && x.is_finite())) => {
                bad("scripted stepsizes must be a non-empty list of positive values")
            }
            _ => Ok(()),
        }
    }

    pub fn at(&self, t: usize) -> f64 {
        match self {
            Self::Harmonic { a, b } => a / (t as f64 + b),
            Self::Constant(c) => *c,
            Self::Scripted(v) => v[t.min(v.len() - 1)],
        }
    }
}
