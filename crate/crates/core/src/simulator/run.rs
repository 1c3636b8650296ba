//! Per-agent execution of the round rules.
//!
//! Each agent `i` holds a gain matrix `G_ij` per in-neighbor and updates
//! `x_i <- x_i - sum_j G_ij (x_i - x_j)` from the previous round's snapshot.

use crate::graph::{Arc, DirectedGraph};
use crate::numerics::{projection_matrix, Matrix, Vector, DEFAULT_RANK_TOL};
use crate::wellconfig::WeightedNeighborGraph;

use super::metrics::{consensus_error, local_agreement_residual};
use super::schedule::{Schedule, StepsizeSchedule};
use super::update::{check_graph, Algorithm};
use super::weights::metropolis_weights;
use super::SimError;

/// Consensus error below which a state counts as agreed.
pub const CONSENSUS_THRESHOLD: f64 = 1e-9;
/// Consecutive agreed states needed before a run is declared converged.
pub const CONSENSUS_STREAK: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub steps: usize,
    /// Stop as soon as convergence is declared.
    pub stop_on_consensus: bool,
    pub tol: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            steps: 1000,
            stop_on_consensus: false,
            tol: DEFAULT_RANK_TOL,
        }
    }
}

impl RunOptions {
    pub fn steps(steps: usize) -> Self {
        Self {
            steps,
            ..Self::default()
        }
    }
}

/// States `x(0), .., x(T)` with per-state metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub n: usize,
    pub states: Vec<Vector>,
    pub consensus_error: Vec<f64>,
    pub residual: Vec<f64>,
    /// Round at which the agreement streak completed.
    pub converged_at: Option<usize>,
}

impl Trajectory {
    pub fn steps_run(&self) -> usize {
        self.states.len() - 1
    }

    pub fn converged(&self) -> bool {
        self.converged_at.is_some()
    }

    pub fn final_state(&self) -> &Vector {
        self.states.last().expect("trajectory holds x(0)")
    }

    pub fn final_consensus_error(&self) -> f64 {
        *self.consensus_error.last().expect("trajectory holds x(0)")
    }

    pub fn final_residual(&self) -> f64 {
        *self.residual.last().expect("trajectory holds x(0)")
    }

    /// Block `i` of state `t`.
    pub fn agent(&self, t: usize, i: usize) -> Vector {
        self.states[t].rows(i * self.n, self.n).into_owned()
    }
}

/// In-neighbor gains per agent: `gains[i] = [(j, G_ij), ..]`.
type Gains = Vec<Vec<(usize, Matrix)>>;

fn apply(gains: &Gains, x: &Vector, n: usize) -> Vector {
    let mut next = x.clone();
    for (i, row) in gains.iter().enumerate() {
        let xi = x.rows(i * n, n);
        let mut delta = Vector::zeros(n);
        for (j, gain) in row {
            delta += gain * (xi - x.rows(j * n, n));
        }
        let mut out = next.rows_mut(i * n, n);
        out -= delta;
    }
    next
}

fn pair_projection(w: &WeightedNeighborGraph, arc: Arc, tol: f64) -> Result<Matrix, SimError> {
    let c = w.weight(arc).expect("arc of the graph");
    Ok(projection_matrix(c, tol)?)
}

/// `C_ij' C_ij + C_ji' C_ji` for every neighbor pair of a symmetric graph.
fn gradient_gains(w: &WeightedNeighborGraph) -> Gains {
    let g = w.graph();
    (0..g.vertex_count())
        .map(|i| {
            g.in_neighbors(i)
                .map(|j| {
                    let cji = w.weight(Arc::new(j, i)).expect("arc of the graph");
                    let cij = w.weight(Arc::new(i, j)).expect("symmetric graph");
                    (j, cji.transpose() * cji + cij.transpose() * cij)
                })
                .collect()
        })
        .collect()
}

/// `s(i, j) (P_ij + P_ji)` over the arcs of `active`.
fn symmetric_projection_gains(
    w: &WeightedNeighborGraph,
    active: &DirectedGraph,
    tol: f64,
    scale: impl Fn(usize, usize) -> f64,
) -> Result<Gains, SimError> {
    (0..active.vertex_count())
        .map(|i| {
            active
                .in_neighbors(i)
                .map(|j| {
                    let p = pair_projection(w, Arc::new(j, i), tol)?
                        + pair_projection(w, Arc::new(i, j), tol)?;
                    Ok((j, p * scale(i, j)))
                })
                .collect()
        })
        .collect()
}

/// `P_ji / (d_i + 1)` for every in-neighbor `j`.
fn projection_gains(w: &WeightedNeighborGraph, tol: f64) -> Result<Gains, SimError> {
    let g = w.graph();
    (0..g.vertex_count())
        .map(|i| {
            let scale = 1.0 / (g.degree(i) as f64 + 1.0);
            g.in_neighbors(i)
                .map(|j| Ok((j, pair_projection(w, Arc::new(j, i), tol)? * scale)))
                .collect()
        })
        .collect()
}

fn check_state(w: &WeightedNeighborGraph, x0: &Vector) -> Result<(), SimError> {
    let expected = w.graph().vertex_count() * w.n();
    if x0.len() != expected {
        return Err(SimError::StateLength {
            got: x0.len(),
            expected,
        });
    }
    Ok(())
}

fn drive(
    w: &WeightedNeighborGraph,
    x0: Vector,
    opts: &RunOptions,
    mut step: impl FnMut(usize, &Vector) -> Vector,
) -> Trajectory {
    let n = w.n();
    let mut traj = Trajectory {
        n,
        states: Vec::with_capacity(opts.steps + 1),
        consensus_error: Vec::with_capacity(opts.steps + 1),
        residual: Vec::with_capacity(opts.steps + 1),
        converged_at: None,
    };
    let mut streak = 0;
    let mut x = x0;
    for t in 0..=opts.steps {
        if t > 0 {
            x = step(t - 1, &x);
        }
        let err = consensus_error(&x, n);
        traj.consensus_error.push(err);
        traj.residual.push(local_agreement_residual(w, &x));
        traj.states.push(x.clone());
        streak = if err < CONSENSUS_THRESHOLD {
            streak + 1
        } else {
            0
        };
        if streak >= CONSENSUS_STREAK && traj.converged_at.is_none() {
            traj.converged_at = Some(t);
            if opts.stop_on_consensus {
                break;
            }
        }
    }
    traj
}

/// `x(t+1) = x(t) - alpha(t) Jbar C' C Jbar' x(t)` with the raw weights.
pub fn run_gradient(
    w: &WeightedNeighborGraph,
    x0: &Vector,
    stepsize: &StepsizeSchedule,
    opts: &RunOptions,
) -> Result<Trajectory, SimError> {
    check_graph(Algorithm::Gradient, w.graph())?;
    check_state(w, x0)?;
    stepsize.validate()?;
    let gains = gradient_gains(w);
    let n = w.n();
    Ok(drive(w, x0.clone(), opts, |t, x| {
        let alpha = stepsize.at(t);
        let scaled: Gains = gains
            .iter()
            .map(|row| row.iter().map(|(j, g)| (*j, g * alpha)).collect())
            .collect();
        apply(&scaled, x, n)
    }))
}

/// Degree-scaled fixed step with row-orthonormalized weights.
pub fn run_fixed_step(
    w: &WeightedNeighborGraph,
    x0: &Vector,
    opts: &RunOptions,
) -> Result<Trajectory, SimError> {
    check_graph(Algorithm::FixedStep, w.graph())?;
    check_state(w, x0)?;
    let ortho = w.row_orthonormalized(opts.tol)?;
    let g = w.graph();
    let gains = symmetric_projection_gains(&ortho, g, opts.tol, |i, _| {
        1.0 / (2.0 * (g.degree(i) as f64 + 1.0))
    })?;
    let n = w.n();
    Ok(drive(w, x0.clone(), opts, |_, x| apply(&gains, x, n)))
}

/// Metropolis-weighted rounds over the subgraphs of `schedule`.
pub fn run_metropolis_tv(
    w: &WeightedNeighborGraph,
    x0: &Vector,
    schedule: &Schedule,
    opts: &RunOptions,
) -> Result<Trajectory, SimError> {
    check_graph(Algorithm::MetropolisTv, w.graph())?;
    check_state(w, x0)?;
    let ortho = w.row_orthonormalized(opts.tol)?;
    let per_subgraph = schedule
        .subgraphs()
        .iter()
        .map(|sub| {
            let weights = metropolis_weights(sub)?;
            symmetric_projection_gains(&ortho, sub, opts.tol, |i, j| 0.5 * weights[&Arc::new(j, i)])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n = w.n();
    Ok(drive(w, x0.clone(), opts, |t, x| {
        apply(&per_subgraph[schedule.index_at(t)], x, n)
    }))
}

/// `x_i <- x_i - (1/2) P_i (x_i - x_{i-1})` on a directed cycle, where `P_i`
/// projects onto the row space of the weight on the arc entering `i`.
/// With `project_init`, `x_i(0)` is first replaced by `P_i x_i(0)`.
pub fn run_cycle_projection(
    w: &WeightedNeighborGraph,
    x0: &Vector,
    project_init: bool,
    opts: &RunOptions,
) -> Result<Trajectory, SimError> {
    check_graph(Algorithm::CycleProjection, w.graph())?;
    check_state(w, x0)?;
    let gains = projection_gains(w, opts.tol)?;
    let n = w.n();
    let mut start = x0.clone();
    if project_init {
        for (i, row) in gains.iter().enumerate() {
            // The gain is P_i / 2 on a cycle.
            let p = &row[0].1 * 2.0;
            let xi = p * start.rows(i * n, n);
            start.rows_mut(i * n, n).copy_from(&xi);
        }
    }
    Ok(drive(w, start, opts, |_, x| apply(&gains, x, n)))
}

/// `x_i <- x_i - 1/(d_i + 1) sum_j P_ji (x_i - x_j)` on any digraph.
pub fn run_general_projection(
    w: &WeightedNeighborGraph,
    x0: &Vector,
    opts: &RunOptions,
) -> Result<Trajectory, SimError> {
    check_graph(Algorithm::GeneralProjection, w.graph())?;
    check_state(w, x0)?;
    let gains = projection_gains(w, opts.tol)?;
    let n = w.n();
    Ok(drive(w, x0.clone(), opts, |_, x| apply(&gains, x, n)))
}
