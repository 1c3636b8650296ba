//! The subcommands, as library functions returning structured reports.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use matcons_core::io::{decomposition_to_json, weights_to_json};
use matcons_core::numerics::{Matrix, Vector};
use matcons_core::simulator::{
    build_update_matrix, run_cycle_projection, run_fixed_step, run_general_projection,
    run_gradient, run_metropolis_tv, spectral_report, Algorithm, RoundInputs, RunOptions,
    SpectralReport, Trajectory,
};
use matcons_core::{is_well_configured, EarDecomposition, WeightedNeighborGraph, DEFAULT_RANK_TOL};
use serde::Serialize;

use crate::scenario::{AlgorithmSpec, LoadedScenario, WeightsSpec};

/// The bundled three-agent scenario on which the projection rule stalls.
pub const COUNTEREXAMPLE_SCENARIO: &str = include_str!("../scenarios/counterexample.json");

/// Command-line overrides shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub steps: Option<usize>,
    pub tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            out: None,
            seed: None,
            steps: None,
            tol: DEFAULT_RANK_TOL,
        }
    }
}

impl Settings {
    /// `--out`, else the scenario's output directory.
    fn out_dir(&self, sc: &LoadedScenario) -> Option<PathBuf> {
        self.out.clone().or_else(|| {
            sc.scenario
                .output
                .as_ref()
                .map(|o| sc.base_dir.join(&o.dir))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub well_configured: bool,
    pub kernel_dim: usize,
    /// One row per agent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Vec<f64>>>,
}

pub fn cmd_verify(sc: &LoadedScenario, settings: &Settings) -> Result<VerifyReport> {
    let w = sc.weights()?.weights;
    let report = verify_weights(&w, settings.tol)?;
    if let Some(dir) = settings.out_dir(sc) {
        write(&dir, "verify.json", &to_json(&report))?;
    }
    Ok(report)
}

pub fn verify_weights(w: &WeightedNeighborGraph, tol: f64) -> Result<VerifyReport> {
    let v = is_well_configured(w, tol)?;
    Ok(VerifyReport {
        well_configured: v.well_configured,
        kernel_dim: v.kernel_dim,
        witness: v.witness.map(|x| split_agents(&x, w.n())),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthReport {
    pub weights_file: PathBuf,
    pub decomposition_file: PathBuf,
    pub ears: usize,
    pub max_ear_len: usize,
    pub well_configured: bool,
}

#[derive(Debug, Clone)]
pub struct SynthOutcome {
    pub weights: WeightedNeighborGraph,
    pub decomposition: EarDecomposition,
    pub report: SynthReport,
}

/// Synthesizes weights, re-verifies them and only then writes
/// `weights.json` and `decomposition.json`.
pub fn cmd_synth(sc: &LoadedScenario, settings: &Settings) -> Result<SynthOutcome> {
    if !matches!(sc.scenario.weights, WeightsSpec::Synthesize(_)) {
        bail!("synth needs a scenario whose `weights` is a `synthesize` section");
    }
    let built = sc.weights()?;
    let decomposition = built
        .decomposition
        .expect("synthesized weights carry their decomposition");
    let w = built.weights;
    let check = verify_weights(&w, settings.tol)?;
    if !check.well_configured {
        bail!(
            "synthesized weights failed verification (kernel dimension {} != n = {}); nothing written",
            check.kernel_dim,
            w.n()
        );
    }
    let dir = settings
        .out_dir(sc)
        .ok_or_else(|| anyhow!("synth needs an output directory (--out)"))?;
    let weights_file = write(&dir, "weights.json", &weights_to_json(&w))?;
    let decomposition_file = write(
        &dir,
        "decomposition.json",
        &decomposition_to_json(&decomposition),
    )?;
    let report = SynthReport {
        weights_file,
        decomposition_file,
        ears: decomposition.len(),
        max_ear_len: decomposition.max_ear_len(),
        well_configured: true,
    };
    Ok(SynthOutcome {
        weights: w,
        decomposition,
        report,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralCounts {
    pub ones: usize,
    pub zeros: usize,
    pub inside_unit: usize,
    pub outside: usize,
}

impl From<&SpectralReport> for SpectralCounts {
    fn from(r: &SpectralReport) -> Self {
        Self {
            ones: r.ones,
            zeros: r.zeros,
            inside_unit: r.inside_unit,
            outside: r.outside,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub algorithm: Algorithm,
    pub steps_run: usize,
    pub final_consensus_error: f64,
    pub final_residual: f64,
    pub converged: bool,
    /// Spectrum of the first round's update matrix.
    pub spectral: SpectralCounts,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub trajectory: Trajectory,
}

/// Runs the scenario's algorithm and writes `trajectory.csv` and
/// `summary.json` when an output directory is known.
pub fn cmd_run(sc: &LoadedScenario, settings: &Settings) -> Result<RunOutcome> {
    let w = sc.weights()?.weights;
    let spec = sc.algorithm()?;
    let (m, n) = (w.graph().vertex_count(), w.n());
    let x0 = sc.initial_state(m, n, settings.seed)?;
    let rounds = round_matrices(&w, spec, settings.tol)?;
    let trajectory = simulate(&w, spec, &x0, settings)?;
    let first = spectral_report(&rounds[0].1, n);
    let summary = RunSummary {
        algorithm: spec.kind,
        steps_run: trajectory.steps_run(),
        final_consensus_error: trajectory.final_consensus_error(),
        final_residual: trajectory.final_residual(),
        converged: trajectory.converged(),
        spectral: SpectralCounts::from(&first),
    };
    if let Some(dir) = settings.out_dir(sc) {
        write(&dir, "trajectory.csv", &trajectory_csv(&trajectory, m)?)?;
        write(&dir, "summary.json", &to_json(&summary))?;
    }
    Ok(RunOutcome {
        summary,
        trajectory,
    })
}

/// Validates the algorithm against the graph, then runs it.
pub fn simulate(
    w: &WeightedNeighborGraph,
    spec: &AlgorithmSpec,
    x0: &Vector,
    settings: &Settings,
) -> Result<Trajectory> {
    let opts = RunOptions {
        steps: settings.steps.unwrap_or(spec.steps),
        stop_on_consensus: spec.stop_on_consensus,
        tol: settings.tol,
    };
    let g = w.graph();
    let traj = match spec.kind {
        Algorithm::Gradient => run_gradient(w, x0, &spec.stepsize(), &opts)?,
        Algorithm::FixedStep => run_fixed_step(w, x0, &opts)?,
        Algorithm::MetropolisTv => run_metropolis_tv(w, x0, &spec.schedule(g)?, &opts)?,
        Algorithm::CycleProjection => run_cycle_projection(w, x0, spec.project_init, &opts)?,
        Algorithm::GeneralProjection => run_general_projection(w, x0, &opts)?,
    };
    Ok(traj)
}

/// Labelled update matrices: one per scheduled subgraph for time-varying
/// runs, the first round's for the gradient method, otherwise the single
/// fixed matrix.
pub fn round_matrices(
    w: &WeightedNeighborGraph,
    spec: &AlgorithmSpec,
    tol: f64,
) -> Result<Vec<(String, Matrix)>> {
    let build = |round: RoundInputs| build_update_matrix(spec.kind, w, &round, tol);
    Ok(match spec.kind {
        Algorithm::MetropolisTv => spec
            .schedule(w.graph())?
            .subgraphs()
            .iter()
            .enumerate()
            .map(|(k, sub)| {
                let round = RoundInputs {
                    stepsize: None,
                    subgraph: Some(sub.clone()),
                };
                Ok((format!("subgraph {}", k + 1), build(round)?))
            })
            .collect::<Result<Vec<_>>>()?,
        Algorithm::Gradient => {
            let round = RoundInputs {
                stepsize: Some(spec.stepsize().at(0)),
                subgraph: None,
            };
            vec![("round 0".to_string(), build(round)?)]
        }
        _ => vec![("every round".to_string(), build(RoundInputs::default())?)],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundSpectrum {
    pub label: String,
    #[serde(flatten)]
    pub report: SpectralReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeReport {
    pub algorithm: Algorithm,
    pub n: usize,
    pub rounds: Vec<RoundSpectrum>,
}

pub fn cmd_analyze(sc: &LoadedScenario, settings: &Settings) -> Result<AnalyzeReport> {
    let w = sc.weights()?.weights;
    let spec = sc.algorithm()?;
    let report = AnalyzeReport {
        algorithm: spec.kind,
        n: w.n(),
        rounds: round_matrices(&w, spec, settings.tol)?
            .into_iter()
            .map(|(label, m)| RoundSpectrum {
                label,
                report: spectral_report(&m, w.n()),
            })
            .collect(),
    };
    if let Some(dir) = settings.out_dir(sc) {
        write(&dir, "analyze.json", &to_json(&report))?;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub verify: VerifyReport,
    pub analyze: AnalyzeReport,
    pub run: RunSummary,
}

pub fn counterexample_scenario() -> LoadedScenario {
    LoadedScenario::from_json(COUNTEREXAMPLE_SCENARIO, ".").expect("bundled scenario parses")
}

/// Verify, analyze and run the bundled counterexample.
pub fn cmd_counterexample(settings: &Settings) -> Result<CounterexampleReport> {
    let sc = counterexample_scenario();
    Ok(CounterexampleReport {
        verify: cmd_verify(&sc, settings)?,
        analyze: cmd_analyze(&sc, settings)?,
        run: cmd_run(&sc, settings)?.summary,
    })
}

fn split_agents(x: &Vector, n: usize) -> Vec<Vec<f64>> {
    x.as_slice().chunks(n).map(<[f64]>::to_vec).collect()
}

/// Shortest round-trip decimal form, switching to exponent notation for
/// very small or large magnitudes.
fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// CSV with header `t,agent,comp_1..comp_n`, one row per round and agent.
pub fn trajectory_csv(traj: &Trajectory, m: usize) -> Result<String> {
    let n = traj.n;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string(), "agent".to_string()];
    header.extend((1..=n).map(|k| format!("comp_{k}")));
    wtr.write_record(&header)?;
    for (t, state) in traj.states.iter().enumerate() {
        for i in 0..m {
            let mut row = vec![t.to_string(), (i + 1).to_string()];
            row.extend(state.rows(i * n, n).iter().map(|&v| fmt_f64(v)));
            wtr.write_record(&row)?;
        }
    }
    Ok(String::from_utf8(wtr.into_inner()?)?)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

fn write(dir: &Path, file: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(file);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
