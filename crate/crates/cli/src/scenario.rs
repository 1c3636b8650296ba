//! Scenario files: a JSON description of the graph, weights, algorithm and
//! initial state for one experiment. Unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use matcons_core::io::{
    decomposition_from_json, matrix_from_rows, parse_graph_text, weights_from_json,
    ArcWeightRecord, WeightedGraphRecord,
};
use matcons_core::numerics::Vector;
use matcons_core::simulator::{Algorithm, Schedule, ScheduleMode, StepsizeSchedule};
use matcons_core::wellconfig::synthesize_symmetric_with;
use matcons_core::{
    ear_decomposition, symmetric_ear_decomposition, synthesize, Arc, DirectedGraph,
    EarDecomposition, SynthMode, WeightedNeighborGraph,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub graph: GraphSpec,
    /// State dimension; may be omitted when the graph file declares it.
    #[serde(default)]
    pub n: Option<usize>,
    pub weights: WeightsSpec,
    #[serde(default)]
    pub algorithm: Option<AlgorithmSpec>,
    #[serde(default)]
    pub initial: Option<InitialSpec>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    /// Vertex count and 1-based `[j, i]` arcs.
    Inline { m: usize, arcs: Vec<[usize; 2]> },
    /// Arc-list text file, relative to the scenario file.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightsSpec {
    /// One `{j, i, C}` record per arc.
    Explicit(Vec<ArcWeightRecord>),
    Synthesize(SynthSpec),
    /// Weighted neighbor graph JSON, relative to the scenario file.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub mode: SynthModeSpec,
    #[serde(default)]
    pub symmetric: bool,
    #[serde(default)]
    pub decomposition: DecompositionSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthModeSpec {
    NonzeroKernels,
    Free,
}

impl From<SynthModeSpec> for SynthMode {
    fn from(m: SynthModeSpec) -> Self {
        match m {
            SynthModeSpec::NonzeroKernels => SynthMode::NonzeroKernels,
            SynthModeSpec::Free => SynthMode::Free,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DecompositionSpec {
    #[default]
    Auto,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    pub kind: Algorithm,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub stop_on_consensus: bool,
    #[serde(default)]
    pub stepsize: Option<StepsizeSpec>,
    #[serde(default)]
    pub schedule: Option<ScheduleSpec>,
    #[serde(default)]
    pub project_init: bool,
}

fn default_steps() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StepsizeSpec {
    Harmonic { a: f64, b: f64 },
    Constant(f64),
    Scripted(Vec<f64>),
}

impl From<&StepsizeSpec> for StepsizeSchedule {
    fn from(s: &StepsizeSpec) -> Self {
        match s {
            StepsizeSpec::Harmonic { a, b } => StepsizeSchedule::Harmonic { a: *a, b: *b },
            StepsizeSpec::Constant(c) => StepsizeSchedule::Constant(*c),
            StepsizeSpec::Scripted(v) => StepsizeSchedule::Scripted(v.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub mode: ScheduleModeSpec,
    #[serde(default)]
    pub dwell: Option<usize>,
    #[serde(default)]
    pub script: Option<Vec<usize>>,
    /// Each subgraph as a list of 1-based undirected edges `[a, b]`.
    pub subgraphs: Vec<Vec<[usize; 2]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleModeSpec {
    Fixed,
    Periodic,
    Scripted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// One row of `n` values per agent.
    Explicit(Vec<Vec<f64>>),
    /// Uniform in `[-scale, scale]`; the seed may come from `--seed` instead.
    Random {
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default = "default_scale")]
        scale: f64,
    },
    /// Every agent starts at the given value.
    Consensus(Vec<f64>),
}

fn default_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
}

/// A scenario together with the directory its relative paths resolve from.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub base_dir: PathBuf,
}

/// Weights plus the decomposition they were synthesized from, if any.
#[derive(Debug, Clone)]
pub struct BuiltWeights {
    pub weights: WeightedNeighborGraph,
    pub decomposition: Option<EarDecomposition>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| anyhow!("scenario: {e}"))?;
        if s.schema_version != SCHEMA_VERSION {
            bail!(
                "scenario: unsupported schema_version {} (expected {SCHEMA_VERSION})",
                s.schema_version
            );
        }
        Ok(s)
    }
}

impl LoadedScenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let scenario =
            Scenario::from_json(&text).with_context(|| format!("in {}", path.display()))?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { scenario, base_dir })
    }

    /// A scenario whose relative paths resolve from `base_dir`.
    pub fn from_json(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        Ok(Self {
            scenario: Scenario::from_json(text)?,
            base_dir: base_dir.into(),
        })
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        self.base_dir.join(p)
    }

    fn read(&self, p: &Path) -> Result<String> {
        let full = self.resolve(p);
        fs::read_to_string(&full).with_context(|| format!("reading {}", full.display()))
    }

    pub fn name(&self) -> &str {
        self.scenario.name.as_deref().unwrap_or("scenario")
    }

    /// Graph and state dimension.
    pub fn graph(&self) -> Result<(DirectedGraph, usize)> {
        let s = &self.scenario;
        match &s.graph {
            GraphSpec::Inline { m, arcs } => {
                let n =
                    s.n.ok_or_else(|| anyhow!("scenario: `n` is required with an inline graph"))?;
                Ok((inline_graph(*m, arcs)?, n))
            }
            GraphSpec::File(p) => {
                let parsed = parse_graph_text(&self.read(p)?)
                    .with_context(|| format!("in {}", self.resolve(p).display()))?;
                if let Some(n) = s.n {
                    if n != parsed.n {
                        bail!(
                            "scenario n = {n} disagrees with the graph file header n = {}",
                            parsed.n
                        );
                    }
                }
                Ok((parsed.graph, parsed.n))
            }
        }
    }

    pub fn weights(&self) -> Result<BuiltWeights> {
        let (g, n) = self.graph()?;
        match &self.scenario.weights {
            WeightsSpec::Explicit(records) => {
                let record = WeightedGraphRecord {
                    m: g.vertex_count(),
                    n,
                    arcs: records.clone(),
                };
                let w = record.into_weighted().context("explicit weights")?;
                require_same_graph(&g, w.graph())?;
                Ok(BuiltWeights {
                    weights: w,
                    decomposition: None,
                })
            }
            WeightsSpec::File(p) => {
                let w = weights_from_json(&self.read(p)?)
                    .with_context(|| format!("in {}", self.resolve(p).display()))?;
                if w.n() != n {
                    bail!("weights file has n = {}, scenario has n = {n}", w.n());
                }
                require_same_graph(&g, w.graph())?;
                Ok(BuiltWeights {
                    weights: w,
                    decomposition: None,
                })
            }
            WeightsSpec::Synthesize(spec) => {
                let decomposition = match &spec.decomposition {
                    DecompositionSpec::Auto if spec.symmetric => symmetric_ear_decomposition(&g)?,
                    DecompositionSpec::Auto => ear_decomposition(&g)?,
                    DecompositionSpec::File(p) => {
                        decomposition_from_json(&self.read(p)?, spec.symmetric)
                            .with_context(|| format!("in {}", self.resolve(p).display()))?
                    }
                };
                let mode = SynthMode::from(spec.mode);
                let w = if spec.symmetric {
                    synthesize_symmetric_with(&g, n, &decomposition, mode)?
                } else {
                    synthesize(&g, n, &decomposition, mode)?
                };
                Ok(BuiltWeights {
                    weights: w,
                    decomposition: Some(decomposition),
                })
            }
        }
    }

    pub fn algorithm(&self) -> Result<&AlgorithmSpec> {
        self.scenario
            .algorithm
            .as_ref()
            .ok_or_else(|| anyhow!("scenario has no `algorithm` section"))
    }

    /// Stacked initial state; `seed` overrides the scenario's seed.
    pub fn initial_state(&self, m: usize, n: usize, seed: Option<u64>) -> Result<Vector> {
        let spec = self
            .scenario
            .initial
            .as_ref()
            .ok_or_else(|| anyhow!("scenario has no `initial` section"))?;
        match spec {
            InitialSpec::Explicit(rows) => {
                if rows.len() != m {
                    bail!(
                        "initial state has {} rows, expected one per agent ({m})",
                        rows.len()
                    );
                }
                let mat = matrix_from_rows(rows, n).context("initial state")?;
                Ok(Vector::from_iterator(
                    m * n,
                    mat.transpose().iter().copied(),
                ))
            }
            InitialSpec::Random { seed: s, scale } => {
                let seed = seed.or(*s).ok_or_else(|| {
                    anyhow!("random initial state needs a seed (scenario `seed` or --seed)")
                })?;
                if !(scale.is_finite() && *scale > 0.0) {
                    bail!("random initial scale must be positive");
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok(Vector::from_fn(m * n, |_, _| {
                    rng.gen_range(-*scale..=*scale)
                }))
            }
            InitialSpec::Consensus(value) => {
                if value.len() != n {
                    bail!(
                        "consensus value has {} entries, expected n = {n}",
                        value.len()
                    );
                }
                Ok(Vector::from_fn(m * n, |k, _| value[k % n]))
            }
        }
    }
}

impl AlgorithmSpec {
    pub fn stepsize(&self) -> StepsizeSchedule {
        self.stepsize
            .as_ref()
            .map(StepsizeSchedule::from)
            .unwrap_or_default()
    }

    /// The scenario's schedule, or the whole graph every round.
    pub fn schedule(&self, g: &DirectedGraph) -> Result<Schedule> {
        let Some(spec) = &self.schedule else {
            return Ok(Schedule::constant(g)?);
        };
        let subgraphs = spec
            .subgraphs
            .iter()
            .enumerate()
            .map(|(k, edges)| {
                let mut arcs = Vec::with_capacity(2 * edges.len());
                for &[a, b] in edges {
                    let (j, i) = one_based(a, b, g.vertex_count())
                        .with_context(|| format!("schedule subgraph {}", k + 1))?;
                    arcs.push(Arc::new(j, i));
                    arcs.push(Arc::new(i, j));
                }
                DirectedGraph::new(g.vertex_count(), arcs)
                    .with_context(|| format!("schedule subgraph {}", k + 1))
            })
            .collect::<Result<Vec<_>>>()?;
        let mode = match spec.mode {
            ScheduleModeSpec::Fixed => ScheduleMode::Fixed,
            ScheduleModeSpec::Periodic => ScheduleMode::Periodic {
                dwell: spec.dwell.unwrap_or(1),
            },
            ScheduleModeSpec::Scripted => ScheduleMode::Scripted(
                spec.script
                    .clone()
                    .ok_or_else(|| anyhow!("scripted schedule needs `script`"))?,
            ),
        };
        Ok(Schedule::new(g, mode, subgraphs)?)
    }
}

fn one_based(j: usize, i: usize, m: usize) -> Result<(usize, usize)> {
    if j == 0 || i == 0 || j > m || i > m {
        bail!("vertex in [{j}, {i}] outside 1..={m}");
    }
    Ok((j - 1, i - 1))
}

fn inline_graph(m: usize, arcs: &[[usize; 2]]) -> Result<DirectedGraph> {
    let arcs = arcs
        .iter()
        .enumerate()
        .map(|(k, &[j, i])| {
            one_based(j, i, m)
                .map(|(j, i)| Arc::new(j, i))
                .with_context(|| format!("graph arc {}", k + 1))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DirectedGraph::new(m, arcs)?)
}

fn require_same_graph(expected: &DirectedGraph, got: &DirectedGraph) -> Result<()> {
    if expected != got {
        bail!("weights are given on a different arc set than the scenario graph");
    }
    Ok(())
}
