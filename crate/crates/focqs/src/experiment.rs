//! Seeded batch experiments: run traces, approximation-ratio sweeps with
//! standard errors, cumulative-time accounting, and the finite-difference
//! gradient oracle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::io::Write;
use std::path::Path;

use crate::controllers::{
    falqon_run, focqs_run, focqs_windowed_run, iterative_focqs_run, ControlLaw, ControlMode,
    ControlSchedule, Engine, FeedbackRecord, FocqsParams, DEFAULT_BETA0, DEFAULT_FALLOFF,
    DEFAULT_GRAD_TOLERANCE, DEFAULT_INNER_STEPS, DEFAULT_WARMUP_LAYERS,
};
use crate::error::{Error, Result};
use crate::problems::{
    approximation_ratio, exact_ground_energy, gen_ising, gen_mis, ProblemInstance, ProblemKind,
    DEFAULT_PENALTY_WEIGHT,
};
use crate::statevector::EvolutionScheme;

pub const TRACE_FORMAT_VERSION: u32 = 1;
pub const SUMMARY_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_FD_DELTA: f64 = 1e-5;

/// Total gate time through layer k under the accounting rule "one time
/// unit per problem gate, u_j units per mixer gate".
pub fn cumulative_time(schedule: &ControlSchedule, up_to_layer: usize) -> f64 {
    assert!(
        up_to_layer < schedule.u.len(),
        "layer {up_to_layer} out of range for schedule of length {}",
        schedule.u.len()
    );
    schedule.u[..=up_to_layer].iter().map(|u| 1.0 + u).sum()
}

/// Central finite difference of the final cost expectation with respect
/// to the control at one layer, from two full re-simulations with only
/// that entry perturbed. This is the model-free oracle the perturbative
/// gradient estimates are checked against.
pub fn finite_difference_phi(
    inst: &ProblemInstance,
    schedule: &ControlSchedule,
    layer: usize,
    delta: f64,
    scheme: EvolutionScheme,
) -> Result<f64> {
    if layer >= schedule.u.len() {
        return Err(Error::InvalidArgument(format!(
            "layer {layer} out of range for schedule of length {}",
            schedule.u.len()
        )));
    }
    if delta <= 0.0 {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    let mut up = schedule.clone();
    up.u[layer] += delta;
    let mut down = schedule.clone();
    down.u[layer] -= delta;
    Ok((final_energy(inst, &up, scheme)? - final_energy(inst, &down, scheme)?) / (2.0 * delta))
}

fn final_energy(inst: &ProblemInstance, schedule: &ControlSchedule, scheme: EvolutionScheme) -> Result<f64> {
    let engine = Engine::new(inst, schedule.dt, scheme, schedule.mode)?;
    let mut state = engine.initial_state()?;
    for &u in &schedule.u {
        engine.apply_control_layer(&mut state, u)?;
    }
    engine.energy(&state)
}

// ---------------------------------------------------------------------------
// Run traces
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceHeader {
    pub instance: String,
    pub algorithm: String,
    pub params: Value,
    pub dt: f64,
    pub scheme: EvolutionScheme,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub layer: usize,
    pub u: f64,
    pub phi: f64,
    pub phi_tilde: f64,
    pub energy: f64,
    pub cum_time: f64,
}

/// Per-layer rows of one run, with the provenance needed to reproduce it.
/// The `u` column shows the final schedule; phi/phi~/energy are the
/// values measured while the run was built.
#[derive(Debug, Clone)]
pub struct RunTrace {
    pub header: TraceHeader,
    pub rows: Vec<TraceRow>,
}

impl RunTrace {
    pub fn from_run(header: TraceHeader, schedule: &ControlSchedule, record: &FeedbackRecord) -> Self {
        let mut rows = Vec::with_capacity(record.len());
        let mut cum = 0.0;
        for i in 0..record.len() {
            cum += 1.0 + schedule.u[i];
            rows.push(TraceRow {
                layer: i,
                u: schedule.u[i],
                phi: record.phi[i],
                phi_tilde: record.phi_tilde[i],
                energy: record.energy[i],
                cum_time: cum,
            });
        }
        Self { header, rows }
    }
}

/// Evolve the circuit under a fixed schedule with no feedback, recording
/// the same per-layer quantities a live run would. This is how a finished
/// control function is evaluated after the fact.
pub fn replay_schedule(
    inst: &ProblemInstance,
    schedule: &ControlSchedule,
    scheme: EvolutionScheme,
) -> Result<RunTrace> {
    if schedule.u.is_empty() {
        return Err(Error::InvalidArgument("schedule is empty".into()));
    }
    let engine = Engine::new(inst, schedule.dt, scheme, schedule.mode)?;
    let mut record = FeedbackRecord::default();
    let mut state = engine.initial_state()?;
    for i in 0..schedule.u.len() {
        engine.apply_control_layer(&mut state, schedule.u[i])?;
        let energy = engine.energy(&state)?;
        let phi = engine.phi(&state)?;
        let probe = schedule.u.get(i + 1).copied().unwrap_or(0.0);
        let phi_tilde = engine.phi_tilde(&state, probe)?;
        record.phi.push(phi);
        record.phi_tilde.push(phi_tilde);
        record.energy.push(energy);
    }
    let header = TraceHeader {
        instance: inst.label(),
        algorithm: "replay".into(),
        params: serde_json::json!({}),
        dt: schedule.dt,
        scheme,
    };
    Ok(RunTrace::from_run(header, schedule, &record))
}

pub fn trace_to_string(trace: &RunTrace) -> Result<String> {
    let mut out = String::new();
    out.push_str(&format!("# focqs-trace format_version={TRACE_FORMAT_VERSION}\n"));
    out.push_str(&format!(
        "# config: {}\n",
        serde_json::to_string(&trace.header)?
    ));
    out.push_str("layer,u,phi,phi_tilde,energy,cum_time\n");
    for r in &trace.rows {
        out.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.layer, r.u, r.phi, r.phi_tilde, r.energy, r.cum_time
        ));
    }
    Ok(out)
}

pub fn write_trace(path: &Path, trace: &RunTrace) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(trace_to_string(trace)?.as_bytes())?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// One controller cell of a sweep, named the way it appears in summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum AlgorithmSpec {
    Falqon,
    FalqonBoundedClipped,
    FalqonBoundedBang,
    Focqs {
        #[serde(default = "default_beta0")]
        beta0: f64,
        #[serde(default = "default_falloff")]
        falloff: f64,
        #[serde(default, with = "crate::controllers::window_serde")]
        window: Option<usize>,
    },
    FocqsWindowed {
        #[serde(default = "default_beta0")]
        beta0: f64,
        #[serde(default = "default_falloff")]
        falloff: f64,
        window: usize,
        #[serde(default = "default_warmup")]
        warmup_layers: usize,
        #[serde(default = "default_inner_steps")]
        inner_steps: usize,
        #[serde(default = "default_grad_tolerance")]
        grad_tolerance: f64,
    },
    /// FOCQS followed by `iterations` rounds of iterative refinement,
    /// each seeded with the previous round's schedule.
    FocqsIter {
        #[serde(default = "default_beta0")]
        beta0: f64,
        #[serde(default = "default_falloff")]
        falloff: f64,
        #[serde(default, with = "crate::controllers::window_serde")]
        window: Option<usize>,
        #[serde(default = "default_iterations")]
        iterations: usize,
    },
}

fn default_beta0() -> f64 {
    DEFAULT_BETA0
}
fn default_falloff() -> f64 {
    DEFAULT_FALLOFF
}
fn default_warmup() -> usize {
    DEFAULT_WARMUP_LAYERS
}
fn default_inner_steps() -> usize {
    DEFAULT_INNER_STEPS
}
fn default_grad_tolerance() -> f64 {
    DEFAULT_GRAD_TOLERANCE
}
fn default_iterations() -> usize {
    1
}

impl AlgorithmSpec {
    pub fn label(&self) -> String {
        match self {
            AlgorithmSpec::Falqon => "falqon".into(),
            AlgorithmSpec::FalqonBoundedClipped => "falqon-bounded-clipped".into(),
            AlgorithmSpec::FalqonBoundedBang => "falqon-bounded-bang".into(),
            AlgorithmSpec::Focqs { .. } => "focqs".into(),
            AlgorithmSpec::FocqsWindowed { .. } => "focqs-windowed".into(),
            AlgorithmSpec::FocqsIter { iterations, .. } => format!("focqs-iter{iterations}"),
        }
    }

    pub fn run(
        &self,
        inst: &ProblemInstance,
        layers: usize,
        dt: f64,
        scheme: EvolutionScheme,
    ) -> Result<(ControlSchedule, FeedbackRecord)> {
        match self {
            AlgorithmSpec::Falqon => falqon_run(inst, layers, dt, scheme, ControlLaw::Unbounded),
            AlgorithmSpec::FalqonBoundedClipped => {
                falqon_run(inst, layers, dt, scheme, ControlLaw::BoundedClipped)
            }
            AlgorithmSpec::FalqonBoundedBang => {
                falqon_run(inst, layers, dt, scheme, ControlLaw::BoundedBang)
            }
            AlgorithmSpec::Focqs {
                beta0,
                falloff,
                window,
            } => {
                let params = FocqsParams {
                    beta0: *beta0,
                    falloff: *falloff,
                    window: *window,
                    mode: ControlMode::Unbounded,
                };
                focqs_run(inst, layers, dt, &params, scheme)
            }
            AlgorithmSpec::FocqsWindowed {
                beta0,
                falloff,
                window,
                warmup_layers,
                inner_steps,
                grad_tolerance,
            } => {
                let params = FocqsParams {
                    beta0: *beta0,
                    falloff: *falloff,
                    window: Some(*window),
                    mode: ControlMode::Unbounded,
                };
                focqs_windowed_run(
                    inst,
                    layers,
                    dt,
                    &params,
                    *inner_steps,
                    *grad_tolerance,
                    *warmup_layers,
                    scheme,
                )
            }
            AlgorithmSpec::FocqsIter {
                beta0,
                falloff,
                window,
                iterations,
            } => {
                let params = FocqsParams {
                    beta0: *beta0,
                    falloff: *falloff,
                    window: *window,
                    mode: ControlMode::Unbounded,
                };
                let (mut schedule, mut record) = focqs_run(inst, layers, dt, &params, scheme)?;
                for _ in 0..*iterations {
                    let (s, r) = iterative_focqs_run(inst, &schedule, layers, dt, &params, scheme)?;
                    schedule = s;
                    record = r;
                }
                Ok((schedule, record))
            }
        }
    }
}

fn default_layers() -> usize {
    100
}
fn default_dt() -> f64 {
    0.1
}
fn default_lambda() -> f64 {
    DEFAULT_PENALTY_WEIGHT
}
fn default_seed_start() -> u64 {
    0
}

/// Declarative sweep: a grid of (algorithm, n, seed) cells run at one
/// operating point. Seeds are either listed explicitly or generated as
/// seed_start..seed_start+seed_count.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub kind: ProblemKind,
    pub n: Vec<usize>,
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub seed_count: Option<u64>,
    #[serde(default = "default_seed_start")]
    pub seed_start: u64,
    #[serde(default = "default_layers")]
    pub layers: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub scheme: EvolutionScheme,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default)]
    pub threads: Option<usize>,
}

impl SweepConfig {
    pub fn resolved_seeds(&self) -> Result<Vec<u64>> {
        match (&self.seeds, self.seed_count) {
            (Some(s), None) => Ok(s.clone()),
            (None, Some(count)) => Ok((self.seed_start..self.seed_start + count).collect()),
            (None, None) => Err(Error::InvalidArgument(
                "sweep config needs either seeds or seed_count".into(),
            )),
            (Some(_), Some(_)) => Err(Error::InvalidArgument(
                "sweep config must not set both seeds and seed_count".into(),
            )),
        }
    }
}

pub fn read_sweep_config(path: &Path) -> Result<SweepConfig> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryCell {
    pub algorithm: String,
    pub n: usize,
    pub trials: usize,
    pub mean_ratio_final: f64,
    pub sem_final: f64,
    pub mean_ratio_best: f64,
    pub sem_best: f64,
    pub mean_cum_time: f64,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub algorithm: String,
    pub n: usize,
    pub seed: u64,
    pub message: String,
}

/// Aggregated sweep results keyed by (algorithm, n).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSummary {
    pub format_version: u32,
    pub config: SweepConfig,
    pub cells: Vec<SummaryCell>,
    pub failures: Vec<TrialFailure>,
}

impl SweepSummary {
    pub fn cell(&self, algorithm: &str, n: usize) -> Option<&SummaryCell> {
        self.cells
            .iter()
            .find(|c| c.algorithm == algorithm && c.n == n)
    }
}

#[derive(Debug, Clone)]
struct TrialOutcome {
    ratio_final: f64,
    ratio_best: f64,
    cum_time: f64,
}

fn run_trial(
    config: &SweepConfig,
    algo: &AlgorithmSpec,
    n: usize,
    seed: u64,
) -> Result<TrialOutcome> {
    let inst = match config.kind {
        ProblemKind::Ising => gen_ising(n, seed)?,
        ProblemKind::Mis => gen_mis(n, seed, config.lambda)?,
    };
    let ground = exact_ground_energy(&inst)?;
    let (schedule, record) = algo.run(&inst, config.layers, config.dt, config.scheme)?;
    let final_energy = *record
        .energy
        .last()
        .ok_or_else(|| Error::InvalidArgument("empty run record".into()))?;
    let best_energy = record.energy.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(TrialOutcome {
        ratio_final: approximation_ratio(final_energy, ground.energy)?,
        ratio_best: approximation_ratio(best_energy, ground.energy)?,
        cum_time: cumulative_time(&schedule, schedule.len() - 1),
    })
}

fn mean_and_sem(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    (mean, var.sqrt() / (n as f64).sqrt())
}

/// Execute the whole grid. Trials are independent jobs run in parallel;
/// aggregation folds them in a fixed (algorithm, n, seed) order, so the
/// result does not depend on the degree of parallelism. Failed trials are
/// recorded and excluded from their cell, never silently dropped.
pub fn run_batch(config: &SweepConfig) -> Result<SweepSummary> {
    let seeds = config.resolved_seeds()?;
    if config.algorithms.is_empty() {
        return Err(Error::InvalidArgument("sweep config has no algorithms".into()));
    }
    let mut jobs = Vec::new();
    for algo in &config.algorithms {
        for &n in &config.n {
            for &seed in &seeds {
                jobs.push((algo.clone(), n, seed));
            }
        }
    }

    let execute = || -> Vec<(usize, std::result::Result<TrialOutcome, String>)> {
        jobs.par_iter()
            .enumerate()
            .map(|(idx, (algo, n, seed))| {
                let out = run_trial(config, algo, *n, *seed).map_err(|e| e.to_string());
                (idx, out)
            })
            .collect()
    };
    let results = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(execute),
        None => execute(),
    };

    let mut cells = Vec::new();
    let mut failures = Vec::new();
    for algo in &config.algorithms {
        for &n in &config.n {
            let mut finals = Vec::new();
            let mut bests = Vec::new();
            let mut times = Vec::new();
            let mut cell_seeds = Vec::new();
            for (idx, (job_algo, job_n, seed)) in jobs.iter().enumerate() {
                if job_algo != algo || *job_n != n {
                    continue;
                }
                match &results[idx].1 {
                    Ok(out) => {
                        finals.push(out.ratio_final);
                        bests.push(out.ratio_best);
                        times.push(out.cum_time);
                        cell_seeds.push(*seed);
                    }
                    Err(message) => failures.push(TrialFailure {
                        algorithm: algo.label(),
                        n,
                        seed: *seed,
                        message: message.clone(),
                    }),
                }
            }
            if finals.is_empty() {
                continue;
            }
            let (mean_final, sem_final) = mean_and_sem(&finals);
            let (mean_best, sem_best) = mean_and_sem(&bests);
            let (mean_time, _) = mean_and_sem(&times);
            cells.push(SummaryCell {
                algorithm: algo.label(),
                n,
                trials: finals.len(),
                mean_ratio_final: mean_final,
                sem_final,
                mean_ratio_best: mean_best,
                sem_best,
                mean_cum_time: mean_time,
                seeds: cell_seeds,
            });
        }
    }
    Ok(SweepSummary {
        format_version: SUMMARY_FORMAT_VERSION,
        config: config.clone(),
        cells,
        failures,
    })
}

pub fn summary_to_json(summary: &SweepSummary) -> Result<String> {
    let mut s = serde_json::to_string_pretty(summary)?;
    s.push('\n');
    Ok(s)
}

pub fn write_summary(path: &Path, summary: &SweepSummary) -> Result<()> {
    std::fs::write(path, summary_to_json(summary)?)?;
    Ok(())
}
