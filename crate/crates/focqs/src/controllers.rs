//! Feedback control laws and run drivers.
//!
//! FALQON grows the circuit one layer at a time, setting each new control
//! from the measured feedback signal phi = dt * <i[B, C]>; the FOCQS
//! family additionally estimates the gradient of the current cost with
//! respect to *earlier* controls from the pair (phi, phi~) and walks those
//! controls downhill with a step that falls off with layer distance.
//!
//! Sign convention: with the Schrodinger equation i d|psi>/dt = H|psi>
//! and H = u B + C, Ehrenfest's theorem gives dJ/dt = u * <i[B, C]>, so
//! phi_j = dt * <i[B, C]> is (to O(dt^2)) the partial derivative of the
//! cost expectation with respect to u_j. The FALQON law u = max(0, -phi)
//! therefore moves against the gradient, and the retroactive update
//! subtracts the gradient estimate. A central-finite-difference oracle in
//! the experiment module pins this convention down in tests.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::pauli::{commutator, PauliSum};
use crate::problems::ProblemInstance;
use crate::statevector::{phase_factor, EvolutionScheme, SchemeKind, StateVector};

pub const DEFAULT_BETA0: f64 = 10.0;
pub const DEFAULT_FALLOFF: f64 = 2.0;
pub const DEFAULT_WARMUP_LAYERS: usize = 5;
pub const DEFAULT_INNER_STEPS: usize = 20;
pub const DEFAULT_GRAD_TOLERANCE: f64 = 1e-4;
pub const SCHEDULE_FORMAT_VERSION: u32 = 1;
/// Substeps for the second-order Trotterized (B - C) probe evolution used
/// by the bounded phi~ measurement.
const BOUNDED_PROBE_SUBSTEPS: usize = 8;

/// Whether controls live on [0, inf) or on [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControlMode {
    #[default]
    Unbounded,
    Bounded,
}

impl ControlMode {
    pub fn clamp(&self, u: f64) -> f64 {
        match self {
            ControlMode::Unbounded => u.max(0.0),
            ControlMode::Bounded => u.clamp(0.0, 1.0),
        }
    }
}

/// Layer-selection law used by FALQON runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControlLaw {
    Unbounded,
    BoundedClipped,
    BoundedBang,
}

impl ControlLaw {
    pub fn mode(&self) -> ControlMode {
        match self {
            ControlLaw::Unbounded => ControlMode::Unbounded,
            _ => ControlMode::Bounded,
        }
    }

    pub fn update(&self, phi: f64) -> f64 {
        match self {
            ControlLaw::Unbounded => falqon_update(phi),
            ControlLaw::BoundedClipped => bounded_falqon_update(phi, BoundedLaw::Clipped),
            ControlLaw::BoundedBang => bounded_falqon_update(phi, BoundedLaw::BangBang),
        }
    }
}

/// u_{j+1} = max(0, -phi_j): zero when the signal is positive, else the
/// signal magnitude.
pub fn falqon_update(phi: f64) -> f64 {
    (-phi).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundedLaw {
    Clipped,
    BangBang,
}

/// Bounded-control variants of the layer-selection law on [0, 1].
pub fn bounded_falqon_update(phi: f64, law: BoundedLaw) -> f64 {
    match law {
        BoundedLaw::Clipped => {
            if phi > 0.0 {
                0.0
            } else if phi <= -1.0 {
                1.0
            } else {
                -phi
            }
        }
        BoundedLaw::BangBang => {
            if phi > 0.0 {
                0.0
            } else {
                1.0
            }
        }
    }
}

/// The control values u_j with their time step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSchedule {
    pub u: Vec<f64>,
    pub dt: f64,
    pub mode: ControlMode,
}

impl ControlSchedule {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

/// Per-layer measurements collected while a run grows its circuit.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeedbackRecord {
    pub phi: Vec<f64>,
    pub phi_tilde: Vec<f64>,
    pub energy: Vec<f64>,
}

impl FeedbackRecord {
    pub fn len(&self) -> usize {
        self.energy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energy.is_empty()
    }

    fn push(&mut self, phi: f64, phi_tilde: f64, energy: f64) {
        self.phi.push(phi);
        self.phi_tilde.push(phi_tilde);
        self.energy.push(energy);
    }
}

/// Serde helper: an optional window serializes as a layer count or the
/// word "unbounded".
pub mod window_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Window {
        Count(usize),
        Word(String),
        Null,
    }

    pub fn serialize<S: Serializer>(w: &Option<usize>, s: S) -> Result<S::Ok, S::Error> {
        match w {
            Some(v) => s.serialize_u64(*v as u64),
            None => s.serialize_str("unbounded"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<usize>, D::Error> {
        match Window::deserialize(d)? {
            Window::Count(v) => Ok(Some(v)),
            Window::Null => Ok(None),
            Window::Word(w) if w == "unbounded" => Ok(None),
            Window::Word(w) => Err(serde::de::Error::custom(format!(
                "window must be a layer count or \"unbounded\", got \"{w}\""
            ))),
        }
    }
}

/// Meta-parameters of the retroactive update: base step 1/beta0, fall-off
/// exponent f on the layer distance, and an optional update window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocqsParams {
    #[serde(default = "default_beta0")]
    pub beta0: f64,
    #[serde(default = "default_falloff")]
    pub falloff: f64,
    #[serde(default, with = "window_serde")]
    pub window: Option<usize>,
    #[serde(default)]
    pub mode: ControlMode,
}

fn default_beta0() -> f64 {
    DEFAULT_BETA0
}

fn default_falloff() -> f64 {
    DEFAULT_FALLOFF
}

impl Default for FocqsParams {
    fn default() -> Self {
        Self {
            beta0: DEFAULT_BETA0,
            falloff: DEFAULT_FALLOFF,
            window: None,
            mode: ControlMode::Unbounded,
        }
    }
}

impl FocqsParams {
    pub fn validate(&self) -> Result<()> {
        if !self.beta0.is_finite() || self.beta0 <= 0.0 {
            return Err(Error::InvalidArgument("beta0 must be positive".into()));
        }
        if self.falloff < 0.0 {
            return Err(Error::InvalidArgument("falloff must be >= 0".into()));
        }
        Ok(())
    }
}

/// The Hermitian feedback observable i[B, C].
pub fn feedback_observable(mixer: &PauliSum, cost: &PauliSum) -> Result<PauliSum> {
    Ok(commutator(mixer, cost)?.scale(Complex64::new(0.0, 1.0)))
}

/// phi = dt * <state| i[B, C] |state>, the per-layer feedback signal.
pub fn measure_phi(state: &StateVector, mixer: &PauliSum, cost: &PauliSum, dt: f64) -> Result<f64> {
    let k = feedback_observable(mixer, cost)?;
    Ok(dt * state.expectation(&k)?)
}

/// The forward-shifted signal phi~: the same commutator expectation taken
/// on the probe state e^{-i dt u_next G} |state>, with G = B in the
/// unbounded mode and G = B - C (Trotterized) in the bounded mode.
pub fn measure_phi_tilde(
    state: &StateVector,
    mixer: &PauliSum,
    cost: &PauliSum,
    u_next: f64,
    dt: f64,
    mode: ControlMode,
) -> Result<f64> {
    let k = feedback_observable(mixer, cost)?;
    let mut probe = state.clone();
    match mode {
        ControlMode::Unbounded => probe.apply_transverse_rotation(u_next * dt),
        ControlMode::Bounded => {
            let diag = cost.diagonal()?;
            apply_bounded_probe(&mut probe, &diag, u_next * dt);
        }
    }
    Ok(dt * probe.expectation(&k)?)
}

/// e^{-i theta (B - C)} by second-order Trotterization; the -C part is a
/// diagonal phase with negated angle.
fn apply_bounded_probe(state: &mut StateVector, cost_diag: &[f64], theta: f64) {
    let m = BOUNDED_PROBE_SUBSTEPS as f64;
    for _ in 0..BOUNDED_PROBE_SUBSTEPS {
        state.apply_phase_with_diagonal(cost_diag, -theta / (2.0 * m));
        state.apply_transverse_rotation(theta / m);
        state.apply_phase_with_diagonal(cost_diag, -theta / (2.0 * m));
    }
}

/// First-order estimate of the gradient of the cost at the current layer
/// with respect to the control at an earlier layer:
/// Phi_j = phi_j + (i - j)(phi~_j - phi_j).
pub fn estimate_gradient(phi: f64, phi_tilde: f64, current_layer: usize, target_layer: usize) -> f64 {
    assert!(
        target_layer <= current_layer,
        "gradient estimate only reaches backwards"
    );
    if target_layer == current_layer {
        return phi;
    }
    let offset = (current_layer - target_layer) as f64;
    phi + offset * (phi_tilde - phi)
}

/// One retroactive gradient-descent sweep over layers j < current_layer:
/// u_j <- u_j - Phi_j / (beta0 (i-j)^f), clamped to the mode's control
/// bounds; layers farther back than the window are untouched.
///
/// The gradient estimates are anchored at the newest measurement pair and
/// extrapolated backwards: Phi_j = phi_i + (i-j)(phi~_{i-1} - phi_i).
/// phi~_{i-1} is the gradient of the current cost with respect to the
/// previous control, so (phi_i - phi~_{i-1}) is a backward difference of
/// the gradient in the layer index at fixed readout time. Anchoring on
/// fresh data keeps every estimate consistent with the circuit as it now
/// stands, and the whole sweep dies out once the feedback signal does.
/// The record must hold measurements through `current_layer`.
pub fn focqs_falloff_update(
    schedule: &mut ControlSchedule,
    record: &FeedbackRecord,
    current_layer: usize,
    params: &FocqsParams,
) {
    if current_layer == 0 {
        return;
    }
    let phi_now = record.phi[current_layer];
    let phi_tilde_prev = record.phi_tilde[current_layer - 1];
    for j in 0..current_layer.min(schedule.u.len()) {
        let offset = current_layer - j;
        if let Some(w) = params.window {
            if offset > w {
                continue;
            }
        }
        let grad = estimate_gradient(phi_now, phi_tilde_prev, current_layer, j);
        let step = grad / (params.beta0 * (offset as f64).powf(params.falloff));
        schedule.u[j] = params.mode.clamp(schedule.u[j] - step);
    }
}

// ---------------------------------------------------------------------------
// Run engine
// ---------------------------------------------------------------------------

/// Per-run simulation context: caches the cost diagonal, the feedback
/// observable, and the unit phase tables, so the hot loop does no
/// re-derivation.
pub(crate) struct Engine<'a> {
    n: usize,
    dt: f64,
    scheme: EvolutionScheme,
    mode: ControlMode,
    cost: &'a PauliSum,
    mixer: &'a PauliSum,
    observable: PauliSum,
    cost_diag: Option<Vec<f64>>,
    // cis(-theta c_k) table for the fixed unbounded-layer phase angle
    phase_full: Option<Vec<Complex64>>,
}

impl<'a> Engine<'a> {
    pub(crate) fn new(
        inst: &'a ProblemInstance,
        dt: f64,
        scheme: EvolutionScheme,
        mode: ControlMode,
    ) -> Result<Self> {
        if dt <= 0.0 {
            return Err(Error::InvalidArgument("dt must be positive".into()));
        }
        scheme.validate(inst.n)?;
        let observable = feedback_observable(&inst.mixer, &inst.cost)?;
        let trotter = scheme.kind != SchemeKind::DenseExponential;
        let cost_diag = if trotter {
            Some(inst.cost.diagonal()?)
        } else {
            None
        };
        let m = scheme.substeps as f64;
        // Both Trotter kinds apply the full-angle phase dt/m per substep.
        let phase_full = match (&cost_diag, mode) {
            (Some(diag), ControlMode::Unbounded) => {
                Some(diag.iter().map(|&c| phase_factor(c, dt / m)).collect())
            }
            _ => None,
        };
        Ok(Self {
            n: inst.n,
            dt,
            scheme,
            mode,
            cost: &inst.cost,
            mixer: &inst.mixer,
            observable,
            cost_diag,
            phase_full,
        })
    }

    pub(crate) fn initial_state(&self) -> Result<StateVector> {
        StateVector::mixer_ground(self.n)
    }

    /// Apply one control layer: e^{-i dt (u B + C)} unbounded, or
    /// e^{-i dt (u B + (1-u) C)} bounded.
    pub(crate) fn apply_control_layer(&self, state: &mut StateVector, u: f64) -> Result<()> {
        let cost_weight = match self.mode {
            ControlMode::Unbounded => 1.0,
            ControlMode::Bounded => 1.0 - u,
        };
        match self.scheme.kind {
            SchemeKind::FirstOrderTrotter => {
                // Mixer outermost; see StateVector::apply_layer_weighted.
                let m = self.scheme.substeps as f64;
                for _ in 0..self.scheme.substeps {
                    match &self.phase_full {
                        Some(table) => state.apply_phase_table(table),
                        None => state.apply_phase_with_diagonal(
                            self.cost_diag.as_ref().expect("diagonal cached"),
                            cost_weight * self.dt / m,
                        ),
                    }
                    state.apply_transverse_rotation(u * self.dt / m);
                }
            }
            SchemeKind::SecondOrderTrotter => {
                let m = self.scheme.substeps as f64;
                let diag = self.cost_diag.as_ref().expect("diagonal cached");
                for _ in 0..self.scheme.substeps {
                    state.apply_transverse_rotation(u * self.dt / (2.0 * m));
                    match &self.phase_full {
                        Some(table) => state.apply_phase_table(table),
                        None => state.apply_phase_with_diagonal(diag, cost_weight * self.dt / m),
                    }
                    state.apply_transverse_rotation(u * self.dt / (2.0 * m));
                }
            }
            SchemeKind::DenseExponential => {
                let h = self
                    .cost
                    .scale(Complex64::new(cost_weight, 0.0))
                    .add(&self.mixer.scale(Complex64::new(u, 0.0)))?;
                state.apply_dense_exponential(&h, self.dt)?;
            }
        }
        Ok(())
    }

    /// Rebuild |psi_i> from the mixer ground state with the current
    /// controls u_0..u_upto.
    pub(crate) fn prepare(&self, u: &[f64], upto: usize) -> Result<StateVector> {
        let mut state = self.initial_state()?;
        for &uj in &u[..=upto] {
            self.apply_control_layer(&mut state, uj)?;
        }
        Ok(state)
    }

    pub(crate) fn energy(&self, state: &StateVector) -> Result<f64> {
        match &self.cost_diag {
            Some(diag) => Ok(state
                .amplitudes()
                .iter()
                .zip(diag)
                .map(|(a, &c)| c * a.norm_sqr())
                .sum()),
            None => state.expectation(self.cost),
        }
    }

    pub(crate) fn phi(&self, state: &StateVector) -> Result<f64> {
        Ok(self.dt * state.expectation(&self.observable)?)
    }

    pub(crate) fn phi_tilde(&self, state: &StateVector, u_next: f64) -> Result<f64> {
        let mut probe = state.clone();
        match self.mode {
            ControlMode::Unbounded => probe.apply_transverse_rotation(u_next * self.dt),
            ControlMode::Bounded => {
                let diag = match &self.cost_diag {
                    Some(d) => d.clone(),
                    None => self.cost.diagonal()?,
                };
                apply_bounded_probe(&mut probe, &diag, u_next * self.dt);
            }
        }
        Ok(self.dt * probe.expectation(&self.observable)?)
    }
}

fn check_run_args(layers: usize, dt: f64) -> Result<()> {
    if layers == 0 {
        return Err(Error::InvalidArgument("layers must be >= 1".into()));
    }
    if dt <= 0.0 {
        return Err(Error::InvalidArgument("dt must be positive".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Run drivers
// ---------------------------------------------------------------------------

/// Plain feedback run: grow the circuit layer by layer, setting each new
/// control from the measured phi. The already-built prefix never changes,
/// so the state is carried forward; replaying the gate sequence from
/// scratch would produce bit-identical amplitudes. phi~ is measured and
/// recorded at every layer (it does not influence the controls here).
pub fn falqon_run(
    inst: &ProblemInstance,
    layers: usize,
    dt: f64,
    scheme: EvolutionScheme,
    law: ControlLaw,
) -> Result<(ControlSchedule, FeedbackRecord)> {
    check_run_args(layers, dt)?;
    let engine = Engine::new(inst, dt, scheme, law.mode())?;
    let mut u = vec![0.0; layers];
    let mut record = FeedbackRecord::default();
    let mut state = engine.initial_state()?;
    for i in 0..layers {
        engine.apply_control_layer(&mut state, u[i])?;
        let energy = engine.energy(&state)?;
        let phi = engine.phi(&state)?;
        let u_next = law.update(phi);
        let phi_tilde = engine.phi_tilde(&state, u_next)?;
        record.push(phi, phi_tilde, energy);
        if i + 1 < layers {
            u[i + 1] = u_next;
        }
    }
    Ok((
        ControlSchedule {
            u,
            dt,
            mode: law.mode(),
        },
        record,
    ))
}

/// Falling-off run: FALQON layer selection plus one retroactive
/// falling-off update sweep after every new layer. Earlier layers are
/// never remeasured; the update extrapolates the newest measurement pair
/// backwards and damps it by the layer distance, which is the variant's
/// defining approximation. The first-layer control is held at zero
/// throughout (the mixer ground state is a mixer eigenstate, so u_0 is a
/// pure gauge).
pub fn focqs_run(
    inst: &ProblemInstance,
    layers: usize,
    dt: f64,
    params: &FocqsParams,
    scheme: EvolutionScheme,
) -> Result<(ControlSchedule, FeedbackRecord)> {
    check_run_args(layers, dt)?;
    params.validate()?;
    let engine = Engine::new(inst, dt, scheme, params.mode)?;
    let law = match params.mode {
        ControlMode::Unbounded => ControlLaw::Unbounded,
        ControlMode::Bounded => ControlLaw::BoundedClipped,
    };
    let mut schedule = ControlSchedule {
        u: vec![0.0; layers],
        dt,
        mode: params.mode,
    };
    let mut record = FeedbackRecord::default();
    for i in 0..layers {
        let state = engine.prepare(&schedule.u, i)?;
        let energy = engine.energy(&state)?;
        let phi = engine.phi(&state)?;
        let u_next = law.update(phi);
        let phi_tilde = engine.phi_tilde(&state, u_next)?;
        record.push(phi, phi_tilde, energy);
        if i + 1 < layers {
            schedule.u[i + 1] = u_next;
        }
        focqs_falloff_update(&mut schedule, &record, i, params);
        schedule.u[0] = 0.0;
    }
    Ok((schedule, record))
}

/// Windowed run: after each new layer (past a warm-up), repeat
/// { remeasure phi/phi~ for every layer in the window on the *updated*
/// circuit, take one gradient step each } until the largest gradient
/// estimate drops below `grad_tolerance` or `inner_steps` sweeps have
/// been taken. The record keeps the original at-layer measurements.
#[allow(clippy::too_many_arguments)]
pub fn focqs_windowed_run(
    inst: &ProblemInstance,
    layers: usize,
    dt: f64,
    params: &FocqsParams,
    inner_steps: usize,
    grad_tolerance: f64,
    warmup_layers: usize,
    scheme: EvolutionScheme,
) -> Result<(ControlSchedule, FeedbackRecord)> {
    check_run_args(layers, dt)?;
    params.validate()?;
    let window = params.window.ok_or_else(|| {
        Error::InvalidArgument("the windowed variant requires a finite window".into())
    })?;
    if inner_steps == 0 {
        return Err(Error::InvalidArgument("inner_steps must be >= 1".into()));
    }
    let engine = Engine::new(inst, dt, scheme, params.mode)?;
    let law = match params.mode {
        ControlMode::Unbounded => ControlLaw::Unbounded,
        ControlMode::Bounded => ControlLaw::BoundedClipped,
    };
    let mut schedule = ControlSchedule {
        u: vec![0.0; layers],
        dt,
        mode: params.mode,
    };
    let mut record = FeedbackRecord::default();
    for i in 0..layers {
        let state = engine.prepare(&schedule.u, i)?;
        let energy = engine.energy(&state)?;
        let phi = engine.phi(&state)?;
        let u_next = law.update(phi);
        let phi_tilde = engine.phi_tilde(&state, u_next)?;
        record.push(phi, phi_tilde, energy);
        if i + 1 < layers {
            schedule.u[i + 1] = u_next;
        }
        if i < warmup_layers {
            continue;
        }
        for _ in 0..inner_steps {
            let lo = i.saturating_sub(window);
            let mut gradients = Vec::new();
            for j in lo..i {
                let psi_j = engine.prepare(&schedule.u, j)?;
                let ph = engine.phi(&psi_j)?;
                let pt = engine.phi_tilde(&psi_j, schedule.u[j + 1])?;
                gradients.push((j, estimate_gradient(ph, pt, i, j)));
            }
            if gradients.is_empty() {
                break;
            }
            let max_abs = gradients.iter().map(|(_, g)| g.abs()).fold(0.0, f64::max);
            if max_abs < grad_tolerance {
                break;
            }
            for (j, grad) in gradients {
                let offset = (i - j) as f64;
                let step = grad / (params.beta0 * offset.powf(params.falloff));
                schedule.u[j] = params.mode.clamp(schedule.u[j] - step);
            }
            schedule.u[0] = 0.0;
        }
    }
    Ok((schedule, record))
}

/// Iterative refinement of an existing smooth schedule: layer i's control
/// is initialized from `u0` (not from the feedback law), the phi~ probe
/// rotates by u0's *next* value, and the same falling-off updates are
/// applied retroactively. Chaining the output back in as the next `u0`
/// gives diminishing further refinements. Index 0 is never retro-updated.
pub fn iterative_focqs_run(
    inst: &ProblemInstance,
    u0: &ControlSchedule,
    layers: usize,
    dt: f64,
    params: &FocqsParams,
    scheme: EvolutionScheme,
) -> Result<(ControlSchedule, FeedbackRecord)> {
    check_run_args(layers, dt)?;
    params.validate()?;
    if u0.u.len() < layers {
        return Err(Error::ScheduleTooShort {
            got: u0.u.len(),
            need: layers,
        });
    }
    let engine = Engine::new(inst, dt, scheme, params.mode)?;
    let mut schedule = ControlSchedule {
        u: vec![0.0; layers],
        dt,
        mode: params.mode,
    };
    let mut record = FeedbackRecord::default();
    for i in 0..layers {
        schedule.u[i] = u0.u[i];
        let state = engine.prepare(&schedule.u, i)?;
        let energy = engine.energy(&state)?;
        let phi = engine.phi(&state)?;
        // The probe angle at the last layer has no downstream consumer;
        // fall back to zero when u0 ends exactly at the requested depth.
        let probe_next = u0.u.get(i + 1).copied().unwrap_or(0.0);
        let phi_tilde = engine.phi_tilde(&state, probe_next)?;
        record.push(phi, phi_tilde, energy);
        focqs_falloff_update(&mut schedule, &record, i, params);
        schedule.u[0] = u0.u[0];
    }
    Ok((schedule, record))
}

// ---------------------------------------------------------------------------
// Schedule files
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub algorithm: String,
    pub params: serde_json::Value,
    pub instance: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScheduleFile {
    format_version: u32,
    dt: f64,
    mode: ControlMode,
    u: Vec<f64>,
    provenance: Provenance,
}

pub fn schedule_to_json(schedule: &ControlSchedule, provenance: &Provenance) -> Result<String> {
    let file = ScheduleFile {
        format_version: SCHEDULE_FORMAT_VERSION,
        dt: schedule.dt,
        mode: schedule.mode,
        u: schedule.u.clone(),
        provenance: provenance.clone(),
    };
    let mut s = serde_json::to_string_pretty(&file)?;
    s.push('\n');
    Ok(s)
}

pub fn schedule_from_json(text: &str) -> Result<(ControlSchedule, Provenance)> {
    let file: ScheduleFile = serde_json::from_str(text)?;
    if file.format_version != SCHEDULE_FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported schedule format_version {}",
            file.format_version
        )));
    }
    Ok((
        ControlSchedule {
            u: file.u,
            dt: file.dt,
            mode: file.mode,
        },
        file.provenance,
    ))
}

pub fn write_schedule(path: &Path, schedule: &ControlSchedule, provenance: &Provenance) -> Result<()> {
    std::fs::write(path, schedule_to_json(schedule, provenance)?)?;
    Ok(())
}

pub fn read_schedule(path: &Path) -> Result<(ControlSchedule, Provenance)> {
    schedule_from_json(&std::fs::read_to_string(path)?)
}
