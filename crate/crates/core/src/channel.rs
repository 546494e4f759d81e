//! Forward and reverse diffusion for one continuously monitored Pauli word.
//!
//! The forward flow on `[0, T]` is the linear unravelling
//! `d psi = -p/2 psi dt + sqrt(p) L psi dW` with jump operator `L = P`
//! (dissipative) or `L = i P` (conserving), driven by the measurement signal
//! `dW = sqrt(p) <L + L^dag> dt + dW-hat`. The reverse flow on `[T, 2T]` adds
//! the bridge drift `-X/(2T - t) sqrt(p) L dt`, where `X` starts from the
//! recorded `W(T)` and is pinned to zero at `2T`; it undoes the forward
//! trajectory path by path.
//!
//! Because every generator lies in `span{I, P}`, the per-step exponentials
//! commute and telescope into closed-form propagators; the `Exact` stepper
//! uses them directly, while `EulerMaruyama` keeps the literal first-order
//! discretization for convergence studies.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Needed for f64 math in the pure no_std graph; redundant (and flagged
// unused) whenever some enabled feature links std into the build.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{CoreError, Result};
use crate::expm::{apply_exp_affine_pauli, exp_affine_pauli};
use crate::bridge::BridgeState;
use crate::noise::{NoiseStream, StreamId, CHANNEL_FORWARD, CHANNEL_REVERSE};
use crate::operator::Operator;
use crate::pauli::{Mode, PauliString};
use crate::record::MeasurementRecord;
use crate::state::{fidelity, QuantumState};

/// Parameters of one monitored Pauli channel.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChannelConfig {
    /// Monitored Pauli word `P`.
    pub pauli: PauliString,
    pub mode: Mode,
    /// Noise rate `p >= 0`.
    pub p: f64,
    /// Forward horizon `T`; the reverse pass runs on `[T, 2T]`.
    pub horizon: f64,
    pub dt: f64,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.p.is_finite() || self.p < 0.0 {
            return Err(CoreError::InvalidConfig("p must be finite and nonnegative"));
        }
        if !self.horizon.is_finite() || self.horizon <= 0.0 {
            return Err(CoreError::InvalidConfig("horizon must be finite and positive"));
        }
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(CoreError::InvalidConfig("dt must be finite and positive"));
        }
        let n = (self.horizon / self.dt).round();
        if n < 1.0 || (n * self.dt - self.horizon).abs() > 1e-9 * self.horizon.max(1.0) {
            return Err(CoreError::InvalidConfig(
                "horizon must be an integer number of dt steps",
            ));
        }
        Ok(())
    }

    /// Steps per horizon segment.
    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    pub fn dim(&self) -> usize {
        self.pauli.dim()
    }
}

/// Time discretization of the flows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Stepper {
    /// Per-step closed-form exponential; telescopes to the analytic solution.
    #[default]
    Exact,
    /// Literal first-order scheme, for convergence studies.
    EulerMaruyama,
}

/// One simulated trajectory segment: sampled states, the full measurement
/// record, and (when a reference state was supplied) the terminal fidelity.
#[derive(Debug, Clone)]
pub struct TrajectoryResult {
    /// Times of the sampled states; always includes both segment endpoints.
    pub times: Vec<f64>,
    pub states: Vec<QuantumState>,
    pub record: MeasurementRecord,
    pub terminal_fidelity: Option<f64>,
}

impl TrajectoryResult {
    pub fn final_state(&self) -> &QuantumState {
        self.states.last().expect("at least the initial state")
    }
}

/// A forward segment followed by its reversal.
#[derive(Debug, Clone)]
pub struct CycleResult {
    pub forward: TrajectoryResult,
    pub reverse: TrajectoryResult,
}

/// Noise coefficient multiplying `P` for a real increment: the jump operator
/// is `P` itself in dissipative mode and `i P` in conserving mode.
pub(crate) fn jump_coeff(mode: Mode, scale: f64) -> Complex64 {
    match mode {
        Mode::Dissipative => Complex64::new(scale, 0.0),
        Mode::Conserving => Complex64::new(0.0, scale),
    }
}

/// Draw one measurement increment `dW = sqrt(strength) <L + L^dag> dt + dW-hat`.
///
/// In conserving mode `L + L^dag = 0`, so the signal is a pure Wiener
/// increment; in dissipative mode it drifts with the normalized expectation
/// of the monitored word.
pub fn measurement_increment(
    state: &QuantumState,
    word: &PauliString,
    mode: Mode,
    strength: f64,
    dt: f64,
    stream: &mut NoiseStream,
) -> Result<f64> {
    let wiener = stream.wiener_increment(dt);
    match mode {
        Mode::Conserving => Ok(wiener),
        Mode::Dissipative => {
            let ex = state.pauli_expectation(word)?;
            Ok(2.0 * strength.sqrt() * ex * dt + wiener)
        }
    }
}

/// Scalar decay rate of the exact per-step exponential: the dissipative flow
/// contracts by `exp(-p dt)` per step, the conserving flow is unitary.
fn exact_scalar_rate(mode: Mode, p: f64) -> f64 {
    match mode {
        Mode::Dissipative => -p,
        Mode::Conserving => 0.0,
    }
}

/// One forward step.
pub fn forward_step(
    state: &mut QuantumState,
    cfg: &ChannelConfig,
    stepper: Stepper,
    dw: f64,
) -> Result<()> {
    let b = jump_coeff(cfg.mode, cfg.p.sqrt() * dw);
    match stepper {
        Stepper::EulerMaruyama => {
            let a = Complex64::new(1.0 - 0.5 * cfg.p * cfg.dt, 0.0);
            cfg.pauli.affine_apply(a, b, state.amplitudes_mut());
            Ok(())
        }
        Stepper::Exact => {
            let a = Complex64::new(exact_scalar_rate(cfg.mode, cfg.p) * cfg.dt, 0.0);
            apply_exp_affine_pauli(state, a, b, &cfg.pauli)
        }
    }
}

/// One reverse step; advances the bridge alongside the state.
pub fn reverse_step(
    state: &mut QuantumState,
    cfg: &ChannelConfig,
    stepper: Stepper,
    bridge: &mut BridgeState,
    dw: f64,
) -> Result<()> {
    match stepper {
        Stepper::EulerMaruyama => {
            let gap = bridge.gap();
            let x = bridge.value().re;
            let b = jump_coeff(cfg.mode, cfg.p.sqrt() * (dw - x * (cfg.dt / gap)));
            let a = Complex64::new(1.0 - 0.5 * cfg.p * cfg.dt, 0.0);
            cfg.pauli.affine_apply(a, b, state.amplitudes_mut());
            bridge.step(dw, cfg.dt)?;
            Ok(())
        }
        Stepper::Exact => {
            let dx = bridge.step(dw, cfg.dt)?.re;
            let a = Complex64::new(exact_scalar_rate(cfg.mode, cfg.p) * cfg.dt, 0.0);
            let b = jump_coeff(cfg.mode, cfg.p.sqrt() * dx);
            apply_exp_affine_pauli(state, a, b, &cfg.pauli)
        }
    }
}

/// Forward trajectory on `[0, T]`, storing every `stride`-th state (endpoints
/// always included). The terminal fidelity is measured against `psi0`.
pub fn run_forward_sampled(
    cfg: &ChannelConfig,
    psi0: &QuantumState,
    stepper: Stepper,
    trajectory: u64,
    stride: usize,
) -> Result<TrajectoryResult> {
    cfg.validate()?;
    if psi0.dim() != cfg.dim() {
        return Err(CoreError::DimensionMismatch(cfg.dim(), psi0.dim()));
    }
    let stride = stride.max(1);
    let steps = cfg.steps();
    let mut state = psi0.clone();
    let mut record = MeasurementRecord::new(cfg.dt, 1)?;
    let mut stream = NoiseStream::new(cfg.seed, StreamId { trajectory, channel: CHANNEL_FORWARD });
    let mut times = vec![0.0];
    let mut states = vec![state.clone()];
    for n in 0..steps {
        let dw = measurement_increment(&state, &cfg.pauli, cfg.mode, cfg.p, cfg.dt, &mut stream)?;
        forward_step(&mut state, cfg, stepper, dw)?;
        state.renormalize()?;
        record.push(&[dw])?;
        let idx = n + 1;
        if idx == steps || idx % stride == 0 {
            times.push(idx as f64 * cfg.dt);
            states.push(state.clone());
        }
    }
    let terminal_fidelity = Some(fidelity(&state, psi0)?);
    Ok(TrajectoryResult { times, states, record, terminal_fidelity })
}

pub fn run_forward(
    cfg: &ChannelConfig,
    psi0: &QuantumState,
    stepper: Stepper,
    trajectory: u64,
) -> Result<TrajectoryResult> {
    run_forward_sampled(cfg, psi0, stepper, trajectory, 1)
}

/// Reverse trajectory on `[T, 2T]` from a starting state and the recorded
/// terminal Wiener value `w_horizon = W(T)`. Terminal fidelity is measured
/// against `score` when given (normally the forward initial state).
pub fn run_reverse_sampled(
    cfg: &ChannelConfig,
    start: &QuantumState,
    w_horizon: f64,
    stepper: Stepper,
    trajectory: u64,
    score: Option<&QuantumState>,
    stride: usize,
) -> Result<TrajectoryResult> {
    cfg.validate()?;
    if start.dim() != cfg.dim() {
        return Err(CoreError::DimensionMismatch(cfg.dim(), start.dim()));
    }
    let stride = stride.max(1);
    let steps = cfg.steps();
    let t0 = cfg.horizon;
    let mut state = start.clone();
    let mut bridge = BridgeState::real(w_horizon, t0, 2.0 * cfg.horizon, 0.0);
    let mut record = MeasurementRecord::new(cfg.dt, 1)?;
    let mut stream = NoiseStream::new(cfg.seed, StreamId { trajectory, channel: CHANNEL_REVERSE });
    let mut times = vec![t0];
    let mut states = vec![state.clone()];
    for n in 0..steps {
        let dw = measurement_increment(&state, &cfg.pauli, cfg.mode, cfg.p, cfg.dt, &mut stream)?;
        reverse_step(&mut state, cfg, stepper, &mut bridge, dw)?;
        state.renormalize()?;
        record.push(&[dw])?;
        let idx = n + 1;
        if idx == steps || idx % stride == 0 {
            times.push(t0 + idx as f64 * cfg.dt);
            states.push(state.clone());
        }
    }
    let terminal_fidelity = score.map(|s| fidelity(&state, s)).transpose()?;
    Ok(TrajectoryResult { times, states, record, terminal_fidelity })
}

/// Forward segment followed by its reversal; the reverse bridge starts from
/// the forward record's `W(T)` and the recovery is scored against `psi0`.
pub fn run_cycle_sampled(
    cfg: &ChannelConfig,
    psi0: &QuantumState,
    stepper: Stepper,
    trajectory: u64,
    stride: usize,
) -> Result<CycleResult> {
    let forward = run_forward_sampled(cfg, psi0, stepper, trajectory, stride)?;
    let w_horizon = forward.record.cumulative()[0];
    let reverse = run_reverse_sampled(
        cfg,
        forward.final_state(),
        w_horizon,
        stepper,
        trajectory,
        Some(psi0),
        stride,
    )?;
    Ok(CycleResult { forward, reverse })
}

pub fn run_cycle(
    cfg: &ChannelConfig,
    psi0: &QuantumState,
    stepper: Stepper,
    trajectory: u64,
) -> Result<CycleResult> {
    run_cycle_sampled(cfg, psi0, stepper, trajectory, 1)
}

/// Closed-form forward propagator given the Wiener value `w = W(t)`:
/// `exp(-p t + sqrt(p) w P)` in dissipative mode, the unitary
/// `exp(i sqrt(p) w P)` in conserving mode.
pub fn forward_propagator(cfg: &ChannelConfig, w: f64, t: f64) -> Result<Operator> {
    let a = Complex64::new(exact_scalar_rate(cfg.mode, cfg.p) * t, 0.0);
    let b = jump_coeff(cfg.mode, cfg.p.sqrt() * w);
    exp_affine_pauli(a, b, &cfg.pauli)
}

/// `forward_propagator` applied to a state.
pub fn forward_exact(
    cfg: &ChannelConfig,
    psi0: &QuantumState,
    w: f64,
    t: f64,
) -> Result<QuantumState> {
    let mut out = psi0.clone();
    let a = Complex64::new(exact_scalar_rate(cfg.mode, cfg.p) * t, 0.0);
    let b = jump_coeff(cfg.mode, cfg.p.sqrt() * w);
    apply_exp_affine_pauli(&mut out, a, b, &cfg.pauli)?;
    Ok(out)
}

/// Closed-form reverse propagator after `elapsed = t - T` of reverse flow,
/// given the current bridge value `x_t` and its start `x_start = W(T)`:
/// `exp(-p elapsed + sqrt(p) (x_t - x_start) L)`.
pub fn reverse_propagator(
    cfg: &ChannelConfig,
    x_t: f64,
    x_start: f64,
    elapsed: f64,
) -> Result<Operator> {
    let a = Complex64::new(exact_scalar_rate(cfg.mode, cfg.p) * elapsed, 0.0);
    let b = jump_coeff(cfg.mode, cfg.p.sqrt() * (x_t - x_start));
    exp_affine_pauli(a, b, &cfg.pauli)
}

/// Closed-form reverse solution at `t = T + elapsed`, starting the whole
/// cycle from `psi0` with forward Wiener value `w_horizon = W(T)`.
pub fn reverse_exact(
    cfg: &ChannelConfig,
    psi0: &QuantumState,
    x_t: f64,
    w_horizon: f64,
    elapsed: f64,
) -> Result<QuantumState> {
    let mut out = forward_exact(cfg, psi0, w_horizon, cfg.horizon)?;
    let a = Complex64::new(exact_scalar_rate(cfg.mode, cfg.p) * elapsed, 0.0);
    let b = jump_coeff(cfg.mode, cfg.p.sqrt() * (x_t - w_horizon));
    apply_exp_affine_pauli(&mut out, a, b, &cfg.pauli)?;
    Ok(out)
}
