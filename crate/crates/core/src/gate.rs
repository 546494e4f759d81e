//! Diffusion-driven gates: steering pure measurement noise into a target
//! unitary `G(theta) = cos(theta) I - i sin(theta) P`.
//!
//! This is the conserving reverse flow with the bridge recentred: instead of
//! returning to zero, `Y(t) = theta/sqrt(p) + X(t)` starts at `theta/sqrt(p)`
//! and is pinned to zero at `2T`, so the accumulated rotation is exactly
//! `exp(-i theta P)`. The drift `-(Y/(2T - t)) sqrt(p) P` has an integrable
//! singularity at the pin; the engine reports the largest instantaneous
//! Hamiltonian strength it actually applied so callers can see how hard the
//! final steps pushed.

use alloc::vec;

use num_complex::Complex64;
// Needed for f64 math in the pure no_std graph; redundant (and flagged
// unused) whenever some enabled feature links std into the build.
#[allow(unused_imports)]
use num_traits::Float;

use crate::bridge::BridgeState;
use crate::channel::{measurement_increment, Stepper, TrajectoryResult};
use crate::error::{CoreError, Result};
use crate::expm::apply_exp_affine_pauli;
use crate::noise::{NoiseStream, StreamId, CHANNEL_PARAMS, CHANNEL_REVERSE};
use crate::pauli::{Mode, PauliString};
use crate::record::MeasurementRecord;
use crate::state::{fidelity, QuantumState};

/// Parameters of one diffusion-driven gate run on `[T, 2T]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GateConfig {
    /// Rotation angle of the target `G(theta)`.
    pub theta: f64,
    /// Rotation axis; any Pauli word.
    pub pauli: PauliString,
    /// Noise rate; must be strictly positive, since the bridge start is
    /// `theta / sqrt(p)`.
    pub p: f64,
    pub horizon: f64,
    pub dt: f64,
    pub seed: u64,
}

impl GateConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.p.is_finite() || self.p <= 0.0 {
            return Err(CoreError::InvalidConfig("gate requires p > 0"));
        }
        if !self.theta.is_finite() {
            return Err(CoreError::InvalidConfig("theta must be finite"));
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

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }
}

/// Distribution over gate angles for manifold runs.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ThetaSampler {
    Fixed(f64),
    Uniform { lo: f64, hi: f64 },
}

impl ThetaSampler {
    /// Deterministic draw for one trajectory (its own noise channel, so gate
    /// angles never perturb the measurement record).
    pub fn sample(&self, seed: u64, trajectory: u64) -> f64 {
        match *self {
            ThetaSampler::Fixed(theta) => theta,
            ThetaSampler::Uniform { lo, hi } => {
                let mut stream =
                    NoiseStream::new(seed, StreamId { trajectory, channel: CHANNEL_PARAMS });
                lo + stream.uniform() * (hi - lo)
            }
        }
    }
}

/// `G(theta) psi0 = cos(theta) psi0 - i sin(theta) P psi0`.
pub fn gate_target(theta: f64, word: &PauliString, psi0: &QuantumState) -> Result<QuantumState> {
    if word.dim() != psi0.dim() {
        return Err(CoreError::DimensionMismatch(word.dim(), psi0.dim()));
    }
    let mut out = psi0.clone();
    word.affine_apply(
        Complex64::new(theta.cos(), 0.0),
        Complex64::new(0.0, -theta.sin()),
        out.amplitudes_mut(),
    );
    Ok(out)
}

/// One gate trajectory: the realized angle, the path, and the largest
/// Hamiltonian strength `sqrt(p) |Y| / (2T - t)` applied along it.
#[derive(Debug, Clone)]
pub struct GateTrajectory {
    pub theta: f64,
    pub result: TrajectoryResult,
    pub max_drift_norm: f64,
}

/// Run one gate trajectory. The terminal fidelity is scored against
/// `gate_target(theta)`.
pub fn run_gate(
    cfg: &GateConfig,
    psi0: &QuantumState,
    stepper: Stepper,
    trajectory: u64,
) -> Result<GateTrajectory> {
    run_gate_sampled(cfg, psi0, stepper, trajectory, 1)
}

pub fn run_gate_sampled(
    cfg: &GateConfig,
    psi0: &QuantumState,
    stepper: Stepper,
    trajectory: u64,
    stride: usize,
) -> Result<GateTrajectory> {
    cfg.validate()?;
    if psi0.dim() != cfg.pauli.dim() {
        return Err(CoreError::DimensionMismatch(cfg.pauli.dim(), psi0.dim()));
    }
    let stride = stride.max(1);
    let steps = cfg.steps();
    let t0 = cfg.horizon;
    let sp = cfg.p.sqrt();
    let mut state = psi0.clone();
    let mut bridge = BridgeState::real(cfg.theta / sp, t0, 2.0 * cfg.horizon, 0.0);
    let mut record = MeasurementRecord::new(cfg.dt, 1)?;
    let mut stream = NoiseStream::new(cfg.seed, StreamId { trajectory, channel: CHANNEL_REVERSE });
    let mut times = vec![t0];
    let mut states = vec![state.clone()];
    let mut max_drift_norm: f64 = 0.0;
    for n in 0..steps {
        // Conserving coupling: the signal is a pure Wiener increment.
        let dw = measurement_increment(
            &state,
            &cfg.pauli,
            Mode::Conserving,
            cfg.p,
            cfg.dt,
            &mut stream,
        )?;
        let y = bridge.value().re;
        let gap = bridge.gap();
        max_drift_norm = max_drift_norm.max(sp * y.abs() / gap);
        match stepper {
            Stepper::EulerMaruyama => {
                let a = Complex64::new(1.0 - 0.5 * cfg.p * cfg.dt, 0.0);
                let b = Complex64::new(0.0, sp * (dw - y * (cfg.dt / gap)));
                cfg.pauli.affine_apply(a, b, state.amplitudes_mut());
                bridge.step(dw, cfg.dt)?;
            }
            Stepper::Exact => {
                let dy = bridge.step(dw, cfg.dt)?.re;
                apply_exp_affine_pauli(
                    &mut state,
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, sp * dy),
                    &cfg.pauli,
                )?;
            }
        }
        state.renormalize()?;
        record.push(&[dw])?;
        let idx = n + 1;
        if idx == steps || idx % stride == 0 {
            times.push(t0 + idx as f64 * cfg.dt);
            states.push(state.clone());
        }
    }
    let target = gate_target(cfg.theta, &cfg.pauli, psi0)?;
    let terminal_fidelity = Some(fidelity(&state, &target)?);
    Ok(GateTrajectory {
        theta: cfg.theta,
        result: TrajectoryResult { times, states, record, terminal_fidelity },
        max_drift_norm,
    })
}
