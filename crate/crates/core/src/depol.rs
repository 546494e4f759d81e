//! Single-qubit depolarizing noise: three simultaneously monitored Pauli
//! channels, the second-order Magnus surrogate of the forward flow, and the
//! bridge-driven reversal.
//!
//! Forward, the state obeys
//! `d psi = -p/2 psi dt + sum_k sqrt(p/3) L_k psi dW_k`, `L_k = sigma_k`
//! (dissipative) or `i sigma_k` (conserving). The channels do not commute, so
//! there is no closed form; the tractable surrogate keeps the Magnus
//! expansion through the pairwise Lévy areas:
//!
//! `F2(t) = exp( -p t I + sqrt(p/3) sum_k sigma_k W_k
//!               + i (2p/3) (sigma_1 S_23 + sigma_2 S_31 + sigma_3 S_12) )`
//!
//! (conserving: no scalar decay, `i sqrt(p/3) W_k` and `-i (2p/3) S` terms).
//!
//! The reversal integrates the matching truncated flow, driven by three
//! complex bridges `dX_k = -X_k/(2T - t) dt + gamma dW_k` that start from the
//! Magnus data at `T` and pin to zero at `2T`:
//!
//! `d phi = D phi dt + sum_k H_k phi dX_k`,
//! `H_k = sigma_k + i sum_{j,l} eps_{jkl} (X_j - X_j(T)) sigma_l`,
//!
//! with the scalar `D` collecting the Itô quadratic terms. Pinning makes the
//! reversal exact up to the Magnus truncation, so recovery fidelities behave
//! like `1 - O((pT)^3)`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Needed for f64 math in the pure no_std graph; redundant (and flagged
// unused) whenever some enabled feature links std into the build.
#[allow(unused_imports)]
use num_traits::Float;

use crate::bridge::BridgeState;
use crate::channel::{measurement_increment, TrajectoryResult};
use crate::error::{CoreError, Result};
use crate::expm::{apply_exp_pauli_vector, exp_pauli_vector};
use crate::noise::{NoiseStream, StreamId, CHANNEL_FORWARD, CHANNEL_REVERSE};
use crate::operator::Operator;
use crate::pauli::{Axis, Mode, PauliString};
use crate::record::{LevyAreas, MeasurementRecord};
use crate::state::{fidelity, QuantumState};

/// Parameters of the depolarizing channel.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DepolarizingConfig {
    /// Total depolarizing rate `p`; each Pauli channel carries `p/3`.
    pub p: f64,
    pub mode: Mode,
    /// Forward horizon `T`; the reversal runs on `[T, 2T]`.
    pub horizon: f64,
    pub dt: f64,
    pub seed: u64,
}

impl DepolarizingConfig {
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

    /// The reversal is only meaningful in the weak-noise window `p T < 1`.
    pub fn validate_reverse(&self) -> Result<()> {
        self.validate()?;
        if self.p * self.horizon >= 1.0 {
            return Err(CoreError::InvalidConfig("reversal requires p * horizon < 1"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    /// Bridge coupling: `sqrt(p/3) + i 2p/3` dissipative,
    /// `sqrt(p/3) - 2p/3` conserving.
    pub fn bridge_coupling(&self) -> Complex64 {
        let root = (self.p / 3.0).sqrt();
        match self.mode {
            Mode::Dissipative => Complex64::new(root, 2.0 * self.p / 3.0),
            Mode::Conserving => Complex64::new(root - 2.0 * self.p / 3.0, 0.0),
        }
    }
}

fn sigma_words() -> [PauliString; 3] {
    [
        PauliString::single(Axis::X),
        PauliString::single(Axis::Y),
        PauliString::single(Axis::Z),
    ]
}

/// In-place single-qubit `amps <- (a I + sum_k c_k sigma_k) amps`.
fn combine_single_qubit(amps: &mut [Complex64], a: Complex64, c: [Complex64; 3]) {
    debug_assert_eq!(amps.len(), 2);
    let i_unit = Complex64::new(0.0, 1.0);
    let (a0, a1) = (amps[0], amps[1]);
    amps[0] = (a + c[2]) * a0 + (c[0] - i_unit * c[1]) * a1;
    amps[1] = (c[0] + i_unit * c[1]) * a0 + (a - c[2]) * a1;
}

/// One forward Euler step given the three increments.
pub fn forward_depol_step(state: &mut QuantumState, cfg: &DepolarizingConfig, dw: [f64; 3]) {
    let root = (cfg.p / 3.0).sqrt();
    let coeff = |x: f64| match cfg.mode {
        Mode::Dissipative => Complex64::new(root * x, 0.0),
        Mode::Conserving => Complex64::new(0.0, root * x),
    };
    let a = Complex64::new(1.0 - 0.5 * cfg.p * cfg.dt, 0.0);
    combine_single_qubit(
        state.amplitudes_mut(),
        a,
        [coeff(dw[0]), coeff(dw[1]), coeff(dw[2])],
    );
}

/// Forward trajectory on `[0, T]` (Euler-Maruyama; the channels do not
/// commute, so there is no per-step closed form). The record tracks all three
/// channels and their Lévy areas.
pub fn run_depol_forward_sampled(
    cfg: &DepolarizingConfig,
    psi0: &QuantumState,
    trajectory: u64,
    stride: usize,
) -> Result<TrajectoryResult> {
    cfg.validate()?;
    if psi0.dim() != 2 {
        return Err(CoreError::DimensionMismatch(2, psi0.dim()));
    }
    let stride = stride.max(1);
    let steps = cfg.steps();
    let words = sigma_words();
    let mut state = psi0.clone();
    let mut record = MeasurementRecord::with_levy_areas(cfg.dt)?;
    let mut streams: Vec<NoiseStream> = (0..3)
        .map(|k| NoiseStream::new(cfg.seed, StreamId { trajectory, channel: CHANNEL_FORWARD + k }))
        .collect();
    let mut times = vec![0.0];
    let mut states = vec![state.clone()];
    for n in 0..steps {
        let mut dw = [0.0; 3];
        for k in 0..3 {
            dw[k] = measurement_increment(
                &state,
                &words[k],
                cfg.mode,
                cfg.p / 3.0,
                cfg.dt,
                &mut streams[k],
            )?;
        }
        forward_depol_step(&mut state, cfg, dw);
        state.renormalize()?;
        record.push(&dw)?;
        let idx = n + 1;
        if idx == steps || idx % stride == 0 {
            times.push(idx as f64 * cfg.dt);
            states.push(state.clone());
        }
    }
    let terminal_fidelity = Some(fidelity(&state, psi0)?);
    Ok(TrajectoryResult { times, states, record, terminal_fidelity })
}

pub fn run_depol_forward(
    cfg: &DepolarizingConfig,
    psi0: &QuantumState,
    trajectory: u64,
) -> Result<TrajectoryResult> {
    run_depol_forward_sampled(cfg, psi0, trajectory, 1)
}

/// Magnus-2 exponent coefficients `(c0, c)` such that the surrogate
/// propagator is `exp(c0 I + sum_k c_k sigma_k)`.
pub fn magnus2_exponent(
    cfg: &DepolarizingConfig,
    w: [f64; 3],
    levy: LevyAreas,
    t: f64,
) -> (Complex64, [Complex64; 3]) {
    let root = (cfg.p / 3.0).sqrt();
    let area = 2.0 * cfg.p / 3.0;
    match cfg.mode {
        Mode::Dissipative => {
            let c0 = Complex64::new(-cfg.p * t, 0.0);
            let c = core::array::from_fn(|k| Complex64::new(root * w[k], area * levy.complement(k)));
            (c0, c)
        }
        Mode::Conserving => {
            let c0 = Complex64::new(0.0, 0.0);
            let c = core::array::from_fn(|k| {
                Complex64::new(0.0, root * w[k] - area * levy.complement(k))
            });
            (c0, c)
        }
    }
}

/// Dense Magnus-2 forward surrogate `F2(t)`.
pub fn magnus2_propagator(
    cfg: &DepolarizingConfig,
    w: [f64; 3],
    levy: LevyAreas,
    t: f64,
) -> Result<Operator> {
    let (c0, c) = magnus2_exponent(cfg, w, levy, t);
    exp_pauli_vector(c0, c)
}

/// `F2(t)` applied to a state.
pub fn magnus2_solution(
    cfg: &DepolarizingConfig,
    psi0: &QuantumState,
    w: [f64; 3],
    levy: LevyAreas,
    t: f64,
) -> Result<QuantumState> {
    let (c0, c) = magnus2_exponent(cfg, w, levy, t);
    let mut out = psi0.clone();
    apply_exp_pauli_vector(&mut out, c0, c)?;
    Ok(out)
}

/// Values `X_k(T)` seeding the reverse bridges, from the forward record's
/// terminal Wiener sums and Lévy areas. These are exactly the `sigma_k`
/// coefficients of the Magnus-2 exponent in dissipative mode, and `-i` times
/// them in conserving mode (real numbers there).
pub fn reverse_bridge_start(
    cfg: &DepolarizingConfig,
    w: [f64; 3],
    levy: LevyAreas,
) -> [Complex64; 3] {
    let root = (cfg.p / 3.0).sqrt();
    let area = 2.0 * cfg.p / 3.0;
    match cfg.mode {
        Mode::Dissipative => {
            core::array::from_fn(|k| Complex64::new(root * w[k], area * levy.complement(k)))
        }
        Mode::Conserving => {
            core::array::from_fn(|k| Complex64::new(root * w[k] - area * levy.complement(k), 0.0))
        }
    }
}

/// The three bridges and the frozen start values driving one reversal.
#[derive(Debug, Clone)]
pub struct DepolReverseDrift {
    bridges: [BridgeState; 3],
    x_horizon: [Complex64; 3],
}

impl DepolReverseDrift {
    pub fn new(cfg: &DepolarizingConfig, w: [f64; 3], levy: LevyAreas) -> Self {
        let x0 = reverse_bridge_start(cfg, w, levy);
        let gamma = cfg.bridge_coupling();
        let bridges = core::array::from_fn(|k| {
            BridgeState::new(
                x0[k],
                cfg.horizon,
                2.0 * cfg.horizon,
                Complex64::new(0.0, 0.0),
                gamma,
            )
        });
        DepolReverseDrift { bridges, x_horizon: x0 }
    }

    /// Current displacements `X_k(t) - X_k(T)`.
    pub fn displacements(&self) -> [Complex64; 3] {
        core::array::from_fn(|k| self.bridges[k].value() - self.x_horizon[k])
    }

    pub fn bridge(&self, k: usize) -> &BridgeState {
        &self.bridges[k]
    }
}

/// One Euler step of the truncated reverse flow. `dw` are the three raw
/// measurement increments; the bridges convert them into `dX_k` through the
/// complex coupling, and the state picks up
/// `D phi dt + sum_l (dX_l + i (d x dX)_l) sigma_l phi` (dissipative; the
/// conserving coefficients are `i (dX_l - (d x dX)_l)`), with
/// `d_j = X_j - X_j(T)` evaluated before the step.
pub fn reverse_depol_step(
    state: &mut QuantumState,
    cfg: &DepolarizingConfig,
    drift: &mut DepolReverseDrift,
    dw: [f64; 3],
) -> Result<()> {
    let d = drift.displacements();
    let mut dx = [Complex64::new(0.0, 0.0); 3];
    for k in 0..3 {
        dx[k] = drift.bridges[k].step(dw[k], cfg.dt)?;
    }
    // Cross product (d x dX)_l, cyclic.
    let cross = [
        d[1] * dx[2] - d[2] * dx[1],
        d[2] * dx[0] - d[0] * dx[2],
        d[0] * dx[1] - d[1] * dx[0],
    ];
    let i_unit = Complex64::new(0.0, 1.0);
    let d_sq: Complex64 = d.iter().map(|v| v * v).sum();
    let g2 = {
        let g = cfg.bridge_coupling();
        g * g
    };
    let (scalar_rate, coeffs) = match cfg.mode {
        Mode::Dissipative => {
            let rate = Complex64::new(-cfg.p, 0.0)
                + g2 * 0.5 * (Complex64::new(3.0, 0.0) - 2.0 * d_sq);
            let c = core::array::from_fn(|l| dx[l] + i_unit * cross[l]);
            (rate, c)
        }
        Mode::Conserving => {
            let rate = -g2 * 0.5 * (Complex64::new(3.0, 0.0) + 2.0 * d_sq);
            let c = core::array::from_fn(|l| i_unit * (dx[l] - cross[l]));
            (rate, c)
        }
    };
    let a = Complex64::new(1.0, 0.0) + scalar_rate * cfg.dt;
    combine_single_qubit(state.amplitudes_mut(), a, coeffs);
    Ok(())
}

/// Closed-form reverse surrogate after elapsed reverse time, given current
/// displacements `d_k = X_k(t) - X_k(T)`:
/// `exp(-p elapsed I + sum d_k sigma_k)` (dissipative) or
/// `exp(i sum d_k sigma_k)` (conserving).
pub fn reverse_magnus2_propagator(
    cfg: &DepolarizingConfig,
    d: [Complex64; 3],
    elapsed: f64,
) -> Result<Operator> {
    let i_unit = Complex64::new(0.0, 1.0);
    match cfg.mode {
        Mode::Dissipative => exp_pauli_vector(Complex64::new(-cfg.p * elapsed, 0.0), d),
        Mode::Conserving => exp_pauli_vector(
            Complex64::new(0.0, 0.0),
            [i_unit * d[0], i_unit * d[1], i_unit * d[2]],
        ),
    }
}

/// Reverse trajectory on `[T, 2T]` from a starting state and the forward
/// record's terminal data.
pub fn run_depol_reverse_sampled(
    cfg: &DepolarizingConfig,
    start: &QuantumState,
    w_horizon: [f64; 3],
    levy: LevyAreas,
    trajectory: u64,
    score: Option<&QuantumState>,
    stride: usize,
) -> Result<TrajectoryResult> {
    cfg.validate_reverse()?;
    if start.dim() != 2 {
        return Err(CoreError::DimensionMismatch(2, start.dim()));
    }
    let stride = stride.max(1);
    let steps = cfg.steps();
    let t0 = cfg.horizon;
    let words = sigma_words();
    let mut state = start.clone();
    let mut drift = DepolReverseDrift::new(cfg, w_horizon, levy);
    let mut record = MeasurementRecord::with_levy_areas(cfg.dt)?;
    let mut streams: Vec<NoiseStream> = (0..3)
        .map(|k| NoiseStream::new(cfg.seed, StreamId { trajectory, channel: CHANNEL_REVERSE + k }))
        .collect();
    let mut times = vec![t0];
    let mut states = vec![state.clone()];
    for n in 0..steps {
        let mut dw = [0.0; 3];
        for k in 0..3 {
            dw[k] = measurement_increment(
                &state,
                &words[k],
                cfg.mode,
                cfg.p / 3.0,
                cfg.dt,
                &mut streams[k],
            )?;
        }
        reverse_depol_step(&mut state, cfg, &mut drift, dw)?;
        state.renormalize()?;
        record.push(&dw)?;
        let idx = n + 1;
        if idx == steps || idx % stride == 0 {
            times.push(t0 + idx as f64 * cfg.dt);
            states.push(state.clone());
        }
    }
    let terminal_fidelity = score.map(|s| fidelity(&state, s)).transpose()?;
    Ok(TrajectoryResult { times, states, record, terminal_fidelity })
}

/// Forward segment and its reversal, scored against `psi0`.
pub fn run_depol_cycle_sampled(
    cfg: &DepolarizingConfig,
    psi0: &QuantumState,
    trajectory: u64,
    stride: usize,
) -> Result<crate::channel::CycleResult> {
    let forward = run_depol_forward_sampled(cfg, psi0, trajectory, stride)?;
    let w = forward.record.cumulative();
    let w_horizon = [w[0], w[1], w[2]];
    let levy = forward.record.levy_areas().expect("three-channel record");
    let reverse = run_depol_reverse_sampled(
        cfg,
        forward.final_state(),
        w_horizon,
        levy,
        trajectory,
        Some(psi0),
        stride,
    )?;
    Ok(crate::channel::CycleResult { forward, reverse })
}

pub fn run_depol_cycle(
    cfg: &DepolarizingConfig,
    psi0: &QuantumState,
    trajectory: u64,
) -> Result<crate::channel::CycleResult> {
    run_depol_cycle_sampled(cfg, psi0, trajectory, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(mode: Mode) -> DepolarizingConfig {
        DepolarizingConfig { p: 0.1, mode, horizon: 0.5, dt: 1e-3, seed: 17 }
    }

    #[test]
    fn zero_noise_step_contracts_scalar() {
        let c = cfg(Mode::Dissipative);
        let mut s = QuantumState::basis_state(1, 0).unwrap();
        forward_depol_step(&mut s, &c, [0.0; 3]);
        let expect = 1.0 - 0.5 * c.p * c.dt;
        assert!((s.amplitudes()[0].re - expect).abs() < 1e-15);
        assert!(s.amplitudes()[1].norm() < 1e-15);
    }

    #[test]
    fn combine_matches_dense_pauli_sum() {
        let a = Complex64::new(0.9, -0.1);
        let c = [
            Complex64::new(0.2, 0.3),
            Complex64::new(-0.4, 0.1),
            Complex64::new(0.0, -0.2),
        ];
        let words = sigma_words();
        let dense = words
            .iter()
            .zip(c)
            .fold(Operator::identity(2).scale(a), |acc, (w, coeff)| {
                acc.add(&w.matrix().scale(coeff)).unwrap()
            });
        let mut amps = [Complex64::new(0.3, 0.5), Complex64::new(-0.7, 0.2)];
        let expect = dense.matvec(&amps).unwrap();
        combine_single_qubit(&mut amps, a, c);
        assert!((amps[0] - expect[0]).norm() < 1e-15);
        assert!((amps[1] - expect[1]).norm() < 1e-15);
    }

    #[test]
    fn magnus2_with_zero_areas_is_plain_exponential() {
        let c = cfg(Mode::Dissipative);
        let w = [0.3, -0.2, 0.5];
        let t = 0.4;
        let m = magnus2_propagator(&c, w, LevyAreas::default(), t).unwrap();
        let root = (c.p / 3.0).sqrt();
        let expect = exp_pauli_vector(
            Complex64::new(-c.p * t, 0.0),
            core::array::from_fn(|k| Complex64::new(root * w[k], 0.0)),
        )
        .unwrap();
        assert!(m.sub(&expect).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn conserving_surrogate_is_unitary() {
        let c = cfg(Mode::Conserving);
        let w = [0.4, 0.1, -0.3];
        let levy = LevyAreas { s12: 0.05, s23: -0.02, s31: 0.01 };
        let m = magnus2_propagator(&c, w, levy, 0.5).unwrap();
        let gram = m.adjoint().mul(&m).unwrap();
        assert!(gram.sub(&Operator::identity(2)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn reverse_terminal_propagator_cancels_forward_surrogate() {
        // With the bridges pinned, the reverse surrogate times F2(T) is a
        // scalar: exp(-2pT) dissipative, the identity conserving.
        for mode in [Mode::Dissipative, Mode::Conserving] {
            let c = cfg(mode);
            let w = [0.25, -0.4, 0.1];
            let levy = LevyAreas { s12: 0.03, s23: 0.07, s31: -0.01 };
            let fwd = magnus2_propagator(&c, w, levy, c.horizon).unwrap();
            let x0 = reverse_bridge_start(&c, w, levy);
            // Pinned: X_k(2T) = 0, so d_k = -X_k(T).
            let d = [-x0[0], -x0[1], -x0[2]];
            let rev = reverse_magnus2_propagator(&c, d, c.horizon).unwrap();
            let prod = rev.mul(&fwd).unwrap();
            let scalar = match mode {
                Mode::Dissipative => (-2.0 * c.p * c.horizon).exp(),
                Mode::Conserving => 1.0,
            };
            let expect = Operator::identity(2).scale(Complex64::new(scalar, 0.0));
            assert!(prod.sub(&expect).unwrap().max_abs() < 1e-12, "{mode:?}");
        }
    }

    #[test]
    fn cycle_recovers_with_cubic_deficit_scale() {
        // A single cycle at pT = 0.05: the truncation deficit should be tiny
        // (closer than 1e-3), while a wrong drift would wreck it entirely.
        for mode in [Mode::Dissipative, Mode::Conserving] {
            let c = cfg(mode);
            let psi0 = QuantumState::basis_state(1, 0).unwrap();
            let cyc = run_depol_cycle(&c, &psi0, 3).unwrap();
            let f = cyc.reverse.terminal_fidelity.unwrap();
            assert!(1.0 - f < 1e-3, "{mode:?}: fidelity {f}");
        }
    }

    #[test]
    fn reverse_rejects_strong_noise() {
        let mut c = cfg(Mode::Dissipative);
        c.p = 3.0;
        let psi0 = QuantumState::basis_state(1, 0).unwrap();
        assert!(matches!(
            run_depol_reverse_sampled(
                &c,
                &psi0,
                [0.0; 3],
                LevyAreas::default(),
                0,
                None,
                1
            ),
            Err(CoreError::InvalidConfig(_))
        ));
    }
}
