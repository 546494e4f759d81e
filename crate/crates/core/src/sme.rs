//! Reverse flow at the density-matrix level.
//!
//! The linear (unnormalized, record-conditioned) master flow driven by the
//! same bridge as [`crate::channel`]:
//!
//! `d rho = [ -X/(2T - t) sqrt(p) (L rho + rho L^dag) + p (P rho P - rho) ] dt
//!          + sqrt(p) (L rho + rho L^dag) dW`
//!
//! with `L = P` (dissipative) or `L = i P` (conserving; the couplings then
//! become commutators `i [P, rho]`). For a pure starting matrix this flow is
//! the outer product of the pure-state reverse flow, which is how it is
//! validated and how the shared-noise runner drives both in lockstep.

use alloc::vec::Vec;

use num_complex::Complex64;
// Needed for f64 math in the pure no_std graph; redundant (and flagged
// unused) whenever some enabled feature links std into the build.
#[allow(unused_imports)]
use num_traits::Float;

use crate::bridge::BridgeState;
use crate::channel::{jump_coeff, measurement_increment, reverse_step, ChannelConfig, Stepper, TrajectoryResult};
use crate::density::{trace_distance, DensityMatrix};
use crate::error::{CoreError, Result};
use crate::expm::exp_affine_pauli;
use crate::noise::{NoiseStream, StreamId, CHANNEL_REVERSE};
use crate::operator::Operator;
use crate::pauli::{Mode, PauliString};
use crate::state::QuantumState;

/// Dissipator `p (P rho P - rho)`; identical in both modes because the phase
/// of the jump operator cancels in `L rho L^dag`.
pub fn lindblad_term(rho: &Operator, word: &PauliString, p: f64) -> Result<Operator> {
    let pm = word.matrix();
    let sandwich = pm.mul(rho)?.mul(&pm)?;
    sandwich.sub(rho).map(|d| d.scale(Complex64::new(p, 0.0)))
}

/// Measurement coupling `L rho + rho L^dag`: the anticommutator `{P, rho}` in
/// dissipative mode, the commutator `i [P, rho]` in conserving mode.
pub fn measurement_coupling(rho: &Operator, word: &PauliString, mode: Mode) -> Result<Operator> {
    let pm = word.matrix();
    match mode {
        Mode::Dissipative => pm.anticommutator(rho),
        Mode::Conserving => pm.commutator(rho).map(|c| c.scale(Complex64::new(0.0, 1.0))),
    }
}

/// One literal Euler step of the reverse master flow, given the pre-step
/// bridge value `x` and gap `2T - t`.
pub fn sme_reverse_step_em(
    rho: &mut DensityMatrix,
    cfg: &ChannelConfig,
    x: f64,
    gap: f64,
    dw: f64,
) -> Result<()> {
    let sp = cfg.p.sqrt();
    let coupling = measurement_coupling(rho.matrix(), &cfg.pauli, cfg.mode)?;
    let lindblad = lindblad_term(rho.matrix(), &cfg.pauli, cfg.p)?;
    let drift = coupling
        .scale(Complex64::new(-x / gap * sp, 0.0))
        .add(&lindblad)?;
    let update = drift
        .scale(Complex64::new(cfg.dt, 0.0))
        .add(&coupling.scale(Complex64::new(sp * dw, 0.0)))?;
    let next = rho.matrix().add(&update)?;
    *rho.matrix_mut() = next;
    rho.matrix_mut().hermitize();
    Ok(())
}

/// One exact step: conjugation by the per-step closed-form propagator
/// `E = exp(-p dt + sqrt(p) dx P)` (dissipative) or `exp(i sqrt(p) dx P)`
/// (conserving), i.e. `rho <- E rho E^dag`.
pub fn sme_step_exact(rho: &mut DensityMatrix, cfg: &ChannelConfig, dx: f64) -> Result<()> {
    let a = match cfg.mode {
        Mode::Dissipative => Complex64::new(-cfg.p * cfg.dt, 0.0),
        Mode::Conserving => Complex64::new(0.0, 0.0),
    };
    let b = jump_coeff(cfg.mode, cfg.p.sqrt() * dx);
    let e = exp_affine_pauli(a, b, &cfg.pauli)?;
    let next = e.mul(rho.matrix())?.mul(&e.adjoint())?;
    *rho.matrix_mut() = next;
    rho.matrix_mut().hermitize();
    Ok(())
}

/// Pure-state reverse trajectory and the matrix flow driven by the same
/// noise, with trace distances between the two recorded along the way.
#[derive(Debug, Clone)]
pub struct SharedNoiseReverse {
    pub pure: TrajectoryResult,
    /// Trace distance between the normalized matrix and the pure projector at
    /// each sampled time.
    pub trace_distances: Vec<f64>,
    pub terminal_trace_distance: f64,
    pub rho_final: DensityMatrix,
}

/// Run the reverse pass on `[T, 2T]` twice over the same record: once as a
/// pure state, once as a density matrix, both fed the identical increments.
pub fn run_reverse_with_sme(
    cfg: &ChannelConfig,
    start: &QuantumState,
    w_horizon: f64,
    stepper: Stepper,
    trajectory: u64,
    score: Option<&QuantumState>,
    stride: usize,
) -> Result<SharedNoiseReverse> {
    cfg.validate()?;
    if start.dim() != cfg.dim() {
        return Err(CoreError::DimensionMismatch(cfg.dim(), start.dim()));
    }
    let stride = stride.max(1);
    let steps = cfg.steps();
    let t0 = cfg.horizon;
    let mut state = start.clone();
    let mut rho = DensityMatrix::project(&state)?;
    let mut bridge = BridgeState::real(w_horizon, t0, 2.0 * cfg.horizon, 0.0);
    let mut record = crate::record::MeasurementRecord::new(cfg.dt, 1)?;
    let mut stream = NoiseStream::new(cfg.seed, StreamId { trajectory, channel: CHANNEL_REVERSE });
    let mut times = alloc::vec![t0];
    let mut states = alloc::vec![state.clone()];
    let mut trace_distances = alloc::vec![trace_distance(&DensityMatrix::project(&state)?, &rho)?];
    for n in 0..steps {
        let dw = measurement_increment(&state, &cfg.pauli, cfg.mode, cfg.p, cfg.dt, &mut stream)?;
        match stepper {
            Stepper::EulerMaruyama => {
                let x = bridge.value().re;
                let gap = bridge.gap();
                sme_reverse_step_em(&mut rho, cfg, x, gap, dw)?;
                // reverse_step advances the shared bridge itself.
                reverse_step(&mut state, cfg, stepper, &mut bridge, dw)?;
            }
            Stepper::Exact => {
                // Take the bridge increment once and feed both flows.
                let dx = bridge.step(dw, cfg.dt)?.re;
                sme_step_exact(&mut rho, cfg, dx)?;
                let a = match cfg.mode {
                    Mode::Dissipative => Complex64::new(-cfg.p * cfg.dt, 0.0),
                    Mode::Conserving => Complex64::new(0.0, 0.0),
                };
                let b = jump_coeff(cfg.mode, cfg.p.sqrt() * dx);
                crate::expm::apply_exp_affine_pauli(&mut state, a, b, &cfg.pauli)?;
            }
        }
        state.renormalize()?;
        record.push(&[dw])?;
        let idx = n + 1;
        if idx == steps || idx % stride == 0 {
            times.push(t0 + idx as f64 * cfg.dt);
            states.push(state.clone());
            trace_distances.push(trace_distance(&DensityMatrix::project(&state)?, &rho)?);
        }
    }
    let terminal_fidelity = score.map(|s| crate::state::fidelity(&state, s)).transpose()?;
    let terminal_trace_distance = *trace_distances.last().expect("at least initial");
    Ok(SharedNoiseReverse {
        pure: TrajectoryResult { times, states, record, terminal_fidelity },
        trace_distances,
        terminal_trace_distance,
        rho_final: rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::run_forward;
    use crate::pauli::Axis;

    fn cfg(mode: Mode) -> ChannelConfig {
        ChannelConfig {
            pauli: PauliString::single(Axis::Z),
            mode,
            p: 0.3,
            horizon: 0.5,
            dt: 1e-2,
            seed: 21,
        }
    }

    /// Dense jump operator of the configured mode.
    fn jump_dense(cfg: &ChannelConfig) -> Operator {
        let pm = cfg.pauli.matrix();
        match cfg.mode {
            Mode::Dissipative => pm,
            Mode::Conserving => pm.scale(Complex64::new(0.0, 1.0)),
        }
    }

    /// The Euler step of the matrix flow must agree with the outer product of
    /// the Euler step of the state flow up to exactly the higher-order Ito
    /// terms `B rho B^dag (dW^2 - dt) + (A rho B^dag + B rho A^dag) dW dt +
    /// A rho A^dag dt^2`.
    #[test]
    fn em_step_matches_ito_product_identity() {
        for mode in [Mode::Dissipative, Mode::Conserving] {
            let c = cfg(mode);
            let x = 0.4;
            let gap = 0.37;
            let dw = 0.09;
            // Normalize up front: `project` normalizes too, and the outer
            // product below must start from the identical matrix.
            let psi = QuantumState::from_amplitudes(alloc::vec![
                Complex64::new(0.6, 0.1),
                Complex64::new(-0.3, 0.73),
            ])
            .unwrap()
            .normalized()
            .unwrap();
            let rho0 = DensityMatrix::project(&psi).unwrap();

            // Matrix side.
            let mut rho = rho0.clone();
            sme_reverse_step_em(&mut rho, &c, x, gap, dw).unwrap();

            // State side: psi' = (I + A dt + B dW) psi.
            let sp = c.p.sqrt();
            let l = jump_dense(&c);
            let a_op = Operator::identity(2)
                .scale(Complex64::new(-0.5 * c.p, 0.0))
                .add(&l.scale(Complex64::new(-x / gap * sp, 0.0)))
                .unwrap();
            let b_op = l.scale(Complex64::new(sp, 0.0));
            let step = Operator::identity(2)
                .add(&a_op.scale(Complex64::new(c.dt, 0.0)))
                .unwrap()
                .add(&b_op.scale(Complex64::new(dw, 0.0)))
                .unwrap();
            let psi_amps = step.matvec(psi.amplitudes()).unwrap();
            let outer = Operator::from_fn(2, |r, cc| psi_amps[r] * psi_amps[cc].conj());

            // Expected residual terms.
            let r0 = rho0.matrix();
            let brb = b_op.mul(r0).unwrap().mul(&b_op.adjoint()).unwrap();
            let arb = a_op.mul(r0).unwrap().mul(&b_op.adjoint()).unwrap();
            let bra = b_op.mul(r0).unwrap().mul(&a_op.adjoint()).unwrap();
            let ara = a_op.mul(r0).unwrap().mul(&a_op.adjoint()).unwrap();
            let residual = brb
                .scale(Complex64::new(dw * dw - c.dt, 0.0))
                .add(&arb.add(&bra).unwrap().scale(Complex64::new(dw * c.dt, 0.0)))
                .unwrap()
                .add(&ara.scale(Complex64::new(c.dt * c.dt, 0.0)))
                .unwrap();

            let diff = outer.sub(rho.matrix()).unwrap().sub(&residual).unwrap();
            assert!(diff.max_abs() < 1e-14, "{mode:?}: {}", diff.max_abs());
        }
    }

    #[test]
    fn zero_bridge_reduces_to_forward_unravelling_fixed_point() {
        // With X = 0 the drift is the plain dissipator; the maximally mixed
        // state is a fixed point of the conserving flow for any record.
        let c = cfg(Mode::Conserving);
        let mut rho = DensityMatrix::from_operator(
            Operator::identity(2).scale(Complex64::new(0.5, 0.0)),
        )
        .unwrap();
        let before = rho.clone();
        for dw in [0.1, -0.3, 0.22] {
            sme_reverse_step_em(&mut rho, &c, 0.0, 1.0, dw).unwrap();
        }
        assert!(rho.matrix().sub(before.matrix()).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn shared_noise_exact_run_keeps_purity_and_agreement() {
        for mode in [Mode::Dissipative, Mode::Conserving] {
            let c = cfg(mode);
            let psi0 = QuantumState::basis_state(1, 0).unwrap();
            // Start from a superposition so the flow is nontrivial.
            let plus = QuantumState::from_amplitudes(alloc::vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
            ])
            .unwrap();
            let fwd = run_forward(&c, &plus, Stepper::Exact, 2).unwrap();
            let w = fwd.record.cumulative()[0];
            let out = run_reverse_with_sme(
                &c,
                fwd.final_state(),
                w,
                Stepper::Exact,
                2,
                Some(&plus),
                10,
            )
            .unwrap();
            assert!(out.terminal_trace_distance < 1e-10, "{mode:?}");
            assert!(1.0 - out.pure.terminal_fidelity.unwrap() < 1e-10, "{mode:?}");
            let _ = psi0;
        }
    }

    #[test]
    fn em_matrix_flow_stays_near_pure_flow() {
        // Same noise, EM on both sides: the gap is the accumulated martingale
        // residue, O(sqrt(dt)) here with a generous margin.
        let c = ChannelConfig { dt: 1e-3, ..cfg(Mode::Dissipative) };
        let plus = QuantumState::from_amplitudes(alloc::vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
        .unwrap();
        let fwd = run_forward(&c, &plus, Stepper::Exact, 4).unwrap();
        let w = fwd.record.cumulative()[0];
        let out = run_reverse_with_sme(
            &c,
            fwd.final_state(),
            w,
            Stepper::EulerMaruyama,
            4,
            Some(&plus),
            10,
        )
        .unwrap();
        assert!(
            out.terminal_trace_distance < 0.05,
            "terminal trace distance {}",
            out.terminal_trace_distance
        );
    }
}
