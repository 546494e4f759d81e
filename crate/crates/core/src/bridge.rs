//! Brownian bridges pinned at a future time.
//!
//! The reverse drifts are all driven by processes of the form
//! `dX = (x_end - X) / (t_end - t) dt + gamma dW`, which interpolate from a
//! recorded value at the start of the reverse pass to an exact pin at `t_end`.
//! Every engine in this crate pins at `x_end = 0`, where the drift reduces to
//! `-X / (t_end - t)`. The coupling `gamma` is real `1` for a single monitored
//! channel and complex for the depolarizing reversal.

use num_complex::Complex64;

use crate::error::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeState {
    x: Complex64,
    t: f64,
    t_end: f64,
    x_end: Complex64,
    gamma: Complex64,
}

impl BridgeState {
    pub fn new(x0: Complex64, t0: f64, t_end: f64, x_end: Complex64, gamma: Complex64) -> Self {
        BridgeState { x: x0, t: t0, t_end, x_end, gamma }
    }

    /// Real-valued bridge with unit coupling, the single-channel case.
    pub fn real(x0: f64, t0: f64, t_end: f64, x_end: f64) -> Self {
        Self::new(
            Complex64::new(x0, 0.0),
            t0,
            t_end,
            Complex64::new(x_end, 0.0),
            Complex64::new(1.0, 0.0),
        )
    }

    pub fn value(&self) -> Complex64 {
        self.x
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn end_time(&self) -> f64 {
        self.t_end
    }

    pub fn is_pinned(&self) -> bool {
        self.t >= self.t_end - 1e-12 * (1.0 + self.t_end.abs())
    }

    /// Remaining gap `t_end - t`; the reverse drifts divide by this.
    pub fn gap(&self) -> f64 {
        self.t_end - self.t
    }

    /// One Euler step; returns the increment `dX` actually taken.
    ///
    /// When the step lands on the endpoint (within half a step, to absorb
    /// floating-point drift in `t`), the state is set to the pinned value
    /// exactly and the noise is discarded: the left-point Euler drift over a
    /// final step of length `dt` is `(x_end - X) / dt * dt`, which is the jump
    /// to the pin anyway, and pinning exactly is what makes the closed-form
    /// recoveries exact. Stepping past the endpoint is an error.
    pub fn step(&mut self, dw: f64, dt: f64) -> Result<Complex64> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(CoreError::InvalidConfig("bridge dt must be positive and finite"));
        }
        let gap = self.t_end - self.t;
        if gap < 0.5 * dt {
            return Err(CoreError::PastEndpoint { t: self.t, dt, t_end: self.t_end });
        }
        if gap <= 1.5 * dt {
            let dx = self.x_end - self.x;
            self.x = self.x_end;
            self.t = self.t_end;
            return Ok(dx);
        }
        let drift = (self.x_end - self.x) * (dt / gap);
        let dx = drift + self.gamma * dw;
        self.x += dx;
        self.t += dt;
        Ok(dx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{NoiseStream, StreamId};

    #[test]
    fn final_step_pins_exactly() {
        let mut b = BridgeState::real(0.7, 0.0, 1.0, 0.0);
        let dt = 0.25;
        for _ in 0..3 {
            b.step(0.1, dt).unwrap();
        }
        assert!(!b.is_pinned());
        // Last step: noise must be irrelevant.
        b.step(123.0, dt).unwrap();
        assert!(b.is_pinned());
        assert_eq!(b.value(), Complex64::new(0.0, 0.0));
        assert!(matches!(
            b.step(0.0, dt),
            Err(CoreError::PastEndpoint { .. })
        ));
    }

    #[test]
    fn zero_noise_decays_linearly() {
        // With dW = 0 the Euler recursion multiplies X by (1 - dt / gap) each
        // step, which telescopes to X_0 * (t_end - t) / t_end.
        let mut b = BridgeState::real(1.0, 0.0, 1.0, 0.0);
        let dt = 0.125;
        for k in 1..=7 {
            b.step(0.0, dt).unwrap();
            let expect = 1.0 - k as f64 * dt;
            assert!((b.value().re - expect).abs() < 1e-12, "step {k}");
        }
    }

    #[test]
    fn mean_interpolates_between_endpoints() {
        // E[X(t)] of the Euler bridge is exactly linear between x0 and x_end,
        // independent of dt; check by averaging an ensemble at midpoint.
        let dt = 0.05;
        let n = 4000;
        let mut sum_mid = 0.0;
        for traj in 0..n {
            let mut stream = NoiseStream::new(5, StreamId { trajectory: traj, channel: 0 });
            let mut b = BridgeState::real(2.0, 0.0, 1.0, -1.0);
            for _ in 0..10 {
                let dw = stream.wiener_increment(dt);
                b.step(dw, dt).unwrap();
            }
            sum_mid += b.value().re;
        }
        let mean = sum_mid / n as f64;
        // Midpoint of 2 -> -1 is 0.5; Monte Carlo error ~ sd/sqrt(n) ~ 0.01.
        assert!((mean - 0.5).abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn complex_coupling_scales_noise() {
        let gamma = Complex64::new(0.3, 0.4);
        let mut b = BridgeState::new(
            Complex64::new(0.0, 0.0),
            0.0,
            1.0,
            Complex64::new(0.0, 0.0),
            gamma,
        );
        let dx = b.step(1.0, 0.1).unwrap();
        assert!((dx - gamma).norm() < 1e-15);
    }
}
