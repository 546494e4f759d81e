//! Unnormalized pure states with a logarithmic norm offset.
//!
//! The linear forward and reverse flows scale a state's weight exponentially,
//! so amplitudes alone would under- or overflow on long horizons. A state
//! therefore carries `log_norm_offset`: the represented vector is
//! `exp(log_norm_offset) * amps`. All physical readouts (fidelity,
//! expectations) use the normalized direction only.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Needed for f64 math in the pure no_std graph; redundant (and flagged
// unused) whenever some enabled feature links std into the build.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{CoreError, Result};
use crate::pauli::PauliString;

/// Raw-amplitude range outside which [`QuantumState::renormalize`] folds the
/// norm into the log offset.
const RENORM_LO: f64 = 1e-6;
const RENORM_HI: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amps: Vec<Complex64>,
    log_norm_offset: f64,
}

impl QuantumState {
    /// Computational basis state `|index>` on `qubits` qubits.
    pub fn basis_state(qubits: usize, index: usize) -> Result<Self> {
        if qubits == 0 || qubits >= usize::BITS as usize {
            return Err(CoreError::BadDimension(0));
        }
        let dim = 1usize << qubits;
        if index >= dim {
            return Err(CoreError::DimensionMismatch(dim, index));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(QuantumState { amps, log_norm_offset: 0.0 })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(CoreError::BadDimension(dim));
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq <= 0.0 || !norm_sq.is_finite() {
            return Err(CoreError::DegenerateNorm);
        }
        Ok(QuantumState { amps, log_norm_offset: 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn log_norm_offset(&self) -> f64 {
        self.log_norm_offset
    }

    /// Add `delta` to the log offset without touching the amplitudes.
    pub fn shift_log_norm(&mut self, delta: f64) {
        self.log_norm_offset += delta;
    }

    /// Euclidean norm of the raw amplitude vector (offset excluded).
    pub fn raw_norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `log` of the full represented norm, offset included.
    pub fn log_norm(&self) -> Result<f64> {
        let raw = self.raw_norm();
        if raw <= 0.0 || !raw.is_finite() {
            return Err(CoreError::DegenerateNorm);
        }
        Ok(self.log_norm_offset + raw.ln())
    }

    /// Fold the raw norm into the offset when it strays outside
    /// `[1e-6, 1e6]`. Engines call this after every step; the branch is almost
    /// always not taken, so repeated rescaling noise never enters the
    /// amplitudes.
    pub fn renormalize(&mut self) -> Result<()> {
        let raw = self.raw_norm();
        if raw <= 0.0 || !raw.is_finite() {
            return Err(CoreError::DegenerateNorm);
        }
        if (RENORM_LO..=RENORM_HI).contains(&raw) {
            return Ok(());
        }
        let inv = 1.0 / raw;
        for a in &mut self.amps {
            *a *= inv;
        }
        self.log_norm_offset += raw.ln();
        Ok(())
    }

    /// Unit-norm copy with zero offset.
    pub fn normalized(&self) -> Result<Self> {
        let raw = self.raw_norm();
        if raw <= 0.0 || !raw.is_finite() {
            return Err(CoreError::DegenerateNorm);
        }
        let inv = 1.0 / raw;
        Ok(QuantumState {
            amps: self.amps.iter().map(|a| a * inv).collect(),
            log_norm_offset: 0.0,
        })
    }

    /// `<self-hat| P |self-hat>`.
    pub fn pauli_expectation(&self, word: &PauliString) -> Result<f64> {
        if word.dim() != self.dim() {
            return Err(CoreError::DimensionMismatch(word.dim(), self.dim()));
        }
        word.expectation(&self.amps)
    }
}

/// Overlap fidelity `|<a-hat|b-hat>|` of the normalized directions.
pub fn fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(CoreError::DimensionMismatch(a.dim(), b.dim()));
    }
    let (na, nb) = (a.raw_norm(), b.raw_norm());
    if na <= 0.0 || nb <= 0.0 || !na.is_finite() || !nb.is_finite() {
        return Err(CoreError::DegenerateNorm);
    }
    let dot: Complex64 = a
        .amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok((dot.norm() / (na * nb)).min(1.0))
}

/// Complex overlap `<a-hat|b-hat>` of the normalized directions.
pub fn overlap(a: &QuantumState, b: &QuantumState) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(CoreError::DimensionMismatch(a.dim(), b.dim()));
    }
    let (na, nb) = (a.raw_norm(), b.raw_norm());
    if na <= 0.0 || nb <= 0.0 || !na.is_finite() || !nb.is_finite() {
        return Err(CoreError::DegenerateNorm);
    }
    let dot: Complex64 = a
        .amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(dot / (na * nb))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_state_and_norms() {
        let s = QuantumState::basis_state(2, 3).unwrap();
        assert_eq!(s.dim(), 4);
        assert_eq!(s.qubits(), 2);
        assert!((s.raw_norm() - 1.0).abs() < 1e-15);
        assert!(s.log_norm().unwrap().abs() < 1e-15);
    }

    #[test]
    fn renormalize_folds_only_outside_range() {
        let mut s = QuantumState::from_amplitudes(vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.5),
        ])
        .unwrap();
        s.renormalize().unwrap();
        // In range: untouched.
        assert_eq!(s.log_norm_offset(), 0.0);
        for a in s.amplitudes_mut() {
            *a *= 1e9;
        }
        let log_before = s.log_norm().unwrap();
        s.renormalize().unwrap();
        assert!((s.raw_norm() - 1.0).abs() < 1e-12);
        assert!((s.log_norm().unwrap() - log_before).abs() < 1e-12);
    }

    #[test]
    fn fidelity_is_phase_and_scale_invariant() {
        let a = QuantumState::from_amplitudes(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ])
        .unwrap();
        let b = QuantumState::from_amplitudes(vec![
            Complex64::new(0.0, 3.0),
            Complex64::new(-3.0, 0.0),
        ])
        .unwrap();
        // b = 3i * a, same ray.
        assert!((fidelity(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        let c = QuantumState::from_amplitudes(vec![
            Complex64::new(0.0, 1.0),
            Complex64::new(1.0, 0.0),
        ])
        .unwrap();
        // |<a|c>| = |(-i + i)/2| = 0.
        assert!(fidelity(&a, &c).unwrap() < 1e-15);
    }

    #[test]
    fn degenerate_norm_is_flagged() {
        assert!(matches!(
            QuantumState::from_amplitudes(vec![Complex64::new(0.0, 0.0); 2]),
            Err(CoreError::DegenerateNorm)
        ));
    }
}
