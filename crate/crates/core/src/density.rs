//! Density matrices for the linear (unnormalized) master-equation flows.

use alloc::vec::Vec;

use num_complex::Complex64;
// Needed for f64 math in the pure no_std graph; redundant (and flagged
// unused) whenever some enabled feature links std into the build.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{CoreError, Result};
use crate::operator::Operator;
use crate::state::QuantumState;

/// A Hermitian, positive-weight matrix. Like [`QuantumState`], it is kept
/// unnormalized while a linear flow runs; physical readouts divide by the
/// trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    pub fn from_operator(op: Operator) -> Result<Self> {
        let scale = 1.0 + op.max_abs();
        if !op.is_hermitian(1e-12 * scale) {
            return Err(CoreError::InvalidConfig("density matrix must be Hermitian"));
        }
        let tr = op.trace().re;
        if tr <= 0.0 || !tr.is_finite() {
            return Err(CoreError::DegenerateNorm);
        }
        Ok(DensityMatrix { op })
    }

    /// Rank-one projector `|psi-hat><psi-hat|` of the normalized direction.
    pub fn project(state: &QuantumState) -> Result<Self> {
        let unit = state.normalized()?;
        let amps = unit.amplitudes();
        let d = unit.dim();
        let op = Operator::from_fn(d, |r, c| amps[r] * amps[c].conj());
        Ok(DensityMatrix { op })
    }

    pub fn matrix(&self) -> &Operator {
        &self.op
    }

    pub fn matrix_mut(&mut self) -> &mut Operator {
        &mut self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn trace(&self) -> f64 {
        self.op.trace().re
    }

    /// Unit-trace copy of the matrix.
    pub fn normalized(&self) -> Result<Operator> {
        let tr = self.trace();
        if tr <= 0.0 || !tr.is_finite() {
            return Err(CoreError::DegenerateNorm);
        }
        Ok(self.op.scale(Complex64::new(1.0 / tr, 0.0)))
    }

    /// Eigenvalues of the unit-trace matrix, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.normalized()?.hermitian_eigenvalues()
    }

    /// `sqrt(<psi-hat| rho-hat |psi-hat>)`, the pure-state fidelity of the
    /// normalized matrix with a normalized pure state.
    pub fn fidelity_with_pure(&self, state: &QuantumState) -> Result<f64> {
        let unit = state.normalized()?;
        let rho = self.normalized()?;
        let act = rho.matvec(unit.amplitudes())?;
        let val: Complex64 = unit
            .amplitudes()
            .iter()
            .zip(&act)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(val.re.max(0.0).sqrt())
    }
}

/// Trace distance `0.5 * ||rho-hat - sigma-hat||_1` of the unit-trace views.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(CoreError::DimensionMismatch(a.dim(), b.dim()));
    }
    let diff = a.normalized()?.sub(&b.normalized()?)?;
    // The difference is Hermitian; its trace norm is the sum of |eigenvalues|.
    let eigs = diff.hermitian_eigenvalues()?;
    Ok(0.5 * eigs.iter().map(|l| l.abs()).sum::<f64>())
}
