//! Dense complex operators on small qubit registers.
//!
//! Registers here are at most a few qubits, so a plain row-major `Vec` with
//! O(d^3) products is the right tool; there is no sparsity or BLAS to manage.
//! Hermitian spectra come from cyclic Jacobi sweeps on the real-symmetric
//! embedding, which is accurate to machine precision at these sizes.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Needed for f64 math in the pure no_std graph; redundant (and flagged
// unused) whenever some enabled feature links std into the build.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{CoreError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Operator {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        op
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut op = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                op.entries[r * dim + c] = f(r, c);
            }
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.entries[r * self.dim + c] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(CoreError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Operator { dim: self.dim, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Operator { dim: self.dim, entries })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Operator {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for c in 0..d {
                    out.entries[r * d + c] += a * other.entries[k * d + c];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(CoreError::DimensionMismatch(self.dim, v.len()));
        }
        let d = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for r in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..d {
                acc += self.entries[r * d + c] * v[c];
            }
            out[r] = acc;
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        Self::from_fn(d, |r, c| self.entries[c * d + r].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        Operator::from_fn(da * db, |r, c| {
            self.get(r / db, c / db) * other.get(r % db, c % db)
        })
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.add(&other.mul(self)?)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.sub(&self.adjoint()).map(|d| d.max_abs() <= tol).unwrap_or(false)
    }

    /// Symmetrize in place: `A <- (A + A^dag) / 2`. Used to keep density
    /// matrices exactly Hermitian against floating-point drift.
    pub fn hermitize(&mut self) {
        let d = self.dim;
        for r in 0..d {
            for c in r..d {
                let a = self.entries[r * d + c];
                let b = self.entries[c * d + r];
                let avg = 0.5 * (a + b.conj());
                self.entries[r * d + c] = avg;
                self.entries[c * d + r] = avg.conj();
            }
        }
    }

    /// Eigenvalues of a Hermitian operator, ascending.
    ///
    /// Works on the real-symmetric embedding `[[Re A, -Im A], [Im A, Re A]]`,
    /// whose spectrum is that of `A` with every eigenvalue doubled.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_hermitian(1e-9 * (1.0 + self.max_abs())) {
            return Err(CoreError::InvalidConfig("hermitian_eigenvalues needs a Hermitian operator"));
        }
        let d = self.dim;
        let n = 2 * d;
        let mut m = vec![0.0f64; n * n];
        for r in 0..d {
            for c in 0..d {
                let e = self.entries[r * d + c];
                m[r * n + c] = e.re;
                m[(r + d) * n + (c + d)] = e.re;
                m[r * n + (c + d)] = -e.im;
                m[(r + d) * n + c] = e.im;
            }
        }
        let mut all = jacobi_eigenvalues(&mut m, n);
        all.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        // Doubled spectrum: take every other entry of the sorted list.
        Ok(all.into_iter().step_by(2).collect())
    }

    /// Largest singular value, via the spectrum of `A^dag A`.
    pub fn operator_norm(&self) -> f64 {
        let gram = self.adjoint().mul(self).expect("same dim");
        let eigs = gram.hermitian_eigenvalues().expect("gram is Hermitian");
        eigs.last().map(|l| l.max(0.0).sqrt()).unwrap_or(0.0)
    }
}

/// Cyclic Jacobi on a dense symmetric matrix; returns the eigenvalues.
fn jacobi_eigenvalues(m: &mut [f64], n: usize) -> Vec<f64> {
    let scale = m.iter().fold(0.0f64, |acc, &v| acc.max(v.abs())).max(1.0);
    let tol = 1e-15 * scale;
    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[p * n + q].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i * n + i]).collect()
}
