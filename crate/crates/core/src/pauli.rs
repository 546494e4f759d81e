//! Pauli words on small qubit registers with fast bit-twiddled actions.
//!
//! A [`PauliString`] is a tensor product of single-site Pauli operators,
//! written left to right: site 0 acts on the most significant bit of a basis
//! index, matching the usual Kronecker-product convention. Every word squares
//! to the identity, which is what the closed-form exponentials in
//! [`crate::expm`] rely on.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::operator::Operator;

/// Single-site Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    I,
    X,
    Y,
    Z,
}

impl Axis {
    /// Parse one character of a Pauli word (case-insensitive).
    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' | 'i' => Ok(Axis::I),
            'X' | 'x' => Ok(Axis::X),
            'Y' | 'y' => Ok(Axis::Y),
            'Z' | 'z' => Ok(Axis::Z),
            other => Err(CoreError::InvalidPauliAxis(other)),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Axis::I => 'I',
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }

    /// 2x2 matrix entry `self[r, c]`.
    fn entry(self, r: usize, c: usize) -> Complex64 {
        let z = Complex64::new(0.0, 0.0);
        match self {
            Axis::I => {
                if r == c {
                    Complex64::new(1.0, 0.0)
                } else {
                    z
                }
            }
            Axis::X => {
                if r != c {
                    Complex64::new(1.0, 0.0)
                } else {
                    z
                }
            }
            Axis::Y => match (r, c) {
                (0, 1) => Complex64::new(0.0, -1.0),
                (1, 0) => Complex64::new(0.0, 1.0),
                _ => z,
            },
            Axis::Z => match (r, c) {
                (0, 0) => Complex64::new(1.0, 0.0),
                (1, 1) => Complex64::new(-1.0, 0.0),
                _ => z,
            },
        }
    }
}

/// Which unravelling a channel uses: `Dissipative` couples through the Pauli
/// word itself, `Conserving` through `i` times the word (a purely unitary
/// stochastic rotation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Mode {
    Dissipative,
    Conserving,
}

/// Levi-Civita symbol on 0-based indices: returns `(l, sign)` with
/// `eps(j, k, l) = sign` when `j != k`, `None` otherwise.
pub fn levi_civita(j: usize, k: usize) -> Option<(usize, f64)> {
    match (j, k) {
        (0, 1) => Some((2, 1.0)),
        (1, 2) => Some((0, 1.0)),
        (2, 0) => Some((1, 1.0)),
        (1, 0) => Some((2, -1.0)),
        (2, 1) => Some((0, -1.0)),
        (0, 2) => Some((1, -1.0)),
        _ => None,
    }
}

/// A non-empty tensor product of single-site Paulis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    axes: Vec<Axis>,
    /// Bit mask of sites (in index-bit positions) whose axis flips the basis
    /// bit, i.e. X and Y sites.
    flip_mask: usize,
}

impl PauliString {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(CoreError::EmptyPauliWord);
        }
        let m = axes.len();
        let mut flip_mask = 0usize;
        for (site, axis) in axes.iter().enumerate() {
            if matches!(axis, Axis::X | Axis::Y) {
                flip_mask |= 1 << (m - 1 - site);
            }
        }
        Ok(PauliString { axes, flip_mask })
    }

    /// Parse a word such as `"X"`, `"XZ"`, or `"IYI"`.
    pub fn parse(word: &str) -> Result<Self> {
        let axes = word.chars().map(Axis::from_char).collect::<Result<Vec<_>>>()?;
        Self::new(axes)
    }

    pub fn single(axis: Axis) -> Self {
        Self::new(vec![axis]).expect("one site")
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn qubits(&self) -> usize {
        self.axes.len()
    }

    /// Hilbert-space dimension `2^m`.
    pub fn dim(&self) -> usize {
        1 << self.axes.len()
    }

    pub fn is_identity(&self) -> bool {
        self.axes.iter().all(|a| matches!(a, Axis::I))
    }

    /// Two words commute iff they disagree on an even number of sites where
    /// both are non-identity.
    pub fn commutes_with(&self, other: &Self) -> Result<bool> {
        if self.qubits() != other.qubits() {
            return Err(CoreError::DimensionMismatch(self.dim(), other.dim()));
        }
        let odd = self
            .axes
            .iter()
            .zip(&other.axes)
            .filter(|(a, b)| !matches!(a, Axis::I) && !matches!(b, Axis::I) && a != b)
            .count();
        Ok(odd % 2 == 0)
    }

    /// Site-wise product with the overall phase dropped: the result is the
    /// Pauli word `P` such that `self * other = phase * P` for some phase in
    /// `{1, -1, i, -i}`.
    pub fn mul_phase_free(&self, other: &Self) -> Result<Self> {
        if self.qubits() != other.qubits() {
            return Err(CoreError::DimensionMismatch(self.dim(), other.dim()));
        }
        let axes = self
            .axes
            .iter()
            .zip(&other.axes)
            .map(|(&a, &b)| match (a, b) {
                (Axis::I, b) => b,
                (a, Axis::I) => a,
                (a, b) if a == b => Axis::I,
                (Axis::X, Axis::Y) | (Axis::Y, Axis::X) => Axis::Z,
                (Axis::Y, Axis::Z) | (Axis::Z, Axis::Y) => Axis::X,
                _ => Axis::Y,
            })
            .collect();
        Self::new(axes)
    }

    /// Phase of `P|b>` as a power of `i`, for basis index `b`.
    fn phase_quadrant(&self, b: usize) -> u8 {
        let m = self.axes.len();
        let mut q = 0u8;
        for (site, axis) in self.axes.iter().enumerate() {
            let bit = ((b >> (m - 1 - site)) & 1) as u8;
            match axis {
                // sigma_y |beta> = i (-1)^beta |1 - beta>
                Axis::Y => q = (q + 1 + 2 * bit) & 3,
                // sigma_z |beta> = (-1)^beta |beta>
                Axis::Z => q = (q + 2 * bit) & 3,
                _ => {}
            }
        }
        q
    }

    /// `out = P * input` on raw amplitude slices.
    pub fn apply(&self, input: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(input.len(), self.dim());
        debug_assert_eq!(out.len(), self.dim());
        for (b, amp) in input.iter().enumerate() {
            out[b ^ self.flip_mask] = mul_i_pow(*amp, self.phase_quadrant(b));
        }
    }

    /// In-place `amps <- (a I + b P) amps`.
    ///
    /// Because `b -> b ^ flip_mask` is an involution the update only ever
    /// couples index pairs, so no scratch buffer is needed.
    pub fn affine_apply(&self, a: Complex64, b: Complex64, amps: &mut [Complex64]) {
        debug_assert_eq!(amps.len(), self.dim());
        let mask = self.flip_mask;
        if mask == 0 {
            for (idx, amp) in amps.iter_mut().enumerate() {
                let coeff = a + mul_i_pow(b, self.phase_quadrant(idx));
                *amp *= coeff;
            }
            return;
        }
        for idx in 0..amps.len() {
            let partner = idx ^ mask;
            if partner < idx {
                continue;
            }
            let (lo, hi) = (amps[idx], amps[partner]);
            amps[idx] = a * lo + mul_i_pow(b * hi, self.phase_quadrant(partner));
            amps[partner] = a * hi + mul_i_pow(b * lo, self.phase_quadrant(idx));
        }
    }

    /// `<v| P |v> / <v|v>` for a raw amplitude slice. Pauli expectations are
    /// real; the imaginary part cancels by Hermiticity.
    pub fn expectation(&self, amps: &[Complex64]) -> Result<f64> {
        debug_assert_eq!(amps.len(), self.dim());
        let mut num = 0.0;
        let mut den = 0.0;
        for (b, amp) in amps.iter().enumerate() {
            den += amp.norm_sqr();
            let target = b ^ self.flip_mask;
            let term = amps[target].conj() * mul_i_pow(*amp, self.phase_quadrant(b));
            num += term.re;
        }
        if den <= 0.0 || !den.is_finite() {
            return Err(CoreError::DegenerateNorm);
        }
        Ok(num / den)
    }

    /// Dense matrix of the word (Kronecker product of the site matrices).
    pub fn matrix(&self) -> Operator {
        let m = self.axes.len();
        Operator::from_fn(self.dim(), |r, c| {
            let mut e = Complex64::new(1.0, 0.0);
            for (site, axis) in self.axes.iter().enumerate() {
                let shift = m - 1 - site;
                e *= axis.entry((r >> shift) & 1, (c >> shift) & 1);
                if e.re == 0.0 && e.im == 0.0 {
                    break;
                }
            }
            e
        })
    }
}

/// `z * i^q` for `q` in `0..4`, exact in floating point.
fn mul_i_pow(z: Complex64, q: u8) -> Complex64 {
    match q & 3 {
        0 => z,
        1 => Complex64::new(-z.im, z.re),
        2 => Complex64::new(-z.re, -z.im),
        _ => Complex64::new(z.im, -z.re),
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for axis in &self.axes {
            write!(f, "{}", axis.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        use alloc::string::ToString;
        serializer.serialize_str(&self.to_string())
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        PauliString::parse(&s).map_err(serde::de::Error::custom)
    }
}
