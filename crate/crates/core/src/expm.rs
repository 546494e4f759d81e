//! Closed-form exponentials of Pauli generators.
//!
//! Every generator that appears in the single-channel flows has the form
//! `a I + b P` with `P` a Pauli word, and `P^2 = I` collapses the exponential
//! series to `exp(a) (cosh(b) I + sinh(b) P)`. The three-channel flows need
//! the single-qubit generalisation `exp(c0 I + sum_k c_k sigma_k)`, which
//! closes the same way through `r^2 = c1^2 + c2^2 + c3^2`.

use num_complex::Complex64;
// Needed for f64 math in the pure no_std graph; redundant (and flagged
// unused) whenever some enabled feature links std into the build.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{CoreError, Result};
use crate::operator::Operator;
use crate::pauli::PauliString;
use crate::state::QuantumState;

/// Largest real part of a scalar exponent we are willing to exponentiate into
/// a dense matrix entry; `exp(709)` is the edge of f64 range. Only growth is
/// guarded: strongly negative exponents underflow to zero harmlessly.
const EXP_GUARD: f64 = 700.0;

fn check_exponent(re: f64) -> Result<()> {
    if !re.is_finite() || re > EXP_GUARD {
        Err(CoreError::ExpOverflow(re))
    } else {
        Ok(())
    }
}

/// The damped pair `(e^{-|Re b|} cosh b, e^{-|Re b|} sinh b)`, bounded (by 1
/// in magnitude up to the oscillatory part) for every finite `b`. Small
/// `|Re b|` keeps the direct library forms; past that the two exponentials
/// differ in magnitude by at least `e^2`, so their sum and difference lose no
/// precision either.
fn damped_cosh_sinh(b: Complex64) -> (Complex64, Complex64) {
    let m = b.re.abs();
    if m <= 1.0 {
        let damp = (-m).exp();
        (b.cosh() * damp, b.sinh() * damp)
    } else {
        let ep = (b - m).exp() * 0.5;
        let em = (-b - m).exp() * 0.5;
        (ep + em, ep - em)
    }
}

/// Dense `exp(a I + b P)`, stable up to entries of size
/// `exp(Re a + |Re b|)`.
pub fn exp_affine_pauli(a: Complex64, b: Complex64, word: &PauliString) -> Result<Operator> {
    if !a.is_finite() || !b.is_finite() {
        return Err(CoreError::ExpOverflow(a.re + b.re));
    }
    check_exponent(a.re + b.re.abs())?;
    let scale = (a + b.re.abs()).exp();
    let (ch, sh) = damped_cosh_sinh(b);
    Ok(Operator::identity(word.dim())
        .scale(ch * scale)
        .add(&word.matrix().scale(sh * scale))
        .expect("same dim"))
}

/// In-place `state <- exp(a I + b P) state`, with the growing part of the
/// exponent (`Re a + |Re b|`) routed into the log norm offset. Never
/// overflows: the amplitude multipliers are bounded for any finite `a`, `b`.
pub fn apply_exp_affine_pauli(
    state: &mut QuantumState,
    a: Complex64,
    b: Complex64,
    word: &PauliString,
) -> Result<()> {
    if word.dim() != state.dim() {
        return Err(CoreError::DimensionMismatch(word.dim(), state.dim()));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(CoreError::ExpOverflow(a.re + b.re));
    }
    let phase = Complex64::new(0.0, a.im).exp();
    let (ch, sh) = damped_cosh_sinh(b);
    word.affine_apply(ch * phase, sh * phase, state.amplitudes_mut());
    state.shift_log_norm(a.re + b.re.abs());
    Ok(())
}

/// `sinh(r) / r`, even in `r`, with the series branch guarding small inputs.
pub fn sinhc(r: Complex64) -> Complex64 {
    if r.norm() < 1e-6 {
        let r2 = r * r;
        Complex64::new(1.0, 0.0) + r2 / 6.0 + r2 * r2 / 120.0
    } else {
        r.sinh() / r
    }
}

/// `cosh` with the same small-input series treatment (exact enough either
/// way; keeps the pair symmetric).
fn cosh_stable(r: Complex64) -> Complex64 {
    if r.norm() < 1e-6 {
        let r2 = r * r;
        Complex64::new(1.0, 0.0) + r2 / 2.0 + r2 * r2 / 24.0
    } else {
        r.cosh()
    }
}

/// Dense single-qubit `exp(c0 I + c1 sigma_x + c2 sigma_y + c3 sigma_z)`.
///
/// Uses `r = sqrt(c1^2 + c2^2 + c3^2)` (principal branch); the result is
/// branch-independent because `cosh` and `sinhc` are even.
pub fn exp_pauli_vector(c0: Complex64, c: [Complex64; 3]) -> Result<Operator> {
    if !c0.is_finite() || c.iter().any(|ck| !ck.is_finite()) {
        return Err(CoreError::ExpOverflow(c0.re));
    }
    let r2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
    let r = r2.sqrt();
    check_exponent(c0.re + r.re.abs())?;
    let scale = (c0 + r.re.abs()).exp();
    let (ch, sc) = if r.norm() < 1e-6 {
        let damp = (-r.re.abs()).exp();
        (cosh_stable(r) * damp, sinhc(r) * damp)
    } else {
        let (ch, sh) = damped_cosh_sinh(r);
        (ch, sh / r)
    };
    let ch = ch * scale;
    let sc = sc * scale;
    let (cx, cy, cz) = (c[0] * sc, c[1] * sc, c[2] * sc);
    let mut op = Operator::zeros(2);
    op.set(0, 0, ch + cz);
    op.set(0, 1, cx - Complex64::new(0.0, 1.0) * cy);
    op.set(1, 0, cx + Complex64::new(0.0, 1.0) * cy);
    op.set(1, 1, ch - cz);
    Ok(op)
}

/// In-place single-qubit `state <- exp(c0 I + sum c_k sigma_k) state`, with
/// the growing part of the exponent routed into the log norm offset.
pub fn apply_exp_pauli_vector(
    state: &mut QuantumState,
    c0: Complex64,
    c: [Complex64; 3],
) -> Result<()> {
    if state.dim() != 2 {
        return Err(CoreError::DimensionMismatch(2, state.dim()));
    }
    let r2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
    let r_abs = r2.sqrt().re.abs();
    // Leave only the bounded part in the dense factor; the growth goes into
    // the log norm offset.
    let op = exp_pauli_vector(Complex64::new(-r_abs, c0.im), c)?;
    let out = op.matvec(state.amplitudes())?;
    state.amplitudes_mut().copy_from_slice(&out);
    state.shift_log_norm(c0.re + r_abs);
    Ok(())
}
