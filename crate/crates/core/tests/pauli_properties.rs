//! Property tests for the Pauli-word algebra.

use num_complex::Complex64;
use proptest::prelude::*;
use qrev_core::{Axis, NoiseStream, PauliString, StreamId};

fn axis_strategy() -> impl Strategy<Value = Axis> {
    prop_oneof![Just(Axis::I), Just(Axis::X), Just(Axis::Y), Just(Axis::Z)]
}

fn word_strategy() -> impl Strategy<Value = PauliString> {
    proptest::collection::vec(axis_strategy(), 1..=4)
        .prop_map(|axes| PauliString::new(axes).unwrap())
}

fn word_pair_strategy() -> impl Strategy<Value = (PauliString, PauliString)> {
    (1usize..=4)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(axis_strategy(), n),
                proptest::collection::vec(axis_strategy(), n),
            )
        })
        .prop_map(|(a, b)| (PauliString::new(a).unwrap(), PauliString::new(b).unwrap()))
}

fn random_amps(dim: usize, seed: u64) -> Vec<Complex64> {
    let mut s = NoiseStream::new(seed, StreamId { trajectory: 0, channel: 0 });
    (0..dim)
        .map(|_| Complex64::new(s.standard_normal(), s.standard_normal()))
        .collect()
}

proptest! {
    #[test]
    fn word_is_involution(w in word_strategy(), seed in 0u64..(1 << 20)) {
        let amps = random_amps(w.dim(), seed);
        let mut once = vec![Complex64::new(0.0, 0.0); w.dim()];
        let mut twice = once.clone();
        w.apply(&amps, &mut once);
        w.apply(&once, &mut twice);
        for (a, b) in amps.iter().zip(&twice) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn product_matches_dense_up_to_fourth_root((a, b) in word_pair_strategy()) {
        let dense = a.matrix().mul(&b.matrix()).unwrap();
        let reduced = a.mul_phase_free(&b).unwrap().matrix();
        // Find a unit-magnitude entry and read off the dropped phase.
        let idx = reduced
            .entries()
            .iter()
            .position(|e| e.norm() > 0.5)
            .expect("Pauli matrices have unit entries");
        let phase = dense.entries()[idx] / reduced.entries()[idx];
        prop_assert!((phase.norm() - 1.0).abs() < 1e-12);
        prop_assert!((phase * phase * phase * phase - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let err = dense.sub(&reduced.scale(phase)).unwrap().max_abs();
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn commutation_is_symmetric_and_matches_dense((a, b) in word_pair_strategy()) {
        let ab = a.commutes_with(&b).unwrap();
        prop_assert_eq!(ab, b.commutes_with(&a).unwrap());
        let comm = a.matrix().commutator(&b.matrix()).unwrap().max_abs();
        prop_assert_eq!(ab, comm < 1e-12);
    }

    #[test]
    fn expectation_is_real_bounded_and_matches_dense(w in word_strategy(), seed in 0u64..(1 << 20)) {
        let amps = random_amps(w.dim(), seed);
        let ex = w.expectation(&amps).unwrap();
        prop_assert!(ex.abs() <= 1.0 + 1e-12);
        // Dense <v|P|v> / <v|v>.
        let pv = w.matrix().matvec(&amps).unwrap();
        let num: Complex64 = amps.iter().zip(&pv).map(|(v, p)| v.conj() * p).sum();
        let den: f64 = amps.iter().map(|v| v.norm_sqr()).sum();
        prop_assert!(num.im.abs() / den < 1e-12);
        prop_assert!((ex - num.re / den).abs() < 1e-12);
    }

    #[test]
    fn parse_display_roundtrip(w in word_strategy()) {
        let text = w.to_string();
        let back = PauliString::parse(&text).unwrap();
        prop_assert_eq!(w, back);
    }
}
