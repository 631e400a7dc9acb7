#![allow(dead_code)]

use momsep::fock::{ModeCutoffs, MonomialSpec, StateVector};
use momsep::moments::{OperatorClass, State};
use momsep::random::{random_density, random_pure_state};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Pure or mixed two-mode state with cutoffs in 2..=3.
pub fn random_two_mode(rng: &mut ChaCha8Rng) -> State<f64> {
    let cu = ModeCutoffs::new(vec![rng.random_range(2..=3), rng.random_range(2..=3)]).unwrap();
    if rng.random_bool(0.5) {
        random_pure_state(&cu, rng).into()
    } else {
        let rank = rng.random_range(1..=3);
        random_density(&cu, rank, rng).into()
    }
}

pub fn two_qubits() -> ModeCutoffs {
    ModeCutoffs::new(vec![2, 2]).unwrap()
}

pub fn random_two_qubit_pure(rng: &mut ChaCha8Rng) -> StateVector<f64> {
    random_pure_state(&two_qubits(), rng)
}

/// Normally ordered powers `(creation, annihilation)` for one side.
pub fn side_powers() -> impl Strategy<Value = Vec<(u32, u32)>> {
    prop::collection::vec((0u32..3, 0u32..3), 1..4)
}

pub fn class_from_powers(a: &[(u32, u32)], b: &[(u32, u32)]) -> OperatorClass {
    let sa = a.iter().map(|&(n, m)| MonomialSpec::single(0, n, m)).collect();
    let sb = b.iter().map(|&(n, m)| MonomialSpec::single(1, n, m)).collect();
    OperatorClass::two_mode(sa, sb).unwrap()
}
