// SPDX-License-Identifier: Apache-2.0

use hyperstab_core::closed_forms::{c_binomial, c_cases};
use hyperstab_core::pauli::{DenseOperator, Letter, PauliString};
use hyperstab_core::stabilizer::{self, generators, GhzBlock, HyperState};
use num_bigint::BigUint;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![Just(Letter::I), Just(Letter::X), Just(Letter::Y), Just(Letter::Z)]
}

fn pauli(n: usize) -> impl Strategy<Value = PauliString> {
    (proptest::collection::vec(letter(), n), 0u8..4).prop_map(move |(ls, k)| PauliString::from_letters(&ls, k))
}

fn sized_pair(max_n: usize) -> impl Strategy<Value = (PauliString, PauliString)> {
    (1..=max_n).prop_flat_map(|n| (pauli(n), pauli(n)))
}

fn sized_triple(max_n: usize) -> impl Strategy<Value = (PauliString, PauliString, PauliString)> {
    (1..=max_n).prop_flat_map(|n| (pauli(n), pauli(n), pauli(n)))
}

fn block() -> impl Strategy<Value = GhzBlock> {
    (2usize..=6)
        .prop_flat_map(|m| proptest::collection::vec(any::<bool>(), m - 1))
        .prop_map(|tail| {
            let mut parity = vec![false];
            parity.extend(tail);
            GhzBlock::new(parity, "dof").unwrap()
        })
}

fn hyper_state() -> impl Strategy<Value = HyperState> {
    proptest::collection::vec(block(), 1..=3).prop_map(|b| HyperState::new(b).unwrap())
}

/// Fixed seed and case count so every run checks the same inputs.
fn runner(cases: u32, seed: u8) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]),
    )
}

#[test]
fn multiply_matches_dense_product() {
    runner(100, 1)
        .run(&sized_pair(6), |(p, q)| {
            let prod = p.multiply(&q).unwrap();
            prop_assert_eq!(
                prod.to_dense().unwrap(),
                p.to_dense().unwrap().matmul(&q.to_dense().unwrap()).unwrap()
            );
            Ok(())
        })
        .unwrap();
}

#[test]
fn multiply_is_associative() {
    runner(100, 2)
        .run(&sized_triple(8), |(a, b, c)| {
            let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
            Ok(())
        })
        .unwrap();
}

#[test]
fn hermitian_strings_square_to_identity() {
    runner(100, 3)
        .run(
            &(1usize..=16).prop_flat_map(|n| proptest::collection::vec(letter(), n)),
            |ls| {
                let p = PauliString::from_letters(&ls, 0);
                let sq = p.multiply(&p).unwrap();
                prop_assert!(sq.is_identity_up_to_phase());
                prop_assert_eq!(sq.phase_exp(), 0);
                Ok(())
            },
        )
        .unwrap();
}

#[test]
fn commutator_phase_matches_symplectic_form() {
    runner(100, 4)
        .run(&sized_pair(10), |(p, q)| {
            let pq = p.multiply(&q).unwrap();
            let qp = q.multiply(&p).unwrap();
            let diff = (pq.phase_exp() + 4 - qp.phase_exp()) % 4;
            prop_assert_eq!(diff, 2 * p.symplectic(&q).unwrap() as u8);
            prop_assert_eq!(p.commutes_with(&q).unwrap(), diff == 0);
            Ok(())
        })
        .unwrap();
}

#[test]
fn generators_pairwise_commute() {
    runner(50, 5)
        .run(&hyper_state(), |state| {
            let gens = generators(&state).unwrap();
            prop_assert_eq!(gens.len(), state.n());
            for a in &gens {
                for b in &gens {
                    prop_assert!(a.pauli.commutes_with(&b.pauli).unwrap());
                }
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn group_elements_fix_the_state() {
    runner(30, 6)
        .run(
            &hyper_state().prop_filter("dense check limit", |s| s.n() <= 12),
            |state| {
                prop_assert_eq!(stabilizer::verify_eigenstate(&state).unwrap(), 1usize << state.n());
                Ok(())
            },
        )
        .unwrap();
}

#[test]
fn enumeration_matches_closed_form_for_all_small_masks() {
    let mut blocks = Vec::new();
    for m in 2..=6usize {
        for mask in 0..(1u32 << (m - 1)) {
            let parity: Vec<bool> = (0..m).map(|k| k > 0 && (mask >> (k - 1)) & 1 == 1).collect();
            blocks.push(GhzBlock::new(parity, "dof").unwrap());
        }
    }
    for b in &blocks {
        let s = HyperState::new(vec![b.clone()]).unwrap();
        assert_eq!(
            BigUint::from(stabilizer::count_negative(&s).unwrap()),
            stabilizer::count_negative_closed(&s).unwrap(),
            "{s}"
        );
    }
    // Composites of up to three blocks, sampled deterministically.
    let mut checked = 0;
    for (i, a) in blocks.iter().enumerate().step_by(3) {
        for (j, b) in blocks.iter().enumerate().skip(i % 5).step_by(7) {
            let third = &blocks[(i * 7 + j * 3) % blocks.len()];
            for s in [
                HyperState::new(vec![a.clone(), b.clone()]).unwrap(),
                HyperState::new(vec![a.clone(), b.clone(), third.clone()]).unwrap(),
            ] {
                if s.n() > 16 {
                    continue;
                }
                assert_eq!(
                    BigUint::from(stabilizer::count_negative(&s).unwrap()),
                    stabilizer::count_negative_closed(&s).unwrap(),
                    "{s}"
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 100, "{checked}");
}

#[test]
fn closed_forms_agree_with_enumeration_up_to_twenty() {
    for m in 2..=20 {
        let s = HyperState::new(vec![GhzBlock::aligned(m, "dof").unwrap()]).unwrap();
        let c = BigUint::from(stabilizer::count_negative(&s).unwrap());
        assert_eq!(c_binomial(m).unwrap(), c, "m = {m}");
        assert_eq!(c_cases(m).unwrap(), c, "m = {m}");
    }
}

#[test]
fn dense_oracle_is_unitary_and_hermitian() {
    runner(50, 7)
        .run(
            &(1usize..=5).prop_flat_map(|n| proptest::collection::vec(letter(), n)),
            |ls| {
                let d: DenseOperator = PauliString::from_letters(&ls, 0).to_dense().unwrap();
                prop_assert_eq!(d.adjoint(), d.clone());
                prop_assert!(d.matmul(&d).unwrap().is_identity());
                Ok(())
            },
        )
        .unwrap();
}
