mod common;

use burnside_core::field::quaternion::Unit;
use burnside_core::modstruct::{find_invariant_subspace, IrreducibilityVerdict, DEFAULT_BUDGET};
use burnside_core::quat::{
    is_nilpotent_quaternion, nilpotent_span_decomposition, real_representation, DecompositionReport, Pattern,
    QuaternionMatrix,
};
use burnside_core::{Error, ExactMatrix, FieldDescriptor, Quaternion};
use common::*;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;

fn random_qmatrix(n: usize, rng: &mut impl Rng) -> QuaternionMatrix {
    let mut c = || BigRational::new(rng.random_range(-6i64..=6).into(), rng.random_range(1i64..=3).into());
    QuaternionMatrix::from_fn(n, |_, _| Quaternion::new(c(), c(), c(), c()))
}

fn all_patterns(n: usize) -> Vec<Pattern> {
    let mut out = Vec::new();
    for first in 0..n {
        for second in 0..n {
            if first == second {
                continue;
            }
            for unit in Unit::ALL {
                out.push(Pattern::SingleEntry { row: first, col: second, unit });
                out.push(Pattern::Balanced { first, second, unit });
                if unit != Unit::One {
                    out.push(Pattern::Anticommuting { first, second, unit });
                }
            }
        }
    }
    out
}

/// Real forms of `E_rs · u` spanning `M_n(ℍ)` acting on ℚ^{4n}.
fn full_quaternion_algebra(n: usize) -> Vec<ExactMatrix> {
    let mut out = Vec::new();
    for r in 0..n {
        for s in 0..n {
            for u in Unit::ALL {
                out.push(real_representation(&QuaternionMatrix::single(n, r, s, Quaternion::unit(u))));
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn decomposition_reconstructs_with_nilpotent_terms(seed in any::<u64>(), n in 2usize..=5) {
        let x = random_qmatrix(n, &mut rng(seed));
        let dec = nilpotent_span_decomposition(&x).unwrap();
        prop_assert_eq!(dec.reconstruct(), x.clone());
        for t in &dec.terms {
            prop_assert_eq!(&t.matrix, &t.pattern.matrix(n));
            prop_assert!(t.matrix.mul(&t.matrix).is_zero());
        }
        let report = DecompositionReport::new(&x, &dec);
        let back: DecompositionReport = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
        prop_assert!(back.verify().unwrap());
    }

    #[test]
    fn real_representation_is_multiplicative(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = rng(seed);
        let (a, b) = (random_qmatrix(n, &mut rng), random_qmatrix(n, &mut rng));
        prop_assert_eq!(real_representation(&a.mul(&b)), &real_representation(&a) * &real_representation(&b));
        prop_assert_eq!(real_representation(&a.add(&b)), &real_representation(&a) + &real_representation(&b));
    }
}

#[test]
fn every_pattern_squares_to_zero_in_the_real_form() {
    let mut rng = rng(20);
    for _ in 0..20 {
        let n = rng.random_range(2..=4);
        for p in all_patterns(n) {
            let m = p.matrix(n);
            assert!(m.mul(&m).is_zero(), "{p:?}");
            assert!(is_nilpotent_quaternion(&m), "{p:?}");
            let r = real_representation(&m);
            assert!((&r * &r).is_zero(), "{p:?}");
        }
    }
}

#[test]
fn identity_and_patterns_span_m2_over_the_rationals() {
    let q = FieldDescriptor::rationals();
    let mut mats: Vec<ExactMatrix> = all_patterns(2).iter().map(|p| real_representation(&p.matrix(2))).collect();
    mats.push(ExactMatrix::identity(&q, 8));
    assert_eq!(span_dim(&q, &mats), 16);
    assert_eq!(span_dim(&q, &full_quaternion_algebra(2)), 16);
}

#[test]
fn quaternion_algebras_act_irreducibly() {
    for n in 1..=2 {
        let gens = full_quaternion_algebra(n);
        let verdict = find_invariant_subspace(&gens, 0, DEFAULT_BUDGET).unwrap();
        assert!(matches!(verdict, IrreducibilityVerdict::Irreducible(_)), "n = {n}: {verdict:?}");
    }
}

#[test]
fn single_quaternion_has_no_decomposition() {
    let x = QuaternionMatrix::identity(1);
    assert!(matches!(nilpotent_span_decomposition(&x), Err(Error::NotApplicable(_))));
}
