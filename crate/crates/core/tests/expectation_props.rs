mod common;

use nclp::algebra::BlockMatrix;
use nclp::expectation::{
    construct_expectation, interpolation_gap, lp_expectation, lp_inclusion, restrict_state,
    takesaki_invariant,
};
use nclp::factory::{random_invariant_inclusion, random_noninvariant_inclusion};
use nclp::linalg::{self, CMat};
use proptest::prelude::*;
use rand::seq::SliceRandom;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constructed_expectations_satisfy_all_invariants(src in common::small_algebra(), seed in any::<u64>()) {
        let (a, psi) = random_invariant_inclusion::<f64, _>(&src, &mut common::rng(seed)).unwrap();
        let (invariant, _) = takesaki_invariant(&a, &psi).unwrap();
        prop_assert!(invariant);
        let e = construct_expectation(&a, &psi).unwrap();
        let r = e.check();
        for (name, d) in [
            ("idempotence", r.idempotence),
            ("module", r.module),
            ("positivity", r.positivity),
            ("state_preservation", r.state_preservation),
            ("identity_on_subalgebra", r.identity_on_subalgebra),
            ("unital", r.unital),
        ] {
            prop_assert!(d < 1e-9, "{} defect {}", name, d);
        }
    }

    #[test]
    fn expectation_is_independent_of_basis_order(src in common::small_algebra(), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (a, psi) = random_invariant_inclusion::<f64, _>(&src, &mut rng).unwrap();
        let mut order: Vec<usize> = (0..a.basis().len()).collect();
        order.shuffle(&mut rng);
        let b = a.with_basis_order(&order).unwrap();
        let e1 = construct_expectation(&a, &psi).unwrap();
        let e2 = construct_expectation(&b, &psi).unwrap();
        prop_assert!(linalg::frobenius(&(e1.map().matrix() - e2.map().matrix())) < 1e-9);
    }

    #[test]
    fn lp_expectation_inverts_inclusion(src in common::small_algebra(), p in common::exponent(), seed in any::<u64>()) {
        let (a, psi) = random_invariant_inclusion::<f64, _>(&src, &mut common::rng(seed)).unwrap();
        let e = construct_expectation(&a, &psi).unwrap();
        let phi_a = restrict_state(&psi, &a).unwrap();
        let iota = lp_inclusion(&e, &phi_a, p).unwrap();
        let ep = lp_expectation(&e, &psi, p).unwrap();
        let back = ep.after(&iota).unwrap();
        let n = back.matrix().nrows();
        prop_assert!(linalg::frobenius(&(back.matrix() - CMat::identity(n, n))) < 1e-9);
        let proj = iota.after(&ep).unwrap();
        let twice = proj.after(&proj).unwrap();
        prop_assert!(linalg::frobenius(&(twice.matrix() - proj.matrix())) < 1e-9);
    }

    #[test]
    fn interpolation_inequality(p in prop::sample::select(vec![2.0, 3.0, 4.0, 8.0]), seed in any::<u64>(), invariant in any::<bool>()) {
        let mut rng = common::rng(seed);
        let (a, psi) = if invariant {
            random_invariant_inclusion::<f64, _>(&nclp::Algebra::new(vec![2, 1]).unwrap(), &mut rng).unwrap()
        } else {
            random_noninvariant_inclusion::<f64, _>(&mut rng)
        };
        for _ in 0..20 {
            let x = BlockMatrix::gaussian(a.structure(), &mut rng);
            let gap = interpolation_gap(&a, &psi, &x, p).unwrap();
            prop_assert!(gap > -1e-10);
            if invariant {
                prop_assert!(gap.abs() < 1e-9);
            }
        }
    }
}

#[test]
fn non_invariant_inclusions_have_no_expectation() {
    let mut rng = common::rng(5);
    for _ in 0..10 {
        let (a, psi) = random_noninvariant_inclusion::<f64, _>(&mut rng);
        let (invariant, d) = takesaki_invariant(&a, &psi).unwrap();
        assert!(!invariant && d > 1e-6);
        assert!(matches!(
            construct_expectation(&a, &psi),
            Err(nclp::Error::NotInvariant { .. })
        ));
    }
}
