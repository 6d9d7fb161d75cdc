mod common;

use nclp::algebra::HomomorphismKind;
use nclp::factory::{random_weights, random_yeadon_triple, JordanKind};
use nclp::isometry::METRIC_TOL;
use nclp::yeadon::{build_yeadon_map, jordan_dichotomy_report, yeadon_decompose};
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = JordanKind> {
    prop::sample::select(vec![
        JordanKind::Multiplicative,
        JordanKind::Transpose,
        JordanKind::Mixed,
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn decompose_inverts_build(src in common::small_algebra(), k in kind(), p in prop::sample::select(vec![1.0, 1.5, 3.0, 4.0]), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let w = random_weights(&src, &mut rng);
        let src = src.with_trace_weights(w).unwrap();
        let triple = random_yeadon_triple::<f64, _>(&src, k, p, &mut rng).unwrap();
        let t = build_yeadon_map(&triple, p).unwrap();
        let back = yeadon_decompose(&t, p).unwrap();
        prop_assert!(back.distance(&triple) < 1e-7);
    }

    #[test]
    fn dichotomy_biconditional(src in common::small_algebra(), k in kind(), p in prop::sample::select(vec![1.0, 1.5, 3.0, 4.0]), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let w = random_weights(&src, &mut rng);
        let src = src.with_trace_weights(w).unwrap();
        let triple = random_yeadon_triple::<f64, _>(&src, k, p, &mut rng).unwrap();
        let r = jordan_dichotomy_report(&triple, p, 16, seed).unwrap();
        prop_assert!(r.isometry_defect < 1e-9);
        prop_assert!(r.consistent);
        if r.kind == HomomorphismKind::StarHomomorphism {
            prop_assert!(r.two_isometry_defect < METRIC_TOL);
        } else {
            prop_assert!(r.two_isometry_defect > 1e-6);
        }
    }
}
