mod common;

use nclp::algebra::{BlockMatrix, State};
use nclp::factory::{random_isometry_data, random_positive_isometry_data};
use nclp::isometry::{
    amplified_isometry_defect, build_isometry, classify, classify_with, complement_projection,
    extract_pi, isometry_defect, ClassifyOptions, Verdict,
};
use nclp::linalg;
use nclp::lp::{norm_p, sampled_isometry_defect};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn factory_maps_are_complete_isometries(src in common::small_algebra(), p in common::exponent(), seed in any::<u64>()) {
        let data = random_isometry_data::<f64, _>(&src, &mut common::rng(seed)).unwrap();
        let t = build_isometry(&data, p).unwrap();
        let basis: Vec<_> = (0..src.total_dim()).map(|k| BlockMatrix::basis(&src, k)).collect();
        prop_assert!(sampled_isometry_defect(&t, &basis) < 1e-9);
        prop_assert!(isometry_defect(&t, 200, seed) < 1e-9);
        prop_assert!(amplified_isometry_defect(&t, 2, 50, seed) < 1e-9);
    }

    #[test]
    fn module_property(src in common::small_algebra(), p in common::exponent(), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let data = random_isometry_data::<f64, _>(&src, &mut rng).unwrap();
        let t = build_isometry(&data, p).unwrap();
        let h = BlockMatrix::gaussian(&src, &mut rng);
        let x = BlockMatrix::gaussian(&src, &mut rng);
        let lhs = t.apply_element(&(&h * &x));
        let rhs = &t.apply_element(&h) * &data.pi().apply(&x).unwrap();
        prop_assert!(lhs.distance(&rhs) < 1e-9 * (1.0 + lhs.frobenius()));
    }

    #[test]
    fn pi_does_not_depend_on_the_state(src in common::small_algebra(), p in common::exponent(), seed in any::<u64>()) {
        let data = random_isometry_data::<f64, _>(&src, &mut common::rng(seed)).unwrap();
        let t = build_isometry(&data, p).unwrap();
        let a = extract_pi(&t, data.reference_state(), p).unwrap();
        let b = extract_pi(&t, &State::random_faithful(&src, seed ^ 9), p).unwrap();
        prop_assert!(linalg::frobenius(&(a.matrix() - b.matrix())) < 1e-8);
        prop_assert!(linalg::frobenius(&(a.matrix() - data.pi().matrix())) < 1e-8);
    }

    #[test]
    fn positive_maps_preserve_positivity(src in common::small_algebra(), p in common::exponent(), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let data = random_positive_isometry_data::<f64, _>(&src, &mut rng).unwrap();
        let t = build_isometry(&data, p).unwrap();
        let g = BlockMatrix::gaussian(&src, &mut rng);
        let h = &g * &g.adjoint();
        prop_assert!(t.apply_element(&h).min_eigenvalue() > -1e-9 * norm_p(&h, 1.0));
    }

    #[test]
    fn range_is_complemented(src in common::small_algebra(), p in common::exponent(), seed in any::<u64>()) {
        let data = random_isometry_data::<f64, _>(&src, &mut common::rng(seed)).unwrap();
        let t = build_isometry(&data, p).unwrap();
        let q = complement_projection(&data, p).unwrap();
        let qt = q.after(&t).unwrap();
        prop_assert!(linalg::frobenius(&(qt.matrix() - t.matrix())) < 1e-9);
    }

    #[test]
    fn classification_at_p1(src in common::small_algebra(), seed in any::<u64>()) {
        let data = random_isometry_data::<f64, _>(&src, &mut common::rng(seed)).unwrap();
        let t = build_isometry(&data, 1.0).unwrap();
        let r = classify(&t, data.reference_state(), 1.0).unwrap();
        prop_assert_eq!(r.verdict, Verdict::Accept);
        prop_assert!(r.data.unwrap().distance(&data) < 1e-7);
    }
}

#[test]
fn transpose_is_rejected_as_two_isometry() {
    let alg = nclp::Algebra::new(vec![2]).unwrap();
    let phi = State::<f64>::tracial(&alg);
    let t = nclp::lp::LpMap::from_map(nclp::algebra::AlgebraMap::transpose(&alg), 3.0).unwrap();
    let r = classify(&t, &phi, 3.0).unwrap();
    assert_eq!(r.verdict, Verdict::Reject);
    assert!(r.defects.isometry.unwrap() < 1e-12);
    assert!((r.defects.two_isometry.unwrap() - (2.0 - 4f64.powf(1.0 / 3.0))).abs() < 1e-10);
}

#[test]
fn single_precision_pipeline() {
    let src = nclp::Algebra::new(vec![2, 1]).unwrap();
    let data = random_isometry_data::<f32, _>(&src, &mut common::rng(3)).unwrap();
    let t = build_isometry(&data, 3.0f32).unwrap();
    assert!(isometry_defect(&t, 24, 1) < 1e-4);
    let opts = ClassifyOptions {
        metric_tol: 1e-4,
        warn_tol: 1e-2,
        ..ClassifyOptions::default()
    };
    let r = classify_with(&t, data.reference_state(), 3.0f32, &opts).unwrap();
    assert_eq!(r.verdict, Verdict::Accept, "{:?}", r.failed_stages);
    assert!(r.data.unwrap().distance(&data) < 1e-3);
}
