mod common;

use nclp::algebra::{AlgebraMap, BlockMatrix, State};
use nclp::expectation::Subalgebra;
use nclp::factory::{random_isometry_data, random_weights, random_yeadon_triple, JordanKind};
use nclp::isometry::{build_isometry, classify};
use nclp::json::{from_json, to_json};
use nclp::lp::{state_power, LpMap, LpVector};
use nclp::yeadon::YeadonTriple;
use nclp::{linalg, Algebra, Error};

#[test]
fn algebra_with_trace_weights() {
    let a: Algebra = from_json(r#"{"blocks":[2,1],"trace_weights":[1.5,0.5]}"#).unwrap();
    assert_eq!(a.trace_weights(), Some(&[1.5, 0.5][..]));
    assert_eq!(from_json::<Algebra>(&to_json(&a)).unwrap(), a);
    assert!(from_json::<Algebra>(r#"{"blocks":[0]}"#).is_err());
    assert!(from_json::<Algebra>(r#"{"blocks":[]}"#).is_err());
}

#[test]
fn states_vectors_and_maps() {
    let a = Algebra::new(vec![2, 1]).unwrap();
    let phi = State::<f64>::random_faithful(&a, 2);
    let back: State<f64> = from_json(&to_json(&phi)).unwrap();
    assert!(back.density().distance(phi.density()) < 1e-15);

    let v = state_power(&phi, 1.0 / 3.0).unwrap();
    let back: LpVector<f64> = from_json(&to_json(&v)).unwrap();
    assert_eq!(back.p(), 3.0);
    assert!(back.data().distance(v.data()) < 1e-15);

    let t = LpMap::from_map(AlgebraMap::<f64>::transpose(&a), 4.0).unwrap();
    let back: LpMap<f64> = from_json(&to_json(&t)).unwrap();
    assert!(linalg::frobenius(&(back.matrix() - t.matrix())) < 1e-15);
}

#[test]
fn map_matrix_follows_row_major_vectorization() {
    let a = Algebra::new(vec![2]).unwrap();
    let t = LpMap::from_map(AlgebraMap::<f64>::transpose(&a), 3.0).unwrap();
    let v: serde_json::Value = serde_json::from_str(&to_json(&t)).unwrap();
    // e12 (index 1) maps to e21 (index 2).
    assert_eq!(v["matrix"][2][1], serde_json::json!([1.0, 0.0]));
    assert_eq!(v["matrix"][1][1], serde_json::json!([0.0, 0.0]));
}

#[test]
fn shape_errors() {
    let bad = r#"{"p":3,"source":{"blocks":[2]},"target":{"blocks":[2]},"matrix":[[[1,0]]]}"#;
    assert!(matches!(
        from_json::<LpMap<f64>>(bad),
        Err(Error::ShapeMismatch(_))
    ));
    let not_state = r#"{"algebra":{"blocks":[1]},"density":{"blocks":[[[[-1,0]]]]}}"#;
    assert!(from_json::<State<f64>>(not_state).is_err());
}

#[test]
fn subalgebra_and_triple() {
    let parent = Algebra::new(vec![3]).unwrap();
    let d = Subalgebra::<f64>::diagonal(&parent);
    let back: Subalgebra<f64> = from_json(&to_json(&d)).unwrap();
    assert_eq!(back.dim(), 3);

    let mut rng = common::rng(8);
    let src = Algebra::new(vec![2]).unwrap();
    let src = src
        .clone()
        .with_trace_weights(random_weights(&src, &mut rng))
        .unwrap();
    let y = random_yeadon_triple::<f64, _>(&src, JordanKind::Mixed, 3.0, &mut rng).unwrap();
    let back: YeadonTriple<f64> = from_json(&to_json(&y)).unwrap();
    assert!(back.distance(&y) < 1e-12);
}

#[test]
fn classification_report_names_stages() {
    let src = Algebra::new(vec![2, 1]).unwrap();
    let data = random_isometry_data::<f64, _>(&src, &mut common::rng(4)).unwrap();
    let t = build_isometry(&data, 3.0).unwrap();
    let r = classify(&t, data.reference_state(), 3.0).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["verdict"], "accept");
    assert!(v["defects"]["reconstruction"].as_f64().unwrap() < 1e-9);
    assert!(v["data"]["phi_bar"]["density"]["blocks"].is_array());

    let x = BlockMatrix::<f64>::identity(&src);
    let bad = LpMap::from_fn(&src, &src, 3.0, |h| &(h * &x) + &x).unwrap();
    let r = classify(&bad, data.reference_state(), 3.0).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["verdict"], "reject");
    assert_eq!(v["failed_stage"], "isometry");
}
