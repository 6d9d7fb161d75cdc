mod common;

use nclp::algebra::{BlockMatrix, State};
use nclp::lp::norm_p;
use nclp::modular::{connes_cocycle, modular_automorphism, selfpolar_form};
use nclp::scalar::{cabs, cr};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cocycle_identity(alg in common::algebra(), seed in any::<u64>(), s in -2.0..2.0f64, t in -2.0..2.0f64) {
        let phi = State::<f64>::random_faithful(&alg, seed);
        let psi = State::<f64>::random_faithful(&alg, seed ^ 0x55);
        let u = |x: f64| connes_cocycle(&psi, &phi, cr(x)).unwrap();
        let lhs = &u(s) * &modular_automorphism(&phi, s, &u(t)).unwrap();
        prop_assert!(lhs.distance(&u(s + t)) < 1e-9);
    }

    #[test]
    fn flow_preserves_the_state(alg in common::algebra(), seed in any::<u64>(), t in -3.0..3.0f64) {
        let phi = State::<f64>::random_faithful(&alg, seed);
        let x = BlockMatrix::gaussian(&alg, &mut common::rng(seed ^ 1));
        let y = modular_automorphism(&phi, t, &x).unwrap();
        prop_assert!(cabs(phi.eval(&y) - phi.eval(&x)) < 1e-10);
    }

    #[test]
    fn selfpolar_is_hermitian_and_matches_l2(alg in common::algebra(), seed in any::<u64>()) {
        let phi = State::<f64>::random_faithful(&alg, seed);
        let mut rng = common::rng(seed ^ 2);
        let x = BlockMatrix::gaussian(&alg, &mut rng);
        let y = BlockMatrix::gaussian(&alg, &mut rng);
        prop_assert!(cabs(selfpolar_form(&phi, &x, &y) - selfpolar_form(&phi, &y, &x).conj()) < 1e-10);
        let r = phi.power(0.25);
        let l2 = norm_p(&(&(&r * &x) * &r), 2.0);
        prop_assert!((l2 * l2 - selfpolar_form(&phi, &x, &x).re).abs() < 1e-10);
    }
}
