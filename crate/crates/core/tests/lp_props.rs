mod common;

use nclp::algebra::{BlockMatrix, State};
use nclp::lp::{
    clarkson_defect, conjugate_exponent, dual_witness, left_support, lp_norm, mazur_map, norm_p,
    right_support, state_power, trace_pairing, LpVector,
};
use nclp::scalar::{cabs, cf};
use proptest::prelude::*;

fn unit_vector(alg: &nclp::Algebra, p: f64, rng: &mut rand_chacha::ChaCha8Rng) -> BlockMatrix<f64> {
    let g = BlockMatrix::gaussian(alg, rng);
    let n = norm_p(&g, p);
    g.scale_re(1.0 / n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn homogeneity(alg in common::algebra(), p in common::exponent(), re in -3.0..3.0f64, im in -3.0..3.0f64, seed in any::<u64>()) {
        let h = BlockMatrix::<f64>::gaussian(&alg, &mut common::rng(seed));
        let lam = cf::<f64>(re, im);
        let lhs = norm_p(&h.scale(lam), p);
        prop_assert!((lhs - cabs(lam) * norm_p(&h, p)).abs() < 1e-10 * (1.0 + lhs));
    }

    #[test]
    fn dual_witness_attains_the_norm(alg in common::algebra(), p in prop::sample::select(vec![1.5, 3.0, 4.0]), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let h: LpVector<f64> = LpVector::new(BlockMatrix::gaussian(&alg, &mut rng), p).unwrap();
        let q = conjugate_exponent(p).unwrap();
        let y: LpVector<f64> = LpVector::new(dual_witness(&h), q).unwrap();
        prop_assert!((lp_norm(&y) - 1.0).abs() < 1e-10);
        let attained = trace_pairing(&h, &y).unwrap();
        prop_assert!((attained.re - lp_norm(&h)).abs() < 1e-10 * lp_norm(&h));
        for _ in 0..200 {
            let z = LpVector::new(unit_vector(&alg, q, &mut rng), q).unwrap();
            prop_assert!(cabs(trace_pairing(&h, &z).unwrap()) <= lp_norm(&h) * (1.0 + 1e-10));
        }
    }

    #[test]
    fn clarkson_forward_direction(alg in common::algebra(), p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0, 4.0]), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        // Disjoint diagonal supports on both sides.
        let g = BlockMatrix::<f64>::gaussian(&alg, &mut rng);
        let mut h = BlockMatrix::zeros(&alg);
        let mut k = BlockMatrix::zeros(&alg);
        for b in 0..alg.num_blocks() {
            let n = alg.blocks()[b];
            for i in 0..n {
                for j in 0..n {
                    let target = if i % 2 == 0 && j % 2 == 0 { &mut h } else if i % 2 == 1 && j % 2 == 1 { &mut k } else { continue };
                    target.block_mut(b)[(i, j)] = g.block(b)[(i, j)];
                }
            }
        }
        let r = clarkson_defect(&LpVector::new(h, p).unwrap(), &LpVector::new(k, p).unwrap()).unwrap();
        prop_assert!(r.orthogonal);
        prop_assert!(r.defect < 1e-8);
    }

    #[test]
    fn clarkson_converse(alg in common::algebra(), p in prop::sample::select(vec![1.0, 1.5, 3.0, 4.0]), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let h = unit_vector(&alg, p, &mut rng);
        let k = unit_vector(&alg, p, &mut rng);
        let r = clarkson_defect(&LpVector::new(h, p).unwrap(), &LpVector::new(k, p).unwrap()).unwrap();
        prop_assume!(r.witness > 0.1);
        prop_assert!(r.defect > 1e-6);
    }

    #[test]
    fn support_identities(alg in common::algebra(), seed in any::<u64>(), rank_drop in any::<bool>()) {
        let mut rng = common::rng(seed);
        let mut h = BlockMatrix::<f64>::gaussian(&alg, &mut rng);
        if rank_drop {
            let n = alg.blocks()[0];
            for j in 0..n {
                h.block_mut(0)[(0, j)] = nclp::scalar::cr(0.0);
            }
        }
        let (sl, sr) = (left_support(&h), right_support(&h));
        prop_assert!((&sl * &h).distance(&h) < 1e-10);
        prop_assert!((&h * &sr).distance(&h) < 1e-10);
        let x = BlockMatrix::gaussian(&alg, &mut rng);
        let s = right_support(&(&x * &h));
        prop_assert!((&s * &sr).distance(&s) < 1e-8);
    }

    #[test]
    fn mazur_roundtrip(alg in common::algebra(), p in common::exponent(), q in common::exponent(), seed in any::<u64>()) {
        let phi = State::<f64>::random_faithful(&alg, seed);
        let h = state_power(&phi, 1.0 / p).unwrap();
        let there = mazur_map(&h, q).unwrap();
        prop_assert!((lp_norm(&there) - lp_norm(&h).powf(p / q)).abs() < 1e-10);
        let back = mazur_map(&there, p).unwrap();
        prop_assert!(back.data().distance(h.data()) < 1e-9);
    }
}

#[test]
fn state_power_has_unit_norm() {
    let alg = nclp::Algebra::new(vec![2, 1]).unwrap();
    for p in [1.0, 1.5, 3.0, 8.0] {
        let phi = State::<f64>::random_faithful(&alg, 11);
        assert!((lp_norm(&state_power(&phi, 1.0 / p).unwrap()) - 1.0).abs() < 1e-12);
    }
}
