#![allow(dead_code)]

use nclp::algebra::Algebra;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn algebra() -> impl Strategy<Value = Algebra> {
    prop::sample::select(vec![
        vec![1],
        vec![2],
        vec![3],
        vec![1, 1],
        vec![2, 1],
        vec![1, 2, 1],
        vec![2, 2],
    ])
    .prop_map(|b| Algebra::new(b).unwrap())
}

pub fn small_algebra() -> impl Strategy<Value = Algebra> {
    prop::sample::select(vec![vec![1], vec![2], vec![1, 1], vec![2, 1], vec![3]])
        .prop_map(|b| Algebra::new(b).unwrap())
}

pub fn exponent() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![1.0, 1.5, 3.0, 4.0, 7.0])
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
