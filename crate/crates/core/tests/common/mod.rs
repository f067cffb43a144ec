#![allow(dead_code)]

use finitary::sample;
use finitary::{compile, LinearRepresentation, Model, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// HMM with n <= 4, |Σ| <= 3, walk with k <= 3, or automaton with n <= 3,
/// |Σ| <= 2, by seed.
pub fn random_model(seed: u64) -> Model<Rational> {
    let mut r = rng(seed);
    match r.gen_range(0..3) {
        0 => {
            let n = r.gen_range(1..=4);
            let sigma = r.gen_range(1..=3);
            Model::Hmm(sample::random_hmm(&mut r, n, sigma))
        }
        1 => {
            let k = r.gen_range(1..=3);
            let sigma = r.gen_range(1..=k.min(2));
            Model::Qrw(sample::random_qrw(&mut r, k, sigma))
        }
        _ => {
            let n = r.gen_range(1..=3);
            let sigma = r.gen_range(1..=2);
            Model::Pfa(sample::random_pfa(&mut r, n, sigma))
        }
    }
}

pub fn random_lr(seed: u64) -> LinearRepresentation<Rational> {
    compile(&random_model(seed))
}
