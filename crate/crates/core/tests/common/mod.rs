#![allow(dead_code)]

use lawinv::laws::{DiscreteLaw, UniformSample};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Law with up to `max_atoms` integer atoms in `-20..=20` and random weights.
pub fn law(max_atoms: usize) -> impl Strategy<Value = DiscreteLaw<f64>> {
    prop::collection::vec((-20i32..=20, 1u32..=10), 1..=max_atoms).prop_map(|atoms| {
        let total: u32 = atoms.iter().map(|a| a.1).sum();
        DiscreteLaw::new(
            atoms
                .into_iter()
                .map(|(v, w)| (f64::from(v), f64::from(w) / f64::from(total))),
        )
        .expect("valid atoms")
    })
}

/// Real-valued law with fractional atoms.
pub fn real_law(max_atoms: usize) -> impl Strategy<Value = DiscreteLaw<f64>> {
    prop::collection::vec((-10.0f64..10.0, 0.05f64..1.0), 1..=max_atoms).prop_map(|atoms| {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        DiscreteLaw::new(atoms.into_iter().map(|(v, w)| (v, w / total))).expect("valid atoms")
    })
}

pub fn nonconstant_law(max_atoms: usize) -> impl Strategy<Value = DiscreteLaw<f64>> {
    law(max_atoms.max(2)).prop_filter("nonconstant", |x| !x.is_constant())
}

/// Integer-valued sample of length `n`.
pub fn int_sample(n: usize) -> impl Strategy<Value = UniformSample<f64>> {
    prop::collection::vec(-6i32..=6, n).prop_map(|v| UniformSample::new(v.into_iter().map(f64::from).collect()).expect("finite"))
}

pub fn real_sample(n: usize) -> impl Strategy<Value = UniformSample<f64>> {
    prop::collection::vec(-10.0f64..10.0, n).prop_map(|v| UniformSample::new(v).expect("finite"))
}

/// Two samples of a common random length in `lo..=hi`.
pub fn sample_pair(lo: usize, hi: usize) -> impl Strategy<Value = (UniformSample<f64>, UniformSample<f64>)> {
    (lo..=hi).prop_flat_map(|n| {
        (
            prop_oneof![int_sample(n), real_sample(n)],
            prop_oneof![int_sample(n), real_sample(n)],
        )
    })
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}
