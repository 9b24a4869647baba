//! Seeded inputs shared by the benchmarks.

use hyperflip::coherent::{coherent_subdivision, CoherentOutcome};
use hyperflip::random::{random_config, random_heights};
use hyperflip::{Hypertriangulation, PointConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn config(n: usize, seed: u64) -> PointConfig {
    random_config(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Two coherent hypertriangulations of the same set from different heights.
pub fn coherent_pair(base: &PointConfig, k: usize, seed: u64) -> (Hypertriangulation, Hypertriangulation) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut next = || loop {
        let h = random_heights(base.n(), 1000, &mut rng);
        if let Ok(CoherentOutcome::Triangulated(t)) = coherent_subdivision(base, k, &h) {
            return t;
        }
    };
    (next(), next())
}
