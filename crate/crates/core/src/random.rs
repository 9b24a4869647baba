//! Seeded random configurations and height functions for experiments.

use rand::Rng;

use crate::coherent::HeightFunction;
use crate::geometry::Point2;
use crate::model::{genericity, PointConfig};

const COORD_RANGE: i64 = 10_000;
const MAX_ATTEMPTS: usize = 10_000;

/// Strongly generic at every level `1..n`.
pub fn is_generic_at_all_levels(base: &PointConfig) -> bool {
    (1..base.n()).all(|k| genericity(base, k).is_strongly_generic())
}

fn retry<R: Rng>(rng: &mut R, mut sample: impl FnMut(&mut R) -> Option<PointConfig>) -> PointConfig {
    for _ in 0..MAX_ATTEMPTS {
        if let Some(cfg) = sample(rng) {
            if is_generic_at_all_levels(&cfg) {
                return cfg;
            }
        }
    }
    panic!("no strongly generic sample after {MAX_ATTEMPTS} attempts");
}

/// Integer points in a square, strongly generic at every level.
pub fn random_config<R: Rng>(n: usize, rng: &mut R) -> PointConfig {
    retry(rng, |rng| {
        let pts: Vec<(i64, i64)> = (0..n)
            .map(|_| (rng.random_range(-COORD_RANGE..=COORD_RANGE), rng.random_range(-COORD_RANGE..=COORD_RANGE)))
            .collect();
        PointConfig::from_ints(&pts).ok()
    })
}

/// Random configuration with at least one point interior to the hull.
pub fn random_with_interior_point<R: Rng>(n: usize, rng: &mut R) -> PointConfig {
    retry(rng, |rng| {
        let cfg = random_config(n, rng);
        (!cfg.is_convex_position()).then_some(cfg)
    })
}

/// Integer points near a circle, in convex position.
pub fn random_convex_position<R: Rng>(n: usize, rng: &mut R) -> PointConfig {
    retry(rng, |rng| {
        let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(|a, b| a.total_cmp(b));
        let r = COORD_RANGE as f64;
        let pts: Vec<Point2> = angles
            .iter()
            .map(|t| {
                let jitter = rng.random_range(-3..=3);
                Point2::from_ints((r * t.cos()).round() as i64 + jitter, (r * t.sin()).round() as i64)
            })
            .collect();
        let cfg = PointConfig::new(pts).ok()?;
        cfg.is_convex_position().then_some(cfg)
    })
}

/// Integer heights in `[-range, range]`.
pub fn random_heights<R: Rng>(n: usize, range: i64, rng: &mut R) -> HeightFunction {
    let h: Vec<i64> = (0..n).map(|_| rng.random_range(-range..=range)).collect();
    HeightFunction::from_ints(&h)
}
