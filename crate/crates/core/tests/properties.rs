use std::collections::BTreeSet;

use hyperflip::geometry::{ear_clip, orientation, triangle_area};
use hyperflip::random::{random_config, random_heights};
use hyperflip::{
    apply_flip, build_level2, coherent_subdivision, collapse_level2, enumerate_flips, gkz, is_coherent,
    CoherentOutcome, Coherence, Hypertriangulation, Label, Point2, PointConfig, Rational, SimplePolygon,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sample(seed: u64, n: usize, k: usize) -> Option<(PointConfig, Hypertriangulation)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = random_config(n, &mut rng);
    for _ in 0..20 {
        let h = random_heights(n, 50, &mut rng);
        if let Ok(CoherentOutcome::Triangulated(t)) = coherent_subdivision(&base, k, &h) {
            return Some((base, t));
        }
    }
    None
}

fn flip_keys(t: &Hypertriangulation) -> BTreeSet<String> {
    enumerate_flips(t).unwrap().iter().map(|f| format!("{f}")).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flips_preserve_validity_and_reverse(seed in any::<u64>(), n in 4usize..=6, k_off in 0usize..5) {
        let k = 1 + k_off % (n - 1);
        let Some((_, t)) = sample(seed, n, k) else { return Ok(()) };
        for f in enumerate_flips(&t).unwrap() {
            let next = apply_flip(&t, &f).unwrap();
            prop_assert!(next.validate().is_ok());
            let back = f.reversed();
            prop_assert!(enumerate_flips(&next).unwrap().contains(&back));
            prop_assert_eq!(apply_flip(&next, &back).unwrap(), t.clone());
        }
    }

    #[test]
    fn complement_is_an_involution_commuting_with_flips(seed in any::<u64>(), n in 4usize..=6, k_off in 0usize..5) {
        let k = 1 + k_off % (n - 1);
        let Some((_, t)) = sample(seed, n, k) else { return Ok(()) };
        let c = t.complement().unwrap();
        prop_assert_eq!(c.k(), n - k);
        prop_assert!(c.validate().is_ok());
        prop_assert_eq!(c.complement().unwrap(), t.clone());
        let mapped: BTreeSet<String> =
            enumerate_flips(&t).unwrap().iter().map(|f| format!("{}", f.complement(n).unwrap())).collect();
        prop_assert_eq!(mapped, flip_keys(&c));
    }

    #[test]
    fn coherent_witness_regenerates(seed in any::<u64>(), n in 4usize..=6, k_off in 0usize..5) {
        let k = 1 + k_off % (n - 1);
        let Some((base, t)) = sample(seed, n, k) else { return Ok(()) };
        match is_coherent(&t).unwrap() {
            Coherence::Coherent(h) => {
                let back = coherent_subdivision(&base, k, &h).unwrap().triangulation();
                prop_assert_eq!(back, Some(t));
            }
            Coherence::Incoherent => prop_assert!(false, "lifted triangulation reported incoherent"),
        }
    }

    #[test]
    fn gkz_sums_to_level_and_ignores_translation(seed in any::<u64>(), n in 4usize..=6, k_off in 0usize..5,
                                                 dx in -50i64..50, dy in -50i64..50) {
        let k = 1 + k_off % (n - 1);
        let Some((base, t)) = sample(seed, n, k) else { return Ok(()) };
        let v = gkz(&t).unwrap();
        prop_assert_eq!(v.sum(), Rational::from_integer((k as i64).into()));
        let moved = base.translated(&Point2::from_ints(dx, dy));
        let cfg = hyperflip::k_fold_sums(&moved, k).unwrap();
        let u = Hypertriangulation::new(cfg, &t.triples()).unwrap();
        prop_assert_eq!(gkz(&u).unwrap(), v);
        prop_assert_eq!(flip_keys(&u), flip_keys(&t));
        prop_assert_eq!(is_coherent(&u).unwrap().is_coherent(), true);
    }

    #[test]
    fn level_one_roundtrips_through_level_two(seed in any::<u64>(), n in 3usize..=7) {
        let Some((_, t)) = sample(seed, n, 1) else { return Ok(()) };
        let u = build_level2(&t).unwrap();
        prop_assert_eq!(collapse_level2(&u).unwrap(), t);
    }

    #[test]
    fn orientation_symmetries(a in (-99i64..99, -99i64..99), b in (-99i64..99, -99i64..99), c in (-99i64..99, -99i64..99)) {
        let (p, q, r) = (Point2::from_ints(a.0, a.1), Point2::from_ints(b.0, b.1), Point2::from_ints(c.0, c.1));
        prop_assert_eq!(orientation(&p, &q, &r), orientation(&q, &r, &p));
        prop_assert_eq!(orientation(&p, &q, &r), orientation(&q, &p, &r).reversed());
    }

    #[test]
    fn ear_clip_conserves_area(mut angles in prop::collection::btree_set(0u32..360, 3..12),
                               radii in prop::collection::vec(5i64..60, 12)) {
        let pts: Vec<Point2> = std::mem::take(&mut angles)
            .into_iter()
            .zip(&radii)
            .map(|(deg, &r)| {
                let t = (deg as f64).to_radians();
                Point2::from_ints((r as f64 * t.cos()).round() as i64, (r as f64 * t.sin()).round() as i64)
            })
            .collect();
        let Ok(poly) = SimplePolygon::new(pts) else { return Ok(()) };
        let tris = ear_clip(&poly);
        prop_assert_eq!(tris.len(), poly.len() - 2);
        let total: Rational = tris.iter().map(|[a, b, c]| triangle_area(a, b, c)).sum();
        prop_assert_eq!(total, poly.area());
    }

    #[test]
    fn label_text_roundtrip(indices in prop::collection::btree_set(1usize..=64, 1..8)) {
        let v: Vec<usize> = indices.into_iter().collect();
        let l = Label::new(&v).unwrap();
        prop_assert_eq!(l.to_string().parse::<Label>().unwrap(), l);
        prop_assert_eq!(l.indices().collect::<Vec<_>>(), v);
    }
}
