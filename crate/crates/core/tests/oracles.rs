//! Independent re-derivations checked against the engine.

use std::collections::BTreeSet;

use hyperflip::connectivity::{enumerate_all, DEFAULT_NODE_BUDGET};
use hyperflip::random::{random_config, random_with_interior_point};
use hyperflip::{
    aging_overlap, gkz, k_fold_sums, rational_to_f64, KFoldConfig, LabeledTriangle, Point2, PointConfig,
    Rational,
};
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const Q4: [(i64, i64); 4] = [(0, 0), (6, 0), (7, 5), (1, 6)];
const T4: [(i64, i64); 4] = [(0, 0), (8, 0), (3, 7), (3, 2)];

fn det(a: &Point2, b: &Point2, c: &Point2) -> Rational {
    (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x)
}

fn ccw(t: [usize; 3], pts: &[Point2]) -> [usize; 3] {
    if det(&pts[t[0]], &pts[t[1]], &pts[t[2]]).is_negative() {
        [t[0], t[2], t[1]]
    } else {
        t
    }
}

fn inside_closed(p: &Point2, t: [usize; 3], pts: &[Point2]) -> bool {
    (0..3).all(|i| !det(&pts[t[i]], &pts[t[(i + 1) % 3]], p).is_negative())
}

/// Interiors meet iff no edge line of either triangle separates them.
fn interiors_meet(s: [usize; 3], t: [usize; 3], pts: &[Point2]) -> bool {
    let separated = |a: [usize; 3], b: [usize; 3]| {
        (0..3).any(|i| {
            let (p, q) = (&pts[a[i]], &pts[a[(i + 1) % 3]]);
            b.iter().all(|&v| !det(p, q, &pts[v]).is_positive())
        })
    };
    !separated(s, t) && !separated(t, s)
}

fn centroid(t: [usize; 3], pts: &[Point2]) -> Point2 {
    let third = Rational::new(1.into(), 3.into());
    Point2::new(
        (&pts[t[0]].x + &pts[t[1]].x + &pts[t[2]].x) * &third,
        (&pts[t[0]].y + &pts[t[1]].y + &pts[t[2]].y) * &third,
    )
}

/// Bit-count classification of a label triple.
fn admissible(cfg: &KFoldConfig, t: [usize; 3]) -> bool {
    let k = cfg.k() as u32;
    let b = t.map(|i| cfg.label(i).bits());
    let pair_ok = (0..3).all(|i| (b[i] & b[(i + 1) % 3]).count_ones() == k - 1);
    let common = (b[0] & b[1] & b[2]).count_ones();
    pair_ok && (common == k - 1 || common + 2 == k)
}

/// Tilings found by covering sample points: the first uncovered candidate
/// centroid is covered by every compatible tile in turn.
fn oracle_tilings(cfg: &KFoldConfig) -> BTreeSet<Vec<[usize; 3]>> {
    let pts: Vec<Point2> = cfg.points().to_vec();
    let m = pts.len();
    let mut cands = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                if !det(&pts[a], &pts[b], &pts[c]).is_zero() && admissible(cfg, [a, b, c]) {
                    cands.push(ccw([a, b, c], &pts));
                }
            }
        }
    }
    let samples: Vec<Point2> = cands.iter().map(|&t| centroid(t, &pts)).collect();
    let hull2 = cfg.hull_area() * Rational::from_integer(2.into());
    let mut out = BTreeSet::new();
    fn go(
        placed: &mut Vec<usize>,
        cands: &[[usize; 3]],
        samples: &[Point2],
        pts: &[Point2],
        hull2: &Rational,
        out: &mut BTreeSet<Vec<[usize; 3]>>,
    ) {
        let uncovered = samples.iter().find(|s| !placed.iter().any(|&i| inside_closed(s, cands[i], pts)));
        let Some(s) = uncovered else {
            let area: Rational = placed.iter().map(|&i| det(&pts[cands[i][0]], &pts[cands[i][1]], &pts[cands[i][2]])).sum();
            if area == *hull2 {
                let mut tiles: Vec<[usize; 3]> = placed
                    .iter()
                    .map(|&i| {
                        let mut t = cands[i];
                        t.sort();
                        t
                    })
                    .collect();
                tiles.sort();
                out.insert(tiles);
            }
            return;
        };
        for (i, &t) in cands.iter().enumerate() {
            if inside_closed(s, t, pts) && placed.iter().all(|&j| !interiors_meet(cands[j], t, pts)) {
                placed.push(i);
                go(placed, cands, samples, pts, hull2, out);
                placed.pop();
            }
        }
    }
    go(&mut Vec::new(), &cands, &samples, &pts, &hull2, &mut out);
    // Edge-to-edge: no tile vertex in the relative interior of another tile's edge.
    out.retain(|tiles| {
        let used: BTreeSet<usize> = tiles.iter().flatten().copied().collect();
        tiles.iter().all(|t| {
            (0..3).all(|e| {
                let (p, q) = (&pts[t[e]], &pts[t[(e + 1) % 3]]);
                used.iter().all(|&v| {
                    let r = &pts[v];
                    !(det(p, q, r).is_zero()
                        && r != p
                        && r != q
                        && (&r.x - &p.x) * (&r.x - &q.x) + (&r.y - &p.y) * (&r.y - &q.y) < Rational::zero())
                })
            })
        })
    });
    out
}

fn engine_tilings(base: &PointConfig, k: usize) -> BTreeSet<Vec<[usize; 3]>> {
    let cfg = k_fold_sums(base, k).unwrap();
    enumerate_all(base, k, DEFAULT_NODE_BUDGET)
        .unwrap()
        .iter()
        .map(|t| {
            let mut tiles: Vec<[usize; 3]> = t
                .iter()
                .map(|lt| {
                    let mut v = lt.labels().map(|l| cfg.index_of(l).unwrap());
                    v.sort();
                    v
                })
                .collect();
            tiles.sort();
            tiles
        })
        .collect()
}

#[test]
fn enumeration_matches_covering_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut sets = vec![PointConfig::from_ints(&Q4).unwrap(), PointConfig::from_ints(&T4).unwrap()];
    sets.push(random_config(5, &mut rng));
    sets.push(random_with_interior_point(5, &mut rng));
    for base in &sets {
        for k in 1..base.n() {
            let cfg = k_fold_sums(base, k).unwrap();
            let oracle = oracle_tilings(&cfg);
            assert_eq!(engine_tilings(base, k), oracle, "n={} k={k}", base.n());
            assert!(!oracle.is_empty());
        }
    }
    let six = random_config(6, &mut rng);
    let cfg = k_fold_sums(&six, 2).unwrap();
    assert_eq!(engine_tilings(&six, 2), oracle_tilings(&cfg));
}

/// A third of each triangle's area credited to every index of each of its
/// labels, over the hull area.
fn gkz_oracle(t: &hyperflip::Hypertriangulation) -> Vec<Rational> {
    let cfg = t.config();
    let mut v = vec![Rational::zero(); t.n()];
    for lt in t.iter() {
        let [a, b, c] = t.realize(lt);
        let area = det(&a, &b, &c).abs() / Rational::from_integer(2.into());
        for l in lt.labels() {
            for (i, slot) in v.iter_mut().enumerate() {
                if l.bits() >> i & 1 == 1 {
                    *slot += &area / Rational::from_integer(3.into());
                }
            }
        }
    }
    v.iter().map(|x| x / cfg.hull_area()).collect()
}

#[test]
fn gkz_matches_area_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(79);
    for base in [PointConfig::from_ints(&Q4).unwrap(), random_with_interior_point(5, &mut rng)] {
        for k in 1..base.n() {
            for t in enumerate_all(&base, k, DEFAULT_NODE_BUDGET).unwrap() {
                assert_eq!(gkz(&t).unwrap().coords, gkz_oracle(&t));
            }
        }
    }
}

/// Floating-point separating-axis test with a margin, used only on the
/// stored overlap witness.
fn f64_overlap(s: &[[f64; 2]; 3], t: &[[f64; 2]; 3]) -> bool {
    let orient = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let sep = |a: &[[f64; 2]; 3], b: &[[f64; 2]; 3]| {
        let sign = orient(a[0], a[1], a[2]).signum();
        (0..3).any(|i| b.iter().all(|&v| sign * orient(a[i], a[(i + 1) % 3], v) <= 1e-6))
    };
    !sep(s, t) && !sep(t, s)
}

#[test]
fn overlap_witness_holds_in_floating_point() {
    let text = include_str!("fixtures/overlap_witness.txt");
    let line = |tag: &str| text.lines().find_map(|l| l.strip_prefix(tag)).unwrap().trim().to_string();
    let points: Vec<(i64, i64)> = line("points ")
        .split_whitespace()
        .map(|w| {
            let (x, y) = w.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect();
    let base = PointConfig::from_ints(&points).unwrap();
    let up = k_fold_sums(&base, 3).unwrap();
    let triples: Vec<_> = line("triangles ").split(';').map(|s| LabeledTriangle::parse(s).unwrap().labels()).collect();
    let u = hyperflip::Hypertriangulation::new(k_fold_sums(&base, 2).unwrap(), &triples).unwrap();
    let pairs = aging_overlap(&u).unwrap();
    assert!(!pairs.is_empty());
    let aged = |w: &LabeledTriangle| {
        hyperflip::age_triangle(w).unwrap().labels().map(|l| { let p = up.point_of(l).unwrap(); [rational_to_f64(&p.x), rational_to_f64(&p.y)] })
    };
    for (a, b) in &pairs {
        assert!(f64_overlap(&aged(a), &aged(b)), "{a} and {b}");
    }
    // Pairs not reported do not overlap either.
    let whites: Vec<LabeledTriangle> = u.whites().copied().collect();
    for (i, a) in whites.iter().enumerate() {
        for b in &whites[i + 1..] {
            let reported = pairs.contains(&(*a, *b));
            assert_eq!(reported, f64_overlap(&aged(a), &aged(b)), "{a} and {b}");
        }
    }
}
