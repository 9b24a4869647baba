//! Labeled point configurations: the base set, its k-fold sums, genericity
//! diagnosis and rational perturbation.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{convex_hull, cross, in_circle, orientation, Orientation, Point2, Rational};

/// A nonempty subset of `[n]` (1-based), naming the point `a_I`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Label(u64);

impl Label {
    pub const MAX_INDEX: usize = 64;

    pub fn new(indices: &[usize]) -> Result<Label> {
        if indices.is_empty() {
            return Err(Error::ParseLabel("empty label".into()));
        }
        let mut bits = 0u64;
        let mut last = 0usize;
        for &i in indices {
            if i == 0 || i > Self::MAX_INDEX {
                return Err(Error::LabelOutOfRange { index: i, n: Self::MAX_INDEX });
            }
            if i <= last {
                return Err(Error::ParseLabel(format!("indices not increasing: {indices:?}")));
            }
            last = i;
            bits |= 1 << (i - 1);
        }
        Ok(Label(bits))
    }

    pub fn singleton(i: usize) -> Label {
        assert!((1..=Self::MAX_INDEX).contains(&i));
        Label(1 << (i - 1))
    }

    pub(crate) fn from_bits(bits: u64) -> Label {
        debug_assert!(bits != 0);
        Label(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        (1..=Self::MAX_INDEX).contains(&i) && self.0 & (1 << (i - 1)) != 0
    }

    pub fn max_index(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// Ascending 1-based indices.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i + 1)
            }
        })
    }

    pub fn union(self, other: Label) -> Label {
        Label(self.0 | other.0)
    }

    /// `None` when the intersection is empty.
    pub fn intersection(self, other: Label) -> Option<Label> {
        let b = self.0 & other.0;
        (b != 0).then_some(Label(b))
    }

    pub fn common(self, other: Label) -> usize {
        (self.0 & other.0).count_ones() as usize
    }

    /// `[n] \ self`; `None` when empty.
    pub fn complement(self, n: usize) -> Option<Label> {
        let all = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
        let b = all & !self.0;
        (b != 0).then_some(Label(b))
    }
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        self.indices().cmp(other.indices())
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{self}")
    }
}

impl FromStr for Label {
    type Err = Error;
    fn from_str(s: &str) -> Result<Label> {
        let indices: std::result::Result<Vec<usize>, _> =
            s.split('.').map(|t| t.trim().parse::<usize>()).collect();
        let indices = indices.map_err(|_| Error::ParseLabel(s.to_string()))?;
        Label::new(&indices)
    }
}

/// The base set `A`, indexed `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointConfig {
    points: Vec<Point2>,
}

impl PointConfig {
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::TooFewPoints(points.len()));
        }
        if points.len() > Label::MAX_INDEX {
            return Err(Error::TooManyPoints(points.len()));
        }
        Ok(PointConfig { points })
    }

    pub fn from_ints(coords: &[(i64, i64)]) -> Result<Self> {
        Self::new(coords.iter().map(|&(x, y)| Point2::from_ints(x, y)).collect())
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    /// 1-based accessor.
    pub fn point(&self, i: usize) -> &Point2 {
        &self.points[i - 1]
    }

    pub fn sum(&self, label: Label) -> Point2 {
        let mut acc = Point2::origin();
        for i in label.indices() {
            acc = &acc + self.point(i);
        }
        acc
    }

    pub fn translated(&self, v: &Point2) -> PointConfig {
        PointConfig { points: self.points.iter().map(|p| p + v).collect() }
    }

    /// Indices (1-based) of the points that are vertices of `conv A`.
    pub fn hull_indices(&self) -> Vec<usize> {
        let hull = convex_hull(&self.points);
        hull.iter()
            .map(|h| self.points.iter().position(|p| p == h).unwrap() + 1)
            .collect()
    }

    pub fn is_convex_position(&self) -> bool {
        self.hull_indices().len() == self.n()
    }
}

/// Three-tier genericity diagnosis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Genericity {
    StronglyGeneric,
    /// No three points of `A` are collinear, but something stronger fails.
    Generic(GenericityDefect),
    /// Three points of `A` (1-based) are collinear.
    Degenerate { witness: [usize; 3] },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenericityDefect {
    CoincidentSums(Label, Label),
    CollinearSums([Label; 3]),
    Cocircular([usize; 4]),
}

impl Genericity {
    pub fn is_strongly_generic(&self) -> bool {
        matches!(self, Genericity::StronglyGeneric)
    }
}

impl fmt::Display for Genericity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Genericity::StronglyGeneric => write!(f, "strongly generic"),
            Genericity::Generic(GenericityDefect::CoincidentSums(a, b)) => {
                write!(f, "generic; a{a} and a{b} coincide")
            }
            Genericity::Generic(GenericityDefect::CollinearSums([a, b, c])) => {
                write!(f, "generic; a{a}, a{b}, a{c} are collinear")
            }
            Genericity::Generic(GenericityDefect::Cocircular(q)) => {
                write!(f, "generic; points {q:?} are cocircular")
            }
            Genericity::Degenerate { witness } => write!(f, "degenerate; points {witness:?} are collinear"),
        }
    }
}

#[derive(Debug)]
struct Hull {
    /// Counterclockwise indices into the configuration's point list.
    cycle: Vec<usize>,
    edges: HashSet<(usize, usize)>,
    area: Rational,
}

/// `A^(k)`: all `C(n, k)` labeled sums, in lexicographic label order.
#[derive(Debug)]
pub struct KFoldConfig {
    base: PointConfig,
    k: usize,
    labels: Vec<Label>,
    points: Vec<Point2>,
    index: HashMap<Label, usize>,
    orient_table: OnceLock<Vec<i8>>,
    hull: OnceLock<Hull>,
    genericity: OnceLock<Genericity>,
}

const ORIENT_TABLE_MAX: usize = 64;

fn combinations(n: usize, k: usize) -> Vec<Label> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Label>) {
        if cur.len() == k {
            out.push(Label::new(cur).unwrap());
            return;
        }
        for i in start..=n {
            if n - i + 1 < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::new(), &mut out);
    out
}

/// All labeled `k`-fold sums of `A`.
pub fn k_fold_sums(base: &PointConfig, k: usize) -> Result<Arc<KFoldConfig>> {
    KFoldConfig::new(base.clone(), k).map(Arc::new)
}

impl KFoldConfig {
    pub fn new(base: PointConfig, k: usize) -> Result<Self> {
        let n = base.n();
        if k == 0 || k >= n {
            return Err(Error::LevelOutOfRange { k, max: n - 1 });
        }
        let labels = combinations(n, k);
        let points: Vec<Point2> = labels.iter().map(|&l| base.sum(l)).collect();
        let index = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        Ok(KFoldConfig {
            base,
            k,
            labels,
            points,
            index,
            orient_table: OnceLock::new(),
            hull: OnceLock::new(),
            genericity: OnceLock::new(),
        })
    }

    pub fn base(&self) -> &PointConfig {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, idx: usize) -> Label {
        self.labels[idx]
    }

    pub fn index_of(&self, label: Label) -> Option<usize> {
        self.index.get(&label).copied()
    }

    pub fn point(&self, idx: usize) -> &Point2 {
        &self.points[idx]
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn point_of(&self, label: Label) -> Option<&Point2> {
        self.index_of(label).map(|i| &self.points[i])
    }

    pub fn entries(&self) -> impl Iterator<Item = (Label, &Point2)> {
        self.labels.iter().copied().zip(self.points.iter())
    }

    /// Checks that a label names a point of this configuration.
    pub fn require(&self, label: Label) -> Result<usize> {
        if label.len() != self.k {
            return Err(Error::WrongLabelSize { label, got: label.len(), expected: self.k });
        }
        self.index_of(label).ok_or(Error::LabelOutOfRange { index: label.max_index(), n: self.n() })
    }

    fn orient_direct(&self, a: usize, b: usize, c: usize) -> i8 {
        orientation(&self.points[a], &self.points[b], &self.points[c]).sign()
    }

    /// Orientation sign of three points given by index, cached for small
    /// configurations.
    pub fn orient(&self, a: usize, b: usize, c: usize) -> i8 {
        let m = self.labels.len();
        if m > ORIENT_TABLE_MAX {
            return self.orient_direct(a, b, c);
        }
        let table = self.orient_table.get_or_init(|| {
            let mut t = vec![0i8; m * m * m];
            for i in 0..m {
                for j in i + 1..m {
                    for l in j + 1..m {
                        let s = self.orient_direct(i, j, l);
                        for (x, y, z, sign) in [
                            (i, j, l, s),
                            (j, l, i, s),
                            (l, i, j, s),
                            (j, i, l, -s),
                            (i, l, j, -s),
                            (l, j, i, -s),
                        ] {
                            t[(x * m + y) * m + z] = sign;
                        }
                    }
                }
            }
            t
        });
        table[(a * m + b) * m + c]
    }

    fn hull_data(&self) -> &Hull {
        self.hull.get_or_init(|| {
            let hull = convex_hull(&self.points);
            let cycle: Vec<usize> = hull
                .iter()
                .map(|h| self.points.iter().position(|p| p == h).unwrap())
                .collect();
            let n = cycle.len();
            let edges = (0..n).map(|i| (cycle[i], cycle[(i + 1) % n])).collect();
            let mut area = Rational::zero();
            for i in 1..n.saturating_sub(1) {
                area += cross(&self.points[cycle[0]], &self.points[cycle[i]], &self.points[cycle[i + 1]]);
            }
            area /= Rational::from_integer(2.into());
            Hull { cycle, edges, area }
        })
    }

    /// Counterclockwise hull of `A^(k)` as point indices.
    pub fn hull_cycle(&self) -> &[usize] {
        &self.hull_data().cycle
    }

    pub fn hull_area(&self) -> &Rational {
        &self.hull_data().area
    }

    /// `a -> b` is a counterclockwise hull edge.
    pub fn is_hull_edge(&self, a: usize, b: usize) -> bool {
        self.hull_data().edges.contains(&(a, b))
    }

    pub fn is_hull_vertex(&self, a: usize) -> bool {
        self.hull_data().cycle.contains(&a)
    }

    pub fn genericity(&self) -> &Genericity {
        self.genericity.get_or_init(|| genericity(&self.base, self.k))
    }

    pub fn require_strongly_generic(&self) -> Result<()> {
        match self.genericity() {
            Genericity::StronglyGeneric => Ok(()),
            other => Err(Error::NotStronglyGeneric(other.clone())),
        }
    }
}

/// Diagnoses the genericity tier of `A` at level `k`.
///
/// Strong genericity requires the points of `A^(k)` to be pairwise distinct
/// with no three collinear, and no four points of `A` to be cocircular.
pub fn genericity(base: &PointConfig, k: usize) -> Genericity {
    let n = base.n();
    let pts = base.points();
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                if orientation(&pts[i], &pts[j], &pts[l]) == Orientation::Collinear {
                    return Genericity::Degenerate { witness: [i + 1, j + 1, l + 1] };
                }
            }
        }
    }
    if k >= 1 && k < n {
        let labels = combinations(n, k);
        let sums: Vec<Point2> = labels.iter().map(|&l| base.sum(l)).collect();
        let m = sums.len();
        for i in 0..m {
            for j in i + 1..m {
                if sums[i] == sums[j] {
                    return Genericity::Generic(GenericityDefect::CoincidentSums(labels[i], labels[j]));
                }
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                for l in j + 1..m {
                    if orientation(&sums[i], &sums[j], &sums[l]) == Orientation::Collinear {
                        return Genericity::Generic(GenericityDefect::CollinearSums([
                            labels[i], labels[j], labels[l],
                        ]));
                    }
                }
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let (p, q, r) = (&pts[a], &pts[b], &pts[c]);
                    let s = if orientation(p, q, r) == Orientation::Ccw {
                        in_circle(p, q, r, &pts[d])
                    } else {
                        in_circle(p, r, q, &pts[d])
                    };
                    if s == 0 {
                        return Genericity::Generic(GenericityDefect::Cocircular([
                            a + 1,
                            b + 1,
                            c + 1,
                            d + 1,
                        ]));
                    }
                }
            }
        }
    }
    Genericity::StronglyGeneric
}

/// Strict predicate signs over `A^(k)` (orientations) and `A` (in-circle).
fn strict_signs(base: &PointConfig, k: usize) -> (Vec<i8>, Vec<i8>) {
    let labels = combinations(base.n(), k);
    let sums: Vec<Point2> = labels.iter().map(|&l| base.sum(l)).collect();
    let m = sums.len();
    let mut orient = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for l in j + 1..m {
                orient.push(orientation(&sums[i], &sums[j], &sums[l]).sign());
            }
        }
    }
    let pts = base.points();
    let n = pts.len();
    let mut circle = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let o = orientation(&pts[a], &pts[b], &pts[c]).sign();
                    circle.push(o * in_circle(&pts[a], &pts[b], &pts[c], &pts[d]));
                }
            }
        }
    }
    (orient, circle)
}

fn preserves(before: &[i8], after: &[i8]) -> bool {
    before.iter().zip(after).all(|(&b, &a)| b == 0 || a == b)
}

const PERTURB_DIRECTIONS: usize = 16;
const PERTURB_HALVINGS: u32 = 96;

/// Moves every point of a generic configuration by at most `δ` in the max
/// norm so that it becomes strongly generic while every strict predicate sign
/// over `A^(k)` (orientation) and `A` (in-circle) is kept.
///
/// Offsets are `δ · d_i` with seeded directions `d_i ∈ [-1, 1]^2` and
/// `δ = 2^-m`, halving until both conditions hold.
pub fn perturb(base: &PointConfig, k: usize, seed: u64) -> Result<PointConfig> {
    match genericity(base, k) {
        Genericity::StronglyGeneric => return Ok(base.clone()),
        Genericity::Degenerate { witness } => return Err(Error::DegenerateConfiguration(witness)),
        Genericity::Generic(_) => {}
    }
    if k == 0 || k >= base.n() {
        return Err(Error::LevelOutOfRange { k, max: base.n() - 1 });
    }
    let reference = strict_signs(base, k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let denom = 1024i64;
    for _ in 0..PERTURB_DIRECTIONS {
        let dirs: Vec<Point2> = (0..base.n())
            .map(|_| {
                let dx = rng.random_range(-denom..=denom);
                let dy = rng.random_range(-denom..=denom);
                Point2::new(
                    Rational::new(dx.into(), denom.into()),
                    Rational::new(dy.into(), denom.into()),
                )
            })
            .collect();
        let mut delta = Rational::one();
        for _ in 0..PERTURB_HALVINGS {
            delta /= Rational::from_integer(2.into());
            let moved: Vec<Point2> =
                base.points().iter().zip(&dirs).map(|(p, d)| p + &d.scale(&delta)).collect();
            let candidate = PointConfig { points: moved };
            let signs = strict_signs(&candidate, k);
            if !preserves(&reference.0, &signs.0) || !preserves(&reference.1, &signs.1) {
                continue;
            }
            if genericity(&candidate, k).is_strongly_generic() {
                return Ok(candidate);
            }
        }
    }
    Err(Error::PerturbationFailed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rat;

    pub(crate) fn q4() -> PointConfig {
        PointConfig::from_ints(&[(0, 0), (6, 0), (7, 5), (1, 6)]).unwrap()
    }

    fn t4() -> PointConfig {
        PointConfig::from_ints(&[(0, 0), (6, 0), (3, 6), (3, 2)]).unwrap()
    }

    fn l(s: &str) -> Label {
        s.parse().unwrap()
    }

    #[test]
    fn label_basics() {
        let a = l("1.3.4");
        assert_eq!(a.to_string(), "1.3.4");
        assert_eq!(a.len(), 3);
        assert_eq!(a.indices().collect::<Vec<_>>(), vec![1, 3, 4]);
        assert_eq!(a.complement(5), Some(l("2.5")));
        assert!(l("1.2") < l("1.3"));
        assert!(l("1.4") < l("2.3"));
        assert!(Label::new(&[2, 1]).is_err());
        assert!(Label::new(&[0]).is_err());
        assert!("1..2".parse::<Label>().is_err());
    }

    #[test]
    fn q4_pair_sums() {
        let cfg = k_fold_sums(&q4(), 2).unwrap();
        let expect = [
            ("1.2", (6, 0)),
            ("1.3", (7, 5)),
            ("1.4", (1, 6)),
            ("2.3", (13, 5)),
            ("2.4", (7, 6)),
            ("3.4", (8, 11)),
        ];
        assert_eq!(cfg.len(), 6);
        for (lab, (x, y)) in expect {
            assert_eq!(cfg.point_of(l(lab)).unwrap(), &Point2::from_ints(x, y));
        }
    }

    #[test]
    fn level_one_is_the_base_set() {
        let cfg = k_fold_sums(&q4(), 1).unwrap();
        for i in 1..=4 {
            assert_eq!(cfg.point_of(Label::singleton(i)).unwrap(), q4().point(i));
        }
        assert!(matches!(k_fold_sums(&q4(), 4), Err(Error::LevelOutOfRange { .. })));
        assert!(matches!(k_fold_sums(&q4(), 0), Err(Error::LevelOutOfRange { .. })));
    }

    #[test]
    fn t4_pair_sums_are_centrally_symmetric() {
        let base = t4();
        let cfg = k_fold_sums(&base, 2).unwrap();
        let total = base.sum(Label::new(&[1, 2, 3, 4]).unwrap());
        assert_eq!(total, Point2::from_ints(12, 8)); // center (6, 4)
        for (lab, p) in cfg.entries() {
            let other = cfg.point_of(lab.complement(4).unwrap()).unwrap();
            assert_eq!(&(p + other), &total);
        }
        assert_eq!(cfg.hull_cycle().len(), 6);
    }

    #[test]
    fn genericity_tiers() {
        assert_eq!(genericity(&q4(), 2), Genericity::StronglyGeneric);
        assert_eq!(genericity(&t4(), 2), Genericity::StronglyGeneric);
        let square = PointConfig::from_ints(&[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap();
        assert_eq!(
            genericity(&square, 2),
            Genericity::Generic(GenericityDefect::CoincidentSums(l("1.3"), l("2.4")))
        );
        let line = PointConfig::from_ints(&[(0, 0), (1, 0), (2, 0), (0, 1)]).unwrap();
        assert_eq!(genericity(&line, 2), Genericity::Degenerate { witness: [1, 2, 3] });
    }

    #[test]
    fn perturb_unit_square() {
        let square = PointConfig::from_ints(&[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap();
        let moved = perturb(&square, 2, 7).unwrap();
        assert!(genericity(&moved, 2).is_strongly_generic());
        assert_ne!(moved.sum(l("1.3")), moved.sum(l("2.4")));
        let (before, _) = strict_signs(&square, 2);
        let (after, _) = strict_signs(&moved, 2);
        assert!(preserves(&before, &after));
        assert_eq!(perturb(&square, 2, 7).unwrap(), moved);
        assert_eq!(perturb(&q4(), 2, 1).unwrap(), q4());
        let line = PointConfig::from_ints(&[(0, 0), (1, 0), (2, 0), (0, 1)]).unwrap();
        assert!(matches!(perturb(&line, 2, 1), Err(Error::DegenerateConfiguration(_))));
    }

    #[test]
    fn orientation_table_matches_direct() {
        let cfg = k_fold_sums(&q4(), 2).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    assert_eq!(cfg.orient(a, b, c), cfg.orient_direct(a, b, c));
                }
            }
        }
    }

    #[test]
    fn complement_sum_identity_and_translation() {
        let base = q4();
        let all = base.sum(Label::new(&[1, 2, 3, 4]).unwrap());
        let cfg = k_fold_sums(&base, 2).unwrap();
        for (lab, p) in cfg.entries() {
            assert_eq!(&(p + &base.sum(lab.complement(4).unwrap())), &all);
        }
        let v = Point2::new(rat(3), rat(-2));
        let moved = k_fold_sums(&base.translated(&v), 2).unwrap();
        for (lab, p) in cfg.entries() {
            assert_eq!(moved.point_of(lab).unwrap(), &(p + &v.scale(&rat(2))));
        }
    }
}
