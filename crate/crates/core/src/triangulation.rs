//! Labeled triangles, hypertriangulations and their validator.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::geometry::{ccw_triangles_overlap, cross, Point2, Rational, SimplePolygon};
use crate::model::{k_fold_sums, Genericity, KFoldConfig, Label};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::White => "white",
            Color::Black => "black",
        })
    }
}

/// Color of the triangle `a_I a_J a_K`.
pub fn classify(i: Label, j: Label, k: Label) -> Result<Color> {
    let size = i.len();
    for l in [j, k] {
        if l.len() != size {
            return Err(Error::WrongLabelSize { label: l, got: l.len(), expected: size });
        }
    }
    for (a, b) in [(i, j), (j, k), (i, k)] {
        if a.common(b) + 1 != size {
            return Err(Error::EdgeConditionViolated(a, b));
        }
    }
    let triple = (i.bits() & j.bits() & k.bits()).count_ones() as usize;
    if triple + 1 == size {
        Ok(Color::White)
    } else if triple + 2 == size {
        Ok(Color::Black)
    } else {
        Err(Error::ColorUndefined { size: triple, k: size })
    }
}

/// A classified triangle with its labels in ascending order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledTriangle {
    labels: [Label; 3],
    color: Color,
}

impl LabeledTriangle {
    pub fn new(a: Label, b: Label, c: Label) -> Result<Self> {
        let color = classify(a, b, c)?;
        let mut labels = [a, b, c];
        labels.sort();
        if labels[0] == labels[1] || labels[1] == labels[2] {
            return Err(Error::EdgeConditionViolated(labels[0], labels[1]));
        }
        Ok(LabeledTriangle { labels, color })
    }

    pub fn from_triple(t: [Label; 3]) -> Result<Self> {
        Self::new(t[0], t[1], t[2])
    }

    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::ParseLabel(text.to_string()));
        }
        Self::new(parts[0].parse()?, parts[1].parse()?, parts[2].parse()?)
    }

    pub fn labels(&self) -> [Label; 3] {
        self.labels
    }

    pub fn color(&self) -> Color {
        self.color
    }

    pub fn is_white(&self) -> bool {
        self.color == Color::White
    }

    pub fn is_black(&self) -> bool {
        self.color == Color::Black
    }

    pub fn level(&self) -> usize {
        self.labels[0].len()
    }

    pub fn has_vertex(&self, l: Label) -> bool {
        self.labels.contains(&l)
    }

    /// Whether index `i` belongs to all three labels.
    pub fn all_contain(&self, i: usize) -> bool {
        self.labels.iter().all(|l| l.contains(i))
    }

    /// The vertex opposite the edge `{a, b}`, if that is an edge.
    pub fn opposite(&self, a: Label, b: Label) -> Option<Label> {
        if a == b || !self.has_vertex(a) || !self.has_vertex(b) {
            return None;
        }
        self.labels.iter().copied().find(|&l| l != a && l != b)
    }

    pub fn edges(&self) -> [(Label, Label); 3] {
        let [a, b, c] = self.labels;
        [(a, b), (b, c), (a, c)]
    }

    pub fn complement(&self, n: usize) -> Result<LabeledTriangle> {
        let c = |l: Label| {
            l.complement(n).ok_or_else(|| Error::Precondition(format!("label {l} is all of [{n}]")))
        };
        Self::new(c(self.labels[0])?, c(self.labels[1])?, c(self.labels[2])?)
    }
}

impl fmt::Display for LabeledTriangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.labels;
        write!(f, "{a},{b},{c}")
    }
}

impl fmt::Debug for LabeledTriangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.labels;
        write!(f, "{a:?}{b:?}{c:?}({})", self.color)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NotStronglyGeneric(Genericity),
    UnknownLabel { triangle: [Label; 3], label: Label },
    Classification { triangle: [Label; 3], reason: String },
    Duplicate(LabeledTriangle),
    ZeroArea(LabeledTriangle),
    Overlap(LabeledTriangle, LabeledTriangle),
    AreaMismatch { covered: Rational, hull: Rational },
    NonConformingEdge { edge: (Label, Label), uses: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotStronglyGeneric(g) => write!(f, "configuration not strongly generic ({g})"),
            Violation::UnknownLabel { triangle, label } => {
                write!(f, "triangle {triangle:?}: label {label} is not a point of the configuration")
            }
            Violation::Classification { triangle, reason } => write!(f, "triangle {triangle:?}: {reason}"),
            Violation::Duplicate(t) => write!(f, "triangle {t} listed twice"),
            Violation::ZeroArea(t) => write!(f, "triangle {t} has zero area"),
            Violation::Overlap(a, b) => write!(f, "triangles {a} and {b} overlap"),
            Violation::AreaMismatch { covered, hull } => {
                write!(f, "covered area {covered} differs from hull area {hull}")
            }
            Violation::NonConformingEdge { edge, uses } => write!(
                f,
                "interior edge {}-{} used by {uses} triangle(s), expected 2",
                edge.0, edge.1
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("OK");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Point indices of `t` in counterclockwise order (for nondegenerate `t`).
pub(crate) fn ccw_indices(cfg: &KFoldConfig, t: &LabeledTriangle) -> [usize; 3] {
    let [a, b, c] = t.labels.map(|l| cfg.index_of(l).expect("label in configuration"));
    if cfg.orient(a, b, c) < 0 {
        [a, c, b]
    } else {
        [a, b, c]
    }
}

/// Checks a list of raw label triples against every validity clause.
pub fn validate_triples(cfg: &KFoldConfig, triples: &[[Label; 3]]) -> ValidityReport {
    let mut report = ValidityReport::default();
    if let g @ (Genericity::Generic(_) | Genericity::Degenerate { .. }) = cfg.genericity() {
        report.violations.push(Violation::NotStronglyGeneric(g.clone()));
        return report;
    }
    let mut seen = HashSet::new();
    let mut tris = Vec::new();
    for triple in triples {
        if let Some(&label) = triple.iter().find(|&&l| cfg.require(l).is_err()) {
            report.violations.push(Violation::UnknownLabel { triangle: *triple, label });
            continue;
        }
        match LabeledTriangle::from_triple(*triple) {
            Ok(t) => {
                if !seen.insert(t) {
                    report.violations.push(Violation::Duplicate(t));
                } else {
                    tris.push(t);
                }
            }
            Err(e) => report
                .violations
                .push(Violation::Classification { triangle: *triple, reason: e.to_string() }),
        }
    }
    check_tiling(cfg, &tris, &mut report);
    report
}

fn check_tiling(cfg: &KFoldConfig, tris: &[LabeledTriangle], report: &mut ValidityReport) {
    let mut realized = Vec::with_capacity(tris.len());
    let mut covered = Rational::zero();
    for t in tris {
        let [a, b, c] = t.labels.map(|l| cfg.index_of(l).unwrap());
        if cfg.orient(a, b, c) == 0 {
            report.violations.push(Violation::ZeroArea(*t));
            continue;
        }
        let idx = ccw_indices(cfg, t);
        covered += cross(cfg.point(idx[0]), cfg.point(idx[1]), cfg.point(idx[2]));
        realized.push((*t, idx));
    }
    covered /= Rational::from_integer(2.into());
    let orient = |a: usize, b: usize, c: usize| cfg.orient(a, b, c);
    for i in 0..realized.len() {
        for j in i + 1..realized.len() {
            if ccw_triangles_overlap(realized[i].1, realized[j].1, orient) {
                report.violations.push(Violation::Overlap(realized[i].0, realized[j].0));
            }
        }
    }
    if &covered != cfg.hull_area() {
        report.violations.push(Violation::AreaMismatch { covered, hull: cfg.hull_area().clone() });
    }
    let mut uses: HashMap<(usize, usize), usize> = HashMap::new();
    for (_, idx) in &realized {
        for e in 0..3 {
            let (a, b) = (idx[e], idx[(e + 1) % 3]);
            *uses.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let mut bad: Vec<((usize, usize), usize)> = uses
        .into_iter()
        .filter(|&((a, b), count)| {
            let on_hull = cfg.is_hull_edge(a, b) || cfg.is_hull_edge(b, a);
            if on_hull {
                count != 1
            } else {
                count != 2
            }
        })
        .collect();
    bad.sort();
    for ((a, b), count) in bad {
        let (la, lb) = (cfg.label(a), cfg.label(b));
        report.violations.push(Violation::NonConformingEdge { edge: (la.min(lb), la.max(lb)), uses: count });
    }
}

/// A set of labeled triangles over a fixed `A^(k)`.
#[derive(Clone)]
pub struct Hypertriangulation {
    config: Arc<KFoldConfig>,
    triangles: BTreeSet<LabeledTriangle>,
}

impl PartialEq for Hypertriangulation {
    fn eq(&self, other: &Self) -> bool {
        self.config.k() == other.config.k()
            && self.config.base() == other.config.base()
            && self.triangles == other.triangles
    }
}

impl Eq for Hypertriangulation {}

impl fmt::Debug for Hypertriangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hypertriangulation(k={}, {})", self.k(), self.canonical_key())
    }
}

impl Hypertriangulation {
    /// Builds and validates.
    pub fn new(config: Arc<KFoldConfig>, triples: &[[Label; 3]]) -> Result<Self> {
        let report = validate_triples(&config, triples);
        if !report.is_ok() {
            return Err(Error::InvalidHypertriangulation(report));
        }
        let triangles = triples.iter().map(|&t| LabeledTriangle::from_triple(t).unwrap()).collect();
        Ok(Hypertriangulation { config, triangles })
    }

    /// Builds without validation; callers must uphold validity themselves.
    pub fn from_triangles_unchecked(
        config: Arc<KFoldConfig>,
        triangles: impl IntoIterator<Item = LabeledTriangle>,
    ) -> Self {
        Hypertriangulation { config, triangles: triangles.into_iter().collect() }
    }

    pub fn config(&self) -> &Arc<KFoldConfig> {
        &self.config
    }

    pub fn k(&self) -> usize {
        self.config.k()
    }

    pub fn n(&self) -> usize {
        self.config.n()
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangles(&self) -> &BTreeSet<LabeledTriangle> {
        &self.triangles
    }

    pub fn iter(&self) -> impl Iterator<Item = &LabeledTriangle> {
        self.triangles.iter()
    }

    pub fn contains(&self, t: &LabeledTriangle) -> bool {
        self.triangles.contains(t)
    }

    pub fn whites(&self) -> impl Iterator<Item = &LabeledTriangle> {
        self.triangles.iter().filter(|t| t.is_white())
    }

    pub fn blacks(&self) -> impl Iterator<Item = &LabeledTriangle> {
        self.triangles.iter().filter(|t| t.is_black())
    }

    pub fn white_set(&self) -> BTreeSet<LabeledTriangle> {
        self.whites().copied().collect()
    }

    pub fn black_set(&self) -> BTreeSet<LabeledTriangle> {
        self.blacks().copied().collect()
    }

    /// Labels used as vertices.
    pub fn vertices(&self) -> BTreeSet<Label> {
        self.triangles.iter().flat_map(|t| t.labels()).collect()
    }

    pub fn triples(&self) -> Vec<[Label; 3]> {
        self.triangles.iter().map(|t| t.labels()).collect()
    }

    /// Same configuration, different triangles; unchecked.
    pub fn with_triangles(&self, triangles: impl IntoIterator<Item = LabeledTriangle>) -> Self {
        Self::from_triangles_unchecked(self.config.clone(), triangles)
    }

    pub fn validate(&self) -> ValidityReport {
        validate_triples(&self.config, &self.triples())
    }

    pub fn require_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidHypertriangulation(report))
        }
    }

    /// Realized counterclockwise corner points.
    pub fn realize(&self, t: &LabeledTriangle) -> [Point2; 3] {
        ccw_indices(&self.config, t).map(|i| self.config.point(i).clone())
    }

    pub fn ccw_indices(&self, t: &LabeledTriangle) -> [usize; 3] {
        ccw_indices(&self.config, t)
    }

    /// Sorted triangle label triples, `;`-separated; equal iff the triangle
    /// sets are equal.
    pub fn canonical_key(&self) -> String {
        let parts: Vec<String> = self.triangles.iter().map(|t| t.to_string()).collect();
        parts.join(";")
    }

    /// Replaces every label `I` by `[n] \ I`, landing at level `n - k`.
    pub fn complement(&self) -> Result<Hypertriangulation> {
        self.require_valid()?;
        let n = self.n();
        let cfg = k_fold_sums(self.config.base(), n - self.k())?;
        let triangles: Result<BTreeSet<LabeledTriangle>> =
            self.triangles.iter().map(|t| t.complement(n)).collect();
        Ok(Hypertriangulation { config: cfg, triangles: triangles? })
    }

    /// Connected components (through shared edges) of the white triangles
    /// whose three labels all contain `i`.
    pub fn white_regions(&self, i: usize) -> Result<Vec<WhiteRegion>> {
        self.require_valid()?;
        Ok(self.white_regions_unchecked(i))
    }

    pub(crate) fn white_regions_unchecked(&self, i: usize) -> Vec<WhiteRegion> {
        let members: Vec<LabeledTriangle> =
            self.whites().filter(|t| t.all_contain(i)).copied().collect();
        components(&members)
            .into_iter()
            .map(|tris| WhiteRegion::from_triangles(&self.config, i, tris))
            .collect()
    }
}

/// Groups triangles into edge-connected components, each sorted.
pub(crate) fn components(tris: &[LabeledTriangle]) -> Vec<Vec<LabeledTriangle>> {
    let mut by_edge: HashMap<(Label, Label), Vec<usize>> = HashMap::new();
    for (idx, t) in tris.iter().enumerate() {
        for e in t.edges() {
            by_edge.entry(e).or_default().push(idx);
        }
    }
    let mut comp = vec![usize::MAX; tris.len()];
    let mut out = Vec::new();
    for start in 0..tris.len() {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut stack = vec![start];
        comp[start] = id;
        let mut members = Vec::new();
        while let Some(t) = stack.pop() {
            members.push(tris[t]);
            for e in tris[t].edges() {
                for &u in &by_edge[&e] {
                    if comp[u] == usize::MAX {
                        comp[u] = id;
                        stack.push(u);
                    }
                }
            }
        }
        members.sort();
        out.push(members);
    }
    out
}

/// One connected piece of `W_i(U)`.
#[derive(Clone, Debug)]
pub struct WhiteRegion {
    pub index: usize,
    /// Counterclockwise boundary labels.
    pub boundary: Vec<Label>,
    pub triangles: Vec<LabeledTriangle>,
}

impl WhiteRegion {
    fn from_triangles(cfg: &KFoldConfig, index: usize, triangles: Vec<LabeledTriangle>) -> WhiteRegion {
        let boundary = boundary_cycle(cfg, &triangles).unwrap_or_default();
        WhiteRegion { index, boundary, triangles }
    }

    pub fn polygon(&self, cfg: &KFoldConfig) -> Result<SimplePolygon> {
        if self.boundary.is_empty() {
            return Err(Error::RegionNotSimple(format!("white region of index {} is pinched", self.index)));
        }
        SimplePolygon::new(self.boundary.iter().map(|&l| cfg.point_of(l).unwrap().clone()).collect())
    }
}

/// Counterclockwise boundary labels of an edge-connected triangle set, or
/// `None` if the boundary is not a single simple cycle.
pub(crate) fn boundary_cycle(cfg: &KFoldConfig, tris: &[LabeledTriangle]) -> Option<Vec<Label>> {
    let mut directed = HashSet::new();
    for t in tris {
        let idx = ccw_indices(cfg, t);
        for e in 0..3 {
            directed.insert((idx[e], idx[(e + 1) % 3]));
        }
    }
    let mut next: HashMap<usize, usize> = HashMap::new();
    for &(a, b) in &directed {
        if !directed.contains(&(b, a)) && next.insert(a, b).is_some() {
            return None;
        }
    }
    let start = next.keys().copied().min_by_key(|&i| cfg.label(i))?;
    let mut cycle = vec![start];
    let mut cur = next[&start];
    while cur != start {
        if cycle.len() > next.len() {
            return None;
        }
        cycle.push(cur);
        cur = *next.get(&cur)?;
    }
    (cycle.len() == next.len()).then(|| cycle.into_iter().map(|i| cfg.label(i)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PointConfig;

    fn l(s: &str) -> Label {
        s.parse().unwrap()
    }

    fn tri(s: &str) -> [Label; 3] {
        LabeledTriangle::parse(s).unwrap().labels()
    }

    fn q4() -> Arc<KFoldConfig> {
        k_fold_sums(&PointConfig::from_ints(&[(0, 0), (6, 0), (7, 5), (1, 6)]).unwrap(), 2).unwrap()
    }

    fn q4_fixture() -> Vec<[Label; 3]> {
        ["1.2,2.3,1.3", "2.3,3.4,1.3", "3.4,1.4,1.3", "1.4,1.2,1.3"].iter().map(|s| tri(s)).collect()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(l("1.2"), l("1.3"), l("1.4")).unwrap(), Color::White);
        assert_eq!(classify(l("1.2"), l("2.3"), l("1.3")).unwrap(), Color::Black);
        match classify(l("1.2"), l("3.4"), l("1.3")) {
            Err(Error::EdgeConditionViolated(a, b)) => assert_eq!((a, b), (l("1.2"), l("3.4"))),
            other => panic!("{other:?}"),
        }
        assert_eq!(classify(l("1"), l("2"), l("3")).unwrap(), Color::White);
        assert_eq!(classify(l("1.2.3"), l("1.2.4"), l("1.3.4")).unwrap(), Color::Black);
    }

    #[test]
    fn q4_fixture_is_valid() {
        let cfg = q4();
        let t = Hypertriangulation::new(cfg, &q4_fixture()).unwrap();
        assert_eq!(t.whites().count(), 2);
        assert_eq!(t.blacks().count(), 2);
    }

    #[test]
    fn replacing_center_in_one_triangle_breaks_tiling() {
        let cfg = q4();
        let mut triples = q4_fixture();
        // a12 a23 a24 instead of a12 a23 a13
        triples[0] = tri("1.2,2.3,2.4");
        let report = validate_triples(&cfg, &triples);
        assert!(report.violations.iter().any(|v| matches!(v, Violation::Overlap(..))));
        assert!(report.violations.iter().any(|v| matches!(v, Violation::NonConformingEdge { .. })));
    }

    #[test]
    fn empty_set_fails_area() {
        let report = validate_triples(&q4(), &[]);
        assert!(matches!(report.violations[..], [Violation::AreaMismatch { .. }]));
    }

    #[test]
    fn white_regions_of_fixture() {
        let t = Hypertriangulation::new(q4(), &q4_fixture()).unwrap();
        let r1 = t.white_regions(1).unwrap();
        assert_eq!(r1.len(), 1);
        assert_eq!(r1[0].triangles, vec![LabeledTriangle::parse("1.2,1.3,1.4").unwrap()]);
        assert_eq!(r1[0].boundary.len(), 3);
        assert!(t.white_regions(2).unwrap().is_empty());
        let r3 = t.white_regions(3).unwrap();
        assert_eq!(r3[0].triangles, vec![LabeledTriangle::parse("1.3,2.3,3.4").unwrap()]);
    }

    #[test]
    fn canonical_key_is_order_free() {
        let cfg = q4();
        let mut triples = q4_fixture();
        let a = Hypertriangulation::new(cfg.clone(), &triples).unwrap();
        triples.reverse();
        let b = Hypertriangulation::new(cfg, &triples).unwrap();
        assert_eq!(a.canonical_key(), b.canonical_key());
        assert_eq!(a.canonical_key(), "1.2,1.3,1.4;1.2,1.3,2.3;1.3,1.4,3.4;1.3,2.3,3.4");
    }

    #[test]
    fn complement_of_level_one() {
        let base = PointConfig::from_ints(&[(0, 0), (6, 0), (7, 5), (1, 6)]).unwrap();
        let cfg = k_fold_sums(&base, 1).unwrap();
        let t = Hypertriangulation::new(cfg, &[tri("1,2,3"), tri("1,3,4")]).unwrap();
        let c = t.complement().unwrap();
        assert_eq!(c.k(), 3);
        assert!(c.validate().is_ok());
        assert!(c.iter().all(|t| t.is_black()));
        assert_eq!(c.canonical_key(), "1.2.3,1.2.4,2.3.4;1.2.4,1.3.4,2.3.4");
        assert_eq!(c.complement().unwrap(), t);
    }
}
