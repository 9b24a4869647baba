//! Coherent hypertriangulations from lifted sums, GKZ vectors, and exact
//! coherence testing.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use num_traits::{One, Zero};

use crate::aging::age_triangle;
use crate::error::{Error, Result};
use crate::geometry::{cross, det3, point_in_open_triangle, ratio, Point2, Rational};
use crate::lp::{dot, strict_feasibility, StrictFeasibility};
use crate::model::{k_fold_sums, KFoldConfig, Label, PointConfig};
use crate::triangulation::{Hypertriangulation, LabeledTriangle};

/// Heights `h_1..h_n` on the base points; `h_I` is the sum over `I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightFunction {
    h: Vec<Rational>,
}

impl HeightFunction {
    pub fn new(h: Vec<Rational>) -> Self {
        HeightFunction { h }
    }

    pub fn from_ints(h: &[i64]) -> Self {
        Self::new(h.iter().map(|&v| Rational::from_integer(v.into())).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![Rational::zero(); n])
    }

    pub fn squared_norms(base: &PointConfig) -> Self {
        Self::new(base.points().iter().map(|p| &p.x * &p.x + &p.y * &p.y).collect())
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn values(&self) -> &[Rational] {
        &self.h
    }

    pub fn of_label(&self, label: Label) -> Rational {
        label.indices().map(|i| self.h[i - 1].clone()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GkzVector {
    pub coords: Vec<Rational>,
}

impl GkzVector {
    pub fn sum(&self) -> Rational {
        self.coords.iter().sum()
    }
}

impl fmt::Display for GkzVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Lower faces of the lift that are not triangles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonTriangularReport {
    /// Each non-triangular lower face: its counterclockwise outline followed
    /// by the lifted points lying inside it.
    pub faces: Vec<Vec<Label>>,
}

impl fmt::Display for NonTriangularReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let faces: Vec<String> = self
            .faces
            .iter()
            .map(|face| face.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{} non-triangular lower face(s): {}", self.faces.len(), faces.join("; "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoherentOutcome {
    Triangulated(Hypertriangulation),
    NonTriangular(NonTriangularReport),
}

impl CoherentOutcome {
    pub fn triangulation(self) -> Option<Hypertriangulation> {
        match self {
            CoherentOutcome::Triangulated(t) => Some(t),
            CoherentOutcome::NonTriangular(_) => None,
        }
    }
}

struct Lift<'a> {
    cfg: &'a KFoldConfig,
    z: Vec<Rational>,
}

impl Lift<'_> {
    /// Sign of `s` relative to the lifted plane through `p, q, r`: positive
    /// when above, for any orientation of `p, q, r` in the plane.
    fn above(&self, p: usize, q: usize, r: usize, s: usize) -> i8 {
        let row = |v: usize| {
            let (a, b) = (self.cfg.point(v), self.cfg.point(p));
            [&a.x - &b.x, &a.y - &b.y, &self.z[v] - &self.z[p]]
        };
        let d = det3(&row(q), &row(r), &row(s));
        let sign = if d.is_zero() { 0 } else if d > Rational::zero() { 1 } else { -1 };
        sign * self.cfg.orient(p, q, r)
    }
}

/// Projects the lower boundary of the lifted points `(a_I, h_I)`.
pub fn coherent_subdivision(base: &PointConfig, k: usize, h: &HeightFunction) -> Result<CoherentOutcome> {
    if h.len() != base.n() {
        return Err(Error::Precondition(format!("{} heights for {} points", h.len(), base.n())));
    }
    let cfg = k_fold_sums(base, k)?;
    cfg.require_strongly_generic()?;
    let lift = Lift { cfg: &cfg, z: cfg.labels().iter().map(|&l| h.of_label(l)).collect() };
    let m = cfg.len();
    let hull = cfg.hull_cycle();
    let mut queue: VecDeque<(usize, usize)> =
        (0..hull.len()).map(|i| (hull[i], hull[(i + 1) % hull.len()])).collect();
    let mut done: HashSet<(usize, usize)> = HashSet::new();
    let mut faces: Vec<Vec<usize>> = Vec::new();
    let mut wide: Vec<Vec<Label>> = Vec::new();
    while let Some((a, b)) = queue.pop_front() {
        if done.contains(&(a, b)) {
            continue;
        }
        let left: Vec<usize> = (0..m).filter(|&d| cfg.orient(a, b, d) > 0).collect();
        let Some(&first) = left.first() else {
            return Err(Error::Internal(format!("lower-hull edge {a}-{b} has no face")));
        };
        let mut c = first;
        for &d in &left {
            if lift.above(a, b, c, d) < 0 {
                c = d;
            }
        }
        let mut members: Vec<usize> = vec![a, b, c];
        members.extend(left.iter().copied().filter(|&d| d != c && lift.above(a, b, c, d) == 0));
        let face = ccw_hull_of(&cfg, &members);
        for i in 0..face.len() {
            let (p, q) = (face[i], face[(i + 1) % face.len()]);
            done.insert((p, q));
            if !done.contains(&(q, p)) && !cfg.is_hull_edge(p, q) {
                queue.push_back((q, p));
            }
        }
        if members.len() > 3 {
            // Outline first, then lifted points lying inside the face.
            let mut labels: Vec<Label> = face.iter().map(|&i| cfg.label(i)).collect();
            let mut inner: Vec<Label> =
                members.iter().filter(|i| !face.contains(i)).map(|&i| cfg.label(i)).collect();
            inner.sort();
            labels.extend(inner);
            wide.push(labels);
        }
        faces.push(face);
    }
    if !wide.is_empty() {
        wide.sort();
        return Ok(CoherentOutcome::NonTriangular(NonTriangularReport { faces: wide }));
    }
    let triangles: Vec<[Label; 3]> =
        faces.iter().map(|f| [cfg.label(f[0]), cfg.label(f[1]), cfg.label(f[2])]).collect();
    let t = Hypertriangulation::new(cfg.clone(), &triangles)
        .map_err(|e| Error::Internal(format!("lower hull did not project to a tiling: {e}")))?;
    Ok(CoherentOutcome::Triangulated(t))
}

/// Counterclockwise outline (vertex indices) of a set of coplanar lifted
/// points.
fn ccw_hull_of(cfg: &KFoldConfig, members: &[usize]) -> Vec<usize> {
    let pts: Vec<Point2> = members.iter().map(|&i| cfg.point(i).clone()).collect();
    let hull = crate::geometry::convex_hull(&pts);
    let mut out: Vec<usize> =
        hull.iter().map(|h| members[pts.iter().position(|p| p == h).unwrap()]).collect();
    // Start at the smallest label for a deterministic face description.
    let min = (0..out.len()).min_by_key(|&i| cfg.label(out[i])).unwrap_or(0);
    out.rotate_left(min);
    out
}

/// Area-weighted label incidence vector normalized by the hull area.
pub fn gkz(t: &Hypertriangulation) -> Result<GkzVector> {
    t.require_valid()?;
    let cfg = t.config();
    let mut coords = vec![Rational::zero(); t.n()];
    for tri in t.iter() {
        let [a, b, c] = t.realize(tri);
        let weight = cross(&a, &b, &c) * ratio(1, 6);
        for l in tri.labels() {
            for i in l.indices() {
                coords[i - 1] += &weight;
            }
        }
    }
    for c in coords.iter_mut() {
        *c /= cfg.hull_area();
    }
    Ok(GkzVector { coords })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coherence {
    /// A height function generating the hypertriangulation.
    Coherent(HeightFunction),
    Incoherent,
}

impl Coherence {
    pub fn is_coherent(&self) -> bool {
        matches!(self, Coherence::Coherent(_))
    }
}

/// Coefficients over `h_1..h_n` of `det`-scaled "s above plane(p, q, r)",
/// for `p, q, r` counterclockwise.
fn above_row(cfg: &KFoldConfig, [p, q, r]: [usize; 3], s: usize) -> Vec<Rational> {
    let pt = |i: usize| cfg.point(i);
    let terms = [
        (s, cross(pt(p), pt(q), pt(r))),
        (p, -cross(pt(q), pt(r), pt(s))),
        (q, -cross(pt(r), pt(p), pt(s))),
        (r, -cross(pt(p), pt(q), pt(s))),
    ];
    let mut row = vec![Rational::zero(); cfg.n()];
    for (v, coeff) in terms {
        for i in cfg.label(v).indices() {
            row[i - 1] += &coeff;
        }
    }
    row
}

/// The linear strict inequalities on heights that make `t` the lower hull.
pub fn coherence_constraints(t: &Hypertriangulation) -> Vec<Vec<Rational>> {
    let cfg = t.config();
    let mut rows = Vec::new();
    let mesh = crate::flips::Mesh::new(t);
    let mut edges: Vec<(Label, Label)> = mesh.edges().collect();
    edges.sort();
    for (a, b) in edges {
        if let [t1, t2] = mesh.edge_triangles(a, b) {
            let d = t2.opposite(a, b).unwrap();
            rows.push(above_row(cfg, t.ccw_indices(t1), cfg.index_of(d).unwrap()));
        }
    }
    let used: BTreeSet<Label> = t.vertices();
    for (idx, &l) in cfg.labels().iter().enumerate() {
        if used.contains(&l) {
            continue;
        }
        if let Some(host) = t.iter().find(|tri| point_in_open_triangle(cfg.point(idx), &t.realize(tri))) {
            rows.push(above_row(cfg, t.ccw_indices(host), idx));
        }
    }
    rows
}

/// Exact coherence test with a generating height function on success.
///
/// The witness is normalized so that `h` vanishes on the first three base
/// points (which are affinely independent) and every strict inequality has
/// slack at least one.
pub fn is_coherent(t: &Hypertriangulation) -> Result<Coherence> {
    t.require_valid()?;
    let rows = coherence_constraints(t);
    let n = t.n();
    match strict_feasibility(&rows, n) {
        StrictFeasibility::Infeasible(_) => Ok(Coherence::Incoherent),
        StrictFeasibility::Feasible(x) => {
            let base = t.config().base();
            let h = remove_affine_part(base, &x)?;
            let slack = rows.iter().map(|r| dot(r, &h)).min().unwrap_or_else(Rational::one);
            let h = if slack > Rational::zero() { h.into_iter().map(|v| v / &slack).collect() } else { h };
            Ok(Coherence::Coherent(HeightFunction::new(h)))
        }
    }
}

/// Subtracts the affine function agreeing with `h` on the first three points.
fn remove_affine_part(base: &PointConfig, h: &[Rational]) -> Result<Vec<Rational>> {
    let (p, q, r) = (base.point(1), base.point(2), base.point(3));
    let area = cross(p, q, r);
    if area.is_zero() {
        return Err(Error::DegenerateConfiguration([1, 2, 3]));
    }
    let affine = |s: &Point2| -> Rational {
        let lp = cross(q, r, s) / &area;
        let lq = cross(r, p, s) / &area;
        let lr = cross(p, q, s) / &area;
        lp * &h[0] + lq * &h[1] + lr * &h[2]
    };
    Ok(base.points().iter().zip(h).map(|(s, v)| v - affine(s)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AgingCheck {
    Checked(bool),
    Skipped(String),
}

fn coherent_at(base: &PointConfig, k: usize, h: &HeightFunction) -> std::result::Result<Hypertriangulation, String> {
    match coherent_subdivision(base, k, h) {
        Ok(CoherentOutcome::Triangulated(t)) => Ok(t),
        Ok(CoherentOutcome::NonTriangular(r)) => Err(format!("level {k}: {r}")),
        Err(e) => Err(format!("level {k}: {e}")),
    }
}

fn aged_whites(t: &Hypertriangulation) -> BTreeSet<LabeledTriangle> {
    t.whites().map(|w| age_triangle(w).expect("white triangle")).collect()
}

/// Compares the black triangles at levels `k` and `k + 1` with the aged white
/// triangles one level down, all generated by the same heights.
pub fn coherent_aging_check(base: &PointConfig, k: usize, h: &HeightFunction) -> Result<AgingCheck> {
    let n = base.n();
    if k == 0 || k >= n {
        return Err(Error::LevelOutOfRange { k, max: n - 1 });
    }
    let t = match coherent_at(base, k, h) {
        Ok(t) => t,
        Err(why) => return Ok(AgingCheck::Skipped(why)),
    };
    let mut holds = true;
    if k + 1 < n {
        match coherent_at(base, k + 1, h) {
            Ok(u) => holds &= u.black_set() == aged_whites(&t),
            Err(why) => return Ok(AgingCheck::Skipped(why)),
        }
    }
    if k >= 2 {
        match coherent_at(base, k - 1, h) {
            Ok(s) => holds &= t.black_set() == aged_whites(&s),
            Err(why) => return Ok(AgingCheck::Skipped(why)),
        }
    }
    Ok(AgingCheck::Checked(holds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rat;

    fn q4() -> PointConfig {
        PointConfig::from_ints(&[(0, 0), (6, 0), (7, 5), (1, 6)]).unwrap()
    }

    #[test]
    fn q4_level2_heights_pick_center() {
        let t = coherent_subdivision(&q4(), 2, &HeightFunction::from_ints(&[0, 1, 0, 1]))
            .unwrap()
            .triangulation()
            .unwrap();
        assert_eq!(t.canonical_key(), "1.2,1.3,1.4;1.2,1.3,2.3;1.3,1.4,3.4;1.3,2.3,3.4");
        let other = coherent_subdivision(&q4(), 2, &HeightFunction::from_ints(&[1, 0, 1, 0]))
            .unwrap()
            .triangulation()
            .unwrap();
        assert!(other.vertices().contains(&"2.4".parse().unwrap()));
    }

    #[test]
    fn zero_heights_are_flat() {
        match coherent_subdivision(&q4(), 2, &HeightFunction::zeros(4)).unwrap() {
            CoherentOutcome::NonTriangular(r) => {
                assert_eq!(r.faces.len(), 1);
                assert_eq!(r.faces[0].len(), 6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gkz_small_cases() {
        let tri = PointConfig::from_ints(&[(0, 0), (4, 1), (1, 3)]).unwrap();
        for (k, expect) in [(1, ratio(1, 3)), (2, ratio(2, 3))] {
            let t = coherent_subdivision(&tri, k, &HeightFunction::zeros(3)).unwrap().triangulation().unwrap();
            assert_eq!(gkz(&t).unwrap().coords, vec![expect.clone(); 3]);
        }
        let a = coherent_subdivision(&q4(), 2, &HeightFunction::from_ints(&[0, 1, 0, 1]))
            .unwrap()
            .triangulation()
            .unwrap();
        let b = coherent_subdivision(&q4(), 2, &HeightFunction::from_ints(&[1, 0, 1, 0]))
            .unwrap()
            .triangulation()
            .unwrap();
        let (ga, gb) = (gkz(&a).unwrap(), gkz(&b).unwrap());
        assert_ne!(ga, gb);
        assert_eq!(ga.sum(), rat(2));
        assert_eq!(gb.sum(), rat(2));
    }

    #[test]
    fn coherence_witness_regenerates() {
        let base = q4();
        for h in [[0, 1, 0, 1], [1, 0, 1, 0]] {
            let t = coherent_subdivision(&base, 2, &HeightFunction::from_ints(&h))
                .unwrap()
                .triangulation()
                .unwrap();
            let Coherence::Coherent(w) = is_coherent(&t).unwrap() else { panic!("incoherent") };
            assert!(w.values()[..3].iter().all(|v| v.is_zero()));
            assert_eq!(coherent_subdivision(&base, 2, &w).unwrap().triangulation().unwrap(), t);
        }
    }

    #[test]
    fn squared_norms_give_delaunay() {
        let base = PointConfig::from_ints(&[(0, 0), (10, 1), (11, 9), (2, 12), (5, 5)]).unwrap();
        let t = coherent_subdivision(&base, 1, &HeightFunction::squared_norms(&base))
            .unwrap()
            .triangulation()
            .unwrap();
        let cfg = t.config();
        for tri in t.iter() {
            let [a, b, c] = t.realize(tri);
            for p in cfg.points() {
                assert!(crate::geometry::in_circle(&a, &b, &c, p) <= 0);
            }
        }
        assert!(is_coherent(&t).unwrap().is_coherent());
        assert_eq!(
            coherent_aging_check(&base, 1, &HeightFunction::squared_norms(&base)).unwrap(),
            AgingCheck::Checked(true)
        );
    }
}
