//! The four geometric flip types: detection, application and reversal.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::point_in_open_triangle;
use crate::model::Label;
use crate::triangulation::{Color, Hypertriangulation, LabeledTriangle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FlipType {
    I,
    II,
    III,
    IV,
}

impl FlipType {
    pub const ALL: [FlipType; 4] = [FlipType::I, FlipType::II, FlipType::III, FlipType::IV];
}

impl fmt::Display for FlipType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlipType::I => "I",
            FlipType::II => "II",
            FlipType::III => "III",
            FlipType::IV => "IV",
        })
    }
}

impl std::str::FromStr for FlipType {
    type Err = Error;
    fn from_str(s: &str) -> Result<FlipType> {
        match s.trim() {
            "I" | "1" => Ok(FlipType::I),
            "II" | "2" => Ok(FlipType::II),
            "III" | "3" => Ok(FlipType::III),
            "IV" | "4" => Ok(FlipType::IV),
            other => Err(Error::Precondition(format!("unknown flip type {other:?}"))),
        }
    }
}

/// Type I: always forward. Type II: forward splits one triangle into three.
/// Type III: forward moves the center vertex to a larger label. Type IV:
/// forward turns a white central triangle black.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flip {
    kind: FlipType,
    before: Vec<LabeledTriangle>,
    after: Vec<LabeledTriangle>,
    direction: Direction,
}

impl fmt::Debug for Flip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Flip({} {:?}: {:?} -> {:?})", self.kind, self.direction, self.before, self.after)
    }
}

impl fmt::Display for Flip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |ts: &[LabeledTriangle]| ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "{}: [{}] -> [{}]", self.kind, side(&self.before), side(&self.after))
    }
}

fn common_vertex(tris: &[LabeledTriangle]) -> Option<Label> {
    tris[0].labels().into_iter().find(|&l| tris.iter().all(|t| t.has_vertex(l)))
}

/// The triangle of a four-triangle Type IV support sharing an edge with each
/// of the other three.
fn central_of(tris: &[LabeledTriangle]) -> Option<LabeledTriangle> {
    tris.iter().copied().find(|c| {
        c.edges()
            .iter()
            .all(|&(a, b)| tris.iter().any(|t| t != c && t.has_vertex(a) && t.has_vertex(b)))
    })
}

impl Flip {
    pub fn new(kind: FlipType, before: Vec<LabeledTriangle>, after: Vec<LabeledTriangle>) -> Flip {
        let mut before = before;
        let mut after = after;
        before.sort();
        after.sort();
        let direction = match kind {
            FlipType::I => Direction::Forward,
            FlipType::II => {
                if before.len() == 1 {
                    Direction::Forward
                } else {
                    Direction::Backward
                }
            }
            FlipType::III => match (common_vertex(&before), common_vertex(&after)) {
                (Some(b), Some(a)) if b > a => Direction::Backward,
                _ => Direction::Forward,
            },
            FlipType::IV => match central_of(&before) {
                Some(c) if c.is_black() => Direction::Backward,
                _ => Direction::Forward,
            },
        };
        Flip { kind, before, after, direction }
    }

    pub fn kind(&self) -> FlipType {
        self.kind
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn before(&self) -> &[LabeledTriangle] {
        &self.before
    }

    pub fn after(&self) -> &[LabeledTriangle] {
        &self.after
    }

    pub fn reversed(&self) -> Flip {
        Flip::new(self.kind, self.after.clone(), self.before.clone())
    }

    /// Labels touched by the flip on either side.
    pub fn support_labels(&self) -> BTreeSet<Label> {
        self.before.iter().chain(&self.after).flat_map(|t| t.labels()).collect()
    }

    /// Replaces every label by its complement in `[n]`.
    pub fn complement(&self, n: usize) -> Result<Flip> {
        let c = |ts: &[LabeledTriangle]| -> Result<Vec<LabeledTriangle>> {
            ts.iter().map(|t| t.complement(n)).collect()
        };
        Ok(Flip::new(self.kind, c(&self.before)?, c(&self.after)?))
    }
}

/// Adjacency view of a hypertriangulation.
pub struct Mesh<'a> {
    tri: &'a Hypertriangulation,
    by_edge: HashMap<(Label, Label), Vec<LabeledTriangle>>,
    by_vertex: HashMap<Label, Vec<LabeledTriangle>>,
}

fn edge_key(a: Label, b: Label) -> (Label, Label) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl<'a> Mesh<'a> {
    pub fn new(tri: &'a Hypertriangulation) -> Self {
        let mut by_edge: HashMap<(Label, Label), Vec<LabeledTriangle>> = HashMap::new();
        let mut by_vertex: HashMap<Label, Vec<LabeledTriangle>> = HashMap::new();
        for t in tri.iter() {
            for (a, b) in t.edges() {
                by_edge.entry((a, b)).or_default().push(*t);
            }
            for l in t.labels() {
                by_vertex.entry(l).or_default().push(*t);
            }
        }
        Mesh { tri, by_edge, by_vertex }
    }

    pub fn hypertriangulation(&self) -> &Hypertriangulation {
        self.tri
    }

    pub fn edge_triangles(&self, a: Label, b: Label) -> &[LabeledTriangle] {
        self.by_edge.get(&edge_key(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn star(&self, v: Label) -> &[LabeledTriangle] {
        self.by_vertex.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn edges(&self) -> impl Iterator<Item = (Label, Label)> + '_ {
        self.by_edge.keys().copied()
    }

    pub fn is_interior_vertex(&self, v: Label) -> bool {
        let cfg = self.tri.config();
        self.by_vertex.contains_key(&v) && !cfg.is_hull_vertex(cfg.index_of(v).unwrap())
    }

    fn orient(&self, a: Label, b: Label, c: Label) -> i8 {
        let cfg = self.tri.config();
        cfg.orient(cfg.index_of(a).unwrap(), cfg.index_of(b).unwrap(), cfg.index_of(c).unwrap())
    }

    /// Neighbors of an interior vertex in counterclockwise order.
    pub fn link_cycle(&self, v: Label) -> Option<Vec<Label>> {
        let star = self.star(v);
        let mut next: HashMap<Label, Label> = HashMap::new();
        for t in star {
            let others: Vec<Label> = t.labels().into_iter().filter(|&l| l != v).collect();
            let (p, q) = if self.orient(v, others[0], others[1]) > 0 {
                (others[0], others[1])
            } else {
                (others[1], others[0])
            };
            if next.insert(p, q).is_some() {
                return None;
            }
        }
        let start = *next.keys().min()?;
        let mut cycle = vec![start];
        let mut cur = *next.get(&start)?;
        while cur != start {
            if cycle.len() > star.len() {
                return None;
            }
            cycle.push(cur);
            cur = *next.get(&cur)?;
        }
        (cycle.len() == star.len()).then_some(cycle)
    }

    /// Type I across the edge `{a, b}`.
    pub fn type1(&self, a: Label, b: Label) -> Option<Flip> {
        let [t1, t2] = self.edge_triangles(a, b) else { return None };
        if t1.color() != t2.color() {
            return None;
        }
        let c = t1.opposite(a, b)?;
        let d = t2.opposite(a, b)?;
        // The quadrangle a, c, b, d is strictly convex iff cd separates a and b.
        if self.orient(c, d, a) * self.orient(c, d, b) >= 0 {
            return None;
        }
        let n1 = LabeledTriangle::new(a, c, d).ok()?;
        let n2 = LabeledTriangle::new(b, c, d).ok()?;
        if n1.color() != t1.color() || n2.color() != t1.color() {
            return None;
        }
        Some(Flip::new(FlipType::I, vec![*t1, *t2], vec![n1, n2]))
    }

    /// Type II forward: insert the unused label `v` into `t`.
    pub fn split(&self, t: &LabeledTriangle, v: Label) -> Option<Flip> {
        if self.by_vertex.contains_key(&v) {
            return None;
        }
        let cfg = self.tri.config();
        let p = cfg.point_of(v)?;
        if !point_in_open_triangle(p, &self.tri.realize(t)) {
            return None;
        }
        let [a, b, c] = t.labels();
        let new: Option<Vec<LabeledTriangle>> = [(a, b), (b, c), (a, c)]
            .iter()
            .map(|&(x, y)| LabeledTriangle::new(v, x, y).ok().filter(|n| n.color() == t.color()))
            .collect();
        Some(Flip::new(FlipType::II, vec![*t], new?))
    }

    /// Type II backward: remove the interior degree-3 vertex `v`.
    pub fn merge(&self, v: Label) -> Option<Flip> {
        let star = self.star(v);
        if star.len() != 3 || !self.is_interior_vertex(v) {
            return None;
        }
        let color = star[0].color();
        if star.iter().any(|t| t.color() != color) {
            return None;
        }
        let outer: BTreeSet<Label> =
            star.iter().flat_map(|t| t.labels()).filter(|&l| l != v).collect();
        let outer: Vec<Label> = outer.into_iter().collect();
        if outer.len() != 3 {
            return None;
        }
        let merged = LabeledTriangle::new(outer[0], outer[1], outer[2]).ok()?;
        if merged.color() != color {
            return None;
        }
        Some(Flip::new(FlipType::II, star.to_vec(), vec![merged]))
    }

    /// Type III about the interior vertex `v`.
    pub fn type3(&self, v: Label) -> Option<Flip> {
        let star = self.star(v);
        if star.len() != 4 || !self.is_interior_vertex(v) {
            return None;
        }
        let ring = self.link_cycle(v)?;
        let tri_of = |i: usize| {
            star.iter().find(|t| t.has_vertex(ring[i]) && t.has_vertex(ring[(i + 1) % 4])).copied()
        };
        let tris: Option<Vec<LabeledTriangle>> = (0..4).map(tri_of).collect();
        let tris = tris?;
        if (0..4).any(|i| tris[i].color() == tris[(i + 1) % 4].color()) {
            return None;
        }
        let cfg = self.tri.config();
        let p: Vec<_> = ring.iter().map(|&l| cfg.point_of(l).unwrap()).collect();
        if (p[0] + p[2]) != (p[1] + p[3]) {
            return None;
        }
        // Reflected center: e_V' = e_P0 + e_P2 - e_V as indicator vectors.
        let (p0, p2, vb) = (ring[0].bits(), ring[2].bits(), v.bits());
        let both = p0 & p2;
        let either = p0 ^ p2;
        if vb & !(both | either) != 0 || both & !vb != 0 {
            return None;
        }
        let reflected = both | (either & !vb);
        if reflected == 0 || reflected == vb {
            return None;
        }
        let w = Label::from_bits(reflected);
        cfg.index_of(w)?;
        let after: Option<Vec<LabeledTriangle>> =
            (0..4).map(|i| LabeledTriangle::new(w, ring[i], ring[(i + 1) % 4]).ok()).collect();
        let after = after?;
        if (0..4).any(|i| after[i].color() == after[(i + 1) % 4].color()) {
            return None;
        }
        Some(Flip::new(FlipType::III, tris, after))
    }

    /// Type IV with `central` as the middle triangle.
    pub fn type4(&self, central: &LabeledTriangle) -> Option<Flip> {
        let [u, w, s] = self.tri.ccw_indices(central).map(|i| self.tri.config().label(i));
        let mut hexagon = Vec::with_capacity(6);
        let mut outer = Vec::with_capacity(3);
        for (a, b) in [(u, w), (w, s), (s, u)] {
            let nb = self.edge_triangles(a, b).iter().find(|t| *t != central).copied()?;
            if nb.color() == central.color() {
                return None;
            }
            hexagon.push(a);
            hexagon.push(nb.opposite(a, b)?);
            outer.push(nb);
        }
        if hexagon.iter().collect::<BTreeSet<_>>().len() != 6 {
            return None;
        }
        if (0..6).any(|i| self.orient(hexagon[i], hexagon[(i + 1) % 6], hexagon[(i + 2) % 6]) <= 0) {
            return None;
        }
        let cfg = self.tri.config();
        let h: Vec<_> = hexagon.iter().map(|&l| cfg.point_of(l).unwrap()).collect();
        let center = h[0] + h[3];
        if h[1] + h[4] != center || h[2] + h[5] != center {
            return None;
        }
        // Reflection swaps opposite hexagon vertices.
        let (x, y, z) = (hexagon[5], hexagon[1], hexagon[3]);
        let new_central = LabeledTriangle::new(x, y, z).ok()?;
        if new_central.color() == central.color() {
            return None;
        }
        let mut after = vec![new_central];
        for (p, q, r) in [(x, u, y), (y, w, z), (z, s, x)] {
            let t = LabeledTriangle::new(p, q, r).ok()?;
            if t.color() != central.color() {
                return None;
            }
            after.push(t);
        }
        let mut before = outer;
        before.push(*central);
        Some(Flip::new(FlipType::IV, before, after))
    }

    /// Every applicable flip, sorted by type and support.
    pub fn enumerate(&self) -> Vec<Flip> {
        let mut out = BTreeSet::new();
        let mut edges: Vec<(Label, Label)> = self.by_edge.keys().copied().collect();
        edges.sort();
        for (a, b) in edges {
            if let Some(f) = self.type1(a, b) {
                out.insert(f);
            }
        }
        let cfg = self.tri.config();
        let unused: Vec<Label> =
            cfg.labels().iter().copied().filter(|l| !self.by_vertex.contains_key(l)).collect();
        for t in self.tri.iter() {
            for &v in &unused {
                if let Some(f) = self.split(t, v) {
                    out.insert(f);
                }
            }
        }
        let mut vertices: Vec<Label> = self.by_vertex.keys().copied().collect();
        vertices.sort();
        for &v in &vertices {
            if let Some(f) = self.merge(v) {
                out.insert(f);
            }
            if let Some(f) = self.type3(v) {
                out.insert(f);
            }
        }
        for t in self.tri.iter() {
            if let Some(f) = self.type4(t) {
                out.insert(f);
            }
        }
        out.into_iter().collect()
    }

    /// Re-derives `f` from its support; `None` if it is not applicable here.
    pub fn redetect(&self, f: &Flip) -> Option<Flip> {
        if f.before.iter().any(|t| !self.tri.contains(t)) {
            return None;
        }
        let found = match (f.kind, f.before.len()) {
            (FlipType::I, 2) => {
                let [a, b, c] = f.before[0].labels();
                [(a, b), (b, c), (a, c)]
                    .into_iter()
                    .find(|&(x, y)| f.before[1].has_vertex(x) && f.before[1].has_vertex(y))
                    .and_then(|(x, y)| self.type1(x, y))
            }
            (FlipType::II, 1) => {
                let old = f.before[0].labels();
                let v = f.after.iter().flat_map(|t| t.labels()).find(|l| !old.contains(l))?;
                self.split(&f.before[0], v)
            }
            (FlipType::II, 3) => self.merge(common_vertex(&f.before)?),
            (FlipType::III, 4) => self.type3(common_vertex(&f.before)?),
            (FlipType::IV, 4) => self.type4(&central_of(&f.before)?),
            _ => None,
        };
        found.filter(|g| g == f)
    }
}

pub fn enumerate_flips(tri: &Hypertriangulation) -> Result<Vec<Flip>> {
    tri.require_valid()?;
    Ok(Mesh::new(tri).enumerate())
}

/// Applies `f` after re-verifying every constraint on its support.
pub fn apply_flip(tri: &Hypertriangulation, f: &Flip) -> Result<Hypertriangulation> {
    let mesh = Mesh::new(tri);
    if let Some(missing) = f.before.iter().find(|t| !tri.contains(t)) {
        return Err(Error::FlipNotApplicable(format!("triangle {missing} is not present")));
    }
    if mesh.redetect(f).is_none() {
        return Err(Error::FlipNotApplicable(format!(
            "support of type {} flip does not satisfy its shape constraints",
            f.kind
        )));
    }
    Ok(apply_unchecked(tri, f))
}

pub(crate) fn apply_unchecked(tri: &Hypertriangulation, f: &Flip) -> Hypertriangulation {
    let mut set = tri.triangles().clone();
    for t in &f.before {
        set.remove(t);
    }
    set.extend(f.after.iter().copied());
    tri.with_triangles(set)
}

/// Color counts `(white, black)` of a triangle list.
pub fn color_counts(tris: &[LabeledTriangle]) -> (usize, usize) {
    let w = tris.iter().filter(|t| t.color() == Color::White).count();
    (w, tris.len() - w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{k_fold_sums, PointConfig};

    fn tri(s: &str) -> [Label; 3] {
        LabeledTriangle::parse(s).unwrap().labels()
    }

    fn build(points: &[(i64, i64)], k: usize, tris: &[&str]) -> Hypertriangulation {
        let cfg = k_fold_sums(&PointConfig::from_ints(points).unwrap(), k).unwrap();
        let triples: Vec<_> = tris.iter().map(|s| tri(s)).collect();
        Hypertriangulation::new(cfg, &triples).unwrap()
    }

    const Q4: [(i64, i64); 4] = [(0, 0), (6, 0), (7, 5), (1, 6)];
    const T4: [(i64, i64); 4] = [(0, 0), (6, 0), (3, 6), (3, 2)];

    #[test]
    fn q4_level2_single_type3() {
        let t = build(&Q4, 2, &["1.2,2.3,1.3", "2.3,3.4,1.3", "3.4,1.4,1.3", "1.4,1.2,1.3"]);
        let flips = enumerate_flips(&t).unwrap();
        assert_eq!(flips.len(), 1);
        let f = &flips[0];
        assert_eq!(f.kind(), FlipType::III);
        assert_eq!(f.direction(), Direction::Forward);
        assert!(f.after().iter().all(|t| t.has_vertex("2.4".parse().unwrap())));
        assert_eq!(color_counts(f.before()), (2, 2));
        let u = apply_flip(&t, f).unwrap();
        assert!(u.validate().is_ok());
        let back = enumerate_flips(&u).unwrap();
        assert_eq!(back, vec![f.reversed()]);
        assert_eq!(apply_flip(&u, &back[0]).unwrap(), t);
        assert!(matches!(apply_flip(&u, f), Err(Error::FlipNotApplicable(_))));
    }

    #[test]
    fn t4_level2_single_type4() {
        let t = build(&T4, 2, &["1.4,2.4,3.4", "1.2,1.4,2.4", "2.3,2.4,3.4", "1.3,1.4,3.4"]);
        assert_eq!(t.whites().count(), 1);
        let flips = enumerate_flips(&t).unwrap();
        assert_eq!(flips.len(), 1);
        let f = &flips[0];
        assert_eq!(f.kind(), FlipType::IV);
        assert_eq!(f.direction(), Direction::Forward);
        let u = apply_flip(&t, f).unwrap();
        assert!(u.validate().is_ok());
        assert!(u.contains(&LabeledTriangle::parse("1.2,1.3,2.3").unwrap()));
        assert_eq!(u.whites().count(), 3);
        assert_eq!(enumerate_flips(&u).unwrap(), vec![f.reversed()]);
    }

    #[test]
    fn q4_level1_single_type1() {
        let t = build(&Q4, 1, &["1,2,3", "1,3,4"]);
        let flips = enumerate_flips(&t).unwrap();
        assert_eq!(flips.len(), 1);
        assert_eq!(flips[0].kind(), FlipType::I);
        let u = apply_flip(&t, &flips[0]).unwrap();
        assert_eq!(u.canonical_key(), "1,2,4;2,3,4");
    }

    #[test]
    fn t4_level1_type2_both_ways() {
        let full = build(&T4, 1, &["1,2,4", "2,3,4", "1,3,4"]);
        let flips = enumerate_flips(&full).unwrap();
        assert_eq!(flips.len(), 1);
        assert_eq!(flips[0].kind(), FlipType::II);
        assert_eq!(flips[0].direction(), Direction::Backward);
        let single = apply_flip(&full, &flips[0]).unwrap();
        assert_eq!(single.canonical_key(), "1,2,3");
        let up = enumerate_flips(&single).unwrap();
        assert_eq!(up.len(), 1);
        assert_eq!(up[0].direction(), Direction::Forward);
        assert_eq!(apply_flip(&single, &up[0]).unwrap(), full);
    }

    #[test]
    fn complemented_flip_applies_in_complement() {
        let t = build(&Q4, 1, &["1,2,3", "1,3,4"]);
        let f = enumerate_flips(&t).unwrap().remove(0);
        let c = t.complement().unwrap();
        let cf = f.complement(4).unwrap();
        assert_eq!(enumerate_flips(&c).unwrap(), vec![cf.clone()]);
        assert_eq!(apply_flip(&c, &cf).unwrap(), apply_flip(&t, &f).unwrap().complement().unwrap());
    }
}
