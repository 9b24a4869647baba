//! Flip paths for level-1 triangulations and for triangulated polygons.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::flips::{apply_flip, Flip, Mesh};
use crate::geometry::{
    ear_clip_indices, in_circle, point_in_open_triangle, segments_cross_properly, trace_regions, Point2,
    SimplePolygon,
};
use crate::model::{KFoldConfig, Label};
use crate::triangulation::{boundary_cycle, Hypertriangulation, LabeledTriangle};

/// Upper bound on flips spent inserting a single diagonal.
const DIAGONAL_FLIP_LIMIT: usize = 100_000;

/// A hypertriangulation together with the flips that produced it.
pub(crate) struct Walk {
    pub cur: Hypertriangulation,
    pub flips: Vec<Flip>,
}

impl Walk {
    pub fn new(start: &Hypertriangulation) -> Self {
        Walk { cur: start.clone(), flips: Vec::new() }
    }

    pub fn apply(&mut self, f: Flip) -> Result<()> {
        self.cur = apply_flip(&self.cur, &f)?;
        self.flips.push(f);
        Ok(())
    }

    pub fn apply_all(&mut self, flips: Vec<Flip>) -> Result<()> {
        flips.into_iter().try_for_each(|f| self.apply(f))
    }
}

fn reverse_path(path: Vec<Flip>) -> Vec<Flip> {
    path.into_iter().rev().map(|f| f.reversed()).collect()
}

/// Inserts every unused point, then Lawson-flips to the Delaunay
/// triangulation.
fn to_delaunay(t: &Hypertriangulation) -> Result<Walk> {
    let mut walk = Walk::new(t);
    let cfg = t.config().clone();
    for &l in cfg.labels() {
        if walk.cur.vertices().contains(&l) {
            continue;
        }
        let p = cfg.point_of(l).unwrap();
        let host = *walk
            .cur
            .iter()
            .find(|tri| point_in_open_triangle(p, &walk.cur.realize(tri)))
            .ok_or_else(|| Error::Internal(format!("point {l} is not inside any triangle")))?;
        let f = Mesh::new(&walk.cur)
            .split(&host, l)
            .ok_or_else(|| Error::Internal(format!("cannot insert {l} into {host}")))?;
        walk.apply(f)?;
    }
    loop {
        let mesh = Mesh::new(&walk.cur);
        let mut edges: Vec<(Label, Label)> = mesh.edges().collect();
        edges.sort();
        let illegal = edges.into_iter().find_map(|(a, b)| {
            let [t1, t2] = mesh.edge_triangles(a, b) else { return None };
            let d = cfg.point_of(t2.opposite(a, b)?)?;
            let [p, q, r] = walk.cur.realize(t1);
            (in_circle(&p, &q, &r, d) > 0).then_some((a, b))
        });
        let Some((a, b)) = illegal else { break };
        let f = mesh
            .type1(a, b)
            .ok_or_else(|| Error::Internal(format!("illegal edge {a}-{b} is not flippable")))?;
        walk.apply(f)?;
    }
    Ok(walk)
}

/// Type I and Type II flips from one level-1 triangulation to another,
/// routed through the Delaunay triangulation.
pub fn level1_path(t: &Hypertriangulation, target: &Hypertriangulation) -> Result<Vec<Flip>> {
    for x in [t, target] {
        if x.k() != 1 {
            return Err(Error::Precondition(format!("expected level 1, got level {}", x.k())));
        }
        x.require_valid()?;
    }
    if t.config().base() != target.config().base() {
        return Err(Error::Precondition("triangulations of different point sets".into()));
    }
    if t == target {
        return Ok(Vec::new());
    }
    let a = to_delaunay(t)?;
    let b = to_delaunay(target)?;
    if a.cur.triangles() != b.cur.triangles() {
        return Err(Error::Internal("Lawson flips reached two different triangulations".into()));
    }
    let mut path = a.flips;
    path.extend(reverse_path(b.flips));
    Ok(path)
}

fn replace(set: &mut BTreeSet<LabeledTriangle>, f: &Flip) {
    for t in f.before() {
        set.remove(t);
    }
    set.extend(f.after().iter().copied());
}

/// Removes interior vertices of `region` and flips it to the ear-clipping
/// of its boundary, inside `walk.cur`.
fn reduce_to_canonical(walk: &mut Walk, region: &mut BTreeSet<LabeledTriangle>) -> Result<()> {
    let cfg = walk.cur.config().clone();
    let tris: Vec<LabeledTriangle> = region.iter().copied().collect();
    let boundary = boundary_cycle(&cfg, &tris)
        .ok_or_else(|| Error::RegionNotSimple("region boundary is not a simple cycle".into()))?;
    let on_boundary: BTreeSet<Label> = boundary.iter().copied().collect();
    let interior: BTreeSet<Label> =
        tris.iter().flat_map(|t| t.labels()).filter(|l| !on_boundary.contains(l)).collect();
    for v in interior {
        loop {
            let mesh = Mesh::new(&walk.cur);
            let star = mesh.star(v);
            if star.len() == 3 {
                let f = mesh.merge(v).ok_or_else(|| Error::Internal(format!("cannot remove vertex {v}")))?;
                replace(region, &f);
                walk.apply(f)?;
                break;
            }
            let mut link: Vec<Label> = star.iter().flat_map(|t| t.labels()).filter(|&l| l != v).collect();
            link.sort();
            link.dedup();
            let f = link
                .iter()
                .find_map(|&w| mesh.type1(v, w))
                .ok_or_else(|| Error::Internal(format!("no flippable edge at vertex {v}")))?;
            replace(region, &f);
            walk.apply(f)?;
        }
    }
    let points: Vec<Point2> = boundary.iter().map(|&l| cfg.point_of(l).unwrap().clone()).collect();
    let ears = ear_clip_indices(&points);
    let mut fixed: BTreeSet<LabeledTriangle> = BTreeSet::new();
    for ear in ears.iter().take(ears.len().saturating_sub(1)) {
        let (p, apex, q) = (boundary[ear[0]], boundary[ear[1]], boundary[ear[2]]);
        let remaining: BTreeSet<LabeledTriangle> = region.difference(&fixed).copied().collect();
        insert_diagonal(walk, region, &remaining, p, q)?;
        let ear_tri = LabeledTriangle::new(p, apex, q)?;
        if !walk.cur.contains(&ear_tri) {
            return Err(Error::Internal(format!("ear {ear_tri} missing after inserting {p}-{q}")));
        }
        fixed.insert(ear_tri);
    }
    Ok(())
}

/// Flips edges of `remaining` crossing `pq` until `pq` is an edge.
fn insert_diagonal(
    walk: &mut Walk,
    region: &mut BTreeSet<LabeledTriangle>,
    remaining: &BTreeSet<LabeledTriangle>,
    p: Label,
    q: Label,
) -> Result<()> {
    let cfg = walk.cur.config().clone();
    let pt = |l: Label| cfg.point_of(l).unwrap();
    let crosses = |(a, b): (Label, Label)| segments_cross_properly(pt(p), pt(q), pt(a), pt(b));
    let mut pending: VecDeque<(Label, Label)> = {
        let edges: BTreeSet<(Label, Label)> = remaining.iter().flat_map(|t| t.edges()).collect();
        edges.into_iter().filter(|&e| crosses(e)).collect()
    };
    let mut spent = 0usize;
    while let Some((a, b)) = pending.pop_front() {
        spent += 1;
        if spent > DIAGONAL_FLIP_LIMIT {
            return Err(Error::BudgetExceeded { what: "diagonal insertion flip", limit: DIAGONAL_FLIP_LIMIT });
        }
        let mesh = Mesh::new(&walk.cur);
        match mesh.type1(a, b) {
            Some(f) if f.before().iter().all(|t| region.contains(t)) => {
                let [n1, _] = [f.after()[0], f.after()[1]];
                let shared: Vec<Label> =
                    n1.labels().into_iter().filter(|l| f.after()[1].has_vertex(*l)).collect();
                let new_edge = (shared[0].min(shared[1]), shared[0].max(shared[1]));
                replace(region, &f);
                walk.apply(f)?;
                if crosses(new_edge) {
                    pending.push_back(new_edge);
                }
            }
            _ => pending.push_back((a, b)),
        }
    }
    if Mesh::new(&walk.cur).edge_triangles(p, q).is_empty() {
        return Err(Error::Internal(format!("diagonal {p}-{q} could not be inserted")));
    }
    Ok(())
}

/// Type I and II flips, confined to a triangulated polygon, turning the
/// triangles `from` (a subset of `t`) into `to`.
pub fn polygon_path(t: &Hypertriangulation, from: &[LabeledTriangle], to: &[LabeledTriangle]) -> Result<Vec<Flip>> {
    let cfg = t.config().clone();
    if let Some(missing) = from.iter().find(|x| !t.contains(x)) {
        return Err(Error::Precondition(format!("triangle {missing} is not present")));
    }
    let a: BTreeSet<LabeledTriangle> = from.iter().copied().collect();
    let b: BTreeSet<LabeledTriangle> = to.iter().copied().collect();
    if a == b {
        return Ok(Vec::new());
    }
    let ba = boundary_cycle(&cfg, from);
    if ba.is_none() || ba != boundary_cycle(&cfg, to) || area(t, &a) != area(t, &b) {
        return Err(Error::RegionsDiffer);
    }
    let mut wa = Walk::new(t);
    let mut ra = a.clone();
    reduce_to_canonical(&mut wa, &mut ra)?;

    let mut swapped = t.triangles().clone();
    for x in &a {
        swapped.remove(x);
    }
    swapped.extend(b.iter().copied());
    let tb = t.with_triangles(swapped);
    tb.require_valid()?;
    let mut wb = Walk::new(&tb);
    let mut rb = b;
    reduce_to_canonical(&mut wb, &mut rb)?;
    if ra != rb {
        return Err(Error::Internal("canonical polygon triangulations differ".into()));
    }
    let mut path = wa.flips;
    path.extend(reverse_path(wb.flips));
    Ok(path)
}

fn area(t: &Hypertriangulation, set: &BTreeSet<LabeledTriangle>) -> crate::geometry::Rational {
    set.iter()
        .map(|x| {
            let [p, q, r] = t.realize(x);
            crate::geometry::triangle_area(&p, &q, &r)
        })
        .sum()
}

/// A triangulation of the polygon with boundary `boundary` that contains
/// `required`: the triangle is cut out and every remaining piece ear-clipped.
pub(crate) fn target_with_triangle(
    cfg: &KFoldConfig,
    boundary: &[Label],
    required: LabeledTriangle,
) -> Result<Vec<LabeledTriangle>> {
    let poly = SimplePolygon::new(boundary.iter().map(|&l| cfg.point_of(l).unwrap().clone()).collect())?;
    let by_point: HashMap<&Point2, Label> = cfg.entries().map(|(l, p)| (p, l)).collect();
    let blocked = required.labels().map(|l| cfg.point_of(l).unwrap().clone());
    let mut out = vec![required];
    for piece in trace_regions(&poly, &[blocked])? {
        let labels: Vec<Label> = piece.vertices().iter().map(|p| by_point[p]).collect();
        for [a, b, c] in ear_clip_indices(piece.vertices()) {
            out.push(LabeledTriangle::new(labels[a], labels[b], labels[c])?);
        }
    }
    Ok(out)
}
