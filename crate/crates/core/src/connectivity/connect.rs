//! Constructive flip paths between level-2 hypertriangulations.

use std::collections::{BTreeSet, HashMap};

use crate::aging::{age_triangle, collapse_level2};
use crate::error::{Error, Result};
use crate::flips::{apply_flip, Direction, Flip, FlipType, Mesh};
use crate::geometry::{ratio, SimplePolygon};
use crate::model::Label;
use crate::triangulation::{boundary_cycle, components, Hypertriangulation, LabeledTriangle};

use super::paths::{level1_path, polygon_path, target_with_triangle, Walk};

fn pair(a: Label, b: Label) -> Label {
    a.union(b)
}

/// Retriangulates the white region of index `i` around `required` so that
/// it contains that triangle.
fn ensure_white(walk: &mut Walk, i: usize, required: LabeledTriangle) -> Result<()> {
    if walk.cur.contains(&required) {
        return Ok(());
    }
    let cfg = walk.cur.config().clone();
    let [a, b, c] = walk.cur.realize(&required);
    let centroid = (&(&a + &b) + &c).scale(&ratio(1, 3));
    let region = walk
        .cur
        .white_regions_unchecked(i)
        .into_iter()
        .find(|r| {
            r.polygon(&cfg).map(|p: SimplePolygon| p.contains(&centroid)).unwrap_or(false)
        })
        .ok_or_else(|| Error::Internal(format!("no white region of index {i} holds {required}")))?;
    let target = target_with_triangle(&cfg, &region.boundary, required)?;
    let flips = polygon_path(&walk.cur, &region.triangles, &target)?;
    walk.apply_all(flips)
}

fn expect_flip(found: Option<Flip>, what: &str) -> Result<Flip> {
    found.ok_or_else(|| Error::Internal(format!("{what} support could not be established")))
}

/// Mirrors one level-1 flip at level 2.
fn simulate(walk: &mut Walk, f: &Flip) -> Result<()> {
    let before = f.before();
    match (f.kind(), f.direction()) {
        (FlipType::I, _) => {
            let [t1, t2] = [before[0], before[1]];
            let shared: Vec<Label> = t1.labels().into_iter().filter(|&l| t2.has_vertex(l)).collect();
            let (p, q) = (shared[0], shared[1]);
            let r = t1.opposite(p, q).unwrap();
            let s = t2.opposite(p, q).unwrap();
            let (pi, qi) = (p.indices().next().unwrap(), q.indices().next().unwrap());
            ensure_white(walk, pi, LabeledTriangle::new(pair(p, q), pair(p, r), pair(p, s))?)?;
            ensure_white(walk, qi, LabeledTriangle::new(pair(p, q), pair(q, r), pair(q, s))?)?;
            let flip = expect_flip(Mesh::new(&walk.cur).type3(pair(p, q)), "parallelogram")?;
            walk.apply(flip)
        }
        (FlipType::II, Direction::Forward) => {
            let [p, q, r] = before[0].labels();
            let s = f.after().iter().flat_map(|t| t.labels()).find(|l| !before[0].has_vertex(*l)).unwrap();
            let idx = |l: Label| l.indices().next().unwrap();
            ensure_white(walk, idx(q), LabeledTriangle::new(pair(p, q), pair(q, r), pair(q, s))?)?;
            ensure_white(walk, idx(r), LabeledTriangle::new(pair(q, r), pair(p, r), pair(r, s))?)?;
            ensure_white(walk, idx(p), LabeledTriangle::new(pair(p, r), pair(p, q), pair(p, s))?)?;
            let central = LabeledTriangle::new(pair(p, q), pair(q, r), pair(p, r))?;
            let flip = expect_flip(Mesh::new(&walk.cur).type4(&central), "hexagon")?;
            walk.apply(flip)
        }
        (FlipType::II, Direction::Backward) => {
            let s = before[0]
                .labels()
                .into_iter()
                .find(|&l| before.iter().all(|t| t.has_vertex(l)))
                .unwrap();
            let outer: BTreeSet<Label> =
                before.iter().flat_map(|t| t.labels()).filter(|&l| l != s).collect();
            let o: Vec<Label> = outer.into_iter().collect();
            let central = LabeledTriangle::new(pair(o[0], s), pair(o[1], s), pair(o[2], s))?;
            ensure_white(walk, s.indices().next().unwrap(), central)?;
            let flip = expect_flip(Mesh::new(&walk.cur).type4(&central), "hexagon")?;
            walk.apply(flip)
        }
        (kind, _) => Err(Error::Internal(format!("unexpected level-1 flip of type {kind}"))),
    }
}

/// Given equal black sets, retriangulates every white region into the one
/// of `target`.
fn match_regions(walk: &mut Walk, target: &Hypertriangulation) -> Result<()> {
    let cfg = walk.cur.config().clone();
    let whites: Vec<LabeledTriangle> = walk.cur.whites().copied().collect();
    let mut current: HashMap<Vec<Label>, Vec<LabeledTriangle>> = HashMap::new();
    for comp in components(&whites) {
        let key = boundary_cycle(&cfg, &comp)
            .ok_or_else(|| Error::Internal("white region is not a simple polygon".into()))?;
        current.insert(key, comp);
    }
    let goal: Vec<LabeledTriangle> = target.whites().copied().collect();
    for comp in components(&goal) {
        let key = boundary_cycle(&cfg, &comp)
            .ok_or_else(|| Error::Internal("white region is not a simple polygon".into()))?;
        let from = current
            .get(&key)
            .ok_or_else(|| Error::Internal(format!("no current white region with boundary {key:?}")))?;
        let flips = polygon_path(&walk.cur, from, &comp)?;
        walk.apply_all(flips)?;
    }
    Ok(())
}

/// A flip path between level-2 hypertriangulations: the collapsed level-1
/// path is mirrored step by step (Type I as Type III, Type II as Type IV),
/// after retriangulating the white regions involved.
pub fn connect_level2(from: &Hypertriangulation, to: &Hypertriangulation) -> Result<Vec<Flip>> {
    for u in [from, to] {
        if u.k() != 2 {
            return Err(Error::Precondition(format!("expected level 2, got level {}", u.k())));
        }
        u.config().require_strongly_generic()?;
        u.require_valid()?;
    }
    if from.config().base() != to.config().base() {
        return Err(Error::Precondition("hypertriangulations of different point sets".into()));
    }
    let t = collapse_level2(from)?;
    let t_goal = collapse_level2(to)?;
    let mut walk = Walk::new(from);
    let mut level1 = t.clone();
    for f in level1_path(&t, &t_goal)? {
        simulate(&mut walk, &f)?;
        level1 = apply_flip(&level1, &f)?;
        let aged: BTreeSet<LabeledTriangle> = level1.iter().map(|w| age_triangle(w).unwrap()).collect();
        if walk.cur.black_set() != aged {
            return Err(Error::Internal(format!("black triangles diverged after level-1 flip {f}")));
        }
    }
    match_regions(&mut walk, to)?;
    if walk.cur != *to {
        return Err(Error::Internal("flip path did not reach the target".into()));
    }
    Ok(walk.flips)
}
