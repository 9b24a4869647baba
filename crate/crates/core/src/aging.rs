//! The aging map between white level-k and black level-(k+1) triangles, and
//! the constructive passage between levels 1 and 2.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{
    ear_clip_indices, point_in_open_triangle, segment_meets_open_triangle, trace_regions, Point2,
    SimplePolygon,
};
use crate::model::{k_fold_sums, KFoldConfig, Label};
use crate::triangulation::{Hypertriangulation, LabeledTriangle};

/// `a_I a_J a_K -> a_{I∪J} a_{J∪K} a_{K∪I}` on a white triangle.
pub fn age_triangle(t: &LabeledTriangle) -> Result<LabeledTriangle> {
    if !t.is_white() {
        return Err(Error::NotWhite);
    }
    let [i, j, k] = t.labels();
    LabeledTriangle::new(i.union(j), j.union(k), k.union(i))
}

/// `a_I a_J a_K -> a_{I∩J} a_{J∩K} a_{K∩I}` on a black triangle.
pub fn unage_triangle(t: &LabeledTriangle) -> Result<LabeledTriangle> {
    if !t.is_black() {
        return Err(Error::NotBlack);
    }
    let [i, j, k] = t.labels();
    let meet = |a: Label, b: Label| a.intersection(b).ok_or(Error::NotBlack);
    LabeledTriangle::new(meet(i, j)?, meet(j, k)?, meet(k, i)?)
}

fn hull_polygon(cfg: &KFoldConfig) -> Result<SimplePolygon> {
    SimplePolygon::new(cfg.hull_cycle().iter().map(|&i| cfg.point(i).clone()).collect())
}

/// The level-2 hypertriangulation whose black triangles are the aged
/// triangles of `t1`, with every white gap ear-clipped.
pub fn build_level2(t1: &Hypertriangulation) -> Result<Hypertriangulation> {
    if t1.k() != 1 {
        return Err(Error::Precondition(format!("expected level 1, got level {}", t1.k())));
    }
    t1.require_valid()?;
    let cfg = k_fold_sums(t1.config().base(), 2)?;
    cfg.require_strongly_generic()?;
    let blacks: Vec<LabeledTriangle> = t1.iter().map(age_triangle).collect::<Result<_>>()?;
    let realized: Vec<[Point2; 3]> = blacks
        .iter()
        .map(|b| b.labels().map(|l| cfg.point_of(l).unwrap().clone()))
        .collect();
    let by_point: HashMap<&Point2, Label> = cfg.entries().map(|(l, p)| (p, l)).collect();
    let mut triangles = blacks.clone();
    for region in trace_regions(&hull_polygon(&cfg)?, &realized)? {
        let labels: Vec<Label> = region
            .vertices()
            .iter()
            .map(|p| by_point.get(p).copied().ok_or_else(|| Error::Internal(format!("gap vertex {p} is not a sum"))))
            .collect::<Result<_>>()?;
        let shared = labels.iter().skip(1).try_fold(labels[0], |acc, &l| acc.intersection(l));
        if shared.is_none() {
            return Err(Error::Internal(format!("gap {labels:?} has no common index")));
        }
        for [a, b, c] in ear_clip_indices(region.vertices()) {
            let t = LabeledTriangle::new(labels[a], labels[b], labels[c])?;
            if !t.is_white() {
                return Err(Error::Internal(format!("gap triangle {t} is not white")));
            }
            triangles.push(t);
        }
    }
    let u = Hypertriangulation::from_triangles_unchecked(cfg, triangles);
    let report = u.validate();
    if !report.is_ok() {
        return Err(Error::Internal(format!("constructed level-2 set is invalid: {report}")));
    }
    Ok(u)
}

/// The level-1 hypertriangulation obtained by unaging every black triangle.
pub fn collapse_level2(u: &Hypertriangulation) -> Result<Hypertriangulation> {
    if u.k() != 2 {
        return Err(Error::Precondition(format!("expected level 2, got level {}", u.k())));
    }
    u.require_valid()?;
    let cfg = k_fold_sums(u.config().base(), 1)?;
    let tris: Vec<[Label; 3]> =
        u.blacks().map(|b| unage_triangle(b).map(|t| t.labels())).collect::<Result<_>>()?;
    Hypertriangulation::new(cfg, &tris)
}

/// Checks that every triangle of `u` whose interior meets the segment from
/// `x` to `2 a_i` lies in `W_i(u)`.
pub fn star_convexity_witness(u: &Hypertriangulation, i: usize, x: &Point2) -> Result<bool> {
    if u.k() != 2 {
        return Err(Error::Precondition(format!("expected level 2, got level {}", u.k())));
    }
    let base = u.config().base();
    if i == 0 || i > base.n() {
        return Err(Error::LabelOutOfRange { index: i, n: base.n() });
    }
    if base.hull_indices().contains(&i) {
        return Err(Error::Precondition(format!("a_{i} is a vertex of the hull")));
    }
    u.require_valid()?;
    let in_region = |t: &LabeledTriangle| t.is_white() && t.all_contain(i);
    let host = u.iter().find(|t| point_in_open_triangle(x, &u.realize(t)));
    match host {
        Some(t) if in_region(t) => {}
        _ => return Err(Error::Precondition(format!("point {x} is not interior to a triangle of W_{i}"))),
    }
    let target = base.point(i).scale(&crate::geometry::rat(2));
    Ok(u.iter()
        .filter(|t| segment_meets_open_triangle(x, &target, &u.realize(t)))
        .all(in_region))
}

/// Pairs of distinct white triangles of `t` whose aged images overlap.
pub fn aging_overlap(t: &Hypertriangulation) -> Result<Vec<(LabeledTriangle, LabeledTriangle)>> {
    let k = t.k();
    if k + 2 > t.n() {
        return Err(Error::LevelOutOfRange { k: k + 1, max: t.n() - 1 });
    }
    let up = k_fold_sums(t.config().base(), k + 1)?;
    let whites: Vec<LabeledTriangle> = t.whites().copied().collect();
    let aged: Vec<[Point2; 3]> = whites
        .iter()
        .map(|w| {
            let b = age_triangle(w)?;
            Ok(b.labels().map(|l| up.point_of(l).unwrap().clone()))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for a in 0..whites.len() {
        for b in a + 1..whites.len() {
            if crate::geometry::triangles_overlap(&aged[a], &aged[b])? {
                out.push((whites[a], whites[b]));
            }
        }
    }
    Ok(out)
}
