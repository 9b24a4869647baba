//! Face tracing of a hull minus a set of blocked triangles.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_traits::Signed;

use super::{
    angle_cmp, on_segment, orientation, segments_cross_properly, signed_area, triangles_overlap,
    Orientation, Point2, SimplePolygon,
};
use crate::error::{Error, Result};

/// Closures of the connected components of `hull` minus the `blocked`
/// triangles, each as a counterclockwise polygon.
///
/// The edge set (hull edges plus blocked-triangle edges, split at every vertex
/// lying on them) is walked face by face. Faces lying inside a blocked
/// triangle are discarded, as is the unbounded face. A hull minus the blocked
/// set that is not a union of simply connected polygons is rejected.
pub fn trace_regions(hull: &SimplePolygon, blocked: &[[Point2; 3]]) -> Result<Vec<SimplePolygon>> {
    let mut tris: Vec<[Point2; 3]> = Vec::with_capacity(blocked.len());
    for t in blocked {
        match orientation(&t[0], &t[1], &t[2]) {
            Orientation::Ccw => tris.push(t.clone()),
            Orientation::Cw => tris.push([t[0].clone(), t[2].clone(), t[1].clone()]),
            Orientation::Collinear => return Err(Error::DegenerateTriangle),
        }
    }
    for i in 0..tris.len() {
        for j in i + 1..tris.len() {
            if triangles_overlap(&tris[i], &tris[j])? {
                return Err(Error::OverlappingBlocked(i, j));
            }
        }
    }
    let hv = hull.vertices();
    let hn = hv.len();
    for (i, t) in tris.iter().enumerate() {
        let escapes = t.iter().any(|p| !hull.contains(p))
            || (0..3).any(|e| {
                (0..hn).any(|h| {
                    segments_cross_properly(&t[e], &t[(e + 1) % 3], &hv[h], &hv[(h + 1) % hn])
                })
            });
        if escapes {
            return Err(Error::BlockedOutsideHull(i));
        }
    }

    let mut ids: BTreeMap<Point2, usize> = BTreeMap::new();
    let mut pts: Vec<Point2> = Vec::new();
    let id_of = |p: &Point2, ids: &mut BTreeMap<Point2, usize>, pts: &mut Vec<Point2>| -> usize {
        *ids.entry(p.clone()).or_insert_with(|| {
            pts.push(p.clone());
            pts.len() - 1
        })
    };
    let mut segments: Vec<(usize, usize, bool)> = Vec::new();
    for h in 0..hn {
        let a = id_of(&hv[h], &mut ids, &mut pts);
        let b = id_of(&hv[(h + 1) % hn], &mut ids, &mut pts);
        segments.push((a, b, false));
    }
    for t in &tris {
        let v: Vec<usize> = t.iter().map(|p| id_of(p, &mut ids, &mut pts)).collect();
        for e in 0..3 {
            segments.push((v[e], v[(e + 1) % 3], true));
        }
    }

    // Split every segment at the vertices lying in its relative interior.
    let mut undirected: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut blocked_side: HashSet<(usize, usize)> = HashSet::new();
    for &(a, b, is_blocked) in &segments {
        let mut inner: Vec<usize> = (0..pts.len())
            .filter(|&v| v != a && v != b && on_segment(&pts[v], &pts[a], &pts[b]))
            .collect();
        let da = &pts[b] - &pts[a];
        inner.sort_by(|&u, &w| {
            let du = &pts[u] - &pts[a];
            let dw = &pts[w] - &pts[a];
            (&du.x * &da.x + &du.y * &da.y).cmp(&(&dw.x * &da.x + &dw.y * &da.y))
        });
        let mut chain = vec![a];
        chain.extend(inner);
        chain.push(b);
        for w in chain.windows(2) {
            undirected.insert((w[0].min(w[1]), w[0].max(w[1])));
            if is_blocked {
                blocked_side.insert((w[0], w[1]));
            }
        }
    }

    let mut around: Vec<Vec<usize>> = vec![Vec::new(); pts.len()];
    for &(a, b) in &undirected {
        around[a].push(b);
        around[b].push(a);
    }
    for (v, nbrs) in around.iter_mut().enumerate() {
        let origin = pts[v].clone();
        nbrs.sort_by(|&x, &y| angle_cmp(&(&pts[x] - &origin), &(&pts[y] - &origin)));
    }
    let next_half_edge = |u: usize, v: usize| -> (usize, usize) {
        let ring = &around[v];
        let pos = ring.iter().position(|&w| w == u).expect("half-edge endpoints adjacent");
        let w = ring[(pos + ring.len() - 1) % ring.len()];
        (v, w)
    };

    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut starts: Vec<(usize, usize)> = undirected.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
    starts.sort();
    let mut outer_faces = 0usize;
    let mut regions = Vec::new();
    for start in starts {
        if seen.contains(&start) {
            continue;
        }
        let mut cycle = Vec::new();
        let mut is_blocked_face = false;
        let mut he = start;
        loop {
            seen.insert(he);
            is_blocked_face |= blocked_side.contains(&he);
            cycle.push(he.0);
            he = next_half_edge(he.0, he.1);
            if he == start {
                break;
            }
        }
        let ring: Vec<Point2> = cycle.iter().map(|&i| pts[i].clone()).collect();
        let area = signed_area(&ring);
        if !area.is_positive() {
            outer_faces += 1;
            continue;
        }
        if is_blocked_face {
            continue;
        }
        let distinct: BTreeSet<usize> = cycle.iter().copied().collect();
        if distinct.len() != cycle.len() {
            return Err(Error::RegionNotSimple("pinched face boundary".into()));
        }
        regions.push(simplify_ring(ring)?);
    }
    if outer_faces != 1 {
        return Err(Error::RegionNotSimple(format!(
            "{outer_faces} negatively oriented boundary cycles (holes)"
        )));
    }
    regions.sort_by(|a, b| a.vertices()[0].cmp(&b.vertices()[0]));
    Ok(regions)
}

/// Drops vertices where the boundary runs straight and rotates the ring to
/// start at its lexicographically smallest vertex.
fn simplify_ring(mut ring: Vec<Point2>) -> Result<SimplePolygon> {
    loop {
        let n = ring.len();
        let straight = (0..n).find(|&i| {
            orientation(&ring[(i + n - 1) % n], &ring[i], &ring[(i + 1) % n]) == Orientation::Collinear
        });
        match straight {
            Some(i) if n > 3 => {
                ring.remove(i);
            }
            _ => break,
        }
    }
    let min = (0..ring.len()).min_by(|&a, &b| ring[a].cmp(&ring[b])).unwrap_or(0);
    ring.rotate_left(min);
    SimplePolygon::new(ring)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{rat, triangle_area, Rational};

    fn p(x: i64, y: i64) -> Point2 {
        Point2::from_ints(x, y)
    }

    fn total_area(polys: &[SimplePolygon]) -> Rational {
        polys.iter().map(|q| q.area()).sum()
    }

    #[test]
    fn empty_blocked_set_returns_hull() {
        let hull = SimplePolygon::new(vec![p(0, 0), p(4, 0), p(0, 4)]).unwrap();
        let regions = trace_regions(&hull, &[]).unwrap();
        assert_eq!(regions, vec![hull]);
    }

    #[test]
    fn medial_triangle_leaves_three_corner_pockets() {
        let hull = SimplePolygon::new(vec![p(0, 0), p(4, 0), p(0, 4)]).unwrap();
        let medial = [p(2, 0), p(2, 2), p(0, 2)];
        let regions = trace_regions(&hull, std::slice::from_ref(&medial)).unwrap();
        assert_eq!(regions.len(), 3);
        assert!(regions.iter().all(|r| r.len() == 3));
        let blocked_area = triangle_area(&medial[0], &medial[1], &medial[2]);
        assert_eq!(hull.area(), blocked_area + total_area(&regions));
    }

    #[test]
    fn full_tiling_leaves_nothing() {
        let hull = SimplePolygon::new(vec![p(0, 0), p(4, 0), p(4, 4), p(0, 4)]).unwrap();
        let blocked = [[p(0, 0), p(4, 0), p(4, 4)], [p(0, 0), p(4, 4), p(0, 4)]];
        assert!(trace_regions(&hull, &blocked).unwrap().is_empty());
    }

    #[test]
    fn non_convex_gap() {
        // Square with two corner triangles removed leaves a non-convex pocket.
        let hull = SimplePolygon::new(vec![p(0, 0), p(6, 0), p(6, 6), p(0, 6)]).unwrap();
        let blocked = [[p(0, 0), p(6, 0), p(3, 2)], [p(6, 0), p(6, 6), p(4, 3)]];
        let regions = trace_regions(&hull, &blocked).unwrap();
        assert_eq!(regions.len(), 1);
        let blocked_area: Rational =
            blocked.iter().map(|t| triangle_area(&t[0], &t[1], &t[2])).sum();
        assert_eq!(total_area(&regions) + blocked_area, rat(36));
    }

    #[test]
    fn strictly_interior_triangle_is_a_hole() {
        let hull = SimplePolygon::new(vec![p(0, 0), p(9, 0), p(0, 9)]).unwrap();
        let blocked = [[p(1, 1), p(3, 1), p(1, 3)]];
        assert!(matches!(trace_regions(&hull, &blocked), Err(Error::RegionNotSimple(_))));
    }

    #[test]
    fn rejects_overlap_and_escape() {
        let hull = SimplePolygon::new(vec![p(0, 0), p(9, 0), p(0, 9)]).unwrap();
        let a = [p(0, 0), p(4, 0), p(0, 4)];
        let b = [p(1, 1), p(5, 1), p(1, 5)];
        assert!(matches!(trace_regions(&hull, &[a.clone(), b]), Err(Error::OverlappingBlocked(0, 1))));
        let out = [p(0, 0), p(10, 0), p(0, 1)];
        assert!(matches!(trace_regions(&hull, &[out]), Err(Error::BlockedOutsideHull(0))));
    }
}
