use num_traits::Signed;

use super::{
    on_segment, orientation, point_in_closed_triangle, segments_intersect, signed_area, Orientation,
    Point2, Rational,
};
use crate::error::{Error, Result};

/// Counterclockwise simple polygon with no two consecutive edges collinear.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplePolygon {
    vertices: Vec<Point2>,
}

impl SimplePolygon {
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidPolygon(format!("{n} vertices")));
        }
        for i in 0..n {
            for j in i + 1..n {
                if vertices[i] == vertices[j] {
                    return Err(Error::InvalidPolygon(format!("repeated vertex {}", vertices[i])));
                }
            }
        }
        for i in 0..n {
            let (a, b, c) = (&vertices[i], &vertices[(i + 1) % n], &vertices[(i + 2) % n]);
            if orientation(a, b, c) == Orientation::Collinear {
                return Err(Error::InvalidPolygon(format!("collinear edges at {b}")));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                // adjacent edges share exactly one endpoint, checked above
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a, b) = (&vertices[i], &vertices[(i + 1) % n]);
                let (c, d) = (&vertices[j], &vertices[(j + 1) % n]);
                if segments_intersect(a, b, c, d) {
                    return Err(Error::InvalidPolygon("self-intersecting boundary".into()));
                }
            }
        }
        if !signed_area(&vertices).is_positive() {
            return Err(Error::InvalidPolygon("not counterclockwise".into()));
        }
        Ok(SimplePolygon { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> Rational {
        signed_area(&self.vertices)
    }

    /// Closed containment (boundary counts as inside).
    pub fn contains(&self, p: &Point2) -> bool {
        let n = self.vertices.len();
        for i in 0..n {
            if on_segment(p, &self.vertices[i], &self.vertices[(i + 1) % n]) {
                return true;
            }
        }
        // Crossing number with the half-open upward rule.
        let mut inside = false;
        for i in 0..n {
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % n];
            if (a.y > p.y) != (b.y > p.y) {
                let o = orientation(a, b, p);
                let upward = b.y > a.y;
                if (upward && o == Orientation::Ccw) || (!upward && o == Orientation::Cw) {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn triangulate(&self) -> Vec<[Point2; 3]> {
        ear_clip(self)
    }
}

/// Ear clipping over vertex indices, returned in clipping order.
///
/// At each step the valid ear whose apex has the smallest original index is
/// clipped. An ear is a strictly convex vertex whose closed triangle holds no
/// other remaining vertex.
pub fn ear_clip_indices(vertices: &[Point2]) -> Vec<[usize; 3]> {
    let mut remaining: Vec<usize> = (0..vertices.len()).collect();
    let mut out = Vec::with_capacity(vertices.len().saturating_sub(2));
    while remaining.len() > 3 {
        let m = remaining.len();
        let mut clipped = None;
        for pos in 0..m {
            let prev = remaining[(pos + m - 1) % m];
            let apex = remaining[pos];
            let next = remaining[(pos + 1) % m];
            let tri = [vertices[prev].clone(), vertices[apex].clone(), vertices[next].clone()];
            if orientation(&tri[0], &tri[1], &tri[2]) != Orientation::Ccw {
                continue;
            }
            let blocked = remaining.iter().any(|&v| {
                v != prev && v != apex && v != next && point_in_closed_triangle(&vertices[v], &tri)
            });
            if !blocked {
                clipped = Some((pos, [prev, apex, next]));
                break;
            }
        }
        // A simple polygon always has an ear; `remaining` is ordered by index.
        let (pos, tri) = clipped.expect("simple polygon without an ear");
        out.push(tri);
        remaining.remove(pos);
    }
    if remaining.len() == 3 {
        out.push([remaining[0], remaining[1], remaining[2]]);
    }
    out
}

pub fn ear_clip(poly: &SimplePolygon) -> Vec<[Point2; 3]> {
    let v = poly.vertices();
    ear_clip_indices(v)
        .into_iter()
        .map(|[a, b, c]| [v[a].clone(), v[b].clone(), v[c].clone()])
        .collect()
}
