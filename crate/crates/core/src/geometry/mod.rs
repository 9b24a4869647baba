//! Exact planar geometry over arbitrary-precision rationals.
//!
//! Every predicate here is decided exactly; there is no floating-point path.
//! Orientation-only predicates are also exposed in a generic form that takes
//! an orientation oracle, so callers holding cached sign tables (see
//! [`crate::model::KFoldConfig`]) can reuse them without recomputing
//! determinants.

mod polygon;
mod regions;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use polygon::{ear_clip, ear_clip_indices, SimplePolygon};
pub use regions::trace_regions;

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"-7/2"`, `"3"` or `"1.25"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::ParseRational(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.trim_start().starts_with('-');
        let digits = int.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit()) || frac.is_empty() && digits.is_empty() {
            return Err(bad());
        }
        let whole: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| bad())?
        };
        let scale = BigInt::from(10).pow(frac.len() as u32);
        let f: BigInt = if frac.is_empty() {
            BigInt::zero()
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let mut value = Rational::new(whole * &scale + f, scale);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Formats a rational as `"p/q"` or `"p"`; re-readable by [`parse_rational`].
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Lossy conversion for display only.
pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point2 {
    pub x: Rational,
    pub y: Rational,
}

impl Point2 {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point2 { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point2 { x: rat(x), y: rat(y) }
    }

    pub fn origin() -> Self {
        Point2 { x: Rational::zero(), y: Rational::zero() }
    }

    pub fn scale(&self, factor: &Rational) -> Point2 {
        Point2 { x: &self.x * factor, y: &self.y * factor }
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_rational(&self.x), format_rational(&self.y))
    }
}

impl Add for &Point2 {
    type Output = Point2;
    fn add(self, rhs: &Point2) -> Point2 {
        Point2 { x: &self.x + &rhs.x, y: &self.y + &rhs.y }
    }
}

impl Sub for &Point2 {
    type Output = Point2;
    fn sub(self, rhs: &Point2) -> Point2 {
        Point2 { x: &self.x - &rhs.x, y: &self.y - &rhs.y }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Ccw,
    Cw,
    Collinear,
}

impl Orientation {
    pub fn from_sign(s: i8) -> Self {
        match s.signum() {
            1 => Orientation::Ccw,
            -1 => Orientation::Cw,
            _ => Orientation::Collinear,
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Orientation::Ccw => 1,
            Orientation::Cw => -1,
            Orientation::Collinear => 0,
        }
    }

    pub fn reversed(self) -> Self {
        Orientation::from_sign(-self.sign())
    }
}

/// Twice the signed area of `pqr`.
pub fn cross(p: &Point2, q: &Point2, r: &Point2) -> Rational {
    (&q.x - &p.x) * (&r.y - &p.y) - (&q.y - &p.y) * (&r.x - &p.x)
}

fn sign_of(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

pub fn orientation(p: &Point2, q: &Point2, r: &Point2) -> Orientation {
    Orientation::from_sign(sign_of(&cross(p, q, r)))
}

/// Positive iff `d` lies strictly inside the circle through `a, b, c`
/// (which must be counterclockwise); zero iff the four are cocircular.
pub fn in_circle(a: &Point2, b: &Point2, c: &Point2, d: &Point2) -> i8 {
    let rows: Vec<[Rational; 3]> = [a, b, c]
        .iter()
        .map(|p| {
            let dx = &p.x - &d.x;
            let dy = &p.y - &d.y;
            let w = &dx * &dx + &dy * &dy;
            [dx, dy, w]
        })
        .collect();
    sign_of(&det3(&rows[0], &rows[1], &rows[2]))
}

pub(crate) fn det3(r0: &[Rational; 3], r1: &[Rational; 3], r2: &[Rational; 3]) -> Rational {
    &r0[0] * (&r1[1] * &r2[2] - &r1[2] * &r2[1]) - &r0[1] * (&r1[0] * &r2[2] - &r1[2] * &r2[0])
        + &r0[2] * (&r1[0] * &r2[1] - &r1[1] * &r2[0])
}

pub fn triangle_area(a: &Point2, b: &Point2, c: &Point2) -> Rational {
    cross(a, b, c).abs() / rat(2)
}

/// Signed area of a closed polygon (positive for counterclockwise).
pub fn signed_area(vertices: &[Point2]) -> Rational {
    let n = vertices.len();
    let mut twice = Rational::zero();
    for i in 0..n {
        let p = &vertices[i];
        let q = &vertices[(i + 1) % n];
        twice += &p.x * &q.y - &q.x * &p.y;
    }
    twice / rat(2)
}

/// Counterclockwise hull starting at the lexicographically smallest point.
/// Points in the relative interior of hull edges are dropped.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Point2> = Vec::new();
    for p in &pts {
        while lower.len() >= 2
            && orientation(&lower[lower.len() - 2], &lower[lower.len() - 1], p) != Orientation::Ccw
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Point2> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && orientation(&upper[upper.len() - 2], &upper[upper.len() - 1], p) != Orientation::Ccw
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && lower[0] == lower[1] {
        lower.pop();
    }
    lower
}

/// Interior-overlap test for two counterclockwise triangles given only an
/// orientation oracle: the interiors are disjoint iff some edge line of one
/// triangle leaves the other triangle in its closed outer half-plane.
pub(crate) fn ccw_triangles_overlap<V: Copy>(
    t1: [V; 3],
    t2: [V; 3],
    orient: impl Fn(V, V, V) -> i8,
) -> bool {
    for (a, b) in [(t1, t2), (t2, t1)] {
        for e in 0..3 {
            let p = a[e];
            let q = a[(e + 1) % 3];
            if b.iter().all(|&r| orient(p, q, r) <= 0) {
                return false;
            }
        }
    }
    true
}

fn ccw_points(t: &[Point2; 3]) -> Result<[Point2; 3]> {
    match orientation(&t[0], &t[1], &t[2]) {
        Orientation::Ccw => Ok(t.clone()),
        Orientation::Cw => Ok([t[0].clone(), t[2].clone(), t[1].clone()]),
        Orientation::Collinear => Err(Error::DegenerateTriangle),
    }
}

/// True iff the open interiors of the two triangles intersect.
pub fn triangles_overlap(t1: &[Point2; 3], t2: &[Point2; 3]) -> Result<bool> {
    let a = ccw_points(t1)?;
    let b = ccw_points(t2)?;
    Ok(ccw_triangles_overlap([&a[0], &a[1], &a[2]], [&b[0], &b[1], &b[2]], |p, q, r| {
        orientation(p, q, r).sign()
    }))
}

/// Closed point-in-triangle test (orientation of `t` arbitrary, non-degenerate).
pub fn point_in_closed_triangle(p: &Point2, t: &[Point2; 3]) -> bool {
    let s: Vec<i8> = (0..3).map(|i| orientation(&t[i], &t[(i + 1) % 3], p).sign()).collect();
    !(s.iter().any(|&v| v > 0) && s.iter().any(|&v| v < 0))
}

/// Strict point-in-triangle test.
pub fn point_in_open_triangle(p: &Point2, t: &[Point2; 3]) -> bool {
    let s: Vec<i8> = (0..3).map(|i| orientation(&t[i], &t[(i + 1) % 3], p).sign()).collect();
    s.iter().all(|&v| v > 0) || s.iter().all(|&v| v < 0)
}

/// `p` lies on the closed segment `ab`.
pub fn on_segment(p: &Point2, a: &Point2, b: &Point2) -> bool {
    orientation(a, b, p) == Orientation::Collinear
        && p.x >= a.x.clone().min(b.x.clone())
        && p.x <= a.x.clone().max(b.x.clone())
        && p.y >= a.y.clone().min(b.y.clone())
        && p.y <= a.y.clone().max(b.y.clone())
}

/// Closed segment intersection.
pub fn segments_intersect(a: &Point2, b: &Point2, c: &Point2, d: &Point2) -> bool {
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    if o1 != o2 && o3 != o4 && o1 != Orientation::Collinear && o2 != Orientation::Collinear
        && o3 != Orientation::Collinear && o4 != Orientation::Collinear
    {
        return true;
    }
    on_segment(c, a, b) || on_segment(d, a, b) || on_segment(a, c, d) || on_segment(b, c, d)
}

/// Segments cross at a single point interior to both.
pub fn segments_cross_properly(a: &Point2, b: &Point2, c: &Point2, d: &Point2) -> bool {
    let o1 = orientation(a, b, c).sign();
    let o2 = orientation(a, b, d).sign();
    let o3 = orientation(c, d, a).sign();
    let o4 = orientation(c, d, b).sign();
    o1 * o2 < 0 && o3 * o4 < 0
}

/// Closed segment versus closed triangle.
pub fn segment_meets_triangle(a: &Point2, b: &Point2, t: &[Point2; 3]) -> bool {
    if point_in_closed_triangle(a, t) || point_in_closed_triangle(b, t) {
        return true;
    }
    (0..3).any(|i| segments_intersect(a, b, &t[i], &t[(i + 1) % 3]))
}

/// The closed segment `ab` meets the open interior of `t`.
pub fn segment_meets_open_triangle(a: &Point2, b: &Point2, t: &[Point2; 3]) -> bool {
    let t = match ccw_points(t) {
        Ok(t) => t,
        Err(_) => return false,
    };
    let d = b - a;
    // For each edge pq the point a + s·d is on the inner side iff alpha + s·beta >= 0.
    let cons: Vec<(Rational, Rational)> = (0..3)
        .map(|i| {
            let (p, q) = (&t[i], &t[(i + 1) % 3]);
            let e = q - p;
            let ap = a - p;
            (&e.x * &ap.y - &e.y * &ap.x, &e.x * &d.y - &e.y * &d.x)
        })
        .collect();
    let mut lo = Rational::zero();
    let mut hi = Rational::one();
    for (alpha, beta) in &cons {
        if beta.is_zero() {
            if alpha.is_negative() {
                return false;
            }
        } else {
            let s = -alpha / beta;
            if beta.is_positive() {
                lo = lo.max(s);
            } else {
                hi = hi.min(s);
            }
        }
    }
    if lo >= hi {
        return d.x.is_zero() && d.y.is_zero() && point_in_open_triangle(a, &t);
    }
    let mid = (&lo + &hi) / rat(2);
    cons.iter().all(|(alpha, beta)| (alpha + beta * &mid).is_positive())
}

/// Total order on direction vectors by angle in `[0, 2π)`.
pub(crate) fn angle_cmp(u: &Point2, v: &Point2) -> Ordering {
    let half = |p: &Point2| -> u8 {
        if p.y.is_positive() || (p.y.is_zero() && p.x.is_positive()) {
            0
        } else {
            1
        }
    };
    half(u).cmp(&half(v)).then_with(|| {
        let c = &u.x * &v.y - &u.y * &v.x;
        if c.is_positive() {
            Ordering::Less
        } else if c.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> Point2 {
        Point2::from_ints(x, y)
    }

    #[test]
    fn segment_against_open_triangle() {
        let t = [p(0, 0), p(4, 0), p(0, 4)];
        assert!(segment_meets_open_triangle(&p(1, 1), &p(9, 9), &t));
        assert!(segment_meets_open_triangle(&p(-1, 1), &p(4, 1), &t));
        assert!(segment_meets_open_triangle(&p(2, 0), &p(0, 4), &t));
        assert!(!segment_meets_open_triangle(&p(0, 0), &p(4, 0), &t));
        assert!(!segment_meets_open_triangle(&p(-1, 5), &p(5, -1), &t));
        assert!(!segment_meets_open_triangle(&p(5, 5), &p(9, 9), &t));
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orientation(&p(0, 0), &p(1, 0), &p(0, 1)), Orientation::Ccw);
        assert_eq!(orientation(&p(0, 0), &p(1, 0), &p(2, 0)), Orientation::Collinear);
        assert_eq!(orientation(&p(0, 0), &p(0, 1), &p(1, 0)), Orientation::Cw);
    }

    #[test]
    fn hull_of_square_with_center() {
        let pts = vec![p(0, 0), p(2, 0), p(2, 2), p(0, 2), p(1, 1)];
        assert_eq!(convex_hull(&pts), vec![p(0, 0), p(2, 0), p(2, 2), p(0, 2)]);
        assert_eq!(convex_hull(&[p(3, 4)]), vec![p(3, 4)]);
        assert_eq!(convex_hull(&[p(0, 0), p(1, 0), p(2, 0)]), vec![p(0, 0), p(2, 0)]);
    }

    #[test]
    fn hull_of_q4_pair_sums_is_parallelogram() {
        let q4 = [p(0, 0), p(6, 0), p(7, 5), p(1, 6)];
        let mut sums = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                sums.push(&q4[i] + &q4[j]);
            }
        }
        // Start vertex is the lexicographic minimum a14 = (1,6).
        assert_eq!(convex_hull(&sums), vec![p(1, 6), p(6, 0), p(13, 5), p(8, 11)]);
    }

    #[test]
    fn overlap_examples() {
        let t1 = [p(0, 0), p(4, 0), p(0, 4)];
        let shared_edge = [p(4, 0), p(0, 4), p(4, 4)];
        assert!(!triangles_overlap(&t1, &shared_edge).unwrap());
        let inside = [p(1, 1), p(2, 1), p(1, 2)];
        assert!(triangles_overlap(&t1, &inside).unwrap());
        let shifted = [p(1, 1), p(5, 1), p(1, 5)];
        assert!(triangles_overlap(&t1, &shifted).unwrap());
        let vertex_only = [p(4, 0), p(8, 0), p(6, -3)];
        assert!(!triangles_overlap(&t1, &vertex_only).unwrap());
        let flat = [p(0, 0), p(1, 1), p(2, 2)];
        assert!(matches!(triangles_overlap(&t1, &flat), Err(Error::DegenerateTriangle)));
    }

    #[test]
    fn in_circle_sign() {
        let (a, b, c) = (p(0, 0), p(2, 0), p(0, 2));
        assert_eq!(in_circle(&a, &b, &c, &p(1, 1)), 1);
        assert_eq!(in_circle(&a, &b, &c, &p(2, 2)), 0);
        assert_eq!(in_circle(&a, &b, &c, &p(3, 3)), -1);
    }

    #[test]
    fn parse_and_format_rationals() {
        assert_eq!(parse_rational("-7/2").unwrap(), ratio(-7, 2));
        assert_eq!(parse_rational("3").unwrap(), rat(3));
        assert_eq!(parse_rational("1.25").unwrap(), ratio(5, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), ratio(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(format_rational(&ratio(6, -4)), "-3/2");
    }

    #[test]
    fn angle_order_is_counterclockwise_from_east() {
        let mut dirs = vec![p(0, -1), p(-1, 0), p(1, 1), p(1, 0), p(0, 1)];
        dirs.sort_by(angle_cmp);
        assert_eq!(dirs, vec![p(1, 0), p(1, 1), p(0, 1), p(-1, 0), p(0, -1)]);
    }
}
