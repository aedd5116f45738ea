//! Planar primitives.
//!
//! Topological decisions (orientation, crossing, point-on-segment) are exact:
//! they go through an adaptive-precision orientation determinant and never
//! flip because of rounding. Metric quantities (angles) are plain `f64`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("coordinate is not finite")]
    NonFinite,
    #[error("segment endpoints coincide")]
    ZeroLengthSegment,
    #[error("triangle is degenerate (collinear vertices)")]
    DegenerateTriangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Builds a point, rejecting NaN and infinite coordinates.
    pub fn try_new(x: f64, y: f64) -> Result<Self, GeometryError> {
        if x.is_finite() && y.is_finite() {
            Ok(Point { x, y })
        } else {
            Err(GeometryError::NonFinite)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        Point::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    fn coord(&self) -> robust::Coord<f64> {
        robust::Coord { x: self.x, y: self.y }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    a: Point,
    b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Self, GeometryError> {
        if !a.is_finite() || !b.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if a == b {
            return Err(GeometryError::ZeroLengthSegment);
        }
        Ok(Segment { a, b })
    }

    pub fn a(&self) -> Point {
        self.a
    }

    pub fn b(&self) -> Point {
        self.b
    }
}

/// An angle in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(pub f64);

impl Angle {
    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }

    pub fn from_degrees(deg: f64) -> Self {
        Angle(deg.to_radians())
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6} rad ({:.4}°)", self.0, self.degrees())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn of(v: f64) -> Self {
        if v > 0.0 {
            Sign::Positive
        } else if v < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn is_positive(self) -> bool {
        self == Sign::Positive
    }

    pub fn is_negative(self) -> bool {
        self == Sign::Negative
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }
}

/// Twice the signed area of `(a, b, c)`, evaluated adaptively so that its
/// sign is exact. Positive when the points turn counterclockwise.
pub fn orient2d_value(a: &Point, b: &Point, c: &Point) -> f64 {
    robust::orient2d(a.coord(), b.coord(), c.coord())
}

pub fn orient2d(a: &Point, b: &Point, c: &Point) -> Sign {
    Sign::of(orient2d_value(a, b, c))
}

/// True iff `p` lies on the open segment `(a, b)`.
pub fn on_open_segment(a: &Point, b: &Point, p: &Point) -> bool {
    if p == a || p == b || !orient2d(a, b, p).is_zero() {
        return false;
    }
    // collinear: strict betweenness on the dominant axis is exact
    if a.x != b.x {
        (a.x < p.x && p.x < b.x) || (b.x < p.x && p.x < a.x)
    } else {
        (a.y < p.y && p.y < b.y) || (b.y < p.y && p.y < a.y)
    }
}

/// Proper crossing of the closed segments `a–b` and `c–d`: a single common
/// point interior to both. Shared endpoints, T-junctions and collinear
/// overlaps are not crossings.
pub fn points_cross(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = orient2d(a, b, c);
    let o2 = orient2d(a, b, d);
    if o1.is_zero() || o2.is_zero() || o1 == o2 {
        return false;
    }
    let o3 = orient2d(c, d, a);
    let o4 = orient2d(c, d, b);
    !o3.is_zero() && !o4.is_zero() && o3 != o4
}

pub fn segments_cross(s: &Segment, t: &Segment) -> bool {
    points_cross(&s.a, &s.b, &t.a, &t.b)
}

/// True iff the closed segments share at least one point.
pub fn segments_touch(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    points_cross(a, b, c, d)
        || a == c
        || a == d
        || b == c
        || b == d
        || on_open_segment(a, b, c)
        || on_open_segment(a, b, d)
        || on_open_segment(c, d, a)
        || on_open_segment(c, d, b)
}

/// Interior angles at `a`, `b` and `c`.
///
/// Each angle is `atan2(|cross|, dot)`; the cross term is the adaptive
/// orientation determinant, shared by all three corners.
pub fn triangle_angles(a: &Point, b: &Point, c: &Point) -> Result<[Angle; 3], GeometryError> {
    let cross = orient2d_value(a, b, c);
    if cross == 0.0 {
        return Err(GeometryError::DegenerateTriangle);
    }
    let cross = cross.abs();
    let corner = |p: &Point, q: &Point, r: &Point| {
        let dot = (q.x - p.x) * (r.x - p.x) + (q.y - p.y) * (r.y - p.y);
        Angle(cross.atan2(dot))
    };
    Ok([corner(a, b, c), corner(b, c, a), corner(c, a, b)])
}

/// The largest interior angle of a triangle.
pub fn max_angle(a: &Point, b: &Point, c: &Point) -> Result<Angle, GeometryError> {
    let [x, y, z] = triangle_angles(a, b, c)?;
    Ok(Angle(x.0.max(y.0).max(z.0)))
}

/// The (unsigned) angle at `vertex` between the rays towards `p` and `q`.
pub fn angle_at(vertex: &Point, p: &Point, q: &Point) -> Angle {
    let (ux, uy) = (p.x - vertex.x, p.y - vertex.y);
    let (vx, vy) = (q.x - vertex.x, q.y - vertex.y);
    Angle((ux * vy - uy * vx).abs().atan2(ux * vx + uy * vy))
}

/// Angle in `[0, π/2]` between two undirected lines given by direction vectors.
pub fn line_angle(d1: (f64, f64), d2: (f64, f64)) -> Angle {
    let cross = (d1.0 * d2.1 - d1.1 * d2.0).abs();
    let dot = (d1.0 * d2.0 + d1.1 * d2.1).abs();
    let a = cross.atan2(dot);
    Angle(a.min(PI - a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EPS: f64 = 1e-12;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orient2d(&p(0., 0.), &p(1., 0.), &p(0., 1.)), Sign::Positive);
        assert_eq!(orient2d(&p(0., 0.), &p(1., 1.), &p(2., 2.)), Sign::Zero);
        assert_eq!(orient2d(&p(0., 0.), &p(1., 0.), &p(1., -1.)), Sign::Negative);
    }

    #[test]
    fn orientation_is_exact_near_degeneracy() {
        // naive evaluation of this classic case returns garbage signs
        let a = p(0.5, 0.5);
        let b = p(12.0, 12.0);
        let c = p(24.0, 24.0);
        for i in 0..64 {
            let q = p(0.5 + i as f64 * f64::EPSILON, 0.5);
            let s = orient2d(&q, &b, &c);
            let expected = if i == 0 { Sign::Zero } else { Sign::Negative };
            assert_eq!(s, expected, "i = {i}");
        }
        assert_eq!(orient2d(&a, &b, &c), Sign::Zero);
    }

    #[test]
    fn crossing_examples() {
        let s = |a: Point, b: Point| Segment::new(a, b).unwrap();
        assert!(segments_cross(&s(p(0., 0.), p(2., 2.)), &s(p(0., 2.), p(2., 0.))));
        assert!(!segments_cross(&s(p(0., 0.), p(1., 0.)), &s(p(1., 0.), p(2., 1.))));
        assert!(!segments_cross(&s(p(0., 0.), p(1., 0.)), &s(p(0., 1.), p(1., 1.))));
        // T-junction and collinear overlap are not crossings
        assert!(!segments_cross(&s(p(0., 0.), p(2., 0.)), &s(p(1., 0.), p(1., 1.))));
        assert!(!segments_cross(&s(p(0., 0.), p(2., 0.)), &s(p(1., 0.), p(3., 0.))));
    }

    #[test]
    fn segment_rejects_zero_length_and_nan() {
        assert_eq!(Segment::new(p(1., 1.), p(1., 1.)), Err(GeometryError::ZeroLengthSegment));
        assert_eq!(Segment::new(p(f64::NAN, 0.), p(1., 1.)), Err(GeometryError::NonFinite));
        assert_eq!(Point::try_new(f64::INFINITY, 0.), Err(GeometryError::NonFinite));
    }

    #[test]
    fn open_segment_membership() {
        assert!(on_open_segment(&p(0., 0.), &p(2., 2.), &p(1., 1.)));
        assert!(!on_open_segment(&p(0., 0.), &p(2., 2.), &p(2., 2.)));
        assert!(!on_open_segment(&p(0., 0.), &p(2., 2.), &p(3., 3.)));
        assert!(on_open_segment(&p(0., 0.), &p(0., 2.), &p(0., 1.)));
    }

    #[test]
    fn angle_examples() {
        let eq = triangle_angles(&p(0., 0.), &p(1., 0.), &p(0.5, 3f64.sqrt() / 2.)).unwrap();
        for a in eq {
            assert!((a.0 - PI / 3.).abs() < EPS);
        }
        let r = triangle_angles(&p(0., 0.), &p(1., 0.), &p(0., 1.)).unwrap();
        assert!((r[0].0 - PI / 2.).abs() < EPS);
        assert!((r[1].0 - PI / 4.).abs() < EPS);
        assert!((r[2].0 - PI / 4.).abs() < EPS);
        assert_eq!(
            triangle_angles(&p(0., 0.), &p(1., 0.), &p(2., 0.)),
            Err(GeometryError::DegenerateTriangle)
        );
    }

    #[test]
    fn line_angle_is_folded() {
        assert!((line_angle((1., 0.), (0., 1.)).0 - PI / 2.).abs() < EPS);
        assert!((line_angle((1., 0.), (-1., 0.1)).0 - 0.1f64.atan()).abs() < EPS);
    }

    fn coord() -> impl Strategy<Value = f64> {
        -100.0..100.0f64
    }

    fn point() -> impl Strategy<Value = Point> {
        (coord(), coord()).prop_map(|(x, y)| Point::new(x, y))
    }

    proptest! {
        #[test]
        fn orient_antisymmetric(a in point(), b in point(), c in point()) {
            let s = orient2d(&a, &b, &c);
            let flip = |s: Sign| match s {
                Sign::Positive => Sign::Negative,
                Sign::Negative => Sign::Positive,
                Sign::Zero => Sign::Zero,
            };
            prop_assert_eq!(orient2d(&b, &a, &c), flip(s));
            prop_assert_eq!(orient2d(&a, &c, &b), flip(s));
            prop_assert_eq!(orient2d(&c, &b, &a), flip(s));
            prop_assert_eq!(orient2d(&b, &c, &a), s);
        }

        #[test]
        fn crossing_symmetric(a in point(), b in point(), c in point(), d in point()) {
            prop_assert_eq!(points_cross(&a, &b, &c, &d), points_cross(&c, &d, &a, &b));
            prop_assert_eq!(points_cross(&a, &b, &c, &d), points_cross(&b, &a, &d, &c));
        }

        #[test]
        fn angles_sum_to_pi(a in point(), b in point(), c in point()) {
            prop_assume!(!orient2d(&a, &b, &c).is_zero());
            let t = triangle_angles(&a, &b, &c).unwrap();
            prop_assert!((t[0].0 + t[1].0 + t[2].0 - PI).abs() < EPS);
            for x in t {
                prop_assert!(x.0 > 0.0 && x.0 < PI);
            }
        }

        #[test]
        fn angles_invariant_under_rigid_motion(
            a in point(), b in point(), c in point(),
            rot in 0.0..(2.0 * PI), tx in coord(), ty in coord(),
        ) {
            // keep away from slivers where the angles are ill-conditioned
            let area = orient2d_value(&a, &b, &c).abs();
            let scale = a.dist(&b).max(b.dist(&c)).max(c.dist(&a));
            prop_assume!(area > 1e-3 * scale * scale);
            let (s, co) = rot.sin_cos();
            let m = |q: &Point| Point::new(co * q.x - s * q.y + tx, s * q.x + co * q.y + ty);
            let t0 = triangle_angles(&a, &b, &c).unwrap();
            let t1 = triangle_angles(&m(&a), &m(&b), &m(&c)).unwrap();
            for i in 0..3 {
                prop_assert!((t0[i].0 - t1[i].0).abs() < EPS, "{} vs {}", t0[i].0, t1[i].0);
            }
        }
    }
}
