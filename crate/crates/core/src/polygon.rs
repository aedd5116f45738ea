//! Min-max angle retriangulation of simple polygons.
//!
//! Channels opened by edge insertion may be weakly simple: a vertex can
//! appear twice when an untouched edge dangles into the channel. The dynamic
//! program handles that case; the enumerator only accepts simple polygons.
//!
//! [`dp_retriangulate`] is the O(k³) interval dynamic program used by edge
//! insertion. [`enumerate_polygon_triangulations`] lists every triangulation
//! and serves as its test oracle; it decides diagonal visibility with a
//! different test (midpoint containment) so the two routes stay independent.

use thiserror::Error;

use crate::geometry::{max_angle, on_open_segment, orient2d, orient2d_value, points_cross, segments_touch, Point};
use crate::triangulation::{PointSet, Tri, VertexId};

/// Largest polygon the enumerator accepts.
pub const MAX_ENUMERATION_SIZE: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolygonError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon is not simple: {0}")]
    NonSimplePolygon(String),
    #[error("polygon is not counterclockwise")]
    NotCounterclockwise,
    #[error("no triangulation found for a simple polygon")]
    NoTriangulation,
    #[error("polygon with {0} vertices exceeds the enumeration limit of {MAX_ENUMERATION_SIZE}")]
    TooLarge(usize),
}

/// A simple polygon, counterclockwise, whose vertices are ids into a point
/// set. Collinear (straight) vertices are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    ids: Vec<VertexId>,
    pts: Vec<Point>,
    simple: bool,
}

impl Polygon {
    pub fn new(ids: Vec<VertexId>, points: &PointSet) -> Result<Self, PolygonError> {
        let pts = ids.iter().map(|&i| points.point(i)).collect();
        Self::from_parts(ids, pts)
    }

    pub fn from_parts(ids: Vec<VertexId>, pts: Vec<Point>) -> Result<Self, PolygonError> {
        let k = ids.len();
        if k < 3 {
            return Err(PolygonError::TooFewVertices(k));
        }
        assert_eq!(k, pts.len());
        for i in 0..k {
            for j in i + 1..k {
                if ids[i] == ids[j] || pts[i] == pts[j] {
                    return Err(PolygonError::NonSimplePolygon(format!(
                        "vertex {} repeats",
                        ids[i]
                    )));
                }
            }
        }
        // every pair of boundary edges: adjacent ones may only share their
        // common vertex, the rest must be disjoint
        for i in 0..k {
            let (a, b) = (pts[i], pts[(i + 1) % k]);
            for j in i + 1..k {
                let (c, d) = (pts[j], pts[(j + 1) % k]);
                let adjacent = j == i + 1 || (i == 0 && j == k - 1);
                let bad = if adjacent {
                    // shared vertex is fine; folding back onto each other is not
                    let (shared, p, q) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                    on_open_segment(&shared, &p, &q) || on_open_segment(&shared, &q, &p)
                } else {
                    segments_touch(&a, &b, &c, &d)
                };
                if bad {
                    return Err(PolygonError::NonSimplePolygon(format!(
                        "edges {}-{} and {}-{} intersect",
                        ids[i],
                        ids[(i + 1) % k],
                        ids[j],
                        ids[(j + 1) % k]
                    )));
                }
            }
        }
        if signed_area2(&pts) <= 0.0 {
            return Err(PolygonError::NotCounterclockwise);
        }
        Ok(Polygon { ids, pts, simple: true })
    }

    /// A counterclockwise polygon whose boundary may touch itself at a
    /// repeated vertex (for example around a slit), but never crosses itself
    /// or passes through a vertex.
    pub fn weakly_simple(ids: Vec<VertexId>, points: &PointSet) -> Result<Self, PolygonError> {
        let k = ids.len();
        if k < 3 {
            return Err(PolygonError::TooFewVertices(k));
        }
        let pts: Vec<Point> = ids.iter().map(|&i| points.point(i)).collect();
        let err = |m: String| Err(PolygonError::NonSimplePolygon(m));
        for i in 0..k {
            let (a, b) = (pts[i], pts[(i + 1) % k]);
            if ids[i] == ids[(i + 1) % k] {
                return err(format!("vertex {} is its own neighbour", ids[i]));
            }
            if let Some(w) = (0..k).find(|&w| on_open_segment(&a, &b, &pts[w])) {
                return err(format!("vertex {} lies on edge {}-{}", ids[w], ids[i], ids[(i + 1) % k]));
            }
            for j in i + 1..k {
                if points_cross(&a, &b, &pts[j], &pts[(j + 1) % k]) {
                    return err(format!("edges {}-{} and {}-{} cross", ids[i], ids[(i + 1) % k], ids[j], ids[(j + 1) % k]));
                }
            }
        }
        if signed_area2(&pts) <= 0.0 {
            return Err(PolygonError::NotCounterclockwise);
        }
        let simple = (0..k).all(|i| (i + 1..k).all(|j| ids[i] != ids[j]));
        Ok(Polygon { ids, pts, simple })
    }

    /// False when some vertex appears more than once on the boundary.
    pub fn is_simple(&self) -> bool {
        self.simple
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn points(&self) -> &[Point] {
        &self.pts
    }

    fn next(&self, i: usize) -> usize {
        (i + 1) % self.len()
    }

    fn prev(&self, i: usize) -> usize {
        (i + self.len() - 1) % self.len()
    }

    fn is_boundary(&self, i: usize, j: usize) -> bool {
        self.next(i) == j || self.next(j) == i
    }

    /// Whether the segment from vertex `i` towards `j` leaves `i` into the
    /// polygon's interior (exact wedge test).
    fn in_cone(&self, i: usize, j: usize) -> bool {
        let (a0, a, a1, b) = (
            &self.pts[self.prev(i)],
            &self.pts[i],
            &self.pts[self.next(i)],
            &self.pts[j],
        );
        if a0 == a1 {
            // tip of a slit: everything but the slit itself is inside
            return !(orient2d(a, a0, b).is_zero() && (b.x - a.x) * (a0.x - a.x) + (b.y - a.y) * (a0.y - a.y) > 0.0);
        }
        if !orient2d(a0, a, a1).is_negative() {
            // convex or straight corner
            orient2d(a, b, a0).is_positive() && orient2d(b, a, a1).is_positive()
        } else {
            !(!orient2d(a, b, a1).is_negative() && !orient2d(b, a, a0).is_negative())
        }
    }

    /// Whether `i–j` is a proper diagonal: interior to the polygon, touching
    /// the boundary only at its endpoints.
    pub fn is_diagonal(&self, i: usize, j: usize) -> bool {
        if self.ids[i] == self.ids[j] || self.is_boundary(i, j) {
            return false;
        }
        let (a, b) = (&self.pts[i], &self.pts[j]);
        if self.pts.iter().any(|p| on_open_segment(a, b, p)) {
            return false;
        }
        for e in 0..self.len() {
            let f = self.next(e);
            if e == i || e == j || f == i || f == j {
                continue;
            }
            if points_cross(a, b, &self.pts[e], &self.pts[f]) {
                return false;
            }
        }
        self.in_cone(i, j) && self.in_cone(j, i)
    }

    /// Strict point-in-polygon by winding number with exact orientation.
    pub fn contains_strictly(&self, p: &Point) -> bool {
        let mut winding = 0i32;
        for i in 0..self.len() {
            let (a, b) = (&self.pts[i], &self.pts[self.next(i)]);
            if on_open_segment(a, b, p) || a == p {
                return false;
            }
            if a.y <= p.y {
                if b.y > p.y && orient2d(a, b, p).is_positive() {
                    winding += 1;
                }
            } else if b.y <= p.y && orient2d(a, b, p).is_negative() {
                winding -= 1;
            }
        }
        winding != 0
    }

    fn local_tri(&self, i: usize, k: usize, j: usize) -> Tri {
        [self.ids[i], self.ids[k], self.ids[j]]
    }
}

fn signed_area2(pts: &[Point]) -> f64 {
    (1..pts.len() - 1).map(|i| orient2d_value(&pts[0], &pts[i], &pts[i + 1])).sum()
}

/// Optimal min-max angle triangulation of `p` and its cost (the largest
/// angle it contains). Ties between split vertices go to the smallest index.
pub fn dp_retriangulate(p: &Polygon) -> Result<(Vec<Tri>, f64), PolygonError> {
    let k = p.len();
    // chord[i][j]: i–j is a boundary edge or a diagonal
    let mut chord = vec![vec![false; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let ok = p.is_boundary(i, j) || p.is_diagonal(i, j);
            chord[i][j] = ok;
            chord[j][i] = ok;
        }
    }
    let mut cost = vec![vec![f64::INFINITY; k]; k];
    let mut split = vec![vec![usize::MAX; k]; k];
    for i in 0..k - 1 {
        cost[i][i + 1] = 0.0;
    }
    for len in 2..k {
        for i in 0..k - len {
            let j = i + len;
            if !chord[i][j] {
                continue;
            }
            for m in i + 1..j {
                if !chord[i][m] || !chord[m][j] || !cost[i][m].is_finite() || !cost[m][j].is_finite() {
                    continue;
                }
                let (a, b, c) = (&p.pts[i], &p.pts[m], &p.pts[j]);
                if !orient2d(a, b, c).is_positive() {
                    continue;
                }
                let angle = max_angle(a, b, c).map_err(|_| PolygonError::NoTriangulation)?.0;
                let value = angle.max(cost[i][m]).max(cost[m][j]);
                if value < cost[i][j] {
                    cost[i][j] = value;
                    split[i][j] = m;
                }
            }
        }
    }
    if !cost[0][k - 1].is_finite() {
        return Err(PolygonError::NoTriangulation);
    }
    let mut tris = Vec::with_capacity(k - 2);
    let mut stack = vec![(0, k - 1)];
    while let Some((i, j)) = stack.pop() {
        if j - i < 2 {
            continue;
        }
        let m = split[i][j];
        tris.push(p.local_tri(i, m, j));
        stack.push((i, m));
        stack.push((m, j));
    }
    Ok((tris, cost[0][k - 1]))
}

/// Visibility test used only by the enumerator: no proper crossing with the
/// boundary, no vertex on the open segment, midpoint strictly inside.
fn diagonal_by_midpoint(p: &Polygon, i: usize, j: usize) -> bool {
    let (a, b) = (&p.pts[i], &p.pts[j]);
    if p.pts.iter().any(|q| on_open_segment(a, b, q)) {
        return false;
    }
    let k = p.len();
    for e in 0..k {
        let (c, d) = (&p.pts[e], &p.pts[(e + 1) % k]);
        if points_cross(a, b, c, d) {
            return false;
        }
    }
    p.contains_strictly(&a.midpoint(b))
}

/// Every triangulation of `p`, each as a list of vertex-id triples.
pub fn enumerate_polygon_triangulations(p: &Polygon) -> Result<Vec<Vec<Tri>>, PolygonError> {
    let k = p.len();
    if k > MAX_ENUMERATION_SIZE {
        return Err(PolygonError::TooLarge(k));
    }
    if !p.simple {
        return Err(PolygonError::NonSimplePolygon("a vertex repeats".into()));
    }
    let mut ok = vec![vec![false; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let v = (j == i + 1 || (i == 0 && j == k - 1)) || diagonal_by_midpoint(p, i, j);
            ok[i][j] = v;
            ok[j][i] = v;
        }
    }
    let mut memo = vec![vec![None; k]; k];
    Ok(enumerate_range(p, &ok, 0, k - 1, &mut memo))
}

fn enumerate_range(
    p: &Polygon,
    ok: &[Vec<bool>],
    i: usize,
    j: usize,
    memo: &mut Vec<Vec<Option<Vec<Vec<Tri>>>>>,
) -> Vec<Vec<Tri>> {
    if j - i < 2 {
        return vec![Vec::new()];
    }
    if let Some(r) = &memo[i][j] {
        return r.clone();
    }
    let mut out = Vec::new();
    for m in i + 1..j {
        if !ok[i][m] || !ok[m][j] || !orient2d(&p.pts[i], &p.pts[m], &p.pts[j]).is_positive() {
            continue;
        }
        let left = enumerate_range(p, ok, i, m, memo);
        let right = enumerate_range(p, ok, m, j, memo);
        for l in &left {
            for r in &right {
                let mut t = Vec::with_capacity(l.len() + r.len() + 1);
                t.push(p.local_tri(i, m, j));
                t.extend_from_slice(l);
                t.extend_from_slice(r);
                out.push(t);
            }
        }
    }
    memo[i][j] = Some(out.clone());
    out
}
