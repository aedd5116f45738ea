//! Triangulations of a planar point set, the min-max angle measure and the
//! improvement order between triangulations.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::geometry::{max_angle, on_open_segment, orient2d, points_cross, Angle, Point};

/// Default tolerance (radians) for treating two angles as equal.
pub const DEFAULT_TIE_TOL: f64 = 1e-9;

pub type VertexId = usize;

/// Vertex ids of a triangle, counterclockwise.
pub type Tri = [VertexId; 3];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangulationError {
    #[error("point set needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("point {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),
    #[error("invalid triangulation: {0}")]
    Invalid(String),
    #[error("triangulations are over different point sets")]
    MismatchedPointSet,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, TriangulationError> {
    Err(TriangulationError::Invalid(msg.into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<Self, TriangulationError> {
        if points.len() < 3 {
            return Err(TriangulationError::TooFewPoints(points.len()));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(TriangulationError::NonFinite(i));
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&i, &j| lex_cmp(&points[i], &points[j]));
        for w in order.windows(2) {
            if points[w[0]] == points[w[1]] {
                let (i, j) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(TriangulationError::DuplicatePoint(i, j));
            }
        }
        Ok(PointSet { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, id: VertexId) -> Point {
        self.points[id]
    }

    /// Whether any three points are collinear (exact test over all triples).
    pub fn has_collinear_triple(&self) -> bool {
        let n = self.points.len();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if orient2d(&self.points[i], &self.points[j], &self.points[k]).is_zero() {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Convex hull boundary, counterclockwise, starting at the
    /// lexicographically smallest point. Points lying on a hull edge are kept.
    pub fn convex_hull(&self) -> Vec<VertexId> {
        convex_hull(&self.points)
    }
}

pub(crate) fn lex_cmp(a: &Point, b: &Point) -> std::cmp::Ordering {
    a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y))
}

/// Monotone chain hull that keeps collinear boundary points.
pub fn convex_hull(points: &[Point]) -> Vec<VertexId> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| lex_cmp(&points[i], &points[j]));
    if order.len() < 3 {
        return order;
    }
    let all_collinear = order
        .iter()
        .all(|&k| orient2d(&points[order[0]], &points[order[1]], &points[k]).is_zero());
    if all_collinear {
        return order;
    }
    let chain = |iter: &mut dyn Iterator<Item = usize>| {
        let mut h: Vec<usize> = Vec::new();
        for k in iter {
            while h.len() >= 2
                && orient2d(&points[h[h.len() - 2]], &points[h[h.len() - 1]], &points[k]).is_negative()
            {
                h.pop();
            }
            h.push(k);
        }
        h
    };
    let mut lower = chain(&mut order.iter().copied());
    let mut upper = chain(&mut order.iter().rev().copied());
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Undirected edge with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub lo: VertexId,
    pub hi: VertexId,
}

impl Edge {
    pub fn new(a: VertexId, b: VertexId) -> Self {
        assert_ne!(a, b, "edge endpoints must differ");
        Edge { lo: a.min(b), hi: a.max(b) }
    }

    pub fn other(&self, v: VertexId) -> VertexId {
        if v == self.lo {
            self.hi
        } else {
            self.lo
        }
    }
}

/// A validated triangulation. Immutable; triangles are kept in a canonical
/// form (counterclockwise, smallest id first, list sorted) so that equal
/// triangulations compare equal.
#[derive(Debug, Clone)]
pub struct Triangulation {
    points: Arc<PointSet>,
    triangles: Vec<Tri>,
    tri_max: Vec<f64>,
    edges: BTreeMap<Edge, Vec<usize>>,
    adjacency: Vec<Vec<VertexId>>,
    hull_size: usize,
}

impl PartialEq for Triangulation {
    fn eq(&self, other: &Self) -> bool {
        self.triangles == other.triangles && self.points == other.points
    }
}

fn canonical(t: Tri, points: &[Point]) -> Result<Tri, TriangulationError> {
    let [a, b, c] = t;
    let s = orient2d(&points[a], &points[b], &points[c]);
    if s.is_zero() {
        return invalid(format!("triangle {t:?} is degenerate"));
    }
    let ccw = if s.is_positive() { [a, b, c] } else { [a, c, b] };
    let r = (0..3).min_by_key(|&i| ccw[i]).unwrap();
    Ok([ccw[r], ccw[(r + 1) % 3], ccw[(r + 2) % 3]])
}

impl Triangulation {
    /// Validates `triangles` as a triangulation of `points`.
    pub fn new(points: Arc<PointSet>, triangles: Vec<Tri>) -> Result<Self, TriangulationError> {
        let pts = points.points();
        let n = pts.len();
        let mut tris = Vec::with_capacity(triangles.len());
        for t in triangles {
            if t.iter().any(|&v| v >= n) {
                return invalid(format!("triangle {t:?} references a vertex outside 0..{n}"));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return invalid(format!("triangle {t:?} repeats a vertex"));
            }
            tris.push(canonical(t, pts)?);
        }
        tris.sort_unstable();
        if tris.windows(2).any(|w| w[0] == w[1]) {
            return invalid("duplicate triangle");
        }

        // directed half-edges: each may appear at most once
        let mut half: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
        let mut edges: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
        for (ti, t) in tris.iter().enumerate() {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                if !half.insert((a, b)) {
                    return invalid(format!("overlapping triangles along edge {a}-{b}"));
                }
                edges.entry(Edge::new(a, b)).or_default().push(ti);
            }
        }

        let edge_list: Vec<Edge> = edges.keys().copied().collect();
        for (i, e) in edge_list.iter().enumerate() {
            let (p, q) = (pts[e.lo], pts[e.hi]);
            for f in &edge_list[i + 1..] {
                if points_cross(&p, &q, &pts[f.lo], &pts[f.hi]) {
                    return invalid(format!(
                        "edges {}-{} and {}-{} cross",
                        e.lo, e.hi, f.lo, f.hi
                    ));
                }
            }
            for (v, r) in pts.iter().enumerate() {
                if on_open_segment(&p, &q, r) {
                    return invalid(format!("vertex {v} lies on edge {}-{}", e.lo, e.hi));
                }
            }
        }

        // boundary: half-edges without a twin, all on the convex hull
        let mut next: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        for &(a, b) in &half {
            if !half.contains(&(b, a)) {
                if next.insert(a, b).is_some() {
                    return invalid(format!("boundary is pinched at vertex {a}"));
                }
                if let Some((v, _)) = pts
                    .iter()
                    .enumerate()
                    .find(|(_, r)| orient2d(&pts[a], &pts[b], r).is_negative())
                {
                    return invalid(format!(
                        "boundary edge {a}-{b} is not a hull edge (vertex {v} lies outside)"
                    ));
                }
            }
        }
        let Some((&start, _)) = next.iter().next() else {
            return invalid("no boundary");
        };
        let mut cycle = 1;
        let mut cur = next[&start];
        while cur != start {
            cycle += 1;
            cur = match next.get(&cur) {
                Some(&v) if cycle <= next.len() => v,
                _ => return invalid("boundary is not a single closed cycle"),
            };
        }
        if cycle != next.len() {
            return invalid("boundary has more than one component");
        }

        let hull = convex_hull(pts);
        let h = hull.len();
        if cycle != h {
            return invalid(format!(
                "triangles do not cover the convex hull ({cycle} boundary vertices, hull has {h})"
            ));
        }
        let mut adjacency = vec![Vec::new(); n];
        for e in edges.keys() {
            adjacency[e.lo].push(e.hi);
            adjacency[e.hi].push(e.lo);
        }
        if let Some(v) = adjacency.iter().position(|a| a.is_empty()) {
            return invalid(format!("vertex {v} is not covered by any triangle"));
        }
        let (e_expected, f_expected) = (3 * n - 3 - h, 2 * n - 2 - h);
        if edges.len() != e_expected || tris.len() != f_expected {
            return invalid(format!(
                "counts violate Euler's relation: {} edges / {} triangles, expected {e_expected} / {f_expected}",
                edges.len(),
                tris.len()
            ));
        }

        let tri_max = tris
            .iter()
            .map(|t| max_angle(&pts[t[0]], &pts[t[1]], &pts[t[2]]).map(|a| a.0))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| TriangulationError::Invalid(e.to_string()))?;

        Ok(Triangulation {
            points,
            triangles: tris,
            tri_max,
            edges,
            adjacency,
            hull_size: h,
        })
    }

    pub fn from_points(points: Vec<Point>, triangles: Vec<Tri>) -> Result<Self, TriangulationError> {
        Self::new(Arc::new(PointSet::new(points)?), triangles)
    }

    pub fn point_set(&self) -> &Arc<PointSet> {
        &self.points
    }

    pub fn points(&self) -> &[Point] {
        self.points.points()
    }

    pub fn point(&self, v: VertexId) -> Point {
        self.points.point(v)
    }

    pub fn num_vertices(&self) -> usize {
        self.points.len()
    }

    pub fn triangles(&self) -> &[Tri] {
        &self.triangles
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn hull_size(&self) -> usize {
        self.hull_size
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.keys().copied()
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        a != b && self.edges.contains_key(&Edge::new(a, b))
    }

    /// Indices of the (one or two) triangles incident to an edge.
    pub fn edge_triangles(&self, e: Edge) -> &[usize] {
        self.edges.get(&e).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v]
    }

    /// Largest angle of triangle `i`.
    pub fn triangle_max_angle(&self, i: usize) -> Angle {
        Angle(self.tri_max[i])
    }

    pub fn triangle_index(&self, t: Tri) -> Option<usize> {
        let c = canonical(t, self.points()).ok()?;
        self.triangles.binary_search(&c).ok()
    }

    pub fn measure(&self, tie_tol: f64) -> Measure {
        let max = self.tri_max.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let attaining = self
            .tri_max
            .iter()
            .enumerate()
            .filter(|(_, &m)| m >= max - tie_tol)
            .map(|(i, _)| i)
            .collect();
        Measure { max_angle: Angle(max), attaining }
    }

    /// Triangles (as sorted vertex-id triples) attaining the measure.
    pub fn attaining_set(&self, tie_tol: f64) -> BTreeSet<[VertexId; 3]> {
        self.measure(tie_tol)
            .attaining
            .iter()
            .map(|&i| {
                let mut t = self.triangles[i];
                t.sort_unstable();
                t
            })
            .collect()
    }

    /// Whether `self` is an improvement of `other`: a smaller measure, or an
    /// equal one attained on a strict subset of `other`'s attaining triangles.
    pub fn improves(&self, other: &Triangulation, tie_tol: f64) -> Result<bool, TriangulationError> {
        if !Arc::ptr_eq(&self.points, &other.points) && self.points != other.points {
            return Err(TriangulationError::MismatchedPointSet);
        }
        let m1 = self.measure(tie_tol).max_angle.0;
        let m2 = other.measure(tie_tol).max_angle.0;
        if m1 < m2 - tie_tol {
            return Ok(true);
        }
        if (m1 - m2).abs() > tie_tol {
            return Ok(false);
        }
        let a1 = self.attaining_set(tie_tol);
        let a2 = other.attaining_set(tie_tol);
        Ok(a1.len() < a2.len() && a1.is_subset(&a2))
    }

    /// Hop count between two vertices in the edge graph.
    pub fn combinatorial_distance(&self, u: VertexId, v: VertexId) -> usize {
        self.bfs(u)[v].expect("a triangulation's edge graph is connected")
    }

    pub fn diameter(&self) -> usize {
        (0..self.num_vertices())
            .map(|u| self.bfs(u).into_iter().map(|d| d.unwrap_or(0)).max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    fn bfs(&self, src: VertexId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_vertices()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// Largest angle of a triangulation and the triangles that attain it.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    pub max_angle: Angle,
    /// Triangle indices whose largest angle is within the tie tolerance.
    pub attaining: Vec<usize>,
}
