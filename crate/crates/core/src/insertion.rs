//! Edge insertion and the edge insertion algorithm.
//!
//! Inserting `u–v` deletes every edge it crosses, which opens a channel of
//! triangles around the segment. The segment splits the channel into a left
//! and a right polygon; both are retriangulated with [`dp_retriangulate`].
//! The algorithm repeatedly scans all vertex pairs and accepts the first
//! insertion that improves the triangulation, until none does.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{on_open_segment, orient2d};
use crate::polygon::{dp_retriangulate, Polygon, PolygonError};
use crate::triangulation::{
    lex_cmp, Edge, PointSet, Tri, Triangulation, TriangulationError, VertexId, DEFAULT_TIE_TOL,
};

use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InsertionError {
    #[error("{0}-{1} is already an edge")]
    EdgeAlreadyPresent(VertexId, VertexId),
    #[error("cannot insert a loop at vertex {0}")]
    SameVertex(VertexId),
    #[error("vertex {w} lies on segment {u}-{v}")]
    VertexOnSegment { u: VertexId, v: VertexId, w: VertexId },
    #[error("segment {0}-{1} leaves the triangulated region")]
    SegmentOutsideHull(VertexId, VertexId),
    #[error("no improvement found within {0} rounds")]
    RoundLimitExceeded(usize),
    #[error(transparent)]
    Polygon(#[from] PolygonError),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
}

/// The region opened by inserting `u–v`: the removed edges and the two
/// polygons on either side of the new edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub inserted: (VertexId, VertexId),
    /// In the order the segment crosses them, walking from `u` to `v`.
    pub removed_edges: Vec<Edge>,
    /// Triangles of the original triangulation that the segment passes through.
    pub crossed_triangles: Vec<Tri>,
    /// Counterclockwise, starting `v, …, u` (left of the directed segment).
    pub left: Polygon,
    /// Counterclockwise, starting `u, …, v` (right of the directed segment).
    pub right: Polygon,
}

#[derive(Debug, Clone)]
pub struct InsertionOutcome {
    pub result: Triangulation,
    pub channel: Channel,
    pub improved: bool,
}

pub fn extract_channel(t: &Triangulation, u: VertexId, v: VertexId) -> Result<Channel, InsertionError> {
    if u == v {
        return Err(InsertionError::SameVertex(u));
    }
    if t.has_edge(u, v) {
        return Err(InsertionError::EdgeAlreadyPresent(u, v));
    }
    let (pu, pv) = (t.point(u), t.point(v));
    if let Some(w) = (0..t.num_vertices()).find(|&w| on_open_segment(&pu, &pv, &t.point(w))) {
        return Err(InsertionError::VertexOnSegment { u, v, w });
    }
    let side = |w: VertexId| orient2d(&pu, &pv, &t.point(w));
    let outside = || InsertionError::SegmentOutsideHull(u, v);

    // first triangle: the one at u whose wedge contains the direction to v
    let tris = t.triangles();
    let start = tris.iter().enumerate().find_map(|(ti, tri)| {
        let r = tri.iter().position(|&x| x == u)?;
        let (a, b) = (tri[(r + 1) % 3], tri[(r + 2) % 3]);
        (side(a).is_negative() && side(b).is_positive()).then_some((ti, Edge::new(a, b)))
    });
    let (mut cur, mut edge) = start.ok_or_else(outside)?;

    let mut removed = Vec::new();
    let mut crossed = vec![tris[cur]];
    let mut left_chain: Vec<VertexId> = Vec::new();
    let mut right_chain: Vec<VertexId> = Vec::new();
    loop {
        removed.push(edge);
        let (l, r) = if side(edge.lo).is_positive() { (edge.lo, edge.hi) } else { (edge.hi, edge.lo) };
        if left_chain.last() != Some(&l) {
            left_chain.push(l);
        }
        if right_chain.last() != Some(&r) {
            right_chain.push(r);
        }
        let next = *t
            .edge_triangles(edge)
            .iter()
            .find(|&&ti| ti != cur)
            .ok_or_else(outside)?;
        let tri = tris[next];
        crossed.push(tri);
        let apex = *tri.iter().find(|&&x| x != edge.lo && x != edge.hi).unwrap();
        if apex == v {
            break;
        }
        edge = if side(apex).is_positive() { Edge::new(apex, r) } else { Edge::new(l, apex) };
        cur = next;
        if removed.len() > t.num_edges() {
            return Err(outside());
        }
    }

    let ps = t.point_set();
    let mut left_ids = vec![v];
    left_ids.extend(left_chain.iter().rev());
    left_ids.push(u);
    let mut right_ids = vec![u];
    right_ids.extend(right_chain.iter());
    right_ids.push(v);
    Ok(Channel {
        inserted: (u, v),
        removed_edges: removed,
        crossed_triangles: crossed,
        left: Polygon::weakly_simple(left_ids, ps)?,
        right: Polygon::weakly_simple(right_ids, ps)?,
    })
}

/// Inserts `u–v` into `t` and retriangulates both sides optimally.
pub fn edge_insertion(
    t: &Triangulation,
    u: VertexId,
    v: VertexId,
    tie_tol: f64,
) -> Result<InsertionOutcome, InsertionError> {
    let channel = extract_channel(t, u, v)?;
    let (left, _) = dp_retriangulate(&channel.left)?;
    let (right, _) = dp_retriangulate(&channel.right)?;
    let gone: BTreeSet<Tri> = channel.crossed_triangles.iter().copied().collect();
    let mut tris: Vec<Tri> = t.triangles().iter().filter(|x| !gone.contains(*x)).copied().collect();
    tris.extend(left);
    tris.extend(right);
    let result = Triangulation::new(Arc::clone(t.point_set()), tris)?;
    let improved = result.improves(t, tie_tol)?;
    Ok(InsertionOutcome { result, channel, improved })
}

/// Order in which the outer loop visits candidate pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ScanOrder {
    /// `(u, v)` with `u < v`, ascending.
    #[default]
    Lexicographic,
    /// The lexicographic order reversed.
    Reverse,
}

#[derive(Debug, Clone, Copy)]
pub struct AlgorithmConfig {
    pub tie_tol: f64,
    /// Defaults to ten times the edge count.
    pub max_rounds: Option<usize>,
    pub order: ScanOrder,
    /// Evaluate the candidates of a round on the rayon pool. The accepted
    /// insertion is still the first improving one in scan order.
    pub parallel: bool,
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        AlgorithmConfig {
            tie_tol: DEFAULT_TIE_TOL,
            max_rounds: None,
            order: ScanOrder::Lexicographic,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub insert: [VertexId; 2],
    pub crossings: usize,
    pub measure_before: f64,
    pub measure_after: f64,
}

#[derive(Debug, Clone)]
pub struct AlgorithmRun {
    pub initial: Triangulation,
    pub final_triangulation: Triangulation,
    pub trace: Vec<TraceEntry>,
}

fn candidates(n: usize, order: ScanOrder) -> Vec<(VertexId, VertexId)> {
    let mut pairs: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    if order == ScanOrder::Reverse {
        pairs.reverse();
    }
    pairs
}

/// Evaluates one candidate; pairs that are already edges or pass through a
/// third vertex have no channel and yield `None`.
fn try_pair(
    t: &Triangulation,
    (u, v): (VertexId, VertexId),
    tie_tol: f64,
) -> Result<Option<InsertionOutcome>, InsertionError> {
    if t.has_edge(u, v) {
        return Ok(None);
    }
    match edge_insertion(t, u, v, tie_tol) {
        Ok(o) => Ok(o.improved.then_some(o)),
        Err(InsertionError::VertexOnSegment { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Runs the edge insertion algorithm from `initial`, or from
/// [`arbitrary_triangulation`] when `initial` is `None`.
pub fn edge_insertion_algorithm(
    points: Arc<PointSet>,
    initial: Option<Triangulation>,
    config: &AlgorithmConfig,
) -> Result<AlgorithmRun, InsertionError> {
    let initial = match initial {
        Some(t) => {
            if t.point_set().points() != points.points() {
                return Err(TriangulationError::MismatchedPointSet.into());
            }
            t
        }
        None => arbitrary_triangulation(points)?,
    };
    let pairs = candidates(initial.num_vertices(), config.order);
    let max_rounds = config.max_rounds.unwrap_or(10 * initial.num_edges());
    let mut t = initial.clone();
    let mut trace = Vec::new();
    loop {
        let found = if config.parallel {
            let results: Vec<_> = pairs.par_iter().map(|&p| try_pair(&t, p, config.tie_tol)).collect();
            let mut first = None;
            for r in results {
                if let Some(o) = r? {
                    first = Some(o);
                    break;
                }
            }
            first
        } else {
            let mut first = None;
            for &p in &pairs {
                if let Some(o) = try_pair(&t, p, config.tie_tol)? {
                    first = Some(o);
                    break;
                }
            }
            first
        };
        let Some(outcome) = found else { break };
        if trace.len() == max_rounds {
            return Err(InsertionError::RoundLimitExceeded(max_rounds));
        }
        trace.push(TraceEntry {
            insert: [outcome.channel.inserted.0, outcome.channel.inserted.1],
            crossings: outcome.channel.removed_edges.len(),
            measure_before: t.measure(config.tie_tol).max_angle.0,
            measure_after: outcome.result.measure(config.tie_tol).max_angle.0,
        });
        t = outcome.result;
    }
    Ok(AlgorithmRun { initial, final_triangulation: t, trace })
}

/// A deterministic starting triangulation: sweep the points in lexicographic
/// order and connect each new point to every hull edge it sees.
pub fn arbitrary_triangulation(points: Arc<PointSet>) -> Result<Triangulation, InsertionError> {
    let pts = points.points();
    let mut order: Vec<VertexId> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(&pts[a], &pts[b]));

    // leading collinear run, then the first point off its line
    let first_off = (2..order.len())
        .find(|&k| !orient2d(&pts[order[0]], &pts[order[1]], &pts[order[k]]).is_zero())
        .ok_or_else(|| TriangulationError::Invalid("all points are collinear".into()))?;
    let apex = order[first_off];
    let run = &order[..first_off];
    let mut tris: Vec<Tri> = run.windows(2).map(|w| [w[0], w[1], apex]).collect();

    // counterclockwise hull as a cycle of vertex ids
    let mut hull: Vec<VertexId> =
        if orient2d(&pts[run[0]], &pts[run[1]], &pts[apex]).is_positive() {
            run.iter().copied().chain([apex]).collect()
        } else {
            [apex].into_iter().chain(run.iter().rev().copied()).collect()
        };

    for &p in &order[first_off + 1..] {
        let h = hull.len();
        let visible: Vec<bool> = (0..h)
            .map(|i| orient2d(&pts[hull[i]], &pts[hull[(i + 1) % h]], &pts[p]).is_negative())
            .collect();
        // the visible edges form one contiguous run; find where it starts
        let start = (0..h)
            .find(|&i| visible[i] && !visible[(i + h - 1) % h])
            .ok_or_else(|| TriangulationError::Invalid("sweep point sees no hull edge".into()))?;
        let mut i = start;
        let mut count = 0;
        while visible[i] {
            tris.push([hull[i], p, hull[(i + 1) % h]]);
            i = (i + 1) % h;
            count += 1;
        }
        // keep hull[start+count ..= start] (cyclically), then p
        let mut next_hull: Vec<VertexId> =
            (0..h - count + 1).map(|k| hull[(start + count + k) % h]).collect();
        next_hull.push(p);
        hull = next_hull;
    }
    Ok(Triangulation::new(points, tris)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::oracle::brute_force_optimum;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn quad() -> Triangulation {
        let pts = vec![
            Point::new(0., 0.),
            Point::new(2., -0.2),
            Point::new(2.5, 1.5),
            Point::new(0.3, 1.2),
        ];
        Triangulation::from_points(pts, vec![[0, 1, 2], [0, 2, 3]]).unwrap()
    }

    pub(crate) fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Arc<PointSet> {
        loop {
            let pts: Vec<Point> =
                (0..n).map(|_| Point::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))).collect();
            let ps = PointSet::new(pts).unwrap();
            if !ps.has_collinear_triple() {
                return Arc::new(ps);
            }
        }
    }

    #[test]
    fn one_crossing_insertion_is_a_flip() {
        let t = quad();
        let ch = extract_channel(&t, 1, 3).unwrap();
        assert_eq!(ch.removed_edges, vec![Edge::new(0, 2)]);
        assert_eq!(ch.left.len(), 3);
        assert_eq!(ch.right.len(), 3);
        let out = edge_insertion(&t, 1, 3, DEFAULT_TIE_TOL).unwrap();
        assert!(out.result.has_edge(1, 3));
        assert!(!out.result.has_edge(0, 2));
        let other = Triangulation::from_points(t.points().to_vec(), vec![[0, 1, 3], [1, 2, 3]]).unwrap();
        assert_eq!(out.result.triangles(), other.triangles());
        let changed = out.result.triangles().iter().filter(|x| !t.triangles().contains(x)).count();
        assert_eq!(changed, 2);
    }

    #[test]
    fn channel_errors() {
        let t = quad();
        assert_eq!(extract_channel(&t, 0, 2).unwrap_err(), InsertionError::EdgeAlreadyPresent(0, 2));
        assert_eq!(extract_channel(&t, 1, 1).unwrap_err(), InsertionError::SameVertex(1));
        let pts = vec![
            Point::new(0., 0.),
            Point::new(1., 1.),
            Point::new(2., 2.),
            Point::new(2., 0.),
            Point::new(0., 2.),
        ];
        let t = Triangulation::from_points(pts, vec![[0, 3, 1], [1, 3, 2], [0, 1, 4], [1, 2, 4]]).unwrap();
        assert_eq!(
            extract_channel(&t, 0, 2).unwrap_err(),
            InsertionError::VertexOnSegment { u: 0, v: 2, w: 1 }
        );
        // the pair is skipped, not an error, during the scan
        assert!(try_pair(&t, (0, 2), DEFAULT_TIE_TOL).unwrap().is_none());
    }

    #[test]
    fn arbitrary_triangulation_handles_collinear_start() {
        let pts = vec![
            Point::new(0., 0.),
            Point::new(0., 1.),
            Point::new(0., 2.),
            Point::new(1., 1.),
            Point::new(2., 3.),
            Point::new(2., -1.),
        ];
        let ps = Arc::new(PointSet::new(pts).unwrap());
        let t = arbitrary_triangulation(ps).unwrap();
        assert_eq!(t.triangles().len(), 2 * 6 - 2 - t.hull_size());
    }

    #[test]
    fn three_points_give_empty_trace() {
        let ps = Arc::new(
            PointSet::new(vec![Point::new(0., 0.), Point::new(1., 0.), Point::new(0., 1.)]).unwrap(),
        );
        let run = edge_insertion_algorithm(ps, None, &AlgorithmConfig::default()).unwrap();
        assert!(run.trace.is_empty());
        assert_eq!(run.final_triangulation.triangles().len(), 1);
    }

    #[test]
    fn insertion_preserves_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(5..12);
            let t = arbitrary_triangulation(random_points(&mut rng, n)).unwrap();
            for u in 0..n {
                for v in u + 1..n {
                    if t.has_edge(u, v) {
                        continue;
                    }
                    let ch = extract_channel(&t, u, v).unwrap();
                    let (pu, pv) = (t.point(u), t.point(v));
                    for e in &ch.removed_edges {
                        assert!(crate::geometry::points_cross(&pu, &pv, &t.point(e.lo), &t.point(e.hi)));
                    }
                    // every crossed edge is removed
                    let crossing = t
                        .edges()
                        .filter(|e| crate::geometry::points_cross(&pu, &pv, &t.point(e.lo), &t.point(e.hi)))
                        .count();
                    assert_eq!(crossing, ch.removed_edges.len());
                    assert_eq!(ch.crossed_triangles.len(), ch.removed_edges.len() + 1);
                    assert_eq!(ch.left.len() + ch.right.len(), ch.removed_edges.len() + 5);
                    let out = edge_insertion(&t, u, v, DEFAULT_TIE_TOL).unwrap();
                    assert!(out.result.has_edge(u, v));
                    assert_eq!(out.result.triangles().len(), t.triangles().len());
                    assert_eq!(out.result.num_edges(), t.num_edges());
                }
            }
        }
    }

    #[test]
    fn channel_with_a_dangling_edge() {
        // vertex 5 is enclosed by crossed triangles but keeps its edge to 1,
        // so the right side of the channel is pinched at vertex 1
        let pts = [
            (0.9263108606652215, 0.6714248243635712),
            (0.6260325630042363, 0.9524106292636694),
            (0.9089039931596281, 0.6857353531192745),
            (0.31787954186455725, 0.23872707412198846),
            (0.8515635509388435, 0.5228365248686828),
            (0.6422591957401349, 0.7931680075191183),
            (0.11544160920090962, 0.8521767676916268),
            (0.002425504235022302, 0.2939067461507061),
        ];
        let tris = vec![[0, 1, 2], [0, 2, 4], [1, 3, 5], [1, 4, 2], [1, 5, 4], [1, 6, 3], [3, 4, 5], [3, 6, 7]];
        let t = Triangulation::from_points(pts.iter().map(|&(x, y)| Point::new(x, y)).collect(), tris).unwrap();
        let ch = extract_channel(&t, 0, 6).unwrap();
        assert_eq!(ch.right.ids(), &[0, 2, 1, 5, 1, 6]);
        assert!(!ch.right.is_simple());
        assert!(ch.left.is_simple());
        let out = edge_insertion(&t, 0, 6, DEFAULT_TIE_TOL).unwrap();
        assert!(out.result.has_edge(0, 6));
        assert!(out.result.has_edge(1, 5));
        assert_eq!(out.result.num_edges(), t.num_edges());
    }

    #[test]
    fn trace_is_strictly_improving_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let ps = random_points(&mut rng, 8);
            let cfg = AlgorithmConfig::default();
            let a = edge_insertion_algorithm(ps.clone(), None, &cfg).unwrap();
            let b = edge_insertion_algorithm(ps.clone(), None, &AlgorithmConfig { parallel: true, ..cfg })
                .unwrap();
            assert_eq!(a.trace, b.trace);
            assert_eq!(a.final_triangulation, b.final_triangulation);
            for w in a.trace.windows(2) {
                assert!(w[1].measure_before == w[0].measure_after);
            }
            for e in &a.trace {
                assert!(e.measure_after <= e.measure_before + cfg.tie_tol);
            }
        }
    }

    #[test]
    fn reaches_the_optimum_on_small_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..25 {
            let n = rng.gen_range(4..8);
            let ps = random_points(&mut rng, n);
            let run = edge_insertion_algorithm(ps.clone(), None, &AlgorithmConfig::default()).unwrap();
            let opt = brute_force_optimum(&ps).unwrap();
            let got = run.final_triangulation.measure(DEFAULT_TIE_TOL).max_angle.0;
            let want = opt.measure(DEFAULT_TIE_TOL).max_angle.0;
            assert!((got - want).abs() <= DEFAULT_TIE_TOL, "{got} vs {want}");
        }
    }

    #[test]
    fn scan_order_does_not_change_the_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..15 {
            let ps = random_points(&mut rng, 7);
            let fwd = edge_insertion_algorithm(ps.clone(), None, &AlgorithmConfig::default()).unwrap();
            let rev = edge_insertion_algorithm(
                ps,
                None,
                &AlgorithmConfig { order: ScanOrder::Reverse, ..Default::default() },
            )
            .unwrap();
            let m = |r: &AlgorithmRun| r.final_triangulation.measure(DEFAULT_TIE_TOL).max_angle.0;
            assert!((m(&fwd) - m(&rev)).abs() <= DEFAULT_TIE_TOL);
        }
    }

    #[test]
    fn round_limit_is_enforced() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ps = random_points(&mut rng, 8);
        let full = edge_insertion_algorithm(ps.clone(), None, &AlgorithmConfig::default()).unwrap();
        if !full.trace.is_empty() {
            let cfg = AlgorithmConfig { max_rounds: Some(0), ..Default::default() };
            assert_eq!(
                edge_insertion_algorithm(ps, None, &cfg).unwrap_err(),
                InsertionError::RoundLimitExceeded(0)
            );
        }
    }
}
