//! Brute-force ground truth: every triangulation of a small point set, and
//! the optimum under the improvement order.
//!
//! Triangulations are enumerated as maximal crossing-free edge sets by
//! backtracking, without relying on flip-graph connectivity.

use std::cmp::Ordering;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{orient2d, points_cross, triangle_angles, Point};
use crate::triangulation::{PointSet, Tri, Triangulation, TriangulationError, DEFAULT_TIE_TOL};

/// Largest point set the oracle accepts.
pub const MAX_ORACLE_POINTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} points exceed the oracle limit of {MAX_ORACLE_POINTS}")]
    TooLarge(usize),
    #[error("more than {0} triangulations")]
    CapExceeded(usize),
    #[error("points are not in general position (three are collinear)")]
    Collinear,
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
}

struct Search<'a> {
    edges: Vec<(usize, usize)>,
    /// conflicts[i]: bitmask of edges crossing edge i
    conflicts: Vec<u64>,
    /// last index of any edge crossing edge i
    last_conflict: Vec<Option<usize>>,
    points: &'a PointSet,
    cap: usize,
    found: Vec<u64>,
}

impl Search<'_> {
    fn run(&mut self, i: usize, chosen: u64, skipped: u64) -> Result<(), OracleError> {
        // a skipped edge whose crossing partners are all decided must be blocked
        for s in iter_bits(skipped) {
            if self.last_conflict[s].is_some_and(|l| l < i) && self.conflicts[s] & chosen == 0 {
                return Ok(());
            }
        }
        if i == self.edges.len() {
            if self.found.len() == self.cap {
                return Err(OracleError::CapExceeded(self.cap));
            }
            self.found.push(chosen);
            return Ok(());
        }
        let bit = 1u64 << i;
        if self.conflicts[i] & chosen != 0 {
            return self.run(i + 1, chosen, skipped);
        }
        self.run(i + 1, chosen | bit, skipped)?;
        // leaving a free edge out only works if something later blocks it
        if self.last_conflict[i].is_some_and(|l| l > i) {
            self.run(i + 1, chosen, skipped | bit)?;
        }
        Ok(())
    }

    fn triangles(&self, mask: u64) -> Vec<Tri> {
        let n = self.points.len();
        let mut adj = vec![vec![false; n]; n];
        for b in iter_bits(mask) {
            let (u, v) = self.edges[b];
            adj[u][v] = true;
            adj[v][u] = true;
        }
        let pts = self.points.points();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if !adj[a][b] {
                    continue;
                }
                for c in b + 1..n {
                    if !adj[a][c] || !adj[b][c] {
                        continue;
                    }
                    let empty = (0..n).filter(|&w| w != a && w != b && w != c).all(|w| {
                        let s = orient2d(&pts[a], &pts[b], &pts[c]);
                        let inside = |x: usize, y: usize| orient2d(&pts[x], &pts[y], &pts[w]) == s;
                        !(inside(a, b) && inside(b, c) && inside(c, a))
                    });
                    if empty {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }
}

fn iter_bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

/// Every triangulation of `points`, in canonical order (sorted by triangle
/// list).
pub fn enumerate_triangulations(points: &Arc<PointSet>, cap: usize) -> Result<Vec<Triangulation>, OracleError> {
    let n = points.len();
    if n > MAX_ORACLE_POINTS {
        return Err(OracleError::TooLarge(n));
    }
    if points.has_collinear_triple() {
        return Err(OracleError::Collinear);
    }
    let pts = points.points();
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let m = edges.len();
    let mut conflicts = vec![0u64; m];
    let mut last_conflict = vec![None; m];
    for i in 0..m {
        for j in 0..m {
            let ((a, b), (c, d)) = (edges[i], edges[j]);
            if points_cross(&pts[a], &pts[b], &pts[c], &pts[d]) {
                conflicts[i] |= 1 << j;
                last_conflict[i] = Some(j);
            }
        }
    }
    let mut search = Search { edges, conflicts, last_conflict, points, cap, found: Vec::new() };
    search.run(0, 0, 0)?;

    let mut out = search
        .found
        .iter()
        .map(|&mask| Triangulation::new(Arc::clone(points), search.triangles(mask)))
        .collect::<Result<Vec<_>, _>>()?;
    out.sort_by(|a, b| a.triangles().cmp(b.triangles()));
    Ok(out)
}

/// `n ≥ 3` uniform points in the unit square, no three collinear, drawn
/// from a ChaCha8 stream seeded with `seed`.
pub fn random_general_position(seed: u64, n: usize) -> Arc<PointSet> {
    assert!(n >= 3, "need at least 3 points");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let pts: Vec<Point> = (0..n).map(|_| Point::new(rng.gen(), rng.gen())).collect();
        if let Ok(ps) = PointSet::new(pts) {
            if !ps.has_collinear_triple() {
                return Arc::new(ps);
            }
        }
    }
}

/// All angles of a triangulation, largest first.
fn angle_vector(t: &Triangulation) -> Vec<f64> {
    let mut v: Vec<f64> = t
        .triangles()
        .iter()
        .flat_map(|tri| {
            let p = |i: usize| t.point(tri[i]);
            triangle_angles(&p(0), &p(1), &p(2)).expect("validated triangle").map(|a| a.0)
        })
        .collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// The optimal triangulation: no enumerated triangulation improves on it.
/// Among several mutually incomparable optima, the one with the
/// lexicographically smallest descending angle vector is returned.
pub fn brute_force_optimum(points: &Arc<PointSet>) -> Result<Triangulation, OracleError> {
    brute_force_optimum_with(points, DEFAULT_TIE_TOL, 1_000_000)
}

pub fn brute_force_optimum_with(
    points: &Arc<PointSet>,
    tie_tol: f64,
    cap: usize,
) -> Result<Triangulation, OracleError> {
    let all = enumerate_triangulations(points, cap)?;
    let best = all.iter().map(|t| t.measure(tie_tol).max_angle.0).fold(f64::INFINITY, f64::min);
    let candidates: Vec<&Triangulation> =
        all.iter().filter(|t| t.measure(tie_tol).max_angle.0 <= best + tie_tol).collect();
    let mut minimal = Vec::new();
    for &c in &candidates {
        let dominated = candidates.iter().any(|o| o.improves(c, tie_tol).unwrap_or(false));
        if !dominated {
            minimal.push(c);
        }
    }
    let chosen = minimal
        .into_iter()
        .min_by(|a, b| {
            let (va, vb) = (angle_vector(a), angle_vector(b));
            va.iter()
                .zip(&vb)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
        .expect("a point set has at least one triangulation");
    Ok(chosen.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ps(pts: &[(f64, f64)]) -> Arc<PointSet> {
        Arc::new(PointSet::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap())
    }

    fn convex(k: usize) -> Arc<PointSet> {
        let pts: Vec<(f64, f64)> = (0..k)
            .map(|i| {
                let a = 2. * PI * i as f64 / k as f64 + 0.3;
                (a.cos(), a.sin())
            })
            .collect();
        ps(&pts)
    }

    #[test]
    fn convex_counts_are_catalan() {
        let catalan = [1usize, 1, 2, 5, 14, 42, 132, 429, 1430];
        for k in 3..=9 {
            assert_eq!(enumerate_triangulations(&convex(k), 10_000).unwrap().len(), catalan[k - 2]);
        }
    }

    #[test]
    fn interior_point_has_a_single_triangulation() {
        // a point inside a triangle: the only triangulation is the star
        let p = ps(&[(0., 0.), (4., 0.), (1., 3.), (1.5, 1.)]);
        let all = enumerate_triangulations(&p, 100).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].triangles().len(), 3);
    }

    #[test]
    fn errors() {
        assert_eq!(enumerate_triangulations(&convex(11), 10).unwrap_err(), OracleError::TooLarge(11));
        assert_eq!(enumerate_triangulations(&convex(8), 10).unwrap_err(), OracleError::CapExceeded(10));
        let col = ps(&[(0., 0.), (1., 1.), (2., 2.), (3., 0.)]);
        assert_eq!(enumerate_triangulations(&col, 10).unwrap_err(), OracleError::Collinear);
    }

    #[test]
    fn random_sets_are_reproducible() {
        let a = random_general_position(3, 7);
        assert_eq!(a.points(), random_general_position(3, 7).points());
        assert_ne!(a.points(), random_general_position(4, 7).points());
        assert!(!a.has_collinear_triple());
    }

    #[test]
    fn optimum_of_three_points() {
        let p = ps(&[(0., 0.), (1., 0.), (0., 1.)]);
        let t = brute_force_optimum(&p).unwrap();
        assert_eq!(t.triangles(), &[[0, 1, 2]]);
    }

    #[test]
    fn optimum_of_square_is_deterministic() {
        let p = ps(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)]);
        let a = brute_force_optimum(&p).unwrap();
        let b = brute_force_optimum(&p).unwrap();
        assert_eq!(a, b);
        assert!((a.measure(DEFAULT_TIE_TOL).max_angle.0 - PI / 2.).abs() < 1e-12);
    }

    #[test]
    fn enumerated_triangulations_share_counts() {
        let p = ps(&[(0., 0.), (3., 0.1), (3.3, 2.), (1.2, 3.1), (-0.4, 1.9), (1.1, 1.0), (2.0, 1.6)]);
        let all = enumerate_triangulations(&p, 10_000).unwrap();
        assert!(all.len() > 1);
        let f = all[0].triangles().len();
        let best = brute_force_optimum(&p).unwrap().measure(DEFAULT_TIE_TOL).max_angle.0;
        for t in &all {
            assert_eq!(t.triangles().len(), f);
            assert_eq!(f, 2 * 7 - 2 - t.hull_size());
            assert!(best <= t.measure(DEFAULT_TIE_TOL).max_angle.0 + 1e-15);
        }
    }
}
