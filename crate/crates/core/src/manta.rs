//! The manta ray family `T_n(ω, θ)`: a triangulation whose only improving
//! edge insertion joins its two farthest-apart vertices.
//!
//! Frame: `O` at the origin, the axis of mirror symmetry is the `+y` axis.
//! `A = A_0` sits right of the axis and `B = B_0` left of it, so that `OAB`
//! is counterclockwise with apex angle `ω` at `O`. The chain `A_0, A_1, …`
//! walks up the ray `r_A`, which leaves `A` turned counterclockwise by `θ`
//! from the direction `O→A`; the `B` chain is its mirror image. Consecutive
//! chain points are `|A_iB_i|` apart. `P` sits on the axis above the strip.
//!
//! Vertex ids: `O = 0`, `A_i = 1 + i`, `B_i = n + 2 + i`, `P = 2n + 3`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{angle_at, line_angle, orient2d, triangle_angles, Point};
use crate::insertion::{edge_insertion, extract_channel, InsertionError};
use crate::triangulation::{PointSet, Tri, Triangulation, TriangulationError, VertexId};

/// Default apex angle: `0.78π`, inside the valid regime `ω > 10π/13`.
pub const DEFAULT_OMEGA: f64 = 0.78 * PI;
/// Default angular margin (radians) required when placing `P`.
pub const DEFAULT_P_MARGIN: f64 = 1e-6;
/// Lower end of the apex-angle regime in which the automatic `θ` works.
pub const OMEGA_THRESHOLD: f64 = 10.0 / 13.0 * PI;

/// Tolerance for the construction's length and symmetry identities,
/// relative to the base length.
const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MantaError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{}", describe_failures(.0))]
    ClaimViolated(Vec<ClaimFailure>),
    #[error("no placement of P up to {0} base lengths meets the {1} rad margin")]
    CannotPlace(f64, f64),
    #[error("perturbed instance fails verification: {0}")]
    PerturbationBreaksClaim(String),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
    #[error(transparent)]
    Insertion(#[from] InsertionError),
}

fn describe_failures(f: &[ClaimFailure]) -> String {
    f.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// One violated inequality, with its (non-positive) margin in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimFailure {
    pub inequality: Claim,
    pub margin: f64,
}

impl fmt::Display for ClaimFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "claim inequality ({}) violated: {} (margin {:.6e} rad)",
            self.inequality.roman(),
            self.inequality.statement(),
            self.margin
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Claim {
    /// φ < ω
    PhiBelowOmega,
    /// ψ > ω
    PsiAboveOmega,
    /// α < ω
    AlphaBelowOmega,
    /// β < ω
    BetaBelowOmega,
}

impl Claim {
    pub const ALL: [Claim; 4] =
        [Claim::PhiBelowOmega, Claim::PsiAboveOmega, Claim::AlphaBelowOmega, Claim::BetaBelowOmega];

    pub fn roman(self) -> &'static str {
        match self {
            Claim::PhiBelowOmega => "i",
            Claim::PsiAboveOmega => "ii",
            Claim::AlphaBelowOmega => "iii",
            Claim::BetaBelowOmega => "iv",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            Claim::PhiBelowOmega => "phi < omega",
            Claim::PsiAboveOmega => "psi > omega",
            Claim::AlphaBelowOmega => "alpha < omega",
            Claim::BetaBelowOmega => "beta < omega",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaChoice {
    /// `θ = (2/3)·θ'` with `θ' = π − ω`.
    Auto,
    Radians(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PDistance {
    /// Doubling search, see [`place_p`].
    Auto,
    /// Height of `P` above `A_n`, in the same units as the base length.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MantaRayParams {
    pub n: usize,
    pub omega: f64,
    pub theta: ThetaChoice,
    pub p_distance: PDistance,
    pub base_length: f64,
    pub p_margin: f64,
}

impl Default for MantaRayParams {
    fn default() -> Self {
        MantaRayParams {
            n: 1,
            omega: DEFAULT_OMEGA,
            theta: ThetaChoice::Auto,
            p_distance: PDistance::Auto,
            base_length: 1.0,
            p_margin: DEFAULT_P_MARGIN,
        }
    }
}

impl MantaRayParams {
    pub fn with_n(n: usize) -> Self {
        MantaRayParams { n, ..Default::default() }
    }

    /// The ray angle `θ` actually used.
    pub fn theta_radians(&self) -> f64 {
        match self.theta {
            ThetaChoice::Auto => auto_theta(self.omega),
            ThetaChoice::Radians(t) => t,
        }
    }

    fn validate(&self) -> Result<(), MantaError> {
        let bad = |m: String| Err(MantaError::InvalidParams(m));
        if !(self.omega > 0.0 && self.omega < PI) {
            return bad(format!("omega = {} must lie in (0, pi)", self.omega));
        }
        let theta = self.theta_radians();
        if !(theta > 0.0 && theta < PI / 2.0) {
            return bad(format!("theta = {theta} must lie in (0, pi/2)"));
        }
        if !(self.base_length > 0.0 && self.base_length.is_finite()) {
            return bad(format!("base length {} must be positive", self.base_length));
        }
        if !(self.p_margin >= 0.0 && self.p_margin.is_finite()) {
            return bad(format!("P margin {} must be non-negative", self.p_margin));
        }
        if let PDistance::Fixed(d) = self.p_distance {
            if !(d > 0.0 && d.is_finite()) {
                return bad(format!("P distance {d} must be positive"));
            }
        }
        Ok(())
    }
}

/// `θ = (2/3)(π − ω)`.
pub fn auto_theta(omega: f64) -> f64 {
    2.0 / 3.0 * (PI - omega)
}

/// Vertex ids of the named points of `T_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Labels {
    pub n: usize,
}

impl Labels {
    pub fn o(&self) -> VertexId {
        0
    }
    pub fn a(&self, i: usize) -> VertexId {
        debug_assert!(i <= self.n);
        1 + i
    }
    pub fn b(&self, i: usize) -> VertexId {
        debug_assert!(i <= self.n);
        self.n + 2 + i
    }
    pub fn p(&self) -> VertexId {
        2 * self.n + 3
    }
    pub fn count(&self) -> usize {
        2 * self.n + 4
    }

    pub fn name(&self, v: VertexId) -> String {
        let n = self.n;
        match v {
            0 => "O".into(),
            v if v <= n + 1 => format!("A{}", v - 1),
            v if v <= 2 * n + 2 => format!("B{}", v - n - 2),
            v if v == 2 * n + 3 => "P".into(),
            v => format!("#{v}"),
        }
    }

    pub fn id(&self, name: &str) -> Option<VertexId> {
        match name {
            "O" => Some(self.o()),
            "P" => Some(self.p()),
            _ => {
                let (side, idx) = name.split_at(1);
                let i: usize = idx.parse().ok()?;
                if i > self.n {
                    return None;
                }
                match side {
                    "A" => Some(self.a(i)),
                    "B" => Some(self.b(i)),
                    _ => None,
                }
            }
        }
    }

    pub fn map(&self) -> BTreeMap<String, VertexId> {
        (0..self.count()).map(|v| (self.name(v), v)).collect()
    }

    /// Triangles of `T_n`.
    pub fn manta_triangles(&self) -> Vec<Tri> {
        let mut t = vec![[self.o(), self.a(0), self.b(0)], [self.a(self.n), self.p(), self.b(self.n)]];
        for i in 0..self.n {
            t.push([self.a(i), self.b(i), self.a(i + 1)]);
            t.push([self.a(i + 1), self.b(i), self.b(i + 1)]);
        }
        t
    }

    /// Triangles of the fan from `P` over the hull `O, A_0..A_n, P, B_n..B_0`.
    pub fn fan_triangles(&self) -> Vec<Tri> {
        let p = self.p();
        let mut t = vec![[p, self.o(), self.a(0)], [p, self.b(0), self.o()]];
        for i in 0..self.n {
            t.push([p, self.a(i), self.a(i + 1)]);
            t.push([p, self.b(i + 1), self.b(i)]);
        }
        t
    }
}

/// The angles of the construction, measured from coordinates. Angles that
/// need the strip (`φ`, `ψ`, `β`) are absent when `n = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimAngles {
    pub omega: f64,
    /// Ray angle: between `r_A` and the line `OA`.
    pub theta: Option<f64>,
    /// Sum of the base angles of `OAB`, `π − ω`.
    pub theta_prime: f64,
    /// `∠A_{i+1}A_iB_i`, measured at `i = 0`.
    pub phi: Option<f64>,
    /// Largest minus smallest `φ` over `i = 0..n−1`.
    pub phi_spread: Option<f64>,
    /// `∠OBB_1`, the hull angle at `B` (equal to `∠OAA_1`).
    pub psi: Option<f64>,
    /// `θ − (π − ψ)`: the two ways of reading `θ` off the figure.
    pub theta_psi_difference: Option<f64>,
    /// Obtuse angle between line `OA` and the perpendicular to `AB` at `A`.
    pub alpha: f64,
    /// Obtuse angle between `r_A` and the perpendicular to `A_iB_i` at `A_i`,
    /// measured at `i = 1`.
    pub beta: Option<f64>,
    /// Largest minus smallest `β` over `i = 1..n`.
    pub beta_spread: Option<f64>,
}

impl ClaimAngles {
    /// Margins `(ω−φ, ψ−ω, ω−α, ω−β)`; all positive exactly when the four
    /// inequalities hold.
    pub fn margins(&self) -> [Option<f64>; 4] {
        let w = self.omega;
        [self.phi.map(|p| w - p), self.psi.map(|p| p - w), Some(w - self.alpha), self.beta.map(|b| w - b)]
    }

    pub fn failures(&self) -> Vec<ClaimFailure> {
        Claim::ALL
            .iter()
            .zip(self.margins())
            .filter_map(|(&c, m)| m.filter(|&m| m <= 0.0).map(|margin| ClaimFailure { inequality: c, margin }))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct MantaRayInstance {
    pub params: MantaRayParams,
    pub labels: Labels,
    pub triangulation: Triangulation,
    pub angles: ClaimAngles,
}

impl MantaRayInstance {
    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn points(&self) -> &[Point] {
        self.triangulation.points()
    }

    pub fn point_set(&self) -> &Arc<PointSet> {
        self.triangulation.point_set()
    }

    pub fn label_map(&self) -> BTreeMap<String, VertexId> {
        self.labels.map()
    }

    /// The fan from `P`, the optimal triangulation of the point set.
    pub fn fan(&self) -> Result<Triangulation, TriangulationError> {
        Triangulation::new(Arc::clone(self.point_set()), self.labels.fan_triangles())
    }
}

/// Points `O, A_0..A_n, B_0..B_n` (without `P`) and the ray direction.
fn strip_points(params: &MantaRayParams) -> (Vec<Point>, (f64, f64)) {
    let n = params.n;
    let l = params.base_length;
    let half = l / 2.0;
    let height = half / (params.omega / 2.0).tan();
    let base_angle = (PI - params.omega) / 2.0;
    let gamma = base_angle + params.theta_radians();
    let dir = (gamma.cos(), gamma.sin());

    let mut a = vec![Point::new(half, height)];
    for i in 0..n {
        let width = 2.0 * a[i].x;
        a.push(Point::new(a[i].x + width * dir.0, a[i].y + width * dir.1));
    }
    // A_0..A_n lie on one ray; rounding must never make the chain reflex,
    // or the strip would stop being the hull boundary
    let mut guard = 0;
    while let Some(i) = (1..n).find(|&i| orient2d(&a[i - 1], &a[i], &a[i + 1]).is_negative()) {
        a[i].x = a[i].x.next_up();
        guard += 1;
        assert!(guard < 10_000, "chain snapping does not converge");
    }

    let mut pts = Vec::with_capacity(2 * n + 4);
    pts.push(Point::new(0.0, 0.0));
    pts.extend(a.iter().copied());
    pts.extend(a.iter().map(|p| Point::new(-p.x, p.y)));
    (pts, dir)
}

/// Builds `T_n(ω, θ)` and checks the four claim inequalities on it.
pub fn generate(params: &MantaRayParams) -> Result<MantaRayInstance, MantaError> {
    params.validate()?;
    let labels = Labels { n: params.n };
    let (strip, _) = strip_points(params);
    let failures = measure_claim_angles_raw(&labels, &strip).failures();
    if !failures.is_empty() {
        return Err(MantaError::ClaimViolated(failures));
    }
    let top = strip[labels.a(params.n)].y;
    let p = match params.p_distance {
        PDistance::Auto => place_p(params, &strip, params.p_margin)?,
        PDistance::Fixed(d) => Point::new(0.0, top + d),
    };
    assemble(*params, strip, p)
}

fn assemble(params: MantaRayParams, mut pts: Vec<Point>, p: Point) -> Result<MantaRayInstance, MantaError> {
    let labels = Labels { n: params.n };
    pts.push(p);
    let ps = Arc::new(PointSet::new(pts)?);
    let triangulation = Triangulation::new(ps, labels.manta_triangles()).map_err(|e| {
        MantaError::InvalidParams(format!("the construction is not a triangulation: {e}"))
    })?;
    let angles = measure_claim_angles_raw(&labels, triangulation.points());
    Ok(MantaRayInstance { params, labels, triangulation, angles })
}

/// Places `P` on the axis at height `top(A_n) + L·2^k` for the smallest
/// `k ≥ 0` such that both `T_n` and the fan from `P` are triangulations and
/// every angle of the fan, as well as `∠A_nPB_n`, is below `ω − margin`.
pub fn place_p(params: &MantaRayParams, strip: &[Point], margin: f64) -> Result<Point, MantaError> {
    let labels = Labels { n: params.n };
    let top = strip[labels.a(params.n)].y;
    let limit = params.omega - margin;
    let mut reach = params.base_length;
    for _ in 0..64 {
        let p = Point::new(0.0, top + reach);
        if p_is_acceptable(&labels, strip, p, limit) {
            return Ok(p);
        }
        reach *= 2.0;
    }
    Err(MantaError::CannotPlace(reach, margin))
}

fn p_is_acceptable(labels: &Labels, strip: &[Point], p: Point, limit: f64) -> bool {
    let mut pts = strip.to_vec();
    pts.push(p);
    let Ok(ps) = PointSet::new(pts) else { return false };
    let ps = Arc::new(ps);
    if Triangulation::new(Arc::clone(&ps), labels.manta_triangles()).is_err() {
        return false;
    }
    let Ok(fan) = Triangulation::new(ps, labels.fan_triangles()) else { return false };
    let pt = |v| fan.point(v);
    let apex = angle_at(&pt(labels.p()), &pt(labels.a(labels.n)), &pt(labels.b(labels.n))).0;
    apex < limit && fan_angles(&fan).into_iter().all(|a| a < limit)
}

/// Every angle of every triangle of a triangulation.
pub fn fan_angles(t: &Triangulation) -> Vec<f64> {
    t.triangles()
        .iter()
        .flat_map(|tri| {
            triangle_angles(&t.point(tri[0]), &t.point(tri[1]), &t.point(tri[2]))
                .expect("validated triangle")
                .map(|a| a.0)
        })
        .collect()
}

pub fn measure_claim_angles(inst: &MantaRayInstance) -> ClaimAngles {
    measure_claim_angles_raw(&inst.labels, inst.points())
}

fn spread(v: &[f64]) -> f64 {
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

fn measure_claim_angles_raw(labels: &Labels, pts: &[Point]) -> ClaimAngles {
    let n = labels.n;
    let pt = |v: VertexId| pts[v];
    let (o, a0, b0) = (pt(labels.o()), pt(labels.a(0)), pt(labels.b(0)));
    let omega = angle_at(&o, &a0, &b0).0;
    let theta_prime = angle_at(&a0, &o, &b0).0 + angle_at(&b0, &a0, &o).0;
    let perp = |p: Point, q: Point| (-(q.y - p.y), q.x - p.x);
    let alpha = PI - line_angle((a0.x - o.x, a0.y - o.y), perp(a0, b0)).0;

    let (mut theta, mut phi, mut phi_spread, mut psi, mut diff, mut beta, mut beta_spread) =
        (None, None, None, None, None, None, None);
    if n >= 1 {
        let (a1, b1) = (pt(labels.a(1)), pt(labels.b(1)));
        let ray = (a1.x - a0.x, a1.y - a0.y);
        let oa = (a0.x - o.x, a0.y - o.y);
        let t = (oa.0 * ray.1 - oa.1 * ray.0).abs().atan2(oa.0 * ray.0 + oa.1 * ray.1);
        let phis: Vec<f64> =
            (0..n).map(|i| angle_at(&pt(labels.a(i)), &pt(labels.a(i + 1)), &pt(labels.b(i))).0).collect();
        let betas: Vec<f64> = (1..=n)
            .map(|i| {
                let (ai, prev, bi) = (pt(labels.a(i)), pt(labels.a(i - 1)), pt(labels.b(i)));
                PI - line_angle((ai.x - prev.x, ai.y - prev.y), perp(ai, bi)).0
            })
            .collect();
        let s = angle_at(&b0, &o, &b1).0;
        theta = Some(t);
        phi = Some(phis[0]);
        phi_spread = Some(spread(&phis));
        psi = Some(s);
        diff = Some(t - (PI - s));
        beta = Some(betas[0]);
        beta_spread = Some(spread(&betas));
    }
    ClaimAngles {
        omega,
        theta,
        theta_prime,
        phi,
        phi_spread,
        psi,
        theta_psi_difference: diff,
        alpha,
        beta,
        beta_spread,
    }
}

/// Machine-readable verdict on every quantitative statement about `T_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropositionReport {
    pub n: usize,
    pub omega: f64,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub expected_edge_count: usize,
    pub triangle_count: usize,
    pub diameter: usize,
    pub expected_diameter: usize,
    pub op_distance: usize,
    /// Edges of `T_n` crossed by the segment `OP`.
    pub op_crossings: usize,
    /// `2n + 1`: every interior edge of `T_n` separates `O` from `P`.
    pub expected_op_crossings: usize,
    /// Largest angle of `T_n` and of the fan from `P`.
    pub measure: f64,
    pub fan_measure: f64,
    /// Number of triangles of `T_n` attaining its measure.
    pub measure_attained_by: usize,
    /// Non-adjacent pairs tried, and those skipped because a third vertex
    /// lies on the connecting segment.
    pub insertions_tried: usize,
    pub insertions_skipped: usize,
    pub improving_insertions: Vec<[String; 2]>,
    /// Improving insertions that cross exactly one edge (flips).
    pub improving_flips: usize,
    /// `(ω−φ, ψ−ω, ω−α, ω−β)`, radians; absent entries need `n ≥ 1`.
    pub claim_margins: [Option<f64>; 4],
    pub verdict: bool,
}

/// Runs every edge insertion on `T_n` and checks the structural counts.
pub fn verify_proposition(inst: &MantaRayInstance, tie_tol: f64) -> Result<PropositionReport, MantaError> {
    let t = &inst.triangulation;
    let labels = inst.labels;
    let n = inst.n();
    let (o, p) = (labels.o(), labels.p());
    let nv = t.num_vertices();

    let pairs: Vec<(VertexId, VertexId)> = (0..nv)
        .flat_map(|u| (u + 1..nv).map(move |v| (u, v)))
        .filter(|&(u, v)| !t.has_edge(u, v))
        .collect();
    let outcomes: Vec<Result<Option<(bool, usize)>, InsertionError>> = pairs
        .par_iter()
        .map(|&(u, v)| match edge_insertion(t, u, v, tie_tol) {
            Ok(out) => Ok(Some((out.improved, out.channel.removed_edges.len()))),
            Err(InsertionError::VertexOnSegment { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect();
    let mut improving = Vec::new();
    let mut skipped = 0;
    let mut improving_flips = 0;
    for (&(u, v), r) in pairs.iter().zip(outcomes) {
        match r? {
            None => skipped += 1,
            Some((true, crossings)) => {
                improving.push([labels.name(u), labels.name(v)]);
                if crossings == 1 {
                    improving_flips += 1;
                }
            }
            Some((false, _)) => {}
        }
    }

    let op_crossings = extract_channel(t, o, p)?.removed_edges.len();
    let m = t.measure(tie_tol);
    let fan_measure = inst.fan()?.measure(tie_tol).max_angle.0;
    let claim_margins = inst.angles.margins();

    let mut report = PropositionReport {
        n,
        omega: inst.params.omega,
        vertex_count: nv,
        edge_count: t.num_edges(),
        expected_edge_count: 4 * n + 5,
        triangle_count: t.triangles().len(),
        diameter: t.diameter(),
        expected_diameter: n + 2,
        op_distance: t.combinatorial_distance(o, p),
        op_crossings,
        expected_op_crossings: 2 * n + 1,
        measure: m.max_angle.0,
        fan_measure,
        measure_attained_by: m.attaining.len(),
        insertions_tried: pairs.len(),
        insertions_skipped: skipped,
        improving_insertions: improving,
        improving_flips,
        claim_margins,
        verdict: false,
    };
    report.verdict = report.edge_count == report.expected_edge_count
        && report.diameter == report.expected_diameter
        && report.op_distance == report.expected_diameter
        && report.op_crossings == report.expected_op_crossings
        && report.improving_insertions == [["O".to_string(), "P".to_string()]]
        && claim_margins.iter().all(|m| m.is_some_and(|m| m > 0.0));
    Ok(report)
}

/// Moves the chains onto strictly convex curves so that no three points are
/// collinear, then re-verifies the instance.
///
/// Each `A_i` (`i ≥ 1`) is pushed off the ray, away from the axis, by
/// `eps·c·(2s − s²)` where `s ∈ (0, 1]` is its relative position along the
/// chain and `c ∈ [0.5, 1]` is drawn from `seed`. The offset is a strictly
/// concave function of `s`, so every chord `A_{i−1}A_{i+1}` passes strictly
/// inside the body. The `B` chain is mirrored exactly.
pub fn perturb_general_position(
    inst: &MantaRayInstance,
    eps: f64,
    seed: u64,
    tie_tol: f64,
) -> Result<MantaRayInstance, MantaError> {
    let params = inst.params;
    if !(0.0..1e-3 * params.base_length).contains(&eps) {
        return Err(MantaError::InvalidParams(format!(
            "eps = {eps} must lie in [0, 1e-3 * base length)"
        )));
    }
    if eps == 0.0 {
        return Ok(inst.clone());
    }
    let labels = inst.labels;
    let n = params.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = rng.gen_range(0.5..=1.0);

    let mut pts = inst.points().to_vec();
    let p = pts.pop().expect("P is the last point");
    if n >= 1 {
        let a0 = pts[labels.a(0)];
        let an = pts[labels.a(n)];
        let len = a0.dist(&an);
        let (dx, dy) = ((an.x - a0.x) / len, (an.y - a0.y) / len);
        let outward = (dy, -dx);
        for i in 1..=n {
            let s = a0.dist(&pts[labels.a(i)]) / len;
            let off = eps * scale * (2.0 * s - s * s);
            let q = pts[labels.a(i)];
            let moved = Point::new(q.x + off * outward.0, q.y + off * outward.1);
            pts[labels.a(i)] = moved;
            pts[labels.b(i)] = Point::new(-moved.x, moved.y);
        }
    }
    let out = assemble(params, pts, p)?;
    if out.point_set().has_collinear_triple() {
        return Err(MantaError::PerturbationBreaksClaim("three points remain collinear".into()));
    }
    let report = verify_proposition(&out, tie_tol)?;
    if !report.verdict {
        return Err(MantaError::PerturbationBreaksClaim(format!(
            "improving insertions {:?}, margins {:?}",
            report.improving_insertions, report.claim_margins
        )));
    }
    Ok(out)
}

/// Checks the construction's length and symmetry identities; returns the
/// worst deviation relative to the base length.
pub fn construction_residual(inst: &MantaRayInstance) -> f64 {
    let labels = inst.labels;
    let pts = inst.points();
    let l = inst.params.base_length;
    let mut worst: f64 = 0.0;
    for i in 0..inst.n() {
        let (a, a1, b, b1) = (pts[labels.a(i)], pts[labels.a(i + 1)], pts[labels.b(i)], pts[labels.b(i + 1)]);
        let w = a.dist(&b);
        // the strip widens geometrically; compare relative to the local width
        worst = worst.max((a.dist(&a1) - w).abs() / w * l);
        worst = worst.max((b.dist(&b1) - w).abs() / w * l);
    }
    for i in 0..=inst.n() {
        let (a, b) = (pts[labels.a(i)], pts[labels.b(i)]);
        worst = worst.max((a.x + b.x).abs()).max((a.y - b.y).abs());
    }
    worst.max(pts[labels.o()].x.abs()).max(pts[labels.p()].x.abs()) / l
}

pub fn construction_holds(inst: &MantaRayInstance) -> bool {
    construction_residual(inst) <= IDENTITY_TOL
}
