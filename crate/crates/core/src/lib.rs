//! Min-max angle triangulation by edge insertion, with exact predicates,
//! a brute-force oracle and the manta ray family of triangulations on which
//! the only improving insertion joins the two farthest-apart vertices.

pub mod geometry;
pub mod insertion;
pub mod io;
pub mod manta;
pub mod oracle;
pub mod polygon;
pub mod triangulation;

pub use geometry::{Angle, Point, Segment, Sign};
pub use insertion::{
    arbitrary_triangulation, edge_insertion, edge_insertion_algorithm, extract_channel, AlgorithmConfig,
    AlgorithmRun, Channel, InsertionError, InsertionOutcome, ScanOrder, TraceEntry,
};
pub use manta::{
    generate, measure_claim_angles, perturb_general_position, verify_proposition, ClaimAngles, MantaError,
    MantaRayInstance, MantaRayParams, PropositionReport,
};
pub use oracle::{brute_force_optimum, enumerate_triangulations, random_general_position, OracleError};
pub use polygon::{dp_retriangulate, enumerate_polygon_triangulations, Polygon, PolygonError};
pub use triangulation::{Edge, Measure, PointSet, Triangulation, TriangulationError, DEFAULT_TIE_TOL};
