//! File formats: point-set text files, triangulation and trace JSON.
//!
//! Every float written to JSON carries 17 significant digits, so reading a
//! file back reproduces the exact doubles.

use std::collections::BTreeMap;
use std::io;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use thiserror::Error;

use crate::geometry::Point;
use crate::insertion::TraceEntry;
use crate::triangulation::{PointSet, Tri, Triangulation, TriangulationError, VertexId};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
    #[error("label {0:?} refers to vertex {1}, which does not exist")]
    BadLabel(String, VertexId),
}

/// Parses "x y" lines; blank lines and `#` comments are ignored.
pub fn parse_points(text: &str) -> Result<Vec<Point>, IoError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| IoError::Parse { line: i + 1, msg };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [x, y] = fields[..] else {
            return Err(err(format!("expected two coordinates, found {}", fields.len())));
        };
        let parse = |s: &str| s.parse::<f64>().map_err(|e| err(format!("{s:?}: {e}")));
        let p = Point::new(parse(x)?, parse(y)?);
        if !p.is_finite() {
            return Err(err("non-finite coordinate".into()));
        }
        out.push(p);
    }
    Ok(out)
}

pub fn format_points(points: &[Point]) -> String {
    points.iter().map(|p| format!("{} {}\n", fmt_f64(p.x), fmt_f64(p.y))).collect()
}

/// A float with 17 significant digits, in JSON-compatible notation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// On-disk form of a triangulation, optionally with vertex names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangulationFile {
    pub points: Vec<[f64; 2]>,
    pub triangles: Vec<Tri>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<String, VertexId>>,
}

impl TriangulationFile {
    pub fn from_triangulation(t: &Triangulation, labels: Option<BTreeMap<String, VertexId>>) -> Self {
        TriangulationFile {
            points: t.points().iter().map(|p| [p.x, p.y]).collect(),
            triangles: t.triangles().to_vec(),
            labels,
        }
    }

    pub fn points(&self) -> Vec<Point> {
        self.points.iter().map(|&[x, y]| Point::new(x, y)).collect()
    }

    pub fn to_triangulation(&self) -> Result<Triangulation, IoError> {
        if let Some(labels) = &self.labels {
            if let Some((name, &v)) = labels.iter().find(|(_, &v)| v >= self.points.len()) {
                return Err(IoError::BadLabel(name.clone(), v));
            }
        }
        let ps = Arc::new(PointSet::new(self.points())?);
        Ok(Triangulation::new(ps, self.triangles.clone())?)
    }

    /// Name of a vertex: its label if one exists, else its index.
    pub fn name(&self, v: VertexId) -> String {
        self.labels
            .as_ref()
            .and_then(|l| l.iter().find(|(_, &id)| id == v).map(|(n, _)| n.clone()))
            .unwrap_or_else(|| v.to_string())
    }

    /// Resolves a label or a plain index.
    pub fn resolve(&self, name: &str) -> Option<VertexId> {
        if let Some(&v) = self.labels.as_ref().and_then(|l| l.get(name)) {
            return Some(v);
        }
        name.parse().ok().filter(|&v| v < self.points.len())
    }
}

pub fn parse_triangulation(json: &str) -> Result<TriangulationFile, IoError> {
    Ok(serde_json::from_str(json)?)
}

pub fn parse_trace(json: &str) -> Result<Vec<TraceEntry>, IoError> {
    Ok(serde_json::from_str(json)?)
}

/// Pretty JSON with 17-significant-digit floats.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialization cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

struct ExactFloats<'a>(PrettyFormatter<'a>);

impl Formatter for ExactFloats<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}
