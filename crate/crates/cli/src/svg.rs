//! SVG drawing of a triangulation, with an optional inserted edge, the edges
//! it crosses, and the two channel polygons.

use std::collections::BTreeSet;
use std::fmt::Write;

use manta_core::io::TriangulationFile;
use manta_core::{Channel, Edge, Point, Triangulation};

pub struct RenderOptions<'a> {
    pub labels: Option<&'a TriangulationFile>,
    pub channel: Option<&'a Channel>,
    pub shade: bool,
}

const SIZE: f64 = 800.0;

pub fn render(t: &Triangulation, opts: &RenderOptions) -> String {
    let pts = t.points();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let span = (x1 - x0).max(y1 - y0);
    let pad = 0.05 * if span > 0.0 { span } else { 1.0 };
    let (vx, vy, vw, vh) = (x0 - pad, -(y1 + pad), x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
    let scale = vw.max(vh);
    let (w, h) = (SIZE * vw / scale, SIZE * vh / scale);
    // y grows downwards in SVG
    let at = |p: &Point| (p.x, -p.y);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1}" height="{h:.1}" viewBox="{vx} {vy} {vw} {vh}">"#
    );
    let _ = writeln!(s, r#"<rect x="{vx}" y="{vy}" width="{vw}" height="{vh}" fill="white"/>"#);

    let removed: BTreeSet<Edge> = opts.channel.map(|c| c.removed_edges.iter().copied().collect()).unwrap_or_default();
    if let (Some(ch), true) = (opts.channel, opts.shade) {
        for (poly, fill, name) in [(&ch.left, "#8ecae6", "L"), (&ch.right, "#ffb703", "R")] {
            let coords: Vec<String> = poly
                .points()
                .iter()
                .map(|p| {
                    let (x, y) = at(p);
                    format!("{x},{y}")
                })
                .collect();
            let _ = writeln!(
                s,
                r#"<polygon class="channel-{name}" points="{}" fill="{fill}" fill-opacity="0.45" stroke="none"/>"#,
                coords.join(" ")
            );
        }
    }

    let _ = writeln!(s, r#"<g stroke="black" stroke-linecap="round">"#);
    for e in t.edges() {
        let ((ax, ay), (bx, by)) = (at(&pts[e.lo]), at(&pts[e.hi]));
        let style = if removed.contains(&e) {
            r#" class="crossed" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let _ = writeln!(
            s,
            r#"<line x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}" stroke-width="1.2" vector-effect="non-scaling-stroke"{style}/>"#
        );
    }
    if let Some(ch) = opts.channel {
        let ((ax, ay), (bx, by)) = (at(&pts[ch.inserted.0]), at(&pts[ch.inserted.1]));
        let _ = writeln!(
            s,
            r##"<line class="inserted" x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}" stroke="#c1121f" stroke-width="3.5" vector-effect="non-scaling-stroke"/>"##
        );
    }
    let _ = writeln!(s, "</g>");

    let r = 0.006 * scale;
    let _ = writeln!(s, r#"<g fill="black">"#);
    for p in pts {
        let (x, y) = at(p);
        let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="{r}"/>"#);
    }
    let _ = writeln!(s, "</g>");

    if let Some(file) = opts.labels {
        let size = 0.025 * scale;
        let _ = writeln!(s, r##"<g font-family="sans-serif" font-size="{size}" fill="#023047">"##);
        for (v, p) in pts.iter().enumerate() {
            let (x, y) = at(p);
            let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, x + 1.2 * r, y - 1.2 * r, escape(&file.name(v)));
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_triangle() {
        let t = Triangulation::from_points(
            vec![Point::new(0., 0.), Point::new(1., 0.), Point::new(0., 1.)],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let svg = render(&t, &RenderOptions { labels: None, channel: None, shade: true });
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<line").count(), 3);
        assert_eq!(svg.matches("<circle").count(), 3);
        // 5% padding around the unit box, y flipped
        assert!(svg.contains(r#"viewBox="-0.05 -1.05 1.1 1.1""#));
    }

    #[test]
    fn escapes_labels() {
        assert_eq!(escape("a<b&c"), "a&lt;b&amp;c");
    }
}
