//! Deterministic SVG diagrams. Bar-state TBUs are drawn as two parallel
//! strokes, cross-state TBUs as an X, and a highlighted path as a red
//! polyline through its nodes.

use std::fmt::Write;

use meshroute::{Configuration, MeshGraph, TbuState, TracedPath};

const SCALE: f64 = 80.0;
const MARGIN: f64 = 40.0;

struct Frame {
    min_x: f64,
    min_y: f64,
}

impl Frame {
    fn new(mesh: &MeshGraph) -> Self {
        let pts = mesh.tbus().iter().flat_map(|t| t.ends).map(|p| mesh.point_position(p));
        let (min_x, min_y) = pts.fold((f64::MAX, f64::MAX), |a, b| (a.0.min(b.0), a.1.min(b.1)));
        Self { min_x, min_y }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (MARGIN + (x - self.min_x) * SCALE, MARGIN + (y - self.min_y) * SCALE)
    }
}

pub fn render(mesh: &MeshGraph, config: &Configuration, highlight: Option<&TracedPath>) -> String {
    let frame = Frame::new(mesh);
    let mut max = (0.0f64, 0.0f64);
    let mut body = String::new();

    for &cell in mesh.cells() {
        let pts: Vec<String> = mesh
            .cell_corners(cell)
            .into_iter()
            .map(|p| {
                let (x, y) = frame.map(mesh.point_position(p));
                max = (max.0.max(x), max.1.max(y));
                format!("{x:.2},{y:.2}")
            })
            .collect();
        writeln!(body, r##"  <polygon points="{}" fill="#f2f2f2" stroke="#bbbbbb" stroke-width="1"/>"##, pts.join(" ")).unwrap();
    }

    for (i, t) in mesh.tbus().iter().enumerate() {
        let cross = config.state(i) == TbuState::Cross;
        for side in 0..2 {
            let a = frame.map(mesh.node_position(t.port_node(0, side)));
            let b = frame.map(mesh.node_position(t.port_node(1, if cross { 1 - side } else { side })));
            writeln!(
                body,
                r##"  <line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#333333" stroke-width="2"/>"##,
                a.0, a.1, b.0, b.1
            )
            .unwrap();
        }
    }

    if let Some(p) = highlight {
        let pts: Vec<String> = p
            .nodes
            .iter()
            .map(|&n| {
                let (x, y) = frame.map(mesh.node_position(n));
                format!("{x:.2},{y:.2}")
            })
            .collect();
        writeln!(
            body,
            r##"  <polyline points="{}" fill="none" stroke="#d62728" stroke-width="4" stroke-linejoin="round"/>"##,
            pts.join(" ")
        )
        .unwrap();
        for (n, fill) in [(p.start, "#d62728"), (p.end, "#d62728")] {
            let (x, y) = frame.map(mesh.node_position(n));
            writeln!(body, r#"  <circle cx="{x:.2}" cy="{y:.2}" r="5" fill="{fill}"/>"#).unwrap();
        }
    }

    let w = max.0 + MARGIN;
    let h = max.1 + MARGIN;
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.2} {h:.2}\">\n\
         <title>{} {}</title>\n{body}</svg>\n",
        mesh.spec(),
        config.to_bits()
    )
}
