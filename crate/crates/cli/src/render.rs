//! Static SVG diagram of a board: one polygon per lattice triangle, one
//! circle per node, rainbow triangles shaded.

use std::fmt::Write;

use atropos_core::{Board, Color, Coord, Sidecar};

const UNIT: f64 = 20.0;
const MARGIN: f64 = 16.0;
const ROW_HEIGHT: f64 = UNIT * 0.866_025_403_784_438_6;

fn fill(c: Color) -> &'static str {
    match c {
        Color::Uncolored => "#ffffff",
        Color::Red => "#d62728",
        Color::Green => "#2ca02c",
        Color::Blue => "#1f77b4",
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render_svg(board: &Board, sidecar: Option<&Sidecar>) -> String {
    let top = (board.size() + 2) as f64;
    let pos = |c: Coord| (MARGIN + c.x2() as f64 * UNIT / 2.0, MARGIN + (top - c.row as f64) * ROW_HEIGHT);
    let width = 2.0 * MARGIN + top * UNIT;
    let height = 2.0 * MARGIN + top * ROW_HEIGHT;
    let radius = UNIT * 0.3;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.1} {height:.1}">"#
    );
    let _ = writeln!(s, r##"<g stroke="#bbbbbb" stroke-width="1">"##);
    for t in board.triangles() {
        let pts: Vec<String> = t.iter().map(|&c| pos(c)).map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
        let shade = if board.is_rainbow(&t) { "#ffe066" } else { "none" };
        let _ = writeln!(s, r#"<polygon points="{}" fill="{shade}"/>"#, pts.join(" "));
    }
    let _ = writeln!(s, "</g>");

    if let Some(sc) = sidecar {
        let _ = writeln!(s, r##"<g fill="#7f7f7f" fill-opacity="0.15" stroke="#555555" stroke-dasharray="3 2">"##);
        for g in sc.gadgets.iter().filter(|g| g.parent.is_none() && !g.cells.is_empty()) {
            let pts: Vec<(f64, f64)> = g.cells.iter().map(|&c| pos(c)).collect();
            let (x0, x1) = pts.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.0), b.max(p.0)));
            let (y0, y1) = pts.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.1), b.max(p.1)));
            let _ = writeln!(
                s,
                r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}"><title>{} {}</title></rect>"#,
                x0 - radius,
                y0 - radius,
                x1 - x0 + 2.0 * radius,
                y1 - y0 + 2.0 * radius,
                g.kind.name(),
                escape(&g.binding)
            );
        }
        let _ = writeln!(s, "</g>");
    }

    let _ = writeln!(s, r##"<g stroke="#333333" stroke-width="1">"##);
    for c in board.coords() {
        let (x, y) = pos(c);
        let _ = writeln!(s, r#"<circle cx="{x:.1}" cy="{y:.1}" r="{radius:.1}" fill="{}"/>"#, fill(board.color(c)));
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}
