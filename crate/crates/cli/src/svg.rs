//! Static SVG drawings: one panel per configuration, with the chain, the
//! circumcircle and connecting diameter for diacyclic configurations, and
//! per-edge sign annotations.

use planar_arm::cyclic::CyclicRoot;
use planar_arm::geometry::{realize, AngleConfig, ArmLengths, Vec2};
use std::fmt::Write;

const PANEL: f64 = 240.0;
const MARGIN: f64 = 24.0;

struct Panel {
    lines: Vec<String>,
}

struct Frame {
    scale: f64,
    cx: f64,
    cy: f64,
}

impl Frame {
    /// Map model coordinates into a panel, flipping `y` so counterclockwise
    /// reads counterclockwise on screen.
    fn fit(points: &[Vec2]) -> Frame {
        let (mut min_x, mut max_x) = (f64::MAX, f64::MIN);
        let (mut min_y, mut max_y) = (f64::MAX, f64::MIN);
        for p in points {
            min_x = min_x.min(p.x);
            max_x = max_x.max(p.x);
            min_y = min_y.min(p.y);
            max_y = max_y.max(p.y);
        }
        let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
        Frame {
            scale: (PANEL - 2.0 * MARGIN) / span,
            cx: 0.5 * (min_x + max_x),
            cy: 0.5 * (min_y + max_y),
        }
    }

    fn x(&self, p: &Vec2) -> f64 {
        PANEL / 2.0 + (p.x - self.cx) * self.scale
    }

    fn y(&self, p: &Vec2) -> f64 {
        PANEL / 2.0 - (p.y - self.cy) * self.scale
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

fn chain_panel(
    arm: &ArmLengths,
    config: &AngleConfig,
    circle: Option<(&Vec2, f64)>,
    signs: Option<&str>,
    title: &str,
) -> Panel {
    let path = realize(arm, config).expect("drawable configuration");
    let mut pts: Vec<Vec2> = path.vertices().to_vec();
    if let Some((c, r)) = circle {
        pts.push(c + Vec2::new(r, r));
        pts.push(c - Vec2::new(r, r));
    }
    let f = Frame::fit(&pts);
    let mut lines = Vec::new();
    if let Some((c, r)) = circle {
        lines.push(format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>",
            fmt(f.x(c)),
            fmt(f.y(c)),
            fmt(r * f.scale)
        ));
        // Connecting side, a diameter for diacyclic configurations.
        let (a, b) = (path.first(), path.last());
        lines.push(format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#d62728\" stroke-dasharray=\"6 3\"/>",
            fmt(f.x(&a)),
            fmt(f.y(&a)),
            fmt(f.x(&b)),
            fmt(f.y(&b))
        ));
    }
    let polyline: Vec<String> = path
        .vertices()
        .iter()
        .map(|v| format!("{},{}", fmt(f.x(v)), fmt(f.y(v))))
        .collect();
    lines.push(format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>",
        polyline.join(" ")
    ));
    for (i, v) in path.vertices().iter().enumerate() {
        lines.push(format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"#1f77b4\"/>",
            fmt(f.x(v)),
            fmt(f.y(v))
        ));
        lines.push(format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"9\">r{}</text>",
            fmt(f.x(v) + 4.0),
            fmt(f.y(v) - 4.0),
            i
        ));
    }
    if let Some(s) = signs {
        for (i, ch) in s.chars().enumerate() {
            let mid = 0.5 * (path.vertices()[i] + path.vertices()[i + 1]);
            lines.push(format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"10\" fill=\"#d62728\">{}</text>",
                fmt(f.x(&mid)),
                fmt(f.y(&mid) - 5.0),
                ch
            ));
        }
    }
    lines.push(format!(
        "<text x=\"6\" y=\"{}\" font-size=\"10\" fill=\"#444444\">{}</text>",
        fmt(PANEL - 6.0),
        title
    ));
    Panel { lines }
}

fn assemble(panels: Vec<Panel>, per_row: usize) -> String {
    let per_row = per_row.max(1);
    let rows = panels.len().div_ceil(per_row);
    let width = PANEL * per_row.min(panels.len().max(1)) as f64;
    let height = PANEL * rows.max(1) as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    for (i, panel) in panels.iter().enumerate() {
        let tx = PANEL * (i % per_row) as f64;
        let ty = PANEL * (i / per_row) as f64;
        let _ = writeln!(out, "<g transform=\"translate({tx},{ty})\">");
        let _ = writeln!(
            out,
            "<rect width=\"{PANEL}\" height=\"{PANEL}\" fill=\"white\" stroke=\"#eeeeee\"/>"
        );
        for line in &panel.lines {
            let _ = writeln!(out, "{line}");
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    out
}

/// One panel per critical point, with circumcircle and diameter.
pub fn render_critical_points(arm: &ArmLengths, roots: &[CyclicRoot]) -> String {
    let panels: Vec<Panel> = roots
        .iter()
        .map(|r| {
            chain_panel(
                arm,
                &r.config,
                Some((&r.cyclic.center, r.cyclic.radius)),
                Some(&r.cyclic.signs.to_string()),
                &format!("2A = {:.6}", planar_arm::geometry::oriented_area(&r.path)),
            )
        })
        .collect();
    assemble(panels, 4)
}

/// One panel per configuration, chain only.
pub fn render_configurations(arm: &ArmLengths, configs: &[(AngleConfig, String)]) -> String {
    let panels: Vec<Panel> = configs
        .iter()
        .map(|(c, title)| chain_panel(arm, c, None, None, title))
        .collect();
    assemble(panels, 4)
}

/// Heatmap of the doubled area over the torus with critical points marked.
/// `grid[row][col]` holds `2A` at `theta2 = row`, `theta1 = col` steps.
pub fn render_levelset(grid: &[Vec<f64>], critical: &[(f64, f64)]) -> String {
    let res = grid.len();
    let size = 480.0;
    let cell = size / res as f64;
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for row in grid {
        for &v in row {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    let span = (hi - lo).max(1e-12);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">"
    );
    for (j, row) in grid.iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            let u = (v - lo) / span;
            // Blue (minimum) through white to red (maximum).
            let (r, g, b) = if u < 0.5 {
                let s = 2.0 * u;
                ((255.0 * s) as u8, (255.0 * s) as u8, 255u8)
            } else {
                let s = 2.0 * (1.0 - u);
                (255u8, (255.0 * s) as u8, (255.0 * s) as u8)
            };
            let _ = writeln!(
                out,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({r},{g},{b})\"/>",
                i as f64 * cell,
                size - (j + 1) as f64 * cell,
                cell + 0.5,
                cell + 0.5
            );
        }
    }
    let tau = std::f64::consts::TAU;
    for &(t1, t2) in critical {
        let _ = writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>",
            t1 / tau * size,
            size - t2 / tau * size
        );
    }
    out.push_str("</svg>\n");
    out
}
