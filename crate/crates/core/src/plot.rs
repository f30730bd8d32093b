//! Minimal SVG line chart for bench reports.

use std::fmt::Write;

use crate::bench::{Algorithm, BenchReport};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;

fn color(algorithm: Algorithm) -> &'static str {
    match algorithm {
        Algorithm::Incremental => "#1f77b4",
        Algorithm::Naive => "#d62728",
    }
}

/// Renders wall time against the varying parameter, one polyline per algorithm.
pub fn render_svg(report: &BenchReport) -> String {
    let max_x = report.points.iter().map(|p| p.value).max().unwrap_or(1).max(1) as f64;
    let max_y = report
        .points
        .iter()
        .map(|p| p.wall_seconds)
        .fold(0.0, f64::max)
        .max(1e-9);
    let sx = |x: f64| MARGIN + x / max_x * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - y / max_y * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, y0, x1, y1) = (sx(0.0), sy(0.0), sx(max_x), sy(max_y));
    let _ = writeln!(
        svg,
        r#"<path d="M{x0:.1},{y1:.1} L{x0:.1},{y0:.1} L{x1:.1},{y0:.1}" stroke="black" fill="none"/>"#
    );
    for tick in 0..=4 {
        let fx = max_x * tick as f64 / 4.0;
        let fy = max_y * tick as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{:.0}</text>"#,
            sx(fx),
            y0 + 18.0,
            fx
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.3}</text>"#,
            x0 - 6.0,
            sy(fy) + 4.0,
            fy
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">number of {}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0,
        report.axis
    );
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{:.1}" transform="rotate(-90 15 {:.1})" text-anchor="middle">wall time (s)</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    for (row, algorithm) in [Algorithm::Incremental, Algorithm::Naive].into_iter().enumerate() {
        let pts: Vec<String> = report
            .points_for(algorithm)
            .map(|p| format!("{:.1},{:.1}", sx(p.value as f64), sy(p.wall_seconds)))
            .collect();
        if pts.is_empty() {
            continue;
        }
        let c = color(algorithm);
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" stroke="{c}" stroke-width="2" fill="none"/>"#,
            pts.join(" ")
        );
        for p in &pts {
            let (x, y) = p.split_once(',').unwrap();
            let _ = writeln!(svg, r#"<circle cx="{x}" cy="{y}" r="3" fill="{c}"/>"#);
        }
        let ly = MARGIN + 16.0 * row as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{ly:.1}" fill="{c}">{algorithm}</text>"#,
            MARGIN + 10.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}
