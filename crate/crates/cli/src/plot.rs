//! Minimal SVG output: log-log line charts and cell heat maps.

use saddle_core::energy::{Grid, OddProfile};
use std::fmt::Write;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 50.0;

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Points `(x, y)` on log-log axes, plus an optional fitted line `y = e^b x^a`.
pub fn loglog(title: &str, xlabel: &str, ylabel: &str, pts: &[(f64, f64)], fit: Option<(f64, f64)>) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let lx: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.1.max(f64::MIN_POSITIVE).ln()).collect();
    let (x0, x1) = bounds(&lx);
    let (y0, y1) = bounds(&ly);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    axes(&mut out, xlabel, ylabel);
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="{}" font-family="sans-serif" font-size="10">{}</text>"#,
        HEIGHT - MARGIN + 14.0,
        tick(x0.exp())
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="end">{}</text>"#,
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 14.0,
        tick(x1.exp())
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="end">{}</text>"#,
        MARGIN - 4.0,
        HEIGHT - MARGIN,
        tick(y0.exp())
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="end">{}</text>"#,
        MARGIN - 4.0,
        MARGIN + 4.0,
        tick(y1.exp())
    );
    if let Some((slope, intercept)) = fit {
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c33" stroke-dasharray="4 3"/>"##,
            sx(x0),
            sy(intercept + slope * x0),
            sx(x1),
            sy(intercept + slope * x1)
        );
    }
    let path: Vec<String> = lx.iter().zip(&ly).map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
    let _ = writeln!(out, r##"<polyline points="{}" fill="none" stroke="#236"/>"##, path.join(" "));
    for (x, y) in lx.iter().zip(&ly) {
        let _ = writeln!(out, r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#236"/>"##, sx(*x), sy(*y));
    }
    out.push_str("</svg>\n");
    out
}

fn tick(x: f64) -> String {
    if (1e-2..1e4).contains(&x.abs()) {
        format!("{x:.3}")
    } else {
        format!("{x:.2e}")
    }
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn axes(out: &mut String, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        out,
        r#"<line x1="{MARGIN}" y1="{0}" x2="{1}" y2="{0}" stroke="black"/>"#,
        HEIGHT - MARGIN,
        WIDTH - MARGIN
    );
    let _ = writeln!(out, r#"<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{}" stroke="black"/>"#, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(ylabel)
    );
}

/// Heat map of the odd extension on the quarter `s, t >= 0` of `B_R`, blue
/// for `-1` and red for `1`.
pub fn heat_map(title: &str, grid: &Grid, profile: &OddProfile) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let side = HEIGHT - 2.0 * MARGIN;
    let scale = side / grid.r;
    let cell = grid.h * scale;
    let n = (grid.r / grid.h).ceil() as usize;
    for i in 0..n {
        for j in 0..n {
            let (s, t) = ((i as f64 + 0.5) * grid.h, (j as f64 + 0.5) * grid.h);
            if s.hypot(t) >= grid.r {
                continue;
            }
            let v = profile.at_cell(grid, i, j).clamp(-1.0, 1.0);
            let (r, g, b) = colour(v);
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({r},{g},{b})"/>"#,
                MARGIN + i as f64 * cell,
                HEIGHT - MARGIN - (j as f64 + 1.0) * cell,
                cell + 0.05,
                cell + 0.05
            );
        }
    }
    axes(&mut out, "s = |x'|", "t = |x''|");
    out.push_str("</svg>\n");
    out
}

fn colour(v: f64) -> (u8, u8, u8) {
    let a = v.abs();
    let fade = (255.0 * (1.0 - a)).round() as u8;
    if v >= 0.0 {
        (255, fade, fade)
    } else {
        (fade, fade, 255)
    }
}
