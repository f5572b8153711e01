use std::fmt::Write;

use super::scan::{ScanPoint, ScanStatus};

#[derive(Debug, Clone)]
pub struct PlotOptions {
    pub width: f64,
    pub height: f64,
    pub title: String,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions {
            width: 720.0,
            height: 420.0,
            title: "b_inf^(-1/2) against alpha/(2 pi)".into(),
        }
    }
}

const MARGIN: f64 = 56.0;

fn nice_ticks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let raw = (hi - lo) / count as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-12 * step {
        out.push(t);
        t += step;
    }
    out
}

/// Line chart of the successful points; the line breaks at every gap or
/// error, and gaps get a dashed vertical marker.
pub fn render_svg(points: &[ScanPoint], opts: &PlotOptions) -> String {
    let (w, h) = (opts.width, opts.height);
    let ok: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|p| p.b_inf_inv_sqrt.map(|v| (p.alpha_over_2pi, v)))
        .collect();
    let xs = points.iter().map(|p| p.alpha_over_2pi);
    let x_lo = xs.clone().fold(f64::INFINITY, f64::min).min(0.3);
    let x_hi = xs.fold(f64::NEG_INFINITY, f64::max).max(0.5);
    let y_hi = ok.iter().map(|p| p.1).fold(0.0, f64::max).max(1e-3) * 1.1;
    let sx = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo) * (w - 2.0 * MARGIN);
    let sy = |y: f64| h - MARGIN - y / y_hi * (h - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        w / 2.0,
        opts.title
    );
    // axes
    let _ = writeln!(
        s,
        r#"<path d="M{l} {t} L{l} {b} L{r} {b}" stroke="black" fill="none"/>"#,
        l = MARGIN,
        t = MARGIN,
        b = h - MARGIN,
        r = w - MARGIN
    );
    for x in nice_ticks(x_lo, x_hi, 5) {
        let _ = writeln!(
            s,
            r#"<line x1="{X}" y1="{b}" x2="{X}" y2="{b2}" stroke="black"/><text x="{X}" y="{ty}" text-anchor="middle">{x:.2}</text>"#,
            X = sx(x),
            b = h - MARGIN,
            b2 = h - MARGIN + 5.0,
            ty = h - MARGIN + 18.0
        );
    }
    for y in nice_ticks(0.0, y_hi, 5) {
        let _ = writeln!(
            s,
            r#"<line x1="{l2}" y1="{Y}" x2="{l}" y2="{Y}" stroke="black"/><text x="{tx}" y="{Y}" text-anchor="end" dominant-baseline="middle">{y:.2}</text>"#,
            Y = sy(y),
            l = MARGIN,
            l2 = MARGIN - 5.0,
            tx = MARGIN - 8.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">alpha/(2 pi)</text>"#,
        w / 2.0,
        h - 12.0
    );

    // curve, broken at non-ok points
    let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
    for p in points {
        match (p.status, p.b_inf_inv_sqrt) {
            (ScanStatus::Ok, Some(v)) => segments.last_mut().unwrap().push((p.alpha_over_2pi, v)),
            _ => segments.push(Vec::new()),
        }
    }
    for seg in segments.iter().filter(|s| !s.is_empty()) {
        let pts: Vec<String> = seg.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
    }
    for p in points.iter().filter(|p| p.status == ScanStatus::Gap) {
        let _ = writeln!(
            s,
            r#"<line x1="{X}" y1="{t}" x2="{X}" y2="{b}" stroke="firebrick" stroke-dasharray="4 3"/>"#,
            X = sx(p.alpha_over_2pi),
            t = MARGIN,
            b = h - MARGIN
        );
    }
    s.push_str("</svg>\n");
    s
}
