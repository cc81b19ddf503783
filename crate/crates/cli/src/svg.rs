//! Static four-panel component plot.

use std::fmt::Write;

use strucdecomp::DecompositionResult;

pub const WIDTH: f64 = 900.0;
pub const HEIGHT: f64 = 1200.0;
const PANEL: f64 = HEIGHT / 4.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 20.0;

struct Panel {
    top: f64,
    lo: f64,
    hi: f64,
    n: usize,
}

impl Panel {
    fn new(index: usize, n: usize, series: &[&[f64]]) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in series.iter().flat_map(|s| s.iter()) {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
        if !lo.is_finite() || !hi.is_finite() {
            (lo, hi) = (-1.0, 1.0);
        }
        if hi - lo < 1e-12 {
            lo -= 1.0;
            hi += 1.0;
        }
        Self {
            top: index as f64 * PANEL,
            lo,
            hi,
            n,
        }
    }

    fn x(&self, i: f64) -> f64 {
        let span = WIDTH - LEFT - RIGHT;
        if self.n <= 1 {
            LEFT + span / 2.0
        } else {
            LEFT + span * i / (self.n - 1) as f64
        }
    }

    fn y(&self, v: f64) -> f64 {
        let h = PANEL - TOP - BOTTOM;
        self.top + TOP + h * (self.hi - v) / (self.hi - self.lo)
    }

    fn frame(&self, out: &mut String, title: &str) {
        let _ = writeln!(
            out,
            r##"<rect class="frame" x="{LEFT:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#999"/>"##,
            self.top + TOP,
            WIDTH - LEFT - RIGHT,
            PANEL - TOP - BOTTOM
        );
        let _ = writeln!(
            out,
            r##"<text x="{LEFT:.2}" y="{:.2}" font-family="sans-serif" font-size="14">{title}</text>"##,
            self.top + TOP - 8.0
        );
        for v in [self.lo, self.hi] {
            let _ = writeln!(
                out,
                r##"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">{}</text>"##,
                LEFT - 4.0,
                self.y(v) + 3.0,
                tick(v)
            );
        }
    }

    fn polyline(&self, out: &mut String, class: &str, stroke: &str, values: &[f64]) {
        let mut points = String::new();
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                points.push(' ');
            }
            let _ = write!(points, "{:.2},{:.2}", self.x(i as f64), self.y(*v));
        }
        let _ = writeln!(
            out,
            r##"<polyline class="{class}" fill="none" stroke="{stroke}" stroke-width="1" points="{points}"/>"##
        );
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Observed and cleaned, trend with changepoint lines, seasonal, and residual
/// with anomaly markers, stacked top to bottom.
pub fn render_components_svg(r: &DecompositionResult) -> String {
    let n = r.len();
    let mut out = String::new();
    let _ = writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"##
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="white"/>"##);

    let p = Panel::new(0, n, &[&r.observed, &r.cleaned]);
    p.frame(&mut out, "observed / cleaned");
    p.polyline(&mut out, "observed", "#bbbbbb", &r.observed);
    p.polyline(&mut out, "cleaned", "#1f77b4", &r.cleaned);

    let p = Panel::new(1, n, &[&r.trend]);
    p.frame(&mut out, "trend");
    for &b in r.changepoints.breaks() {
        let x = p.x(b as f64 + 0.5);
        let _ = writeln!(
            out,
            r##"<line class="changepoint" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#d62728" stroke-dasharray="4 3"/>"##,
            p.top + TOP,
            p.top + PANEL - BOTTOM
        );
    }
    p.polyline(&mut out, "trend", "#2ca02c", &r.trend);

    let p = Panel::new(2, n, &[&r.seasonal]);
    p.frame(&mut out, "seasonal");
    p.polyline(&mut out, "seasonal", "#9467bd", &r.seasonal);

    let p = Panel::new(3, n, &[&r.residual]);
    p.frame(&mut out, "residual");
    p.polyline(&mut out, "residual", "#7f7f7f", &r.residual);
    for i in r.anomalies.flagged_indices() {
        let _ = writeln!(
            out,
            r##"<circle class="anomaly" cx="{:.2}" cy="{:.2}" r="3" fill="#ff7f0e"/>"##,
            p.x(i as f64),
            p.y(r.residual[i])
        );
    }
    out.push_str("</svg>\n");
    out
}
