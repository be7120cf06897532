//! Log–log variance plot as a standalone SVG document.

use std::fmt::Write as _;
use std::path::Path;

use super::{SlopeFit, VarianceSummary};
use crate::error::{Error, Result};
use crate::samplers::Method;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 190.0;
const MARGIN_Y: f64 = 50.0;

fn colour(method: Method) -> &'static str {
    match method {
        Method::Iid => "#1f77b4",
        Method::Spiral => "#2ca02c",
        Method::Spherical => "#d62728",
        Method::Jacobi => "#9467bd",
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, lx: f64) -> f64 {
        MARGIN_LEFT + (lx - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, ly: f64) -> f64 {
        HEIGHT - MARGIN_Y - (ly - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN_Y)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

/// One polyline per method through `(ln N, ln variance)`, with the fitted
/// lines dashed and the slopes in the legend. Rows with non-positive
/// variance are skipped.
pub fn render_svg(summary: &VarianceSummary, fits: &[SlopeFit]) -> String {
    let pts: Vec<(Method, f64, f64)> = summary
        .rows
        .iter()
        .filter(|r| r.variance > 0.0 && r.n > 0)
        .map(|r| (r.method, (r.n as f64).ln(), r.variance.ln()))
        .collect();
    let fold = |f: fn(&(Method, f64, f64)) -> f64| {
        pts.iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    };
    let (x0, x1) = if pts.is_empty() {
        (0.0, 1.0)
    } else {
        padded(fold(|p| p.1).0, fold(|p| p.1).1)
    };
    let (y0, y1) = if pts.is_empty() {
        (0.0, 1.0)
    } else {
        padded(fold(|p| p.2).0, fold(|p| p.2).1)
    };
    let frame = Frame { x0, x1, y0, y1 };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (left, right) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let (top, bottom) = (MARGIN_Y, HEIGHT - MARGIN_Y);
    let _ = writeln!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let lx = x0 + t * (x1 - x0);
        let ly = y0 + t * (y1 - y0);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{lx:.2}</text>"#,
            frame.px(lx),
            bottom + 16.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{ly:.2}</text>"#,
            left - 6.0,
            frame.py(ly) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">log N</text>"#,
        (left + right) / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">log variance</text>"#,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0
    );

    for (slot, method) in summary.methods().into_iter().enumerate() {
        let c = colour(method);
        let line: Vec<String> = pts
            .iter()
            .filter(|p| p.0 == method)
            .map(|p| format!("{:.2},{:.2}", frame.px(p.1), frame.py(p.2)))
            .collect();
        if !line.is_empty() {
            let _ = writeln!(
                svg,
                r#"<polyline class="data" data-method="{method}" points="{}" fill="none" stroke="{c}" stroke-width="2"/>"#,
                line.join(" ")
            );
        }
        let fit = fits.iter().find(|f| f.method == method);
        if let Some(f) = fit {
            let (ya, yb) = (f.intercept + f.slope * x0, f.intercept + f.slope * x1);
            let _ = writeln!(
                svg,
                r#"<line class="fit" data-method="{method}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{c}" stroke-dasharray="6 4"/>"#,
                frame.px(x0),
                frame.py(ya),
                frame.px(x1),
                frame.py(yb)
            );
        }
        let ly = top + 20.0 + 22.0 * slot as f64;
        let label = match fit {
            Some(f) => format!("{method} (slope {:.2})", f.slope),
            None => method.to_string(),
        };
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{c}" stroke-width="2"/>"#,
            right + 12.0,
            right + 36.0
        );
        let _ = writeln!(
            svg,
            r#"<text class="legend" x="{:.1}" y="{:.1}">{label}</text>"#,
            right + 42.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn emit_plot(path: &Path, summary: &VarianceSummary, fits: &[SlopeFit]) -> Result<()> {
    std::fs::write(path, render_svg(summary, fits)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::SummaryRow;

    fn summary() -> VarianceSummary {
        let mut rows = Vec::new();
        for (method, a) in [(Method::Iid, -1.0), (Method::Spherical, -2.0)] {
            for n in [16usize, 64, 256] {
                rows.push(SummaryRow {
                    method,
                    integrand: "f1".into(),
                    n,
                    reps: 10,
                    mean: 0.0,
                    variance: (n as f64).powf(a),
                    std_error: 0.0,
                });
            }
        }
        VarianceSummary { rows }
    }

    #[test]
    fn svg_parses_and_has_one_series_per_method() {
        let s = summary();
        let fits = crate::harness::fit_all_slopes(&s).unwrap();
        let svg = render_svg(&s, &fits);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let lines: Vec<_> = doc
            .descendants()
            .filter(|n| n.has_tag_name("polyline"))
            .collect();
        assert_eq!(lines.len(), 2);
        let fit_lines = doc
            .descendants()
            .filter(|n| n.attribute("class") == Some("fit"))
            .count();
        assert_eq!(fit_lines, 2);
        let texts: Vec<&str> = doc.descendants().filter_map(|n| n.text()).collect();
        assert!(texts.contains(&"log N"));
        assert!(texts.contains(&"log variance"));
        assert!(texts.iter().any(|t| t.contains("slope -2.00")));
    }

    #[test]
    fn empty_summary_still_renders() {
        let svg = render_svg(&VarianceSummary::default(), &[]);
        assert!(roxmltree::Document::parse(&svg).is_ok());
    }
}
