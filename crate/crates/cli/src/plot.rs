//! Static SVG scatter plots.

use std::collections::BTreeMap;
use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 48.0;
const PALETTE: [&str; 8] = [
    "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

pub struct Scatter<'a> {
    pub x_name: &'a str,
    pub y_name: &'a str,
    pub xs: &'a [f64],
    pub ys: &'a [f64],
    /// Per-case class label; empty strings share one color.
    pub classes: &'a [String],
    /// Case indices drawn enlarged, most anomalous first.
    pub highlighted: &'a [usize],
}

fn range(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn scatter(p: &Scatter) -> String {
    let (x0, x1) = range(p.xs);
    let (y0, y1) = range(p.ys);
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut colors: BTreeMap<&str, &str> = BTreeMap::new();
    for c in p.classes {
        let next = PALETTE[colors.len() % PALETTE.len()];
        colors.entry(c.as_str()).or_insert(next);
    }

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="gray"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(p.x_name)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" font-size="14" transform="rotate(-90 16 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(p.y_name)
    );
    for (v, anchor, x) in [(x0, "start", MARGIN), (x1, "end", WIDTH - MARGIN)] {
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" text-anchor="{anchor}" font-size="10">{v:.3}</text>"#,
            HEIGHT - MARGIN + 14.0
        );
    }
    for (v, y) in [(y0, HEIGHT - MARGIN), (y1, MARGIN)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{y}" text-anchor="end" font-size="10">{v:.3}</text>"#,
            MARGIN - 4.0
        );
    }

    let mut enlarged = vec![false; p.xs.len()];
    for &g in p.highlighted {
        enlarged[g] = true;
    }
    let _ = writeln!(s, r#"<g id="cases" fill-opacity="0.6">"#);
    for g in (0..p.xs.len()).filter(|&g| !enlarged[g]) {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="1.5" fill="{}"/>"#,
            px(p.xs[g]),
            py(p.ys[g]),
            colors[p.classes[g].as_str()]
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g id="top" stroke="black" stroke-width="1">"#);
    for &g in p.highlighted {
        let _ = writeln!(
            s,
            r#"<circle class="top" cx="{:.2}" cy="{:.2}" r="6" fill="{}"/>"#,
            px(p.xs[g]),
            py(p.ys[g]),
            colors[p.classes[g].as_str()]
        );
    }
    let _ = writeln!(s, "</g>");
    for (i, (class, color)) in colors.iter().filter(|(c, _)| !c.is_empty()).enumerate() {
        let y = MARGIN + 14.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{y}" font-size="11" fill="{color}">{}</text>"#,
            WIDTH - MARGIN + 6.0,
            escape(class)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enlarges_only_highlighted_cases() {
        let classes: Vec<String> = ["a", "b", "a"].iter().map(|s| s.to_string()).collect();
        let svg = scatter(&Scatter {
            x_name: "x",
            y_name: "y",
            xs: &[0.0, 1.0, 2.0],
            ys: &[2.0, 1.0, 0.0],
            classes: &classes,
            highlighted: &[1],
        });
        assert_eq!(svg.matches(r#"class="top""#).count(), 1);
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.starts_with("<svg"));
    }

    #[test]
    fn constant_axis_does_not_divide_by_zero() {
        let classes = vec![String::new(); 2];
        let svg = scatter(&Scatter {
            x_name: "x",
            y_name: "y",
            xs: &[1.0, 1.0],
            ys: &[3.0, 4.0],
            classes: &classes,
            highlighted: &[],
        });
        assert!(!svg.contains("NaN"));
    }
}
