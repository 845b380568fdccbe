//! Deterministic SVG rendering of tessellations and overlays.

use std::fmt::Write as _;

use vorinv::geom::{Circle, Point2, Rect};
use vorinv::tess::Tessellation;

#[derive(Debug, Default)]
pub struct Overlay<'a> {
    pub generators: Option<&'a [Point2]>,
    pub estimates: Option<&'a [Point2]>,
    pub circles: Vec<Circle>,
}

fn num(v: f64) -> String {
    let s = format!("{v:.9}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

struct View {
    min_x: f64,
    max_y: f64,
}

impl View {
    fn x(&self, p: Point2) -> String {
        num(p.x - self.min_x)
    }

    fn y(&self, p: Point2) -> String {
        num(self.max_y - p.y)
    }
}

pub fn render(t: &Tessellation, overlay: &Overlay<'_>) -> String {
    let pts = t
        .vertices()
        .iter()
        .chain(overlay.generators.unwrap_or(&[]))
        .chain(overlay.estimates.unwrap_or(&[]))
        .copied()
        .filter(|p| p.is_finite());
    let frame = Rect::bounding(pts).unwrap_or(Rect::new(0.0, 0.0, 1.0, 1.0));
    let diag = frame.diagonal().max(f64::MIN_POSITIVE);
    let frame = frame.expanded(0.05 * diag);
    let view = View {
        min_x: frame.min.x,
        max_y: frame.max.y,
    };
    let (w, h) = (frame.width(), frame.height());
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="{}" viewBox="0 0 {} {}">"#,
        num((800.0 * h / w).round()),
        num(w),
        num(h)
    );
    out.push_str(
        "<style>.edge{stroke:#222;fill:none}.infinite{stroke-dasharray:4 3}\
         .generator{fill:#c33}.estimate{stroke:#26c;fill:none}.empty-circle{stroke:#393;fill:none}</style>\n",
    );
    out.push_str(r#"<g stroke-width="1">"#);
    out.push('\n');
    for (a, b) in t.edges() {
        let class = if t.is_dummy(a) || t.is_dummy(b) {
            "edge infinite"
        } else {
            "edge"
        };
        let (pa, pb) = (t.vertex(a), t.vertex(b));
        let _ = writeln!(
            out,
            r#"<polyline class="{class}" vector-effect="non-scaling-stroke" points="{},{} {},{}"/>"#,
            view.x(pa),
            view.y(pa),
            view.x(pb),
            view.y(pb)
        );
    }
    for c in &overlay.circles {
        let _ = writeln!(
            out,
            r#"<circle class="empty-circle" vector-effect="non-scaling-stroke" cx="{}" cy="{}" r="{}"/>"#,
            view.x(c.center),
            view.y(c.center),
            num(c.radius)
        );
    }
    if let Some(gens) = overlay.generators {
        let r = num(0.006 * diag);
        for &p in gens.iter().filter(|p| p.is_finite()) {
            let _ = writeln!(
                out,
                r#"<circle class="generator" cx="{}" cy="{}" r="{r}"/>"#,
                view.x(p),
                view.y(p)
            );
        }
    }
    if let Some(est) = overlay.estimates {
        let s = 0.008 * diag;
        for &p in est.iter().filter(|p| p.is_finite()) {
            let a = Point2::new(p.x - s, p.y - s);
            let b = Point2::new(p.x + s, p.y + s);
            let c = Point2::new(p.x - s, p.y + s);
            let d = Point2::new(p.x + s, p.y - s);
            let _ = writeln!(
                out,
                r#"<path class="estimate" vector-effect="non-scaling-stroke" d="M{},{} L{},{} M{},{} L{},{}"/>"#,
                view.x(a),
                view.y(a),
                view.x(b),
                view.y(b),
                view.x(c),
                view.y(c),
                view.x(d),
                view.y(d)
            );
        }
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Empty circle at every interior (degree-3) vertex, through the nearest of `sites`.
pub fn empty_circles(t: &Tessellation, sites: &[Point2]) -> Vec<Circle> {
    let finite: Vec<Point2> = sites.iter().copied().filter(|p| p.is_finite()).collect();
    if finite.is_empty() {
        return Vec::new();
    }
    (0..t.n_ordinary())
        .filter(|&v| t.degree(v) == 3)
        .map(|v| {
            let center = t.vertex(v);
            let radius = finite
                .iter()
                .map(|&p| (p - center).norm())
                .fold(f64::INFINITY, f64::min);
            Circle { center, radius }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use vorinv::tess::parse_tessellation;

    const FIXTURE: &str =
        "tess 3 1\nv 0.0 0.0\nv 2.0 0.0\nv 0.0 2.0\nv 5.0 5.0\nadj 0: 1 2 3\nadj 1: 0\nadj 2: 0\n";

    #[test]
    fn edges_only_without_overlays() {
        let t = parse_tessellation(FIXTURE).unwrap();
        let svg = render(&t, &Overlay::default());
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(!svg.contains("<circle") && !svg.contains("<path"));
        assert_eq!(svg, render(&t, &Overlay::default()));
    }

    #[test]
    fn number_formatting() {
        assert_eq!(num(1.5), "1.5");
        assert_eq!(num(2.0), "2");
        assert_eq!(num(-0.0000000001), "0");
    }
}
