//! Deterministic SVG rendering of labeled triangulations.

use std::f64::consts::PI;
use std::fmt::Write;

use crate::contfrac::{ContinuedFractionTable, SystemKind};
use crate::error::Result;
use crate::geometry::{build, Arc, ArcLabel, Axis, LabeledTriangulation, Tag};
use crate::schedule::{derive_schedule, run_geometry, StepChecks};

/// Point on the unit circle at boundary position `x / 2` (doubled coordinate), vertex 0 on top, clockwise.
fn point(x2: f64, r: usize) -> (f64, f64) {
    let th = -2.0 * PI * (x2 / 2.0) / r as f64 + PI / 2.0;
    (th.cos(), -th.sin())
}

fn vertex(v: usize, r: usize) -> (f64, f64) {
    point(2.0 * v as f64, r)
}

fn ends(arc: &Arc, r: usize) -> ((f64, f64), (f64, f64)) {
    match *arc {
        Arc::Chord { from, to } => (vertex(from, r), vertex(to, r)),
        Arc::Spoke { v, .. } => (vertex(v, r), (0.0, 0.0)),
    }
}

fn mid(arc: &Arc, r: usize) -> (f64, f64) {
    let ((x1, y1), (x2, y2)) = ends(arc, r);
    match arc {
        Arc::Spoke { tag: Tag::Notched, .. } => (0.35 * x1 + 0.65 * x2, 0.35 * y1 + 0.65 * y2),
        _ => ((x1 + x2) / 2.0, (y1 + y2) / 2.0),
    }
}

/// Draws `g` with dashed `axes`, circles on `forward` arcs and crosses on `backward` arcs.
pub fn render_svg(g: &LabeledTriangulation, axes: &[Axis], forward: &[ArcLabel], backward: &[ArcLabel], title: &str) -> String {
    let r = g.r;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="-1.2 -1.35 2.4 2.55" width="720" height="765">"#);
    let _ = writeln!(s, r#"<title>{title}</title>"#);
    let _ = writeln!(s, r#"<text x="0" y="-1.22" font-size="0.07" text-anchor="middle">{title}</text>"#);
    let _ = writeln!(s, r#"<circle cx="0" cy="0" r="1" fill="none" stroke="black" stroke-width="0.004"/>"#);
    for ax in axes {
        let [a, b] = ax.endpoints();
        let (x1, y1) = point(a as f64, r);
        let (x2, y2) = point(b as f64, r);
        let _ = writeln!(
            s,
            r#"<line x1="{x1:.5}" y1="{y1:.5}" x2="{x2:.5}" y2="{y2:.5}" stroke="gray" stroke-width="0.004" stroke-dasharray="0.02 0.015"/>"#
        );
    }
    for (_, arc) in g.arcs() {
        let ((x1, y1), (x2, y2)) = ends(arc, r);
        let _ = writeln!(s, r#"<line x1="{x1:.5}" y1="{y1:.5}" x2="{x2:.5}" y2="{y2:.5}" stroke="black" stroke-width="0.003"/>"#);
        if let Arc::Spoke { tag: Tag::Notched, .. } = arc {
            let (x, y) = (0.12 * x1, 0.12 * y1);
            let _ = writeln!(s, r#"<circle cx="{x:.5}" cy="{y:.5}" r="0.012" fill="white" stroke="black" stroke-width="0.003"/>"#);
        }
    }
    if g.punctured {
        let _ = writeln!(s, r#"<circle cx="0" cy="0" r="0.012" fill="black"/>"#);
    }
    for v in 0..r {
        let (x, y) = vertex(v, r);
        let _ = writeln!(s, r#"<circle cx="{x:.5}" cy="{y:.5}" r="0.006" fill="black"/>"#);
    }
    let d = 0.012;
    for l in forward {
        if let Some(arc) = g.arc(l) {
            let (x, y) = mid(&arc, r);
            let _ = writeln!(s, r#"<circle cx="{x:.5}" cy="{y:.5}" r="{d}" fill="none" stroke="red" stroke-width="0.004"/>"#);
        }
    }
    for l in backward {
        if let Some(arc) = g.arc(l) {
            let (x, y) = mid(&arc, r);
            let _ = writeln!(
                s,
                r#"<path d="M{:.5} {:.5}L{:.5} {:.5}M{:.5} {:.5}L{:.5} {:.5}" stroke="blue" stroke-width="0.004"/>"#,
                x - d,
                y - d,
                x + d,
                y + d,
                x - d,
                y + d,
                x + d,
                y - d
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// `Gamma(u)` with the axes `Z(u)`, `Z(u-1)`, forward marks on `S(u)` and backward marks on `S(u-1)`.
pub fn render_at(table: &ContinuedFractionTable, kind: SystemKind, u: i64) -> Result<String> {
    let g0 = build(table, kind)?;
    let sched = derive_schedule(&g0, table, kind)?;
    let g = if u == 0 {
        g0
    } else {
        let (lo, hi) = (u.min(0), u.max(0) + 1);
        run_geometry(&g0, &sched, lo, hi, StepChecks::default())?.gamma(u).clone()
    };
    let title = if u == 0 {
        format!("Initial triangulation of {}-gon", g.r)
    } else {
        format!("Triangulation of {}-gon at u = {u}", g.r)
    };
    Ok(render_svg(&g, &[sched.axis(u), sched.axis(u - 1)], &sched.set(u), &sched.set(u - 1), &title))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::{build_table, InputSequence};

    #[test]
    fn deterministic_and_titled() {
        let t = build_table(&InputSequence::new(vec![6, 4]).unwrap());
        let a = render_at(&t, SystemKind::Sg, 0).unwrap();
        let b = render_at(&t, SystemKind::Sg, 0).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("Initial triangulation of 31-gon"));
        assert_eq!(a.matches("stroke-dasharray").count(), 2);
        let g = build(&t, SystemKind::Sg).unwrap();
        let sched = derive_schedule(&g, &t, SystemKind::Sg).unwrap();
        assert_eq!(a.matches("stroke=\"red\"").count(), sched.set(0).len());
        assert_eq!(a.matches("stroke=\"blue\"").count(), sched.set(-1).len());
    }
}
