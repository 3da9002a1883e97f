//! SVG pictures of the cells in the positive-scale case.

use std::fmt::Write;

use sa2_core::algebra::ElementClass;
use sa2_core::cells::{build_scale_case, scale_criterion, Axis, Cell, Lineality, ScaleCaseData};
use sa2_core::pipeline::Instance;
use sa2_core::sl2group::{analyze_group, CaseOutcome, GroupCase};
use sa2_core::Caps;

use crate::io::{fail, CliError, CliResult};

const SIZE: f64 = 480.0;
const HALF: f64 = SIZE / 2.0;
const REACH: f64 = 190.0;

/// A labelled point in eigen-coordinates, converted to floats for plotting.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotPoint {
    pub label: String,
    pub x: f64,
    pub y: f64,
}

/// Positive-scale data of `inst`, or a diagnostic naming the actual case.
pub fn scale_case_of(inst: &Instance, caps: &Caps) -> CliResult<ScaleCaseData> {
    match analyze_group(&inst.matrices(), caps) {
        CaseOutcome::Decided(GroupCase::CyclicBy { class: ElementClass::PositiveScale, generator, exponents }) => {
            build_scale_case(inst.generators(), &generator, &exponents).map_err(|e| CliError(e.to_string()))
        }
        CaseOutcome::Decided(c) => fail(format!("not a positive-scale instance (case {})", c.label())),
        CaseOutcome::Inconclusive { stage, .. } => fail(format!("case analysis inconclusive at {stage}")),
    }
}

pub fn plot_points(data: &ScaleCaseData) -> Vec<PlotPoint> {
    let d = data.d.iter().map(|((i, j), v)| (format!("d{}{}", i + 1, j + 1), v));
    let e = data.e.iter().map(|(k, v)| (format!("e{}", k + 1), v));
    d.chain(e).map(|(label, v)| PlotPoint { label, x: v[0].to_f64(), y: v[1].to_f64() }).collect()
}

fn cell_shape(c: Cell, out: &mut String) {
    let (x, y) = (f64::from(c.x), f64::from(c.y));
    match c.dim() {
        0 => {
            let _ = writeln!(out, r##"  <circle cx="{HALF}" cy="{HALF}" r="6" fill="#8fb3d9"/>"##);
        }
        1 => {
            let (x2, y2) = (HALF + x * HALF, HALF - y * HALF);
            let _ = writeln!(
                out,
                r##"  <line x1="{HALF}" y1="{HALF}" x2="{x2}" y2="{y2}" stroke="#8fb3d9" stroke-width="8"/>"##
            );
        }
        _ => {
            let rx = if x > 0.0 { HALF } else { 0.0 };
            let ry = if y > 0.0 { 0.0 } else { HALF };
            let _ = writeln!(
                out,
                r##"  <rect x="{rx}" y="{ry}" width="{HALF}" height="{HALF}" fill="#8fb3d9" fill-opacity="0.35"/>"##
            );
        }
    }
}

/// SVG 1.1 document showing the nine cells, the points, the cells hit
/// (shaded) and the lineality space.
pub fn cells_svg(data: &ScaleCaseData) -> String {
    let points = plot_points(data);
    let lineality = data.lineality();
    let decided = scale_criterion(data);
    let extent = points.iter().flat_map(|p| [p.x.abs(), p.y.abs()]).fold(0.0f64, f64::max);
    let scale = if extent > 0.0 { REACH / extent } else { 1.0 };
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r##"  <rect width="{SIZE}" height="{SIZE}" fill="#ffffff"/>"##);
    for &c in &data.cells {
        cell_shape(c, &mut s);
    }
    match lineality {
        Lineality::Plane => {
            let _ = writeln!(
                s,
                r##"  <rect x="2" y="2" width="{}" height="{}" fill="none" stroke="#c0392b" stroke-width="4"/>"##,
                SIZE - 4.0,
                SIZE - 4.0
            );
        }
        Lineality::Line(axis) => {
            let (x1, y1, x2, y2) = match axis {
                Axis::X => (0.0, HALF, SIZE, HALF),
                Axis::Y => (HALF, 0.0, HALF, SIZE),
            };
            let _ = writeln!(
                s,
                r##"  <line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="#c0392b" stroke-width="3" stroke-dasharray="10,6"/>"##
            );
        }
        Lineality::Zero => {
            let _ = writeln!(s, r##"  <circle cx="{HALF}" cy="{HALF}" r="3" fill="#c0392b"/>"##);
        }
    }
    let _ = writeln!(s, r##"  <line x1="0" y1="{HALF}" x2="{SIZE}" y2="{HALF}" stroke="#555555" stroke-width="1"/>"##);
    let _ = writeln!(s, r##"  <line x1="{HALF}" y1="0" x2="{HALF}" y2="{SIZE}" stroke="#555555" stroke-width="1"/>"##);
    for p in &points {
        let (cx, cy) = (HALF + p.x * scale, HALF - p.y * scale);
        let fill = if p.label.starts_with('d') { "#1f4e79" } else { "#7d3c98" };
        let _ = writeln!(s, r#"  <circle class="point" cx="{cx:.3}" cy="{cy:.3}" r="4" fill="{fill}"/>"#);
        let _ = writeln!(
            s,
            r#"  <text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="13">{}</text>"#,
            cx + 6.0,
            cy - 6.0,
            p.label
        );
    }
    let lin = match lineality {
        Lineality::Zero => "{0}".to_string(),
        Lineality::Line(Axis::X) => "x-axis".to_string(),
        Lineality::Line(Axis::Y) => "y-axis".to_string(),
        Lineality::Plane => "plane".to_string(),
    };
    let verdict = if decided { "group" } else { "not a group" };
    let _ = writeln!(
        s,
        r#"  <text x="10" y="{}" font-family="sans-serif" font-size="14">lineality {lin}; {verdict}</text>"#,
        SIZE - 12.0
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use sa2_core::algebra::{vec2, SA2Element, SL2};

    fn inst(t1: (i64, i64), t2: (i64, i64)) -> Instance {
        let h = SL2::from_i64(2, 1, 1, 1).unwrap();
        Instance::new(vec![
            SA2Element::new(h.clone(), vec2(t1.0, t1.1)),
            SA2Element::new(h.inverse(), vec2(t2.0, t2.1)),
        ])
        .unwrap()
    }

    #[test]
    fn inverse_pair_has_d12_at_origin() {
        let data = scale_case_of(&inst((0, 0), (0, 0)), &Caps::default()).unwrap();
        let pts = plot_points(&data);
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0], PlotPoint { label: "d12".into(), x: 0.0, y: 0.0 });
        let svg = cells_svg(&data);
        assert!(svg.contains(">d12</text>") && svg.contains("; group</text>"));
    }

    #[test]
    fn one_sided_translation() {
        let data = scale_case_of(&inst((1, 0), (0, 0)), &Caps::default()).unwrap();
        let pts = plot_points(&data);
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].label, "d12");
        assert!(pts[0].x != 0.0 || pts[0].y != 0.0);
    }

    #[test]
    fn wrong_case_is_rejected() {
        let u = Instance::new(vec![SA2Element::new(SL2::from_i64(1, 1, 0, 1).unwrap(), vec2(0, 0))]).unwrap();
        let err = scale_case_of(&u, &Caps::default()).unwrap_err();
        assert!(err.0.contains("not a positive-scale"));
    }
}
