//! SVG 1.1 drawings of instances and witnesses.
//!
//! Circles are drawn clockwise from 12 o'clock, arcs as annular wedges
//! stacked on concentric tracks outside the domain circle; lines are drawn
//! left to right with arcs as bars stacked below the axis. Unit points are
//! ticked whenever the domain length is an integer. Output is a pure
//! function of the inputs.

use std::f64::consts::PI;
use std::fmt::Write;

use crate::arith::Rat;
use crate::model::{intersects, CheckError, Domain, Representation, SolveInstance};

const TRACK: f64 = 16.0;
const BASE_RADIUS: f64 = 180.0;
const UNIT_PX: f64 = 60.0;
const MARGIN: f64 = 40.0;
const MAX_TICKS: i64 = 720;

struct Arc<'a> {
    name: &'a str,
    start: &'a Rat,
    pinned: bool,
    track: usize,
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Greedy track assignment in start order: an arc goes to the lowest
/// track holding no arc it intersects.
fn layout<'a>(inst: &'a SolveInstance, starts: &'a std::collections::BTreeMap<String, Rat>) -> Vec<Arc<'a>> {
    let g = inst.graph();
    let mut order: Vec<(usize, &Rat)> = (0..g.len())
        .filter_map(|v| starts.get(g.name(v)).map(|s| (v, s)))
        .collect();
    order.sort_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(&b.0)));
    let mut tracks: Vec<Vec<&Rat>> = Vec::new();
    let mut arcs = Vec::with_capacity(order.len());
    for (v, s) in order {
        let track = match tracks
            .iter()
            .position(|t| t.iter().all(|o| !intersects(o, s, inst.domain())))
        {
            Some(t) => t,
            None => {
                tracks.push(Vec::new());
                tracks.len() - 1
            }
        };
        tracks[track].push(s);
        let name = g.name(v);
        arcs.push(Arc {
            name,
            start: s,
            pinned: inst.partial().get(name).is_some(),
            track,
        });
    }
    arcs
}

fn style(out: &mut String) {
    out.push_str(
        "<style>\
         .domain{fill:none;stroke:#333;stroke-width:1.5}\
         .tick{stroke:#333;stroke-width:1}\
         .tick-label{font:9px sans-serif;fill:#555;text-anchor:middle}\
         .arc{fill:#4a7bb7;fill-opacity:0.75;stroke:#1f3d66;stroke-width:0.8}\
         .arc.pinned{fill:#b7443a;stroke:#5e1d17}\
         .label{font:9px sans-serif;fill:#111;text-anchor:middle;dominant-baseline:middle}\
         </style>\n",
    );
}

/// Renders the instance, with the witness's arcs if given. Pinned arcs
/// are always drawn and carry the `pinned` class.
pub fn render_svg(inst: &SolveInstance, witness: Option<&Representation>) -> Result<String, CheckError> {
    if let Some(w) = witness {
        inst.check(w)?;
    }
    let starts = match witness {
        Some(w) => &w.starts,
        None => &inst.partial().fixed,
    };
    let arcs = layout(inst, starts);
    let tracks = arcs.iter().map(|a| a.track + 1).max().unwrap_or(0);
    Ok(match inst.domain() {
        Domain::Circle { circumference } => circle_svg(circumference, &arcs, tracks),
        Domain::Line { window } => line_svg(window, &arcs, tracks),
    })
}

fn integer_ticks(len: &Rat) -> Option<i64> {
    if !len.is_integer() {
        return None;
    }
    let n = len.to_f64() as i64;
    (n <= MAX_TICKS).then_some(n)
}

fn circle_svg(c: &Rat, arcs: &[Arc], tracks: usize) -> String {
    let cf = c.to_f64();
    let outer = BASE_RADIUS + TRACK * (tracks as f64 + 1.5);
    let size = 2.0 * (outer + 20.0);
    let (cx, cy) = (size / 2.0, size / 2.0);
    let angle = |s: f64| -PI / 2.0 + 2.0 * PI * s / cf;
    let point = |r: f64, s: f64| (cx + r * angle(s).cos(), cy + r * angle(s).sin());

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{size:.0}\" height=\"{size:.0}\" viewBox=\"0 0 {size:.3} {size:.3}\">"
    );
    style(&mut out);
    let _ = writeln!(
        out,
        "<circle class=\"domain\" cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"{BASE_RADIUS:.3}\"/>"
    );
    if let Some(n) = integer_ticks(c) {
        for i in 0..n {
            let (x1, y1) = point(BASE_RADIUS - 6.0, i as f64);
            let (x2, y2) = point(BASE_RADIUS + 6.0, i as f64);
            let _ = writeln!(
                out,
                "<line class=\"tick\" x1=\"{x1:.3}\" y1=\"{y1:.3}\" x2=\"{x2:.3}\" y2=\"{y2:.3}\"/>"
            );
            if n <= 64 {
                let (tx, ty) = point(BASE_RADIUS - 16.0, i as f64);
                let _ = writeln!(
                    out,
                    "<text class=\"tick-label\" x=\"{tx:.3}\" y=\"{ty:.3}\">x{i}</text>"
                );
            }
        }
    }
    for arc in arcs {
        let s = arc.start.to_f64();
        let r = BASE_RADIUS + TRACK * (arc.track as f64 + 1.0);
        let (ri, ro) = (r - TRACK * 0.35, r + TRACK * 0.35);
        let (ax, ay) = point(ro, s);
        let (bx, by) = point(ro, s + 1.0);
        let (ix, iy) = point(ri, s + 1.0);
        let (jx, jy) = point(ri, s);
        let class = if arc.pinned { "arc pinned" } else { "arc" };
        let _ = writeln!(
            out,
            "<path class=\"{class}\" d=\"M {ax:.3} {ay:.3} A {ro:.3} {ro:.3} 0 0 1 {bx:.3} {by:.3} L {ix:.3} {iy:.3} A {ri:.3} {ri:.3} 0 0 0 {jx:.3} {jy:.3} Z\"><title>{} @ {}</title></path>",
            escape(arc.name),
            arc.start
        );
        let (lx, ly) = point(r, s + 0.5);
        let _ = writeln!(
            out,
            "<text class=\"label\" x=\"{lx:.3}\" y=\"{ly:.3}\">{}</text>",
            escape(arc.name)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn line_svg(w: &Rat, arcs: &[Arc], tracks: usize) -> String {
    let wf = w.to_f64();
    let width = 2.0 * MARGIN + wf * UNIT_PX;
    let axis = 30.0;
    let height = axis + 20.0 + TRACK * 1.25 * tracks as f64 + MARGIN;
    let x = |s: f64| MARGIN + s * UNIT_PX;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.3} {height:.3}\">"
    );
    style(&mut out);
    let _ = writeln!(
        out,
        "<line class=\"domain\" x1=\"{:.3}\" y1=\"{axis:.3}\" x2=\"{:.3}\" y2=\"{axis:.3}\"/>",
        x(0.0),
        x(wf)
    );
    if let Some(n) = integer_ticks(w) {
        for i in 0..=n {
            let tx = x(i as f64);
            let _ = writeln!(
                out,
                "<line class=\"tick\" x1=\"{tx:.3}\" y1=\"{:.3}\" x2=\"{tx:.3}\" y2=\"{:.3}\"/>",
                axis - 5.0,
                axis + 5.0
            );
            let _ = writeln!(
                out,
                "<text class=\"tick-label\" x=\"{tx:.3}\" y=\"{:.3}\">{i}</text>",
                axis - 10.0
            );
        }
    }
    for arc in arcs {
        let s = arc.start.to_f64();
        let y = axis + 20.0 + TRACK * 1.25 * arc.track as f64;
        let class = if arc.pinned { "arc pinned" } else { "arc" };
        let _ = writeln!(
            out,
            "<rect class=\"{class}\" x=\"{:.3}\" y=\"{y:.3}\" width=\"{UNIT_PX:.3}\" height=\"{TRACK:.3}\"><title>{} @ {}</title></rect>",
            x(s),
            escape(arc.name),
            arc.start
        );
        let _ = writeln!(
            out,
            "<text class=\"label\" x=\"{:.3}\" y=\"{:.3}\">{}</text>",
            x(s + 0.5),
            y + TRACK / 2.0,
            escape(arc.name)
        );
    }
    out.push_str("</svg>\n");
    out
}
