//! CSV, SVG and text artifacts.

use std::fmt::Write as _;
use std::path::Path;

use stlplan_core::corridor::SafeCorridor;
use stlplan_core::satisfaction::SatisfactionSet;
use stlplan_core::stl::format_seconds;
use stlplan_core::{Decomposition, PipelineFailure, PipelineOutput, Point2, PointSequence, Workspace};

pub fn plan_csv(waypoints: &PointSequence) -> String {
    let mut s = String::from("tick,t,x,y\n");
    for (i, p) in waypoints.points.iter().enumerate() {
        let k = waypoints.start + i as i64;
        writeln!(s, "{k},{},{},{}", format_seconds(k, waypoints.tau), p.x, p.y).unwrap();
    }
    s
}

pub fn pairs_csv(pairs: &SatisfactionSet, tau: f64) -> String {
    let mut s = String::from("tick,t,prop\n");
    for p in pairs {
        writeln!(s, "{},{},{}", p.tick, format_seconds(p.tick, tau), p.prop.label()).unwrap();
    }
    s
}

pub fn corridor_csv(corridor: &SafeCorridor) -> String {
    let mut s = String::from("tick,xmin,xmax,ymin,ymax\n");
    for (k, b) in corridor.boxes.iter().enumerate() {
        writeln!(s, "{k},{},{},{},{}", b.min.x, b.max.x, b.min.y, b.max.y).unwrap();
    }
    s
}

/// One row per tick; the last row has no input.
pub fn traj_csv(states: &[f64], inputs: &[f64], tau: f64) -> String {
    let mut s = String::from("tick,t,x,y,theta,v,omega\n");
    for (k, x) in states.chunks(3).enumerate() {
        let t = format_seconds(k as i64, tau);
        match inputs.get(2 * k..2 * k + 2) {
            Some(u) => writeln!(s, "{k},{t},{},{},{},{},{}", x[0], x[1], x[2], u[0], u[1]).unwrap(),
            None => writeln!(s, "{k},{t},{},{},{},,", x[0], x[1], x[2]).unwrap(),
        }
    }
    s
}

#[derive(Debug, thiserror::Error)]
pub enum TrajError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Reads the positions of a `traj.csv` back into a sequence with period `tau`.
pub fn read_traj_csv(path: &Path, tau: f64) -> Result<PointSequence, TrajError> {
    let text = std::fs::read_to_string(path).map_err(|source| TrajError::Io { path: path.display().to_string(), source })?;
    parse_traj_csv(&text, tau)
}

pub fn parse_traj_csv(text: &str, tau: f64) -> Result<PointSequence, TrajError> {
    let mut points = Vec::new();
    let mut start = None;
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: &str| TrajError::Parse { line: i + 1, message: message.to_string() };
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 4 {
            return Err(err("expected tick,t,x,y"));
        }
        let tick: i64 = cols[0].trim().parse().map_err(|_| err("bad tick"))?;
        let x: f64 = cols[2].trim().parse().map_err(|_| err("bad x"))?;
        let y: f64 = cols[3].trim().parse().map_err(|_| err("bad y"))?;
        let first = *start.get_or_insert(tick);
        if tick != first + points.len() as i64 {
            return Err(err("ticks must be consecutive"));
        }
        points.push(Point2::new(x, y));
    }
    Ok(PointSequence::new(tau, start.unwrap_or(0), points))
}

/// Artifacts available for drawing; any part may be missing.
#[derive(Default)]
pub struct Figure<'a> {
    pub waypoints: Option<&'a PointSequence>,
    pub pairs: Option<&'a SatisfactionSet>,
    pub corridor: Option<&'a SafeCorridor>,
    pub trajectory: Option<&'a PointSequence>,
}

impl<'a> Figure<'a> {
    pub fn from_output(out: &'a PipelineOutput) -> Self {
        Self {
            waypoints: Some(&out.plan.waypoints),
            pairs: Some(&out.plan.pairs),
            corridor: Some(&out.corridor),
            trajectory: Some(&out.trajectory),
        }
    }

    pub fn from_failure(f: &'a PipelineFailure) -> Self {
        Self {
            waypoints: f.plan.as_ref().map(|p| &p.waypoints),
            pairs: f.plan.as_ref().map(|p| &p.pairs),
            corridor: f.corridor.as_ref(),
            trajectory: None,
        }
    }
}

const SCALE: f64 = 60.0;
const PAD: f64 = 20.0;

pub fn svg(ws: &Workspace, fig: &Figure) -> String {
    let b = ws.bounds;
    let (w, h) = (b.width() * SCALE + 2.0 * PAD, b.height() * SCALE + 2.0 * PAD);
    let tx = |x: f64| PAD + (x - b.min.x) * SCALE;
    let ty = |y: f64| PAD + (b.max.y - y) * SCALE;
    let rect = |s: &mut String, a: &stlplan_core::Aabb, style: &str| {
        writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" {style}/>"#,
            tx(a.min.x),
            ty(a.max.y),
            a.width() * SCALE,
            a.height() * SCALE
        )
        .unwrap();
    };
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#).unwrap();
    rect(&mut s, &b, r#"fill="white" stroke="black" stroke-width="1.5""#);
    for r in ws.regions.values().filter(|r| !r.name.contains('&')) {
        rect(&mut s, &r.bounds, r##"fill="#8fbf8f" fill-opacity="0.35" stroke="#4a7f4a""##);
        let c = r.bounds.center();
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#, tx(c.x), ty(c.y), r.name).unwrap();
    }
    for o in &ws.obstacles {
        rect(&mut s, o, r#"fill="gray""#);
    }
    if let Some(c) = fig.corridor {
        let mut prev = None;
        for bx in &c.boxes {
            if prev != Some(bx) {
                rect(&mut s, bx, r#"fill="none" stroke="red" stroke-width="0.6" stroke-opacity="0.5""#);
            }
            prev = Some(bx);
        }
    }
    let polyline = |s: &mut String, pts: &[Point2], style: &str| {
        let coords: Vec<String> = pts.iter().map(|p| format!("{:.2},{:.2}", tx(p.x), ty(p.y))).collect();
        writeln!(s, r#"<polyline points="{}" fill="none" {style}/>"#, coords.join(" ")).unwrap();
    };
    if let Some(wp) = fig.waypoints {
        polyline(&mut s, &wp.points, r#"stroke="black" stroke-width="0.8" stroke-dasharray="3,2""#);
    }
    if let (Some(pairs), Some(wp)) = (fig.pairs, fig.waypoints) {
        for p in pairs {
            if let Some(q) = wp.at(p.tick) {
                writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="blue"/>"#, tx(q.x), ty(q.y)).unwrap();
            }
        }
    }
    if let Some(tr) = fig.trajectory {
        polyline(&mut s, &tr.points, r#"stroke="red" stroke-width="1.5""#);
    }
    s.push_str("</svg>\n");
    s
}

/// Human-readable run summary.
pub fn report(decomposition: Option<&Decomposition>, outcome: Result<&PipelineOutput, &PipelineFailure>, wall_clock: f64) -> String {
    let mut s = String::new();
    if let Some(d) = decomposition {
        s.push_str(&d.report());
        s.push('\n');
    }
    match outcome {
        Ok(out) => {
            let sol = &out.solution;
            writeln!(s, "status: {}", if out.satisfied && out.collision_free && out.inputs_in_bounds { "satisfied" } else { "unsatisfied" }).unwrap();
            writeln!(s, "satisfied: {}", out.satisfied).unwrap();
            writeln!(s, "collision free: {}", out.collision_free).unwrap();
            writeln!(s, "inputs within bounds: {}", out.inputs_in_bounds).unwrap();
            writeln!(s, "planner seed: {}", out.seed).unwrap();
            writeln!(s, "attempts: {}", out.attempts).unwrap();
            writeln!(s, "waypoints: {}", out.plan.waypoints.len()).unwrap();
            writeln!(s, "satisfaction pairs: {}", out.plan.pairs.len()).unwrap();
            writeln!(s, "corridor boxes: {}", out.corridor.distinct()).unwrap();
            writeln!(s, "trajectory length (m): {:.4}", out.length).unwrap();
            writeln!(s, "cost: {:.6}", sol.cost).unwrap();
            writeln!(s, "max violation: {:.3e}", sol.max_violation).unwrap();
            writeln!(s, "stationarity: {:.3e}", sol.stationarity).unwrap();
            writeln!(s, "solver iterations: {} outer, {} inner", sol.outer_iterations, sol.inner_iterations).unwrap();
        }
        Err(f) => {
            writeln!(s, "status: failed").unwrap();
            writeln!(s, "stage: {}", f.stage).unwrap();
            writeln!(s, "attempts: {}", f.attempts).unwrap();
            writeln!(s, "error: {}", f.message).unwrap();
            writeln!(s, "satisfied: false").unwrap();
        }
    }
    writeln!(s, "wall clock (s): {wall_clock:.3}").unwrap();
    s
}
