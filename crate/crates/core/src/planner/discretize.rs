use alloc::vec::Vec;

use super::rrt::{tick_time, StVertex};
use crate::stl::{PointSequence, TickInterval};

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("path covers [{start}, {end}] s but ticks {needed} are required")]
pub struct ConError {
    pub start: f64,
    pub end: f64,
    pub needed: TickInterval,
}

/// Samples a time-monotone polyline at every tick of `span` by linear
/// interpolation. Vertices past the last tick are ignored.
pub fn con(path: &[StVertex], span: TickInterval, tau: f64) -> Result<PointSequence, ConError> {
    let err = || ConError {
        start: path.first().map_or(f64::NAN, |v| v.time),
        end: path.last().map_or(f64::NAN, |v| v.time),
        needed: span,
    };
    let (first, last) = (path.first().ok_or_else(err)?, path.last().ok_or_else(err)?);
    if first.time > tick_time(span.lo, tau) || last.time < tick_time(span.hi, tau) {
        return Err(err());
    }
    let mut points = Vec::with_capacity((span.len() + 1) as usize);
    let mut seg = 0;
    for k in span.ticks() {
        let t = tick_time(k, tau);
        while seg + 1 < path.len() && path[seg + 1].time <= t {
            seg += 1;
        }
        let a = &path[seg];
        let p = if a.time == t || seg + 1 == path.len() {
            a.pos
        } else {
            let b = &path[seg + 1];
            a.pos.lerp(b.pos, (t - a.time) / (b.time - a.time))
        };
        points.push(p);
    }
    Ok(PointSequence::new(tau, span.lo, points))
}
