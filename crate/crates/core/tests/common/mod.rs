#![allow(dead_code)]

use rand::Rng;
use stlplan_core::{Aabb, AtomicProp, Point2, PointSequence, Region, SubTask, TickInterval, Workspace};

pub fn square_ws() -> Workspace {
    let regions = vec![
        Region::new("a", Aabb::new(2.0, 5.0, 2.0, 5.0)),
        Region::new("b", Aabb::new(4.0, 8.0, 4.0, 8.0)),
    ];
    Workspace::new(Aabb::new(0.0, 10.0, 0.0, 10.0), vec![], regions).unwrap()
}

pub fn prop(ws: &Workspace, name: &str, negated: bool) -> AtomicProp {
    let r = ws.region(name).unwrap().clone();
    if negated {
        AtomicProp::negative(r)
    } else {
        AtomicProp::positive(r)
    }
}

/// A point inside `b` when `inside`, otherwise somewhere in `bounds` but
/// outside the closed box.
pub fn point_for<R: Rng>(rng: &mut R, b: &Aabb, bounds: &Aabb, inside: bool) -> Point2 {
    loop {
        let p = if inside {
            Point2::new(rng.gen_range(b.min.x..=b.max.x), rng.gen_range(b.min.y..=b.max.y))
        } else {
            Point2::new(rng.gen_range(bounds.min.x..=bounds.max.x), rng.gen_range(bounds.min.y..=bounds.max.y))
        };
        if b.contains(p) == inside {
            return p;
        }
    }
}

/// A point where `prop` has truth value `value`.
pub fn point_with<R: Rng>(rng: &mut R, prop: &AtomicProp, bounds: &Aabb, value: bool) -> Point2 {
    point_for(rng, &prop.region.bounds, bounds, value != prop.negated)
}

/// A sequence over ticks `0..len` whose membership in `prop` follows `bits`.
pub fn sequence_from_bits<R: Rng>(rng: &mut R, prop: &AtomicProp, bounds: &Aabb, bits: &[bool], tau: f64) -> PointSequence {
    let points = bits.iter().map(|&b| point_with(rng, prop, bounds, b)).collect();
    PointSequence::new(tau, 0, points)
}

/// Random sub-task whose ATI fits in `[0, last]`.
pub fn random_subtask<R: Rng>(rng: &mut R, prop: AtomicProp, last: i64) -> SubTask {
    let kind = rng.gen_range(0..4);
    if kind < 2 {
        let a = rng.gen_range(0..=last);
        let b = rng.gen_range(a..=last);
        let outer = TickInterval::new(a, b);
        return if kind == 0 { SubTask::eventually(outer, prop) } else { SubTask::always(outer, prop) };
    }
    let e = rng.gen_range(0..=last.min(10));
    let i_lo = rng.gen_range(0..=e);
    let inner = TickInterval::new(i_lo, e);
    let room = last - e;
    let a = rng.gen_range(0..=room);
    let b = rng.gen_range(a..=room);
    let outer = TickInterval::new(a, b);
    if kind == 2 {
        SubTask::eventually_always(outer, inner, prop)
    } else {
        SubTask::always_eventually(outer, inner, prop)
    }
}

/// Deterministic counterpart of [`random_subtask`] for proptest inputs:
/// `raw` is folded into valid intervals for a sequence of `len` ticks.
pub fn shaped_subtask(kind: u8, raw: [i64; 4], prop: AtomicProp, len: usize) -> SubTask {
    let last = len as i64 - 1;
    if kind % 4 < 2 {
        let a = raw[0].rem_euclid(last + 1);
        let b = a + raw[1].rem_euclid(last - a + 1);
        let outer = TickInterval::new(a, b);
        return if kind.is_multiple_of(4) { SubTask::eventually(outer, prop) } else { SubTask::always(outer, prop) };
    }
    let e = raw[2].rem_euclid(last.min(10) + 1);
    let i_lo = raw[3].rem_euclid(e + 1);
    let room = last - e;
    let a = raw[0].rem_euclid(room + 1);
    let b = a + raw[1].rem_euclid(room - a + 1);
    let (outer, inner) = (TickInterval::new(a, b), TickInterval::new(i_lo, e));
    if kind % 4 == 2 {
        SubTask::eventually_always(outer, inner, prop)
    } else {
        SubTask::always_eventually(outer, inner, prop)
    }
}
