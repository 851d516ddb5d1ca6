//! Exhaustive Boolean semantics over sampled sequences.
//!
//! This is the reference the planner's checker and the final trajectory are
//! measured against. It evaluates the quantifiers literally over every grid
//! tick and shares no code with [`crate::satisfaction`].

use super::{Formula, PointSequence, SubTask, TemporalKind, TickInterval};
use crate::geometry::Workspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("sequence does not cover ticks {needed}")]
pub struct CoverageError {
    pub needed: TickInterval,
}

/// Exact satisfaction of `sub` by `seq` at sample granularity.
pub fn oracle_satisfies(seq: &PointSequence, sub: &SubTask, ws: &Workspace) -> Result<bool, CoverageError> {
    let needed = sub.ati();
    if !seq.covers(needed) {
        return Err(CoverageError { needed });
    }
    let inside = |k: i64| {
        let p = seq.at(k).expect("covered tick");
        sub.prop.holds_at(p, &ws.bounds)
    };
    let outer = sub.outer;
    Ok(match (sub.kind, sub.inner) {
        (TemporalKind::Eventually, _) => outer.ticks().any(inside),
        (TemporalKind::Always, _) => outer.ticks().all(inside),
        (TemporalKind::EventuallyAlways, Some(inner)) => outer.ticks().any(|t1| inner.shifted(t1).ticks().all(inside)),
        (TemporalKind::AlwaysEventually, Some(inner)) => outer.ticks().all(|t1| inner.shifted(t1).ticks().any(inside)),
        _ => unreachable!("nested kinds always carry an inner interval"),
    })
}

/// Conjunction over every sub-task of `formula`.
pub fn oracle_satisfies_formula(seq: &PointSequence, formula: &Formula, ws: &Workspace) -> Result<bool, CoverageError> {
    for s in &formula.subtasks {
        if !oracle_satisfies(seq, s, ws)? {
            return Ok(false);
        }
    }
    Ok(true)
}
