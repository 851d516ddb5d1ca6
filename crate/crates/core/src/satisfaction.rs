//! Sample-level satisfaction check for one sub-task, returning the
//! `(instant, region)` obligations that certify it.
//!
//! `F` keeps the first witness, `FG` the first satisfying window. `GF` uses
//! the revisit-gap test, which is sufficient but not necessary: every window
//! of length `e = b2 - a2` inside the ATI must contain a visit, and the gap
//! test only checks consecutive visits and the two ends.

use alloc::vec::Vec;

use crate::geometry::Workspace;
use crate::stl::{AtomicProp, CoverageError, PointSequence, SubTask, TemporalKind};

#[derive(Debug, Clone, PartialEq)]
pub struct SatisfactionPair {
    pub tick: i64,
    pub prop: AtomicProp,
}

/// Pairs kept sorted by tick, without duplicate `(tick, region)` entries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SatisfactionSet {
    pairs: Vec<SatisfactionPair>,
}

impl SatisfactionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, SatisfactionPair> {
        self.pairs.iter()
    }

    pub fn as_slice(&self) -> &[SatisfactionPair] {
        &self.pairs
    }

    pub fn insert(&mut self, pair: SatisfactionPair) {
        let at = self.pairs.partition_point(|p| p.tick <= pair.tick);
        let dup = self.pairs[..at]
            .iter()
            .rev()
            .take_while(|p| p.tick == pair.tick)
            .any(|p| p.prop == pair.prop);
        if !dup {
            self.pairs.insert(at, pair);
        }
    }

    pub fn merge(&mut self, other: &SatisfactionSet) {
        for p in &other.pairs {
            self.insert(p.clone());
        }
    }

    /// Pairs whose tick equals `tick`.
    pub fn at_tick(&self, tick: i64) -> &[SatisfactionPair] {
        let lo = self.pairs.partition_point(|p| p.tick < tick);
        let hi = self.pairs.partition_point(|p| p.tick <= tick);
        &self.pairs[lo..hi]
    }

    /// Every pair holds on `seq`; ticks outside the sequence count as failures.
    pub fn holds_on(&self, seq: &PointSequence, ws: &Workspace) -> bool {
        self.pairs
            .iter()
            .all(|p| seq.at(p.tick).is_some_and(|q| p.prop.holds_at(q, &ws.bounds)))
    }
}

impl<'a> IntoIterator for &'a SatisfactionSet {
    type Item = &'a SatisfactionPair;
    type IntoIter = core::slice::Iter<'a, SatisfactionPair>;
    fn into_iter(self) -> Self::IntoIter {
        self.pairs.iter()
    }
}

/// Checks `sub` on `seq` and returns the certifying pairs (empty when the
/// check fails).
pub fn stl_sat(seq: &PointSequence, sub: &SubTask, ws: &Workspace) -> Result<(bool, SatisfactionSet), CoverageError> {
    let ati = sub.ati();
    if !seq.covers(ati) {
        return Err(CoverageError { needed: ati });
    }
    let inside = |k: i64| sub.prop.holds_at(seq.at(k).expect("covered"), &ws.bounds);
    let pair = |tick: i64| SatisfactionPair { tick, prop: sub.prop.clone() };
    let mut set = SatisfactionSet::new();
    let outer = sub.outer;

    let ok = match sub.kind {
        TemporalKind::Eventually => match outer.ticks().find(|&k| inside(k)) {
            Some(k) => {
                set.insert(pair(k));
                true
            }
            None => false,
        },
        TemporalKind::Always => {
            let ok = outer.ticks().all(inside);
            if ok {
                outer.ticks().for_each(|k| set.insert(pair(k)));
            }
            ok
        }
        TemporalKind::EventuallyAlways => {
            let inner = sub.inner.expect("nested");
            match outer.ticks().map(|t1| inner.shifted(t1)).find(|w| w.ticks().all(inside)) {
                Some(w) => {
                    w.ticks().for_each(|k| set.insert(pair(k)));
                    true
                }
                None => false,
            }
        }
        TemporalKind::AlwaysEventually => {
            let inner = sub.inner.expect("nested");
            let e = inner.len();
            let visits: Vec<i64> = ati.ticks().filter(|&k| inside(k)).collect();
            let ok = match (visits.first(), visits.last()) {
                (Some(&first), Some(&last)) => {
                    first - ati.lo <= e && ati.hi - last <= e && visits.windows(2).all(|w| w[1] - w[0] <= e)
                }
                _ => false,
            };
            if ok {
                visits.into_iter().for_each(|k| set.insert(pair(k)));
            }
            ok
        }
    };
    Ok((ok, set))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Aabb, Point2, Region};
    use crate::stl::{oracle_satisfies, TickInterval};
    use alloc::vec;

    fn ws() -> Workspace {
        Workspace::new(Aabb::new(0.0, 10.0, 0.0, 10.0), vec![], vec![]).unwrap()
    }

    fn mu() -> AtomicProp {
        AtomicProp::positive(Region::new("mu", Aabb::new(0.0, 1.0, 0.0, 1.0)))
    }

    fn seq_inside_at(n: usize, inside: impl Fn(i64) -> bool) -> PointSequence {
        let pts = (0..n as i64)
            .map(|k| if inside(k) { Point2::new(0.5, 0.5) } else { Point2::new(5.0, 5.0) })
            .collect();
        PointSequence::new(0.1, 0, pts)
    }

    fn ticks(set: &SatisfactionSet) -> Vec<i64> {
        set.iter().map(|p| p.tick).collect()
    }

    #[test]
    fn eventually_single_witness() {
        let seq = seq_inside_at(11, |k| k == 3);
        let (ok, set) = stl_sat(&seq, &SubTask::eventually(TickInterval::new(0, 10), mu()), &ws()).unwrap();
        assert!(ok);
        assert_eq!(ticks(&set), vec![3]);
    }

    #[test]
    fn always_emits_every_tick() {
        let seq = seq_inside_at(11, |_| true);
        let g = SubTask::always(TickInterval::new(0, 10), mu());
        let (ok, set) = stl_sat(&seq, &g, &ws()).unwrap();
        assert!(ok);
        assert_eq!(set.len(), 11);
        assert_eq!(oracle_satisfies(&seq, &g, &ws()), Ok(true));
    }

    #[test]
    fn always_fails_on_one_violation() {
        let seq = seq_inside_at(11, |k| k != 7);
        let (ok, set) = stl_sat(&seq, &SubTask::always(TickInterval::new(0, 10), mu()), &ws()).unwrap();
        assert!(!ok);
        assert!(set.is_empty());
    }

    #[test]
    fn gap_test_examples() {
        let gf = SubTask::always_eventually(TickInterval::new(0, 100), TickInterval::new(0, 100), mu());
        let two = seq_inside_at(201, |k| k == 50 || k == 140);
        let (ok, set) = stl_sat(&two, &gf, &ws()).unwrap();
        assert!(ok);
        assert_eq!(ticks(&set), vec![50, 140]);
        assert_eq!(oracle_satisfies(&two, &gf, &ws()), Ok(true));

        let one = seq_inside_at(201, |k| k == 50);
        assert!(!stl_sat(&one, &gf, &ws()).unwrap().0);
        assert_eq!(oracle_satisfies(&one, &gf, &ws()), Ok(false));
    }

    #[test]
    fn reach_and_stay_first_window() {
        let fg = SubTask::eventually_always(TickInterval::new(300, 460), TickInterval::new(0, 40), mu());
        let seq = seq_inside_at(501, |k| (320..=360).contains(&k));
        let (ok, set) = stl_sat(&seq, &fg, &ws()).unwrap();
        assert!(ok);
        assert_eq!(ticks(&set), (320..=360).collect::<Vec<_>>());
    }

    #[test]
    fn coverage_error() {
        let seq = seq_inside_at(5, |_| true);
        let f = SubTask::eventually(TickInterval::new(0, 10), mu());
        assert!(stl_sat(&seq, &f, &ws()).is_err());
    }

    #[test]
    fn set_is_sorted_and_deduplicated() {
        let mut s = SatisfactionSet::new();
        for k in [5, 3, 5, 4, 3] {
            s.insert(SatisfactionPair { tick: k, prop: mu() });
        }
        assert_eq!(ticks(&s), vec![3, 4, 5]);
        assert_eq!(s.at_tick(4).len(), 1);
        assert!(s.at_tick(6).is_empty());
    }
}
