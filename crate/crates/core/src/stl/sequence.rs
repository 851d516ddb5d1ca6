use alloc::vec::Vec;

use super::TickInterval;
use crate::geometry::Point2;

/// A `(position, time)` sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedPoint {
    pub p: Point2,
    pub t: f64,
}

/// Uniformly sampled positions at ticks `start, start + 1, ...`, each tick
/// lasting `tau` seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSequence {
    pub tau: f64,
    pub start: i64,
    pub points: Vec<Point2>,
}

impl PointSequence {
    pub fn new(tau: f64, start: i64, points: Vec<Point2>) -> Self {
        Self { tau, start, points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Last covered tick; `start - 1` when empty.
    pub fn end(&self) -> i64 {
        self.start + self.points.len() as i64 - 1
    }

    pub fn span(&self) -> Option<TickInterval> {
        TickInterval::try_new(self.start, self.end())
    }

    pub fn covers(&self, iv: TickInterval) -> bool {
        !self.points.is_empty() && self.start <= iv.lo && iv.hi <= self.end()
    }

    pub fn at(&self, tick: i64) -> Option<Point2> {
        if tick < self.start {
            return None;
        }
        self.points.get((tick - self.start) as usize).copied()
    }

    pub fn time_of(&self, tick: i64) -> f64 {
        tick as f64 * self.tau
    }

    pub fn iter_timed(&self) -> impl Iterator<Item = TimedPoint> + '_ {
        self.points.iter().enumerate().map(move |(i, &p)| TimedPoint {
            p,
            t: (self.start + i as i64) as f64 * self.tau,
        })
    }

    /// Appends `other`, which must start at this sequence's last tick and
    /// repeat its last point; the duplicate is dropped.
    pub fn stitch(&mut self, other: &PointSequence) {
        if self.points.is_empty() {
            *self = other.clone();
            return;
        }
        debug_assert_eq!(other.start, self.end());
        self.points.extend_from_slice(&other.points[1..]);
    }

    /// Sum of Euclidean step lengths.
    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].distance(w[1])).sum()
    }
}
