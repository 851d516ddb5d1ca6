use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::interval::format_seconds;
use super::TickInterval;
use crate::geometry::{Aabb, Point2, Region, Workspace};

/// `mu` or `!mu` over a rectangular region.
///
/// The region is copied in so a formula can be evaluated without looking
/// anything up. Conjunctions such as `(mu1 & mu2)` resolve to a derived
/// region named `mu1&mu2`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicProp {
    pub region: Region,
    pub negated: bool,
}

impl AtomicProp {
    pub fn positive(region: Region) -> Self {
        Self { region, negated: false }
    }

    pub fn negative(region: Region) -> Self {
        Self { region, negated: true }
    }

    /// `p` in `R(phi)`: the closed region, or `P` minus the closed region.
    pub fn holds_at(&self, p: Point2, bounds: &Aabb) -> bool {
        if self.negated {
            bounds.contains(p) && !self.region.bounds.contains(p)
        } else {
            self.region.bounds.contains(p)
        }
    }

    /// Label used in reports and CSV files (`mu3`, `!mu4`, `mu1&mu2`).
    pub fn label(&self) -> String {
        if self.negated {
            alloc::format!("!{}", self.region.name)
        } else {
            self.region.name.clone()
        }
    }
}

impl fmt::Display for AtomicProp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("!")?;
        }
        if self.region.name.contains('&') {
            let parts: Vec<&str> = self.region.name.split('&').collect();
            write!(f, "({})", parts.join(" & "))
        } else {
            f.write_str(&self.region.name)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TemporalKind {
    /// `F_I phi`
    Eventually,
    /// `G_I phi`
    Always,
    /// `F_I1 G_I2 phi`, reach and stay.
    EventuallyAlways,
    /// `G_I1 F_I2 phi`, periodic visits.
    AlwaysEventually,
}

impl TemporalKind {
    pub fn is_nested(self) -> bool {
        matches!(self, Self::EventuallyAlways | Self::AlwaysEventually)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Self::Eventually => "F",
            Self::Always => "G",
            Self::EventuallyAlways => "FG",
            Self::AlwaysEventually => "GF",
        }
    }
}

/// One conjunct of the task: `F`, `G`, `FG` or `GF` applied to an atom.
#[derive(Debug, Clone, PartialEq)]
pub struct SubTask {
    pub kind: TemporalKind,
    pub outer: TickInterval,
    /// Present exactly for the nested kinds.
    pub inner: Option<TickInterval>,
    pub prop: AtomicProp,
}

impl SubTask {
    pub fn eventually(outer: TickInterval, prop: AtomicProp) -> Self {
        Self { kind: TemporalKind::Eventually, outer, inner: None, prop }
    }

    pub fn always(outer: TickInterval, prop: AtomicProp) -> Self {
        Self { kind: TemporalKind::Always, outer, inner: None, prop }
    }

    pub fn eventually_always(outer: TickInterval, inner: TickInterval, prop: AtomicProp) -> Self {
        Self { kind: TemporalKind::EventuallyAlways, outer, inner: Some(inner), prop }
    }

    pub fn always_eventually(outer: TickInterval, inner: TickInterval, prop: AtomicProp) -> Self {
        Self { kind: TemporalKind::AlwaysEventually, outer, inner: Some(inner), prop }
    }

    pub fn is_nested(&self) -> bool {
        self.kind.is_nested()
    }

    /// Application time interval: the outer interval for `F`/`G`, the
    /// Minkowski sum of outer and inner for the nested kinds.
    pub fn ati(&self) -> TickInterval {
        match self.inner {
            Some(inner) => self.outer.minkowski(inner),
            None => self.outer,
        }
    }

    /// Same temporal structure over a different outer interval.
    pub fn with_outer(&self, outer: TickInterval) -> Self {
        Self { outer, ..self.clone() }
    }

    /// Pretty-prints with intervals in seconds.
    pub fn display(&self, tau: f64) -> SubTaskDisplay<'_> {
        SubTaskDisplay { sub: self, tau }
    }
}

pub struct SubTaskDisplay<'a> {
    sub: &'a SubTask,
    tau: f64,
}

impl fmt::Display for SubTaskDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let iv = |i: TickInterval| alloc::format!("[{},{}]", format_seconds(i.lo, self.tau), format_seconds(i.hi, self.tau));
        let s = self.sub;
        match (s.kind, s.inner) {
            (TemporalKind::Eventually, _) => write!(f, "F{} {}", iv(s.outer), s.prop),
            (TemporalKind::Always, _) => write!(f, "G{} {}", iv(s.outer), s.prop),
            (TemporalKind::EventuallyAlways, Some(inner)) => write!(f, "F{} G{} {}", iv(s.outer), iv(inner), s.prop),
            (TemporalKind::AlwaysEventually, Some(inner)) => write!(f, "G{} F{} {}", iv(s.outer), iv(inner), s.prop),
            _ => Err(fmt::Error),
        }
    }
}

/// Conjunction of sub-tasks with sampling period `tau` (seconds per tick).
#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    pub tau: f64,
    pub subtasks: Vec<SubTask>,
}

impl Formula {
    /// Time horizon in ticks: the largest ATI upper bound.
    pub fn horizon(&self) -> i64 {
        self.subtasks.iter().map(|s| s.ati().hi).max().unwrap_or(0)
    }

    /// `[0, horizon]`.
    pub fn uati(&self) -> TickInterval {
        TickInterval::new(0, self.horizon())
    }

    /// Regions referenced by the formula, derived intersections included.
    pub fn regions(&self) -> Vec<&Region> {
        let mut out: Vec<&Region> = Vec::new();
        for s in &self.subtasks {
            if !out.iter().any(|r| r.name == s.prop.region.name) {
                out.push(&s.prop.region);
            }
        }
        out
    }

    /// Checks the pairwise-disjoint-interiors condition on nested ATIs.
    pub fn check_nested_disjoint(&self) -> Result<(), (usize, usize)> {
        for (i, a) in self.subtasks.iter().enumerate() {
            if !a.is_nested() {
                continue;
            }
            for (j, b) in self.subtasks.iter().enumerate().skip(i + 1) {
                if b.is_nested() && a.ati().interiors_overlap(b.ati()) {
                    return Err((i, j));
                }
            }
        }
        Ok(())
    }

    /// All regions still resolve in `ws` (derived ones are checked against
    /// their parts).
    pub fn references_valid(&self, ws: &Workspace) -> bool {
        self.subtasks.iter().all(|s| {
            s.prop
                .region
                .name
                .split('&')
                .all(|part| ws.region(part).is_some())
        })
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.subtasks.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{}", s.display(self.tau))?;
        }
        Ok(())
    }
}
