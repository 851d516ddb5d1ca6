use core::fmt;

/// Closed time interval measured in sampling ticks, `[lo, hi]` with
/// `0 <= lo <= hi`.
///
/// All temporal reasoning runs on integer ticks; seconds only appear at the
/// boundaries (parsing, printing, file output).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TickInterval {
    pub lo: i64,
    pub hi: i64,
}

impl TickInterval {
    /// Panics if `lo > hi` or `lo < 0`.
    pub fn new(lo: i64, hi: i64) -> Self {
        assert!(0 <= lo && lo <= hi, "invalid interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn try_new(lo: i64, hi: i64) -> Option<Self> {
        (0 <= lo && lo <= hi).then_some(Self { lo, hi })
    }

    /// Minkowski sum `[a, b] + [c, d] = [a + c, b + d]`.
    pub fn minkowski(self, other: TickInterval) -> TickInterval {
        TickInterval {
            lo: self.lo + other.lo,
            hi: self.hi + other.hi,
        }
    }

    /// Shift by a single instant.
    pub fn shifted(self, t: i64) -> TickInterval {
        TickInterval {
            lo: self.lo + t,
            hi: self.hi + t,
        }
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> i64 {
        self.hi - self.lo
    }

    pub fn contains(self, t: i64) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn interior_contains(self, t: i64) -> bool {
        self.lo < t && t < self.hi
    }

    pub fn contains_interval(self, other: TickInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Open interiors intersect.
    pub fn interiors_overlap(self, other: TickInterval) -> bool {
        self.lo.max(other.lo) < self.hi.min(other.hi)
    }

    pub fn ticks(self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

impl fmt::Display for TickInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Formats `ticks * tau` seconds without float noise (`3 * 0.1` prints `0.3`).
pub fn format_seconds(ticks: i64, tau: f64) -> alloc::string::String {
    let mut s = alloc::format!("{:.9}", ticks as f64 * tau);
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}
