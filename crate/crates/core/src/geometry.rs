//! Planar geometry kernel: points, axis-aligned boxes and the workspace.
//!
//! Regions are closed sets, so boundary contact counts as membership.
//! Obstacles only block their open interior; a path may slide along an
//! obstacle face.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        math::sqrt(self.x * self.x + self.y * self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Linear interpolation, `s = 0` gives `self`.
    pub fn lerp(self, other: Point2, s: f64) -> Point2 {
        self + (other - self) * s
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

/// Axis-aligned rectangle `[min.x, max.x] x [min.y, max.y]`.
///
/// Degenerate boxes (zero width) are allowed; sides may be infinite, which
/// is how half-planes are represented.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point2,
    pub max: Point2,
}

impl Aabb {
    pub const fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Self {
        Self {
            min: Point2::new(xmin, ymin),
            max: Point2::new(xmax, ymax),
        }
    }

    pub fn from_point(p: Point2) -> Self {
        Self { min: p, max: p }
    }

    pub fn unbounded() -> Self {
        Self::new(f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point2 {
        Point2::new(0.5 * (self.min.x + self.max.x), 0.5 * (self.min.y + self.max.y))
    }

    /// Both extents strictly positive.
    pub fn is_proper(&self) -> bool {
        self.min.x < self.max.x && self.min.y < self.max.y
    }

    /// Closed membership.
    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Open-interior membership.
    pub fn interior_contains(&self, p: Point2) -> bool {
        p.x > self.min.x && p.x < self.max.x && p.y > self.min.y && p.y < self.max.y
    }

    pub fn contains_box(&self, other: &Aabb) -> bool {
        other.min.x >= self.min.x
            && other.max.x <= self.max.x
            && other.min.y >= self.min.y
            && other.max.y <= self.max.y
    }

    /// True when the open interiors of the two boxes intersect.
    ///
    /// A degenerate box counts as its relative interior along the collapsed
    /// axis, so a segment of zero width strictly inside an obstacle's x-range
    /// overlaps it.
    pub fn interior_overlaps(&self, other: &Aabb) -> bool {
        axis_overlaps(self.min.x, self.max.x, other.min.x, other.max.x)
            && axis_overlaps(self.min.y, self.max.y, other.min.y, other.max.y)
    }

    /// Closed intersection, `None` when empty.
    pub fn intersection(&self, other: &Aabb) -> Option<Aabb> {
        let b = Aabb::new(
            self.min.x.max(other.min.x),
            self.max.x.min(other.max.x),
            self.min.y.max(other.min.y),
            self.max.y.min(other.max.y),
        );
        (b.min.x <= b.max.x && b.min.y <= b.max.y).then_some(b)
    }

    /// Shrinks every side by `margin`, leaving an axis untouched when it is
    /// too thin to shrink.
    pub fn shrink(&self, margin: f64) -> Aabb {
        let mut b = *self;
        if self.width() > 2.0 * margin {
            b.min.x += margin;
            b.max.x -= margin;
        }
        if self.height() > 2.0 * margin {
            b.min.y += margin;
            b.max.y -= margin;
        }
        b
    }

    /// Euclidean projection onto the box.
    pub fn clamp(&self, p: Point2) -> Point2 {
        Point2::new(p.x.clamp(self.min.x, self.max.x), p.y.clamp(self.min.y, self.max.y))
    }

    /// Signed distance: negative inside, positive outside.
    pub fn signed_distance(&self, p: Point2) -> f64 {
        let dx = (self.min.x - p.x).max(p.x - self.max.x);
        let dy = (self.min.y - p.y).max(p.y - self.max.y);
        if dx <= 0.0 && dy <= 0.0 {
            dx.max(dy)
        } else {
            Point2::new(dx.max(0.0), dy.max(0.0)).norm()
        }
    }

    /// Whether segment `a -> b` passes through the open interior (slab method).
    pub fn segment_hits_interior(&self, a: Point2, b: Point2) -> bool {
        self.segment_hits(a, b, false)
    }

    /// Whether segment `a -> b` touches the closed box.
    pub fn segment_hits_closed(&self, a: Point2, b: Point2) -> bool {
        self.segment_hits(a, b, true)
    }

    fn segment_hits(&self, a: Point2, b: Point2, closed: bool) -> bool {
        let mut t0 = 0.0_f64;
        let mut t1 = 1.0_f64;
        let axes = [(a.x, b.x - a.x, self.min.x, self.max.x), (a.y, b.y - a.y, self.min.y, self.max.y)];
        for (origin, dir, lo, hi) in axes {
            if dir == 0.0 {
                let inside = if closed {
                    origin >= lo && origin <= hi
                } else {
                    origin > lo && origin < hi
                };
                if !inside {
                    return false;
                }
                continue;
            }
            let (mut ta, mut tb) = ((lo - origin) / dir, (hi - origin) / dir);
            if ta > tb {
                core::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
        }
        if closed {
            t0 <= t1
        } else {
            t0 < t1
        }
    }
}

fn axis_overlaps(a_lo: f64, a_hi: f64, b_lo: f64, b_hi: f64) -> bool {
    if a_lo == a_hi {
        return a_lo > b_lo && a_lo < b_hi;
    }
    if b_lo == b_hi {
        return b_lo > a_lo && b_lo < a_hi;
    }
    a_lo < b_hi && b_lo < a_hi
}

/// Named region of interest.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub name: String,
    pub bounds: Aabb,
}

impl Region {
    pub fn new(name: impl Into<String>, bounds: Aabb) -> Self {
        Self { name: name.into(), bounds }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WorkspaceError {
    #[error("workspace bounds must have positive extent")]
    DegenerateBounds,
    #[error("obstacle {index} is degenerate or leaves the workspace bounds")]
    BadObstacle { index: usize },
    #[error("region `{name}` is degenerate or leaves the workspace bounds")]
    BadRegion { name: String },
    #[error("region `{name}` declared twice")]
    DuplicateRegion { name: String },
}

/// Position space `P`, obstacles `O` and the region table.
#[derive(Debug, Clone, PartialEq)]
pub struct Workspace {
    pub bounds: Aabb,
    pub obstacles: Vec<Aabb>,
    pub regions: BTreeMap<String, Region>,
}

impl Workspace {
    pub fn new(bounds: Aabb, obstacles: Vec<Aabb>, regions: Vec<Region>) -> Result<Self, WorkspaceError> {
        if !bounds.is_proper() {
            return Err(WorkspaceError::DegenerateBounds);
        }
        for (index, o) in obstacles.iter().enumerate() {
            if !o.is_proper() || !bounds.contains_box(o) {
                return Err(WorkspaceError::BadObstacle { index });
            }
        }
        let mut table = BTreeMap::new();
        for r in regions {
            if !r.bounds.is_proper() || !bounds.contains_box(&r.bounds) {
                return Err(WorkspaceError::BadRegion { name: r.name });
            }
            if table.contains_key(&r.name) {
                return Err(WorkspaceError::DuplicateRegion { name: r.name });
            }
            table.insert(r.name.clone(), r);
        }
        Ok(Self { bounds, obstacles, regions: table })
    }

    pub fn region(&self, name: &str) -> Option<&Region> {
        self.regions.get(name)
    }

    pub fn point_in_region(&self, name: &str, p: Point2) -> Option<bool> {
        self.region(name).map(|r| r.bounds.contains(p))
    }

    /// Inside the open interior of some obstacle.
    pub fn point_in_obstacle(&self, p: Point2) -> bool {
        self.obstacles.iter().any(|o| o.interior_contains(p))
    }

    /// `p` in `P \ O`.
    pub fn is_free(&self, p: Point2) -> bool {
        self.bounds.contains(p) && !self.point_in_obstacle(p)
    }

    /// Whether the straight segment crosses any obstacle interior.
    pub fn segment_collides(&self, a: Point2, b: Point2) -> bool {
        self.obstacles.iter().any(|o| o.segment_hits_interior(a, b))
    }

    /// Area of `P \ O`, overlapping obstacles counted once.
    pub fn free_area(&self) -> f64 {
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        xs.push(self.bounds.min.x);
        xs.push(self.bounds.max.x);
        ys.push(self.bounds.min.y);
        ys.push(self.bounds.max.y);
        for o in &self.obstacles {
            xs.push(o.min.x);
            xs.push(o.max.x);
            ys.push(o.min.y);
            ys.push(o.max.y);
        }
        sort_dedup(&mut xs);
        sort_dedup(&mut ys);
        let mut area = 0.0;
        for wx in xs.windows(2) {
            for wy in ys.windows(2) {
                let c = Point2::new(0.5 * (wx[0] + wx[1]), 0.5 * (wy[0] + wy[1]));
                if self.is_free(c) {
                    area += (wx[1] - wx[0]) * (wy[1] - wy[0]);
                }
            }
        }
        area
    }
}

fn sort_dedup(v: &mut Vec<f64>) {
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup();
}
