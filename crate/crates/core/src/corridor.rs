//! Safe corridor: one obstacle-free axis-aligned box per waypoint.
//!
//! Boxes grow from the waypoint face by face in round-robin order with a
//! fixed step. A face stops when its next step would leave the workspace or
//! overlap an obstacle interior, and is then snapped onto the blocking face.
//! A waypoint that is still inside the previous box reuses it.

use alloc::vec::Vec;

use crate::geometry::{Aabb, Point2, Workspace};
use crate::stl::PointSequence;

/// Expansion step in meters.
pub const EXPANSION_STEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum CorridorError {
    #[error("waypoint {index} at ({x}, {y}) is outside the workspace")]
    OutOfBounds { index: usize, x: f64, y: f64 },
    #[error("waypoint {index} at ({x}, {y}) is inside an obstacle")]
    InObstacle { index: usize, x: f64, y: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SafeCorridor {
    pub boxes: Vec<Aabb>,
}

impl SafeCorridor {
    /// Number of times a new box was grown.
    pub fn distinct(&self) -> usize {
        self.boxes.windows(2).filter(|w| w[0] != w[1]).count() + usize::from(!self.boxes.is_empty())
    }
}

#[derive(Clone, Copy)]
enum Face {
    MinX,
    MaxX,
    MinY,
    MaxY,
}

/// Largest box around `p` under the expansion schedule.
pub fn safe_cor(p: Point2, ws: &Workspace) -> Result<Aabb, CorridorError> {
    safe_cor_indexed(p, ws, 0)
}

fn safe_cor_indexed(p: Point2, ws: &Workspace, index: usize) -> Result<Aabb, CorridorError> {
    if !ws.bounds.contains(p) {
        return Err(CorridorError::OutOfBounds { index, x: p.x, y: p.y });
    }
    if ws.point_in_obstacle(p) {
        return Err(CorridorError::InObstacle { index, x: p.x, y: p.y });
    }
    let mut b = Aabb::from_point(p);
    let mut active = [true; 4];
    let faces = [Face::MinX, Face::MaxX, Face::MinY, Face::MaxY];
    while active.iter().any(|&a| a) {
        for (slot, &face) in faces.iter().enumerate() {
            if active[slot] {
                active[slot] = grow(&mut b, face, ws);
            }
        }
    }
    Ok(b)
}

/// Moves one face by a step. Returns false once the face is frozen.
fn grow(b: &mut Aabb, face: Face, ws: &Workspace) -> bool {
    let mut next = *b;
    let bound = &ws.bounds;
    let (hit_bound, target) = match face {
        Face::MinX => (b.min.x - EXPANSION_STEP <= bound.min.x, bound.min.x),
        Face::MaxX => (b.max.x + EXPANSION_STEP >= bound.max.x, bound.max.x),
        Face::MinY => (b.min.y - EXPANSION_STEP <= bound.min.y, bound.min.y),
        Face::MaxY => (b.max.y + EXPANSION_STEP >= bound.max.y, bound.max.y),
    };
    let stepped = |v: f64, dir: f64| if hit_bound { target } else { v + dir * EXPANSION_STEP };
    match face {
        Face::MinX => next.min.x = stepped(b.min.x, -1.0),
        Face::MaxX => next.max.x = stepped(b.max.x, 1.0),
        Face::MinY => next.min.y = stepped(b.min.y, -1.0),
        Face::MaxY => next.max.y = stepped(b.max.y, 1.0),
    }
    let blockers = ws.obstacles.iter().filter(|o| next.interior_overlaps(o));
    let snap = match face {
        Face::MinX => blockers.map(|o| o.max.x).fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v)))),
        Face::MaxX => blockers.map(|o| o.min.x).fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v)))),
        Face::MinY => blockers.map(|o| o.max.y).fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v)))),
        Face::MaxY => blockers.map(|o| o.min.y).fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v)))),
    };
    match snap {
        Some(v) => {
            match face {
                Face::MinX => b.min.x = v.min(b.min.x),
                Face::MaxX => b.max.x = v.max(b.max.x),
                Face::MinY => b.min.y = v.min(b.min.y),
                Face::MaxY => b.max.y = v.max(b.max.y),
            }
            false
        }
        None => {
            *b = next;
            !hit_bound
        }
    }
}

/// Builds the corridor for a waypoint sequence, reusing the previous box
/// whenever it still contains the waypoint.
pub fn construct_safe_corridor(waypoints: &PointSequence, ws: &Workspace) -> Result<SafeCorridor, CorridorError> {
    let mut boxes: Vec<Aabb> = Vec::with_capacity(waypoints.len());
    for (index, &p) in waypoints.points.iter().enumerate() {
        let b = match boxes.last() {
            Some(prev) if prev.contains(p) => *prev,
            _ => safe_cor_indexed(p, ws, index)?,
        };
        boxes.push(b);
    }
    Ok(SafeCorridor { boxes })
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum CorridorViolation {
    #[error("corridor has {boxes} boxes for {waypoints} waypoints")]
    Length { boxes: usize, waypoints: usize },
    #[error("box {0} misses its waypoint")]
    Misses(usize),
    #[error("box {0} leaves the workspace")]
    OutOfBounds(usize),
    #[error("box {0} overlaps an obstacle")]
    Collides(usize),
    #[error("box {0} changed although the waypoint stayed in the previous box")]
    Reuse(usize),
}

/// Checks every corridor invariant against the waypoints.
pub fn verify_corridor(corridor: &SafeCorridor, waypoints: &PointSequence, ws: &Workspace) -> Result<(), CorridorViolation> {
    if corridor.boxes.len() != waypoints.len() {
        return Err(CorridorViolation::Length { boxes: corridor.boxes.len(), waypoints: waypoints.len() });
    }
    for (k, (b, &p)) in corridor.boxes.iter().zip(&waypoints.points).enumerate() {
        if !b.contains(p) {
            return Err(CorridorViolation::Misses(k));
        }
        if !ws.bounds.contains_box(b) {
            return Err(CorridorViolation::OutOfBounds(k));
        }
        if ws.obstacles.iter().any(|o| b.interior_overlaps(o)) {
            return Err(CorridorViolation::Collides(k));
        }
        if k > 0 && corridor.boxes[k - 1].contains(p) && corridor.boxes[k - 1] != *b {
            return Err(CorridorViolation::Reuse(k));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ws(obstacles: Vec<Aabb>) -> Workspace {
        Workspace::new(Aabb::new(0.0, 10.0, 0.0, 6.0), obstacles, vec![]).unwrap()
    }

    #[test]
    fn empty_workspace_gives_bounds() {
        let w = ws(vec![]);
        assert_eq!(safe_cor(Point2::new(3.3, 2.1), &w).unwrap(), w.bounds);
    }

    #[test]
    fn wall_blocks_one_face() {
        let w = ws(vec![Aabb::new(4.0, 5.0, 0.0, 6.0)]);
        assert_eq!(safe_cor(Point2::new(1.0, 1.0), &w).unwrap(), Aabb::new(0.0, 4.0, 0.0, 6.0));
    }

    #[test]
    fn adjacent_point_touches_face() {
        let w = ws(vec![Aabb::new(4.0, 5.0, 0.0, 6.0)]);
        let b = safe_cor(Point2::new(3.99, 1.0), &w).unwrap();
        assert_eq!(b.max.x, 4.0);
        assert!(!b.interior_overlaps(&w.obstacles[0]));
    }

    #[test]
    fn point_in_obstacle_is_an_error() {
        let w = ws(vec![Aabb::new(4.0, 5.0, 0.0, 6.0)]);
        assert!(matches!(safe_cor(Point2::new(4.5, 1.0), &w), Err(CorridorError::InObstacle { .. })));
        assert!(matches!(safe_cor(Point2::new(11.0, 1.0), &w), Err(CorridorError::OutOfBounds { .. })));
    }

    #[test]
    fn single_room_reuses_one_box() {
        let w = ws(vec![]);
        let pts = (0..20).map(|i| Point2::new(1.0 + 0.1 * i as f64, 1.0)).collect();
        let seq = PointSequence::new(0.1, 0, pts);
        let c = construct_safe_corridor(&seq, &w).unwrap();
        assert_eq!(c.distinct(), 1);
        assert!(verify_corridor(&c, &seq, &w).is_ok());
    }
}
