//! Goal-biased RRT grown in position x time.
//!
//! Every edge goes forward in time, is checked against the obstacles and the
//! time-windowed avoid regions, and respects a speed cap.

use alloc::vec::Vec;
use rand::Rng;

use crate::geometry::{Aabb, Point2, Workspace};
use crate::math;
use crate::stl::{AtomicProp, TickInterval};

const MAX_REJECTIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StVertex {
    pub pos: Point2,
    pub time: f64,
    pub parent: Option<usize>,
}

impl StVertex {
    pub fn root(pos: Point2, time: f64) -> Self {
        Self { pos, time, parent: None }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Tree {
    pub vertices: Vec<StVertex>,
}

impl Tree {
    pub fn new(root: StVertex) -> Self {
        Self { vertices: alloc::vec![root] }
    }

    pub fn push(&mut self, v: StVertex) -> usize {
        self.vertices.push(v);
        self.vertices.len() - 1
    }

    /// Root-to-`idx` chain.
    pub fn path_to(&self, idx: usize) -> Vec<StVertex> {
        let mut out = Vec::new();
        let mut cur = Some(idx);
        while let Some(i) = cur {
            out.push(self.vertices[i]);
            cur = self.vertices[i].parent;
        }
        out.reverse();
        out
    }
}

/// Where a goal vertex may lie: inside one box (if any) and outside every
/// box in `outside`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GoalSet {
    pub inside: Option<Aabb>,
    pub outside: Vec<Aabb>,
}

impl GoalSet {
    pub fn anywhere() -> Self {
        Self::default()
    }

    pub fn region(b: Aabb) -> Self {
        Self { inside: Some(b), outside: Vec::new() }
    }

    pub fn from_props<'a>(props: impl IntoIterator<Item = &'a AtomicProp>) -> Option<Self> {
        let mut set = Self::anywhere();
        for p in props {
            if p.negated {
                set.outside.push(p.region.bounds);
            } else {
                set.inside = Some(match set.inside {
                    None => p.region.bounds,
                    Some(b) => b.intersection(&p.region.bounds)?,
                });
            }
        }
        Some(set)
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.inside.is_none_or(|b| b.contains(p)) && self.outside.iter().all(|b| !b.contains(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("rejection sampling gave up after {MAX_REJECTIONS} draws")]
pub struct SampleError;

/// Draws `(position, time)`. With probability `delta_tar` the position is
/// uniform over the goal set, otherwise uniform over `P \ O`. Time is uniform
/// over `time_range`.
pub fn sample<R: Rng + ?Sized>(
    ws: &Workspace,
    goal: &GoalSet,
    time_range: (f64, f64),
    delta_tar: f64,
    rng: &mut R,
) -> Result<(Point2, f64), SampleError> {
    let toward_goal = rng.gen::<f64>() < delta_tar;
    let frame = match (toward_goal, goal.inside) {
        (true, Some(b)) => b.intersection(&ws.bounds).ok_or(SampleError)?,
        _ => ws.bounds,
    };
    for _ in 0..MAX_REJECTIONS {
        let p = Point2::new(uniform(rng, frame.min.x, frame.max.x), uniform(rng, frame.min.y, frame.max.y));
        if ws.point_in_obstacle(p) || (toward_goal && !goal.contains(p)) {
            continue;
        }
        return Ok((p, uniform(rng, time_range.0, time_range.1)));
    }
    Err(SampleError)
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        lo + (hi - lo) * rng.gen::<f64>()
    } else {
        lo
    }
}

/// Position-nearest vertex among those strictly earlier than `t`; ties go to
/// the lowest index.
pub fn nearest(tree: &Tree, p: Point2, t: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in tree.vertices.iter().enumerate() {
        if v.time >= t {
            continue;
        }
        let d = v.pos.distance(p);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i)
}

/// Moves at most `step` toward the sample and at most `delta_t` forward in
/// time.
pub fn steer(near: &StVertex, p_samp: Point2, t_samp: f64, step: f64, delta_t: f64) -> (Point2, f64) {
    let d = near.pos.distance(p_samp);
    let p = if d <= step {
        p_samp
    } else {
        near.pos + (p_samp - near.pos) * (step / d)
    };
    (p, (near.time + delta_t).min(t_samp))
}

/// Closed region to stay out of during `[from, to]` seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedAvoid {
    pub region: Aabb,
    pub from: f64,
    pub to: f64,
}

/// Edge admissibility.
#[derive(Debug, Clone, Copy)]
pub struct EdgeRules<'a> {
    pub ws: &'a Workspace,
    pub avoid: &'a [TimedAvoid],
    pub max_speed: f64,
}

impl EdgeRules<'_> {
    const TIME_SLACK: f64 = 1e-9;

    pub fn edge_ok(&self, a: Point2, ta: f64, b: Point2, tb: f64) -> bool {
        if tb <= ta || !self.ws.bounds.contains(b) || self.ws.point_in_obstacle(b) {
            return false;
        }
        if a.distance(b) > self.max_speed * (tb - ta) {
            return false;
        }
        if self.ws.segment_collides(a, b) {
            return false;
        }
        self.avoid.iter().all(|z| {
            let overlaps = ta <= z.to + Self::TIME_SLACK && tb >= z.from - Self::TIME_SLACK;
            !overlaps || !z.region.segment_hits_closed(a, b)
        })
    }

    /// Standing still at `p` over `[ta, tb]`.
    pub fn hold_ok(&self, p: Point2, ta: f64, tb: f64) -> bool {
        tb <= ta
            || self.avoid.iter().all(|z| {
                let overlaps = ta <= z.to + Self::TIME_SLACK && tb >= z.from - Self::TIME_SLACK;
                !overlaps || !z.region.contains(p)
            })
    }
}

/// What happens after the goal is first reached at tick `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hold {
    /// Stay for this many ticks.
    For(i64),
    /// Stay until this tick.
    Until(i64),
}

/// Reach `set` so that the first grid tick at or after arrival lies in
/// `first_tick`, then stay put according to `hold`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeGoal {
    pub set: GoalSet,
    pub first_tick: TickInterval,
    pub hold: Hold,
}

impl TreeGoal {
    pub fn hold_end(&self, first: i64) -> i64 {
        match self.hold {
            Hold::For(d) => first + d,
            Hold::Until(k) => k.max(first),
        }
    }
}

/// First grid tick at or after `t`.
pub fn ceil_tick(t: f64, tau: f64) -> i64 {
    math::ceil(t / tau - 1e-9) as i64
}

pub fn tick_time(k: i64, tau: f64) -> f64 {
    k as f64 * tau
}

/// Tuning knobs used by [`gen_tree`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    pub delta_tar: f64,
    pub step: f64,
    pub delta_t: f64,
    pub max_iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("no goal vertex within the iteration budget")]
    Exhausted,
    #[error(transparent)]
    Sampling(#[from] SampleError),
}

/// A root-to-goal chain and the first tick spent inside the goal.
#[derive(Debug, Clone, PartialEq)]
pub struct TreePath {
    pub vertices: Vec<StVertex>,
    pub first_tick: i64,
}

/// Grows a tree from `root` until a vertex satisfies `goal`. Times are
/// sampled in `time_range`.
pub fn gen_tree<R: Rng + ?Sized>(
    root: StVertex,
    goal: &TreeGoal,
    rules: &EdgeRules<'_>,
    time_range: (f64, f64),
    tau: f64,
    params: &TreeParams,
    rng: &mut R,
) -> Result<TreePath, TreeError> {
    let mut tree = Tree::new(StVertex::root(root.pos, root.time));
    if let Some(first) = goal_tick(&tree.vertices[0], goal, rules, tau) {
        return Ok(TreePath { vertices: tree.path_to(0), first_tick: first });
    }
    let mut iters = 0;
    let mut draws = 0;
    while iters < params.max_iters && draws < 20 * params.max_iters {
        draws += 1;
        let (p_samp, t_samp) = sample(rules.ws, &goal.set, time_range, params.delta_tar, rng)?;
        let Some(near_idx) = nearest(&tree, p_samp, t_samp) else {
            continue;
        };
        iters += 1;
        let near = tree.vertices[near_idx];
        let (p_new, t_new) = steer(&near, p_samp, t_samp, params.step, params.delta_t);
        if !rules.edge_ok(near.pos, near.time, p_new, t_new) {
            continue;
        }
        let idx = tree.push(StVertex { pos: p_new, time: t_new, parent: Some(near_idx) });
        if let Some(first) = goal_tick(&tree.vertices[idx], goal, rules, tau) {
            return Ok(TreePath { vertices: tree.path_to(idx), first_tick: first });
        }
    }
    Err(TreeError::Exhausted)
}

fn goal_tick(v: &StVertex, goal: &TreeGoal, rules: &EdgeRules<'_>, tau: f64) -> Option<i64> {
    let first = ceil_tick(v.time, tau);
    if !goal.first_tick.contains(first) || !goal.set.contains(v.pos) {
        return None;
    }
    let end = tick_time(goal.hold_end(first), tau);
    rules.hold_ok(v.pos, v.time, end).then_some(first)
}
