//! Direct transcription: every state and input is a decision variable, the
//! dynamics are equality constraints, and all position requirements at a
//! step are intersected into one box.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::dynamics::DynamicsModel;
use crate::corridor::SafeCorridor;
use crate::geometry::{Aabb, Point2};
use crate::satisfaction::SatisfactionSet;
use crate::stl::{AtomicProp, PointSequence};

/// Symmetric positive definite weights, row-major. `q` weighs input
/// differences, `r` state differences.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    pub q: Vec<f64>,
    pub r: Vec<f64>,
}

impl Weights {
    pub fn diagonal(q: &[f64], r: &[f64]) -> Self {
        Self { q: diag(q), r: diag(r) }
    }

    /// `Q = I`, `R = diag(1, 1, 0.1)`.
    pub fn unicycle_default() -> Self {
        Self::diagonal(&[1.0, 1.0], &[1.0, 1.0, 0.1])
    }

    pub fn validate(&self, input_dim: usize, state_dim: usize) -> bool {
        is_spd(&self.q, input_dim) && is_spd(&self.r, state_dim)
    }
}

fn diag(d: &[f64]) -> Vec<f64> {
    let n = d.len();
    let mut m = vec![0.0; n * n];
    for (i, &v) in d.iter().enumerate() {
        m[i * n + i] = v;
    }
    m
}

fn is_spd(a: &[f64], n: usize) -> bool {
    if a.len() != n * n {
        return false;
    }
    for i in 0..n {
        for j in 0..i {
            if (a[i * n + j] - a[j * n + i]).abs() > 1e-12 * (1.0 + a[i * n + j].abs()) {
                return false;
            }
        }
    }
    // Cholesky without storing the factor beyond the lower triangle.
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return false;
                }
                l[i * n + i] = crate::math::sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BuildError {
    #[error("plan has {waypoints} waypoints but the corridor has {boxes} boxes")]
    LengthMismatch { waypoints: usize, boxes: usize },
    #[error("initial state does not sit on the first waypoint")]
    InitialMismatch,
    #[error("pair at tick {tick} lies outside the horizon")]
    PairOffGrid { tick: i64 },
    #[error("weights are not symmetric positive definite")]
    BadWeights,
    #[error("step {step}: corridor box and `{what}` do not intersect")]
    EmptyIntersection { step: usize, what: String },
    #[error("initial state violates `{what}`")]
    InitialViolates { what: String },
}

/// Bound-constrained problem with dynamics equalities.
///
/// Variables are stacked as `[x_0, ..., x_K, u_0, ..., u_{K-1}]`.
#[derive(Debug, Clone)]
pub struct NlpProblem<M> {
    pub model: M,
    pub steps: usize,
    pub x0: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub weights: Weights,
    /// Position box per step after intersecting every requirement.
    pub position_boxes: Vec<Aabb>,
}

impl<M: DynamicsModel> NlpProblem<M> {
    /// Problem with explicit position boxes, one per state (the first one is
    /// ignored because `x_0` is fixed).
    pub fn new(model: M, x0: &[f64], position_boxes: Vec<Aabb>, weights: Weights) -> Self {
        let (n, m) = (model.state_dim(), model.input_dim());
        let steps = position_boxes.len() - 1;
        let (slo, shi) = model.state_bounds();
        let (ulo, uhi) = model.input_bounds();
        let (px, py) = model.position_indices();
        let total = n * (steps + 1) + m * steps;
        let mut lower = vec![0.0; total];
        let mut upper = vec![0.0; total];
        for (k, b) in position_boxes.iter().enumerate() {
            let base = k * n;
            lower[base..base + n].copy_from_slice(&slo);
            upper[base..base + n].copy_from_slice(&shi);
            lower[base + px] = lower[base + px].max(b.min.x);
            upper[base + px] = upper[base + px].min(b.max.x);
            lower[base + py] = lower[base + py].max(b.min.y);
            upper[base + py] = upper[base + py].min(b.max.y);
        }
        lower[..n].copy_from_slice(&x0[..n]);
        upper[..n].copy_from_slice(&x0[..n]);
        let ubase = n * (steps + 1);
        for k in 0..steps {
            lower[ubase + k * m..ubase + (k + 1) * m].copy_from_slice(&ulo);
            upper[ubase + k * m..ubase + (k + 1) * m].copy_from_slice(&uhi);
        }
        Self { model, steps, x0: x0[..n].to_vec(), lower, upper, weights, position_boxes }
    }

    pub fn num_vars(&self) -> usize {
        self.model.state_dim() * (self.steps + 1) + self.model.input_dim() * self.steps
    }

    pub fn num_residuals(&self) -> usize {
        self.model.state_dim() * self.steps
    }

    fn input_offset(&self) -> usize {
        self.model.state_dim() * (self.steps + 1)
    }

    pub fn split<'z>(&self, z: &'z [f64]) -> (&'z [f64], &'z [f64]) {
        z.split_at(self.input_offset())
    }

    pub fn stack(&self, states: &[f64], inputs: &[f64]) -> Vec<f64> {
        let mut z = Vec::with_capacity(self.num_vars());
        z.extend_from_slice(states);
        z.extend_from_slice(inputs);
        z
    }

    /// `sum (du)' Q (du) + sum (dx)' R (dx)`.
    pub fn cost(&self, z: &[f64]) -> f64 {
        let (n, m) = (self.model.state_dim(), self.model.input_dim());
        let (xs, us) = self.split(z);
        let mut c = 0.0;
        for w in us.chunks(m).collect::<Vec<_>>().windows(2) {
            c += quad(&self.weights.q, w[0], w[1]);
        }
        for w in xs.chunks(n).collect::<Vec<_>>().windows(2) {
            c += quad(&self.weights.r, w[0], w[1]);
        }
        c
    }

    pub fn cost_gradient(&self, z: &[f64], g: &mut [f64]) {
        let (n, m) = (self.model.state_dim(), self.model.input_dim());
        g.iter_mut().for_each(|v| *v = 0.0);
        let off = self.input_offset();
        let mut d = vec![0.0; n.max(m)];
        for k in 0..self.steps {
            for i in 0..n {
                d[i] = z[(k + 1) * n + i] - z[k * n + i];
            }
            for i in 0..n {
                let w: f64 = (0..n).map(|j| 2.0 * self.weights.r[i * n + j] * d[j]).sum();
                g[(k + 1) * n + i] += w;
                g[k * n + i] -= w;
            }
        }
        for k in 0..self.steps.saturating_sub(1) {
            for i in 0..m {
                d[i] = z[off + (k + 1) * m + i] - z[off + k * m + i];
            }
            for i in 0..m {
                let w: f64 = (0..m).map(|j| 2.0 * self.weights.q[i * m + j] * d[j]).sum();
                g[off + (k + 1) * m + i] += w;
                g[off + k * m + i] -= w;
            }
        }
    }

    /// `c_k = f(x_k, u_k) - x_{k+1}`, stacked.
    pub fn residuals(&self, z: &[f64], c: &mut [f64]) {
        let (n, m) = (self.model.state_dim(), self.model.input_dim());
        let off = self.input_offset();
        for k in 0..self.steps {
            let out = &mut c[k * n..(k + 1) * n];
            self.model.step(&z[k * n..(k + 1) * n], &z[off + k * m..off + (k + 1) * m], out);
            for i in 0..n {
                out[i] -= z[(k + 1) * n + i];
            }
        }
    }

    /// Adds `J(z)' w` to `g`.
    pub fn residual_jt_times(&self, z: &[f64], w: &[f64], g: &mut [f64]) {
        let (n, m) = (self.model.state_dim(), self.model.input_dim());
        let off = self.input_offset();
        let mut jx = vec![0.0; n * n];
        let mut ju = vec![0.0; n * m];
        for k in 0..self.steps {
            let wk = &w[k * n..(k + 1) * n];
            self.model.jacobians(&z[k * n..(k + 1) * n], &z[off + k * m..off + (k + 1) * m], &mut jx, &mut ju);
            for j in 0..n {
                g[k * n + j] += (0..n).map(|i| jx[i * n + j] * wk[i]).sum::<f64>();
            }
            for j in 0..m {
                g[off + k * m + j] += (0..n).map(|i| ju[i * m + j] * wk[i]).sum::<f64>();
            }
            for i in 0..n {
                g[(k + 1) * n + i] -= wk[i];
            }
        }
    }

    /// Gradient of a single residual component, as `(variable, value)` pairs.
    pub fn residual_row_gradient(&self, z: &[f64], row: usize) -> Vec<(usize, f64)> {
        let (n, m) = (self.model.state_dim(), self.model.input_dim());
        let off = self.input_offset();
        let (k, i) = (row / n, row % n);
        let mut jx = vec![0.0; n * n];
        let mut ju = vec![0.0; n * m];
        self.model.jacobians(&z[k * n..(k + 1) * n], &z[off + k * m..off + (k + 1) * m], &mut jx, &mut ju);
        let mut out: Vec<(usize, f64)> = (0..n).map(|j| (k * n + j, jx[i * n + j])).collect();
        out.extend((0..m).map(|j| (off + k * m + j, ju[i * m + j])));
        out.push(((k + 1) * n + i, -1.0));
        out
    }

    /// Planar positions of the state part of `z` (or of a bare state vector).
    pub fn positions(&self, states: &[f64]) -> Vec<Point2> {
        let n = self.model.state_dim();
        let (px, py) = self.model.position_indices();
        states.chunks(n).take(self.steps + 1).map(|s| Point2::new(s[px], s[py])).collect()
    }
}

fn quad(a: &[f64], x0: &[f64], x1: &[f64]) -> f64 {
    let n = x0.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += (x1[i] - x0[i]) * a[i * n + j] * (x1[j] - x0[j]);
        }
    }
    s
}

/// Violations re-evaluated from scratch, without the solver's buffers.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ViolationReport {
    pub dynamics: f64,
    pub bounds: f64,
}

impl ViolationReport {
    pub fn max(&self) -> f64 {
        self.dynamics.max(self.bounds)
    }
}

/// Independent constraint check of `(states, inputs)` against `problem`.
pub fn check_constraints<M: DynamicsModel>(problem: &NlpProblem<M>, states: &[f64], inputs: &[f64]) -> ViolationReport {
    let (n, m) = (problem.model.state_dim(), problem.model.input_dim());
    let mut report = ViolationReport::default();
    let mut next = vec![0.0; n];
    for k in 0..problem.steps {
        let x = &states[k * n..(k + 1) * n];
        let u = &inputs[k * m..(k + 1) * m];
        problem.model.step(x, u, &mut next);
        for i in 0..n {
            report.dynamics = report.dynamics.max((next[i] - states[(k + 1) * n + i]).abs());
        }
    }
    for (i, v) in states.iter().chain(inputs).enumerate() {
        let below = problem.lower[i] - v;
        let above = v - problem.upper[i];
        report.bounds = report.bounds.max(below).max(above);
    }
    report
}

/// Margin kept from region and corridor faces so that round-off in the
/// solution cannot flip a membership test.
pub const DEFAULT_MARGIN: f64 = 1e-3;

/// Turns a global plan, its corridor and its pairs into an NLP.
///
/// At each step the corridor box, the regions of every pair at that tick
/// and, at a corridor change, the next box are intersected. A negated region
/// is replaced by the half-plane on the side where the waypoint has the most
/// clearance.
pub fn build_nlp<M: DynamicsModel>(
    waypoints: &PointSequence,
    pairs: &SatisfactionSet,
    corridor: &SafeCorridor,
    model: M,
    x0: &[f64],
    weights: Weights,
    margin: f64,
) -> Result<NlpProblem<M>, BuildError> {
    let k_len = waypoints.len();
    if corridor.boxes.len() != k_len || k_len < 2 {
        return Err(BuildError::LengthMismatch { waypoints: k_len, boxes: corridor.boxes.len() });
    }
    if !weights.validate(model.input_dim(), model.state_dim()) {
        return Err(BuildError::BadWeights);
    }
    let (px, py) = model.position_indices();
    let p0 = Point2::new(x0[px], x0[py]);
    if p0.distance(waypoints.points[0]) > 1e-9 {
        return Err(BuildError::InitialMismatch);
    }
    let mut boxes: Vec<Aabb> = corridor.boxes.iter().map(|b| b.shrink(margin)).collect();
    for (k, w) in corridor.boxes.windows(2).enumerate() {
        let (cur, next) = (w[0], w[1]);
        if cur != next && next.contains(waypoints.points[k]) {
            boxes[k] = boxes[k]
                .intersection(&next.shrink(margin))
                .ok_or_else(|| BuildError::EmptyIntersection { step: k, what: String::from("next corridor box") })?;
        }
    }
    for pair in pairs {
        let tick = pair.tick - waypoints.start;
        if tick < 0 || tick as usize >= k_len {
            return Err(BuildError::PairOffGrid { tick: pair.tick });
        }
        let k = tick as usize;
        if k == 0 {
            if !pair.prop.holds_at(p0, &Aabb::unbounded()) {
                return Err(BuildError::InitialViolates { what: pair.prop.label() });
            }
            continue;
        }
        let req = requirement_box(&pair.prop, waypoints.points[k], margin);
        boxes[k] = boxes[k]
            .intersection(&req)
            .ok_or_else(|| BuildError::EmptyIntersection { step: k, what: pair.prop.label() })?;
    }
    Ok(NlpProblem::new(model, x0, boxes, weights))
}

fn requirement_box(prop: &AtomicProp, waypoint: Point2, margin: f64) -> Aabb {
    let r = prop.region.bounds;
    if !prop.negated {
        return r.shrink(margin);
    }
    let inf = f64::INFINITY;
    let sides = [
        (r.min.x - waypoint.x, Aabb::new(-inf, r.min.x - margin, -inf, inf)),
        (waypoint.x - r.max.x, Aabb::new(r.max.x + margin, inf, -inf, inf)),
        (r.min.y - waypoint.y, Aabb::new(-inf, inf, -inf, r.min.y - margin)),
        (waypoint.y - r.max.y, Aabb::new(-inf, inf, r.max.y + margin, inf)),
    ];
    let mut best = sides[0];
    for s in &sides[1..] {
        if s.0 > best.0 {
            best = *s;
        }
    }
    best.1
}
