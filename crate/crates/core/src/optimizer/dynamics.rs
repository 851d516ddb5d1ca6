use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::Point2;
use crate::math;

/// Discrete-time model `x' = f(x, u)` with analytic Jacobians.
pub trait DynamicsModel {
    fn state_dim(&self) -> usize;
    fn input_dim(&self) -> usize;
    /// Sampling period in seconds.
    fn tau(&self) -> f64;
    /// State components holding the planar position.
    fn position_indices(&self) -> (usize, usize) {
        (0, 1)
    }
    fn step(&self, x: &[f64], u: &[f64], next: &mut [f64]);
    /// Row-major `df/dx` (`n x n`) and `df/du` (`n x m`).
    fn jacobians(&self, x: &[f64], u: &[f64], jx: &mut [f64], ju: &mut [f64]);
    /// Input box `U` as (lower, upper).
    fn input_bounds(&self) -> (Vec<f64>, Vec<f64>);
    /// State box for the non-position components; position bounds come from
    /// the corridor.
    fn state_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.state_dim();
        (vec![f64::NEG_INFINITY; n], vec![f64::INFINITY; n])
    }
    /// States and inputs that roughly follow `positions`, starting at `x0`.
    fn warm_start(&self, x0: &[f64], positions: &[Point2]) -> (Vec<f64>, Vec<f64>);
}

/// Planar unicycle, state `(x, y, theta)`, input `(v, omega)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unicycle {
    pub tau: f64,
    pub v_max: f64,
    pub omega_max: f64,
}

impl Unicycle {
    pub fn new(tau: f64, v_max: f64, omega_max: f64) -> Self {
        Self { tau, v_max, omega_max }
    }
}

impl DynamicsModel for Unicycle {
    fn state_dim(&self) -> usize {
        3
    }

    fn input_dim(&self) -> usize {
        2
    }

    fn tau(&self) -> f64 {
        self.tau
    }

    fn step(&self, x: &[f64], u: &[f64], next: &mut [f64]) {
        let (th, v, w) = (x[2], u[0], u[1]);
        next[0] = x[0] + v * math::cos(th) * self.tau;
        next[1] = x[1] + v * math::sin(th) * self.tau;
        next[2] = th + w * self.tau;
    }

    fn jacobians(&self, x: &[f64], u: &[f64], jx: &mut [f64], ju: &mut [f64]) {
        let (c, s) = (math::cos(x[2]), math::sin(x[2]));
        let (v, t) = (u[0], self.tau);
        jx.copy_from_slice(&[1.0, 0.0, -v * s * t, 0.0, 1.0, v * c * t, 0.0, 0.0, 1.0]);
        ju.copy_from_slice(&[c * t, 0.0, s * t, 0.0, 0.0, t]);
    }

    fn input_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        (vec![-self.v_max, -self.omega_max], vec![self.v_max, self.omega_max])
    }

    /// Headings point along each step (or against it when that needs less
    /// turning); inputs come from inverse kinematics, clamped to `U`.
    fn warm_start(&self, x0: &[f64], positions: &[Point2]) -> (Vec<f64>, Vec<f64>) {
        let k = positions.len().saturating_sub(1);
        let mut headings = Vec::with_capacity(k + 1);
        headings.push(x0[2]);
        for i in 0..k {
            let prev = headings[i];
            let d = positions[i + 1] - positions[i];
            let th = if d.norm() < 1e-9 {
                prev
            } else {
                let fwd = math::atan2(d.y, d.x);
                let a = prev + math::wrap_angle(fwd - prev);
                let b = prev + math::wrap_angle(fwd + core::f64::consts::PI - prev);
                if math::abs(a - prev) <= math::abs(b - prev) {
                    a
                } else {
                    b
                }
            };
            headings.push(th);
        }
        let mut states = Vec::with_capacity(3 * (k + 1));
        for (i, p) in positions.iter().enumerate() {
            states.extend_from_slice(&[p.x, p.y, headings[i]]);
        }
        states[..3].copy_from_slice(&x0[..3]);
        let mut inputs = Vec::with_capacity(2 * k);
        for i in 0..k {
            let d = positions[i + 1] - positions[i];
            let th = headings[i];
            let v = (d.x * math::cos(th) + d.y * math::sin(th)) / self.tau;
            let w = (headings[i + 1] - th) / self.tau;
            inputs.push(v.clamp(-self.v_max, self.v_max));
            inputs.push(w.clamp(-self.omega_max, self.omega_max));
        }
        (states, inputs)
    }
}

/// `p' = p + tau * u` in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleIntegrator {
    pub tau: f64,
    pub u_max: f64,
}

impl DynamicsModel for SingleIntegrator {
    fn state_dim(&self) -> usize {
        2
    }

    fn input_dim(&self) -> usize {
        2
    }

    fn tau(&self) -> f64 {
        self.tau
    }

    fn step(&self, x: &[f64], u: &[f64], next: &mut [f64]) {
        next[0] = x[0] + self.tau * u[0];
        next[1] = x[1] + self.tau * u[1];
    }

    fn jacobians(&self, _x: &[f64], _u: &[f64], jx: &mut [f64], ju: &mut [f64]) {
        jx.copy_from_slice(&[1.0, 0.0, 0.0, 1.0]);
        ju.copy_from_slice(&[self.tau, 0.0, 0.0, self.tau]);
    }

    fn input_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        (vec![-self.u_max; 2], vec![self.u_max; 2])
    }

    fn warm_start(&self, x0: &[f64], positions: &[Point2]) -> (Vec<f64>, Vec<f64>) {
        let mut states: Vec<f64> = positions.iter().flat_map(|p| [p.x, p.y]).collect();
        states[..2].copy_from_slice(&x0[..2]);
        let inputs = positions
            .windows(2)
            .flat_map(|w| {
                let d = (w[1] - w[0]) * (1.0 / self.tau);
                [d.x.clamp(-self.u_max, self.u_max), d.y.clamp(-self.u_max, self.u_max)]
            })
            .collect();
        (states, inputs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum RolloutError {
    #[error("input {step} lies outside the input box")]
    InputOutOfBounds { step: usize },
    #[error("expected a multiple of the input dimension, got {0} values")]
    BadLength(usize),
}

/// Applies `inputs` open loop from `x0`; returns all `K + 1` states.
pub fn rollout<M: DynamicsModel + ?Sized>(model: &M, x0: &[f64], inputs: &[f64]) -> Result<Vec<f64>, RolloutError> {
    let (n, m) = (model.state_dim(), model.input_dim());
    if !inputs.len().is_multiple_of(m) {
        return Err(RolloutError::BadLength(inputs.len()));
    }
    let (lo, hi) = model.input_bounds();
    let k = inputs.len() / m;
    let mut states = vec![0.0; n * (k + 1)];
    states[..n].copy_from_slice(&x0[..n]);
    for step in 0..k {
        let u = &inputs[step * m..(step + 1) * m];
        if u.iter().zip(lo.iter().zip(&hi)).any(|(&v, (&l, &h))| v < l || v > h) {
            return Err(RolloutError::InputOutOfBounds { step });
        }
        let (done, rest) = states.split_at_mut((step + 1) * n);
        model.step(&done[step * n..], u, &mut rest[..n]);
    }
    Ok(states)
}
