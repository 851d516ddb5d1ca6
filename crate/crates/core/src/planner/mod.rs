//! Spatio-temporal RRT planning of timed waypoints.
//!
//! Each local task is planned on its own UATI: targets are reached one after
//! another with a fresh tree, the resulting polyline is sampled on the tick
//! grid, and every local sub-task is re-checked before the attempt is
//! accepted. `G` avoidance sub-tasks become temporary obstacles instead of
//! targets.

mod discretize;
mod local;
pub mod rrt;

use alloc::string::String;
use alloc::vec::Vec;

pub use discretize::{con, ConError};
pub use local::{plan_global, plan_local};
pub(crate) use local::derive_seed;
pub use rrt::{gen_tree, nearest, sample, steer, StVertex};

use crate::decompose::LocalTask;
use crate::satisfaction::SatisfactionSet;
use crate::stl::{PointSequence, TickInterval};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerParams {
    /// Probability of sampling inside the current target.
    pub delta_tar: f64,
    /// Tree step length in meters.
    pub step: f64,
    /// Largest time increment of one edge, seconds.
    pub delta_t: f64,
    /// How far past the end of the local UATI times are sampled, seconds.
    pub lambda1: f64,
    pub max_iters_per_tree: usize,
    pub max_restarts: usize,
    /// Edges faster than this are rejected, m/s.
    pub max_speed: f64,
    pub seed: u64,
}

impl PlannerParams {
    /// Defaults scaled to the sampling period.
    pub fn with_tau(tau: f64) -> Self {
        Self {
            delta_tar: 0.3,
            step: 0.5,
            delta_t: 5.0 * tau,
            lambda1: 2.0 * tau,
            max_iters_per_tree: 5_000,
            max_restarts: 50,
            max_speed: 4.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), PlannerError> {
        let ok = (0.0..=1.0).contains(&self.delta_tar)
            && self.step > 0.0
            && self.delta_t > 0.0
            && self.lambda1 >= 0.0
            && self.max_speed > 0.0
            && self.max_iters_per_tree > 0;
        if ok {
            Ok(())
        } else {
            Err(PlannerError::BadParams)
        }
    }
}

impl Default for PlannerParams {
    fn default() -> Self {
        Self::with_tau(0.1)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlannerError {
    #[error("planner parameters out of range")]
    BadParams,
    #[error("start position ({x}, {y}) is not in free space")]
    StartBlocked { x: f64, y: f64 },
    #[error("local task {} on ticks {uati} failed {attempts} attempts; `{culprit}` failed most often ({failures} times)", local + 1)]
    LocalFailed {
        local: usize,
        uati: TickInterval,
        culprit: String,
        failures: usize,
        attempts: usize,
    },
}

/// Global waypoints over `[0, horizon]` and the pairs certifying them.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalPlan {
    pub waypoints: PointSequence,
    pub pairs: SatisfactionSet,
    /// The local tasks as planned, with resolved disjunctive pieces added.
    pub local_tasks: Vec<LocalTask>,
    /// For each disjunctive set, the index of the piece relied upon.
    pub resolutions: Vec<usize>,
}
