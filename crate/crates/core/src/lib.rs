//! Planning and control for Signal Temporal Logic tasks.
//!
//! The pipeline has four stages, each living in its own module:
//!
//! 1. [`decompose`] splits a conjunctive STL task into local tasks along the
//!    timeline.
//! 2. [`planner`] grows goal-biased RRTs in position x time space to produce a
//!    uniformly sampled waypoint sequence plus the satisfaction pairs that
//!    certify each local sub-task ([`satisfaction`]).
//! 3. [`corridor`] wraps every waypoint in an obstacle-free axis-aligned box.
//! 4. [`optimizer`] solves a direct-transcription nonlinear program whose
//!    constraints are the dynamics, the corridor and the satisfaction pairs.
//!
//! [`pipeline`] chains the stages and re-verifies the result with the
//! brute-force semantics in [`stl::oracle`].
//!
//! The crate is `no_std` and only needs an allocator.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod corridor;
pub mod decompose;
pub mod geometry;
pub(crate) mod math;
pub mod optimizer;
pub mod pipeline;
pub mod planner;
pub mod satisfaction;
pub mod stl;

pub use corridor::{construct_safe_corridor, safe_cor, verify_corridor, CorridorError, SafeCorridor};
pub use decompose::{decompose, Decomposition, DisjunctiveFSet, LocalTask};
pub use geometry::{Aabb, Point2, Region, Workspace};
pub use pipeline::{run_pipeline, PipelineFailure, PipelineOutput, Scenario, Stage};
pub use planner::{plan_global, GlobalPlan, PlannerError, PlannerParams};
pub use satisfaction::{stl_sat, SatisfactionPair, SatisfactionSet};
pub use stl::{parse_formula, AtomicProp, Formula, PointSequence, SubTask, TemporalKind, TickInterval};
