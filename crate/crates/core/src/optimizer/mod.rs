//! Direct-transcription trajectory optimization.

pub mod dynamics;
pub mod nlp;
pub mod solver;

pub use dynamics::{rollout, DynamicsModel, RolloutError, SingleIntegrator, Unicycle};
pub use nlp::{build_nlp, check_constraints, BuildError, NlpProblem, ViolationReport, Weights, DEFAULT_MARGIN};
pub use solver::{solve_nlp, NlpSolution, SolveError, SolverLogEntry, SolverOptions};
