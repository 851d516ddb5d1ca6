//! End-to-end run: decompose, plan, corridor, optimize, verify.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::corridor::{construct_safe_corridor, verify_corridor, SafeCorridor};
use crate::decompose::{decompose, Decomposition};
use crate::geometry::{Point2, Workspace};
use crate::optimizer::{build_nlp, rollout, solve_nlp, DynamicsModel, NlpSolution, SolveError, SolverOptions, Unicycle, Weights, DEFAULT_MARGIN};
use crate::planner::{derive_seed, plan_global, GlobalPlan, PlannerParams};
use crate::stl::{oracle_satisfies_formula, Formula, PointSequence};

/// Replanning rounds after the first attempt.
pub const MAX_REPLANS: usize = 3;

/// Largest gap tolerated between the solver states and an open-loop rollout
/// of the solver inputs.
pub const ROLLOUT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub workspace: Workspace,
    pub formula: Formula,
    /// `(x, y, theta)`.
    pub x0: [f64; 3],
    pub model: Unicycle,
    pub planner: PlannerParams,
    pub solver: SolverOptions,
    pub weights: Weights,
    pub margin: f64,
}

impl Scenario {
    pub fn new(workspace: Workspace, formula: Formula, x0: [f64; 3], model: Unicycle) -> Self {
        let planner = PlannerParams::with_tau(formula.tau);
        Self {
            workspace,
            formula,
            x0,
            model,
            planner,
            solver: SolverOptions::default(),
            weights: Weights::unicycle_default(),
            margin: DEFAULT_MARGIN,
        }
    }

    pub fn start(&self) -> Point2 {
        Point2::new(self.x0[0], self.x0[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Decompose,
    Plan,
    Corridor,
    Build,
    Solve,
    Verify,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Decompose => "decompose",
            Stage::Plan => "plan",
            Stage::Corridor => "corridor",
            Stage::Build => "build_nlp",
            Stage::Solve => "solve",
            Stage::Verify => "verify",
        })
    }
}

/// Everything a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub decomposition: Decomposition,
    pub plan: GlobalPlan,
    pub corridor: SafeCorridor,
    pub solution: NlpSolution,
    /// Positions of the open-loop rollout of the solved inputs.
    pub trajectory: PointSequence,
    /// Full rolled-out states, `(x, y, theta)` per tick.
    pub states: Vec<f64>,
    /// Oracle verdict on `trajectory`.
    pub satisfied: bool,
    pub collision_free: bool,
    pub inputs_in_bounds: bool,
    pub length: f64,
    /// Planner seed of the attempt that produced this output.
    pub seed: u64,
    pub attempts: usize,
}

/// A stage that failed on every attempt, with whatever the last attempt
/// got through.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineFailure {
    pub stage: Stage,
    pub message: String,
    pub attempts: usize,
    pub decomposition: Option<Decomposition>,
    pub plan: Option<GlobalPlan>,
    pub corridor: Option<SafeCorridor>,
    pub solution: Option<Box<NlpSolution>>,
}

impl fmt::Display for PipelineFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} stage failed after {} attempt(s): {}", self.stage, self.attempts, self.message)
    }
}

impl PipelineFailure {
    fn new(stage: Stage, message: String, attempts: usize, decomposition: &Decomposition) -> Self {
        Self {
            stage,
            message,
            attempts,
            decomposition: Some(decomposition.clone()),
            plan: None,
            corridor: None,
            solution: None,
        }
    }
}

/// Planner seed for replanning round `round`; round 0 keeps the base seed.
pub fn replan_seed(base: u64, round: usize) -> u64 {
    if round == 0 {
        base
    } else {
        derive_seed(base, u64::MAX, round as u64)
    }
}

/// Runs every stage. The planner is rerun with a fresh seed, at most
/// [`MAX_REPLANS`] times, when a later stage fails or the result does not
/// verify.
#[allow(clippy::result_large_err)]
pub fn run_pipeline(scenario: &Scenario) -> Result<PipelineOutput, PipelineFailure> {
    let decomposition = decompose(&scenario.formula);
    if !scenario.workspace.is_free(scenario.start()) {
        let msg = format!("start position ({}, {}) is not in free space", scenario.x0[0], scenario.x0[1]);
        return Err(PipelineFailure::new(Stage::Plan, msg, 0, &decomposition));
    }
    if scenario.model.tau != scenario.formula.tau {
        return Err(PipelineFailure {
            stage: Stage::Decompose,
            message: format!("model period {} s differs from formula period {} s", scenario.model.tau, scenario.formula.tau),
            attempts: 0,
            decomposition: Some(decomposition),
            plan: None,
            corridor: None,
            solution: None,
        });
    }
    let mut last_failure = None;
    let mut unsatisfied = None;
    for round in 0..=MAX_REPLANS {
        let attempts = round + 1;
        let mut params = scenario.planner;
        params.seed = replan_seed(scenario.planner.seed, round);
        match attempt(scenario, &decomposition, &params) {
            Ok(out) => {
                let mut out = *out;
                out.attempts = attempts;
                if out.satisfied && out.collision_free && out.inputs_in_bounds {
                    return Ok(out);
                }
                unsatisfied = Some(out);
            }
            Err(mut f) => {
                f.attempts = attempts;
                last_failure = Some(f);
            }
        }
    }
    if let Some(out) = unsatisfied {
        return Ok(out);
    }
    Err(last_failure.expect("at least one attempt ran"))
}

#[allow(clippy::result_large_err)]
fn attempt(scenario: &Scenario, decomposition: &Decomposition, params: &PlannerParams) -> Result<Box<PipelineOutput>, PipelineFailure> {
    let ws = &scenario.workspace;
    let fail = |stage, message: String| PipelineFailure::new(stage, message, 0, decomposition);

    let plan = plan_global(decomposition, scenario.start(), ws, params).map_err(|e| fail(Stage::Plan, format!("{e}")))?;

    let corridor = construct_safe_corridor(&plan.waypoints, ws).map_err(|e| PipelineFailure {
        plan: Some(plan.clone()),
        ..fail(Stage::Corridor, format!("{e}"))
    })?;
    if let Err(v) = verify_corridor(&corridor, &plan.waypoints, ws) {
        return Err(PipelineFailure {
            plan: Some(plan.clone()),
            corridor: Some(corridor.clone()),
            ..fail(Stage::Corridor, format!("{v}"))
        });
    }
    let with_corridor = |stage, message: String| PipelineFailure {
        plan: Some(plan.clone()),
        corridor: Some(corridor.clone()),
        ..fail(stage, message)
    };

    let model = scenario.model;
    let problem = build_nlp(
        &plan.waypoints,
        &plan.pairs,
        &corridor,
        model,
        &scenario.x0,
        scenario.weights.clone(),
        scenario.margin,
    )
    .map_err(|e| with_corridor(Stage::Build, format!("{e}")))?;

    let (xs, us) = model.warm_start(&scenario.x0, &plan.waypoints.points);
    let z0 = problem.stack(&xs, &us);
    let solution = match solve_nlp(&problem, &z0, &scenario.solver) {
        Ok(s) => s,
        Err(SolveError::NotConverged { best }) => {
            let msg = format!(
                "no convergence: violation {:.3e}, stationarity {:.3e}",
                best.max_violation, best.stationarity
            );
            return Err(PipelineFailure { solution: Some(best), ..with_corridor(Stage::Solve, msg) });
        }
        Err(e) => return Err(with_corridor(Stage::Solve, format!("{e}"))),
    };

    let verify_fail = |message: String| PipelineFailure {
        solution: Some(Box::new(solution.clone())),
        ..with_corridor(Stage::Verify, message)
    };
    let states = rollout(&model, &scenario.x0, &solution.inputs).map_err(|e| verify_fail(format!("{e}")))?;
    let gap = states.iter().zip(&solution.states).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if gap > ROLLOUT_TOL {
        return Err(verify_fail(format!("rollout differs from solver states by {gap:.3e}")));
    }
    let n = model.state_dim();
    let points: Vec<Point2> = states.chunks(n).map(|s| Point2::new(s[0], s[1])).collect();
    let trajectory = PointSequence::new(scenario.formula.tau, 0, points);
    let satisfied = oracle_satisfies_formula(&trajectory, &scenario.formula, ws).unwrap_or(false);
    let collision_free = trajectory.points.iter().all(|&p| ws.bounds.contains(p))
        && trajectory.points.windows(2).all(|w| !ws.segment_collides(w[0], w[1]));
    let (lo, hi) = model.input_bounds();
    let inputs_in_bounds = solution
        .inputs
        .chunks(lo.len())
        .all(|u| u.iter().zip(lo.iter().zip(&hi)).all(|(&v, (&l, &h))| l <= v && v <= h));
    let length = trajectory_length(&trajectory);

    Ok(Box::new(PipelineOutput {
        decomposition: decomposition.clone(),
        plan,
        corridor,
        solution,
        trajectory,
        states,
        satisfied,
        collision_free,
        inputs_in_bounds,
        length,
        seed: params.seed,
        attempts: 1,
    }))
}

/// Sum of segment lengths.
pub fn trajectory_length(seq: &PointSequence) -> f64 {
    seq.points.windows(2).map(|w| w[0].distance(w[1])).sum()
}
