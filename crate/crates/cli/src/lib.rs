//! Scenario files, artifacts and the command-line front end for
//! `stlplan-core`.

pub mod config;
pub mod output;

use std::path::Path;
use std::time::Instant;

use stlplan_core::{run_pipeline, PipelineFailure, PipelineOutput, Scenario};

pub use config::{load_scenario, load_scenario_file, ConfigError, ScenarioFile};

/// Process exit codes.
pub mod exit {
    pub const SATISFIED: i32 = 0;
    pub const UNSATISFIED: i32 = 2;
    pub const STAGE_FAILURE: i32 = 3;
    pub const CONFIG_ERROR: i32 = 4;
}

/// A finished run with its timing.
pub struct RunReport {
    pub outcome: Result<PipelineOutput, PipelineFailure>,
    pub wall_clock: f64,
}

impl RunReport {
    /// Oracle verdict plus the geometric checks; false on any stage failure.
    pub fn satisfied(&self) -> bool {
        matches!(&self.outcome, Ok(o) if o.satisfied && o.collision_free && o.inputs_in_bounds)
    }

    pub fn exit_code(&self) -> i32 {
        match &self.outcome {
            Ok(_) if self.satisfied() => exit::SATISFIED,
            Ok(_) => exit::UNSATISFIED,
            Err(_) => exit::STAGE_FAILURE,
        }
    }
}

pub fn run(scenario: &Scenario) -> RunReport {
    let t0 = Instant::now();
    let outcome = run_pipeline(scenario);
    RunReport { outcome, wall_clock: t0.elapsed().as_secs_f64() }
}

/// Writes every artifact the run produced into `dir`.
pub fn write_artifacts(dir: &Path, scenario: &Scenario, report: &RunReport) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let tau = scenario.formula.tau;
    let ws = &scenario.workspace;
    match &report.outcome {
        Ok(out) => {
            std::fs::write(dir.join("plan.csv"), output::plan_csv(&out.plan.waypoints))?;
            std::fs::write(dir.join("pairs.csv"), output::pairs_csv(&out.plan.pairs, tau))?;
            std::fs::write(dir.join("corridor.csv"), output::corridor_csv(&out.corridor))?;
            std::fs::write(dir.join("traj.csv"), output::traj_csv(&out.states, &out.solution.inputs, tau))?;
            std::fs::write(dir.join("figure.svg"), output::svg(ws, &output::Figure::from_output(out)))?;
            std::fs::write(dir.join("report.txt"), output::report(Some(&out.decomposition), Ok(out), report.wall_clock))?;
        }
        Err(f) => {
            if let Some(plan) = &f.plan {
                std::fs::write(dir.join("plan.csv"), output::plan_csv(&plan.waypoints))?;
                std::fs::write(dir.join("pairs.csv"), output::pairs_csv(&plan.pairs, tau))?;
            }
            if let Some(c) = &f.corridor {
                std::fs::write(dir.join("corridor.csv"), output::corridor_csv(c))?;
            }
            if let Some(sol) = &f.solution {
                std::fs::write(dir.join("traj.csv"), output::traj_csv(&sol.states, &sol.inputs, tau))?;
            }
            std::fs::write(dir.join("figure.svg"), output::svg(ws, &output::Figure::from_failure(f)))?;
            std::fs::write(dir.join("report.txt"), output::report(f.decomposition.as_ref(), Err(f), report.wall_clock))?;
        }
    }
    Ok(())
}
