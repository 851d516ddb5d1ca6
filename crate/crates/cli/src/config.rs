//! JSON scenario files.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use stlplan_core::optimizer::{SolverOptions, Unicycle, Weights};
use stlplan_core::stl::FormulaError;
use stlplan_core::{parse_formula, Aabb, PlannerParams, Point2, Region, Scenario, Workspace};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("schema: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("workspace: {0}")]
    Workspace(#[from] stlplan_core::geometry::WorkspaceError),
    #[error("formula: {0}")]
    Formula(#[from] FormulaError),
    #[error("{0}")]
    Invalid(String),
}

/// `[xmin, xmax, ymin, ymax]`.
pub type BoxSpec = [f64; 4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub note: String,
    pub workspace: WorkspaceSpec,
    pub formula: String,
    pub tau: f64,
    pub x0: [f64; 3],
    pub dynamics: DynamicsSpec,
    #[serde(default)]
    pub planner: PlannerSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceSpec {
    pub bounds: BoxSpec,
    #[serde(default)]
    pub obstacles: Vec<BoxSpec>,
    #[serde(default)]
    pub regions: BTreeMap<String, BoxSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum DynamicsSpec {
    Unicycle { v_max: f64, omega_max: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerSpec {
    pub delta_tar: Option<f64>,
    pub step: Option<f64>,
    pub delta_t: Option<f64>,
    pub lambda1: Option<f64>,
    pub max_iters_per_tree: Option<usize>,
    pub max_restarts: Option<usize>,
    pub max_speed: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub eps_feas: Option<f64>,
    pub eps_opt: Option<f64>,
    pub max_outer: Option<usize>,
    pub max_inner: Option<usize>,
    /// Diagonal of the input-difference weight.
    pub q: Option<Vec<f64>>,
    /// Diagonal of the state-difference weight.
    pub r: Option<Vec<f64>>,
    pub margin: Option<f64>,
}

fn aabb(b: &BoxSpec) -> Aabb {
    Aabb::new(b[0], b[1], b[2], b[3])
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn workspace(&self) -> Result<Workspace, ConfigError> {
        let w = &self.workspace;
        let regions = w.regions.iter().map(|(n, b)| Region::new(n.clone(), aabb(b))).collect();
        Ok(Workspace::new(aabb(&w.bounds), w.obstacles.iter().map(aabb).collect(), regions)?)
    }

    /// Validates everything and builds the core scenario. `seed` overrides
    /// the file's seed.
    pub fn to_scenario(&self, seed: Option<u64>) -> Result<Scenario, ConfigError> {
        let ws = self.workspace()?;
        let formula = parse_formula(&self.formula, &ws, self.tau)?;
        if !self.x0.iter().all(|v| v.is_finite()) {
            return Err(ConfigError::Invalid("x0 must be finite".into()));
        }
        let start = Point2::new(self.x0[0], self.x0[1]);
        if !ws.is_free(start) {
            return Err(ConfigError::Invalid(format!("initial position ({}, {}) is not in free space", start.x, start.y)));
        }
        let DynamicsSpec::Unicycle { v_max, omega_max } = self.dynamics;
        if !(v_max > 0.0 && omega_max > 0.0) {
            return Err(ConfigError::Invalid("input bounds must be positive".into()));
        }
        let mut sc = Scenario::new(ws, formula, self.x0, Unicycle::new(self.tau, v_max, omega_max));
        let p = &self.planner;
        let pp: &mut PlannerParams = &mut sc.planner;
        set(&mut pp.delta_tar, p.delta_tar);
        set(&mut pp.step, p.step);
        set(&mut pp.delta_t, p.delta_t);
        set(&mut pp.lambda1, p.lambda1);
        set(&mut pp.max_iters_per_tree, p.max_iters_per_tree);
        set(&mut pp.max_restarts, p.max_restarts);
        set(&mut pp.max_speed, p.max_speed);
        pp.seed = seed.unwrap_or(self.seed);
        pp.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;

        let s = &self.solver;
        let so: &mut SolverOptions = &mut sc.solver;
        set(&mut so.eps_feas, s.eps_feas);
        set(&mut so.eps_opt, s.eps_opt);
        set(&mut so.max_outer, s.max_outer);
        set(&mut so.max_inner, s.max_inner);
        set(&mut sc.margin, s.margin);
        if s.q.is_some() || s.r.is_some() {
            let d = Weights::unicycle_default();
            let q = s.q.clone().unwrap_or_else(|| vec![d.q[0], d.q[3]]);
            let r = s.r.clone().unwrap_or_else(|| vec![d.r[0], d.r[4], d.r[8]]);
            sc.weights = Weights::diagonal(&q, &r);
            if !sc.weights.validate(2, 3) {
                return Err(ConfigError::Invalid("weights must be positive, with 2 input and 3 state entries".into()));
            }
        }
        Ok(sc)
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

pub fn load_scenario_file(path: &Path) -> Result<ScenarioFile, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    ScenarioFile::from_json(&text)
}

/// Reads and validates a scenario.
pub fn load_scenario(path: &Path, seed: Option<u64>) -> Result<Scenario, ConfigError> {
    load_scenario_file(path)?.to_scenario(seed)
}
