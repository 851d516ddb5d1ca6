//! Augmented Lagrangian on the dynamics equalities with a projected L-BFGS
//! inner solver for the bound constraints.

use alloc::boxed::Box;
use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::dynamics::{rollout, DynamicsModel};
use super::nlp::{check_constraints, NlpProblem};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Accepted infinity-norm constraint violation.
    pub eps_feas: f64,
    /// Accepted projected-gradient norm.
    pub eps_opt: f64,
    /// The solver keeps going until the dynamics residual is below this,
    /// if the budget allows. The states are then replaced by a rollout of
    /// the inputs when that does not increase the violation.
    pub dyn_tol: f64,
    /// Bound violation tolerated when swapping in the rolled-out states.
    pub polish_tol: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub memory: usize,
    pub rho0: f64,
    pub rho_max: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            eps_feas: 1e-4,
            eps_opt: 1e-3,
            dyn_tol: 1e-7,
            polish_tol: 1e-4,
            max_outer: 50,
            max_inner: 500,
            memory: 20,
            rho0: 10.0,
            rho_max: 1e6,
        }
    }
}

/// One outer iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverLogEntry {
    pub outer: usize,
    pub inner_iterations: usize,
    pub cost: f64,
    pub violation: f64,
    pub stationarity: f64,
    pub rho: f64,
    /// Augmented Lagrangian at the start and end of the inner solve.
    pub merit_start: f64,
    pub merit_end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NlpSolution {
    pub states: Vec<f64>,
    pub inputs: Vec<f64>,
    pub cost: f64,
    /// Independently re-evaluated, infinity norm.
    pub max_violation: f64,
    pub stationarity: f64,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub log: Vec<SolverLogEntry>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("initial guess has {got} variables, expected {expected}")]
    BadInitialGuess { got: usize, expected: usize },
    #[error("no convergence: violation {:.3e}, stationarity {:.3e}", best.max_violation, best.stationarity)]
    NotConverged { best: Box<NlpSolution> },
}

/// Solves `problem` from `z0` (projected onto the bounds first).
pub fn solve_nlp<M: DynamicsModel>(problem: &NlpProblem<M>, z0: &[f64], opts: &SolverOptions) -> Result<NlpSolution, SolveError> {
    let nv = problem.num_vars();
    if z0.len() != nv {
        return Err(SolveError::BadInitialGuess { got: z0.len(), expected: nv });
    }
    let nr = problem.num_residuals();
    let (lo, hi) = (&problem.lower, &problem.upper);
    let mut z: Vec<f64> = z0.iter().zip(lo.iter().zip(hi)).map(|(&v, (&l, &h))| v.clamp(l, h)).collect();
    let mut lambda = vec![0.0; nr];
    let mut rho = opts.rho0;
    let mut omega = 1.0 / rho;
    let mut eta = 1.0 / math::powf(rho, 0.1);
    let omega_min = 0.1 * opts.eps_opt;
    let mut c = vec![0.0; nr];
    let mut log = Vec::new();
    let mut inner_total = 0;
    let mut stationarity = f64::INFINITY;
    // Best accepted iterate so far: (violation, stationarity, z).
    let mut accepted: Option<(f64, f64, Vec<f64>)> = None;

    for outer in 0..opts.max_outer {
        let mut al = Augmented { problem, lambda: &lambda, rho, c: vec![0.0; nr], w: vec![0.0; nr] };
        let stats = projected_lbfgs(&mut al, &mut z, lo, hi, omega.max(omega_min), opts.max_inner, opts.memory);
        inner_total += stats.iterations;
        stationarity = stats.stationarity;
        problem.residuals(&z, &mut c);
        let viol = inf_norm(&c);
        log.push(SolverLogEntry {
            outer,
            inner_iterations: stats.iterations,
            cost: problem.cost(&z),
            violation: viol,
            stationarity,
            rho,
            merit_start: stats.f_start,
            merit_end: stats.f_end,
        });
        if viol <= opts.eps_feas && stationarity <= opts.eps_opt && accepted.as_ref().is_none_or(|a| viol <= a.0) {
            accepted = Some((viol, stationarity, z.clone()));
            if viol <= opts.dyn_tol {
                break;
            }
        }
        if viol <= eta.max(opts.dyn_tol) {
            for (l, ci) in lambda.iter_mut().zip(&c) {
                *l -= rho * ci;
            }
            eta = (eta / math::powf(rho, 0.9)).max(0.1 * opts.dyn_tol);
            omega /= rho;
        } else {
            rho = (rho * 10.0).min(opts.rho_max);
            eta = 1.0 / math::powf(rho, 0.1);
            omega = 1.0 / rho;
        }
    }

    if let Some((_, st, best)) = accepted {
        stationarity = st;
        z = best;
    }
    let (xs, us) = problem.split(&z);
    let mut report = check_constraints(problem, xs, us);
    if let Ok(rolled) = rollout(&problem.model, &problem.x0, us) {
        let polished = check_constraints(problem, &rolled, us);
        if polished.max() <= report.max().max(opts.polish_tol) {
            report = polished;
            let z_new = problem.stack(&rolled, us);
            z.copy_from_slice(&z_new);
        }
    }
    let (xs, us) = problem.split(&z);
    let solution = NlpSolution {
        states: xs.to_vec(),
        inputs: us.to_vec(),
        cost: problem.cost(&z),
        max_violation: report.max(),
        stationarity,
        outer_iterations: log.len(),
        inner_iterations: inner_total,
        log,
    };
    if solution.max_violation <= opts.eps_feas && solution.stationarity <= opts.eps_opt {
        Ok(solution)
    } else {
        Err(SolveError::NotConverged { best: Box::new(solution) })
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Smooth objective with gradient.
pub trait Objective {
    fn eval(&mut self, z: &[f64], g: &mut [f64]) -> f64;
}

/// `f(z) - lambda' c(z) + rho/2 |c(z)|^2`.
struct Augmented<'a, M> {
    problem: &'a NlpProblem<M>,
    lambda: &'a [f64],
    rho: f64,
    c: Vec<f64>,
    w: Vec<f64>,
}

impl<M: DynamicsModel> Objective for Augmented<'_, M> {
    fn eval(&mut self, z: &[f64], g: &mut [f64]) -> f64 {
        let p = self.problem;
        p.residuals(z, &mut self.c);
        p.cost_gradient(z, g);
        let mut val = p.cost(z);
        for i in 0..self.c.len() {
            let ci = self.c[i];
            val += -self.lambda[i] * ci + 0.5 * self.rho * ci * ci;
            self.w[i] = self.rho * ci - self.lambda[i];
        }
        p.residual_jt_times(z, &self.w, g);
        val
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerStats {
    pub iterations: usize,
    pub f_start: f64,
    pub f_end: f64,
    pub stationarity: f64,
}

/// `|P(z - g) - z|_inf` for the box `[lo, hi]`.
pub fn projected_gradient_norm(z: &[f64], g: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..z.len() {
        let p = (z[i] - g[i]).clamp(lo[i], hi[i]);
        m = m.max((p - z[i]).abs());
    }
    m
}

/// Minimizes `obj` over the box with L-BFGS directions restricted to the
/// variables that are not held at a bound, and a projected Armijo search.
/// The objective never increases.
pub fn projected_lbfgs<O: Objective>(
    obj: &mut O,
    z: &mut [f64],
    lo: &[f64],
    hi: &[f64],
    tol: f64,
    max_iter: usize,
    memory: usize,
) -> InnerStats {
    let n = z.len();
    let mut g = vec![0.0; n];
    let mut f = obj.eval(z, &mut g);
    let f_start = f;
    let mut mem: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(memory);
    let mut d = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut g_trial = vec![0.0; n];
    let mut free = vec![true; n];
    let mut alpha_hist = vec![0.0; memory.max(1)];
    let mut iterations = 0;
    let mut pg = projected_gradient_norm(z, &g, lo, hi);

    while iterations < max_iter && pg > tol {
        iterations += 1;
        for i in 0..n {
            free[i] = lo[i] < hi[i] && !((z[i] <= lo[i] && g[i] > 0.0) || (z[i] >= hi[i] && g[i] < 0.0));
            d[i] = if free[i] { g[i] } else { 0.0 };
        }
        // Two-loop recursion.
        for (j, (s, y, rho_j)) in mem.iter().enumerate().rev() {
            let a = rho_j * dot_masked(s, &d, &free);
            alpha_hist[j] = a;
            for i in 0..n {
                if free[i] {
                    d[i] -= a * y[i];
                }
            }
        }
        if let Some((s, y, _)) = mem.back() {
            let yy = dot_masked(y, y, &free);
            let sy = dot_masked(s, y, &free);
            if yy > 0.0 && sy > 0.0 {
                let gamma = sy / yy;
                d.iter_mut().for_each(|v| *v *= gamma);
            }
        }
        for (j, (s, y, rho_j)) in mem.iter().enumerate() {
            let b = rho_j * dot_masked(y, &d, &free);
            for i in 0..n {
                if free[i] {
                    d[i] += s[i] * (alpha_hist[j] - b);
                }
            }
        }
        for i in 0..n {
            d[i] = if free[i] { -d[i] } else { 0.0 };
        }
        let mut slope = dot(&g, &d);
        if slope.is_nan() || slope >= 0.0 {
            mem.clear();
            for i in 0..n {
                d[i] = if free[i] { -g[i] } else { 0.0 };
            }
            slope = dot(&g, &d);
            if slope.is_nan() || slope >= 0.0 {
                break;
            }
        }
        if mem.is_empty() {
            let scale = 1.0 / inf_norm(&d).max(1.0);
            d.iter_mut().for_each(|v| *v *= scale);
        }

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            for i in 0..n {
                trial[i] = (z[i] + alpha * d[i]).clamp(lo[i], hi[i]);
            }
            let f_trial = obj.eval(&trial, &mut g_trial);
            let decrease: f64 = (0..n).map(|i| g[i] * (trial[i] - z[i])).sum();
            if f_trial <= f + 1e-4 * decrease && f_trial <= f {
                accepted = Some(f_trial);
                break;
            }
            alpha *= 0.5;
        }
        let Some(f_new) = accepted else {
            if mem.is_empty() {
                break;
            }
            mem.clear();
            continue;
        };
        let s: Vec<f64> = (0..n).map(|i| trial[i] - z[i]).collect();
        let y: Vec<f64> = (0..n).map(|i| g_trial[i] - g[i]).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).max(1e-300) {
            if mem.len() == memory {
                mem.pop_front();
            }
            mem.push_back((s, y, 1.0 / sy));
        }
        z.copy_from_slice(&trial);
        g.copy_from_slice(&g_trial);
        f = f_new;
        pg = projected_gradient_norm(z, &g, lo, hi);
    }
    InnerStats { iterations, f_start, f_end: f, stationarity: pg }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dot_masked(a: &[f64], b: &[f64], mask: &[bool]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        if mask[i] {
            s += a[i] * b[i];
        }
    }
    s
}
