#![allow(clippy::needless_range_loop)]

use core::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stlplan_core::optimizer::{
    build_nlp, check_constraints, rollout, solve_nlp, BuildError, DynamicsModel, NlpProblem, SingleIntegrator, SolverOptions, Unicycle,
    Weights, DEFAULT_MARGIN,
};
use stlplan_core::satisfaction::SatisfactionPair;
use stlplan_core::{construct_safe_corridor, Aabb, AtomicProp, Point2, PointSequence, Region, SatisfactionSet, Workspace};

const INF: f64 = f64::INFINITY;

fn unicycle() -> Unicycle {
    Unicycle::new(0.1, 4.0, PI / 3.0)
}

fn random_problem(rng: &mut ChaCha8Rng, steps: usize) -> (NlpProblem<Unicycle>, Vec<f64>) {
    let x0 = [rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0), rng.gen_range(-PI..PI)];
    let boxes = vec![Aabb::new(-INF, INF, -INF, INF); steps + 1];
    let q = [rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)];
    let r = [rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0), rng.gen_range(0.05..1.0)];
    let p = NlpProblem::new(unicycle(), &x0, boxes, Weights::diagonal(&q, &r));
    let z = (0..p.num_vars()).map(|_| rng.gen_range(-3.0..3.0)).collect();
    (p, z)
}

fn central<F: FnMut(&[f64]) -> f64>(z: &[f64], i: usize, h: f64, mut f: F) -> f64 {
    let mut a = z.to_vec();
    let mut b = z.to_vec();
    a[i] += h;
    b[i] -= h;
    (f(&a) - f(&b)) / (2.0 * h)
}

fn close(analytic: f64, numeric: f64) -> bool {
    (analytic - numeric).abs() <= 1e-5 * analytic.abs().max(numeric.abs()).max(1.0)
}

#[test]
fn unicycle_jacobians_match_finite_differences() {
    let m = unicycle();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let h = 1e-6;
    for _ in 0..100 {
        let x = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-PI..PI)];
        let u = [rng.gen_range(-4.0..4.0), rng.gen_range(-PI / 3.0..PI / 3.0)];
        let (mut jx, mut ju) = ([0.0; 9], [0.0; 6]);
        m.jacobians(&x, &u, &mut jx, &mut ju);
        let mut out = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                let fd = central(&x, j, h, |xx| {
                    m.step(xx, &u, &mut out);
                    out[i]
                });
                assert!((jx[i * 3 + j] - fd).abs() <= 1e-6, "dx {i},{j}");
            }
            for j in 0..2 {
                let fd = central(&u, j, h, |uu| {
                    m.step(&x, uu, &mut out);
                    out[i]
                });
                assert!((ju[i * 2 + j] - fd).abs() <= 1e-6, "du {i},{j}");
            }
        }
    }
}

#[test]
fn nlp_gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let h = 1e-6;
    for _ in 0..50 {
        let (p, z) = random_problem(&mut rng, 4);
        let mut g = vec![0.0; z.len()];
        p.cost_gradient(&z, &mut g);
        for i in 0..z.len() {
            let fd = central(&z, i, h, |zz| p.cost(zz));
            assert!(close(g[i], fd), "cost {i}: {} vs {fd}", g[i]);
        }
        let nr = p.num_residuals();
        let mut c = vec![0.0; nr];
        for row in 0..nr {
            let mut dense = vec![0.0; z.len()];
            for (j, v) in p.residual_row_gradient(&z, row) {
                dense[j] += v;
            }
            for i in 0..z.len() {
                let fd = central(&z, i, h, |zz| {
                    p.residuals(zz, &mut c);
                    c[row]
                });
                assert!(close(dense[i], fd), "residual {row} wrt {i}: {} vs {fd}", dense[i]);
            }
        }
        // J' w against the rows.
        let w: Vec<f64> = (0..nr).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut jt = vec![0.0; z.len()];
        p.residual_jt_times(&z, &w, &mut jt);
        let mut want = vec![0.0; z.len()];
        for (row, wr) in w.iter().enumerate() {
            for (j, v) in p.residual_row_gradient(&z, row) {
                want[j] += wr * v;
            }
        }
        for (a, b) in jt.iter().zip(&want) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }
}

fn tight() -> SolverOptions {
    SolverOptions { eps_feas: 1e-10, eps_opt: 1e-9, dyn_tol: 1e-12, ..SolverOptions::default() }
}

/// Two steps of `p' = p + 0.5 u` from the origin, `Q = I`, `R = diag(2, 1)`.
fn two_step(boxes: Vec<Aabb>) -> NlpProblem<SingleIntegrator> {
    let model = SingleIntegrator { tau: 0.5, u_max: 10.0 };
    NlpProblem::new(model, &[0.0, 0.0], boxes, Weights::diagonal(&[1.0, 1.0], &[2.0, 1.0]))
}

#[test]
fn two_step_problem_matches_kkt_solution() {
    let free = Aabb::new(-INF, INF, -INF, INF);
    // x_1 <= 0.3 and x_2 >= 1 are both active: u = (0.6, 1.4), cost 1.8.
    let p = two_step(vec![free, Aabb::new(-INF, 0.3, -INF, INF), Aabb::new(1.0, INF, -INF, INF)]);
    let sol = solve_nlp(&p, &vec![0.0; p.num_vars()], &tight()).unwrap();
    let want = [0.6, 0.0, 1.4, 0.0];
    for (a, b) in sol.inputs.iter().zip(&want) {
        assert!((a - b).abs() <= 1e-6, "{:?}", sol.inputs);
    }
    assert!((sol.cost - 1.8).abs() <= 1e-6);

    // Only x_2 >= 1: the midpoint splits the motion evenly, u = (1, 1), cost 1.
    let p = two_step(vec![free, free, Aabb::new(1.0, INF, -INF, INF)]);
    let sol = solve_nlp(&p, &vec![0.0; p.num_vars()], &tight()).unwrap();
    let want = [1.0, 0.0, 1.0, 0.0];
    for (a, b) in sol.inputs.iter().zip(&want) {
        assert!((a - b).abs() <= 1e-6, "{:?}", sol.inputs);
    }
    assert!((sol.cost - 1.0).abs() <= 1e-6);
}

#[test]
fn feasible_start_costs_nothing() {
    let model = SingleIntegrator { tau: 0.1, u_max: 1.0 };
    let boxes = vec![Aabb::new(0.0, 2.0, 0.0, 2.0); 6];
    let p = NlpProblem::new(model, &[1.0, 1.0], boxes, Weights::diagonal(&[1.0, 1.0], &[1.0, 1.0]));
    let states: Vec<f64> = (0..6).flat_map(|_| [1.0, 1.0]).collect();
    let z = p.stack(&states, &[0.0; 10]);
    let sol = solve_nlp(&p, &z, &SolverOptions::default()).unwrap();
    assert_eq!(sol.cost, 0.0);
    assert_eq!(sol.max_violation, 0.0);
}

fn corridor_case(seed: u64) -> (NlpProblem<Unicycle>, Vec<f64>) {
    let ws = Workspace::new(
        Aabb::new(0.0, 10.0, 0.0, 6.0),
        vec![Aabb::new(4.0, 5.0, 0.0, 3.0)],
        vec![Region::new("goal", Aabb::new(7.0, 8.0, 1.0, 2.0))],
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Up, across above the obstacle, down into the goal.
    let corners = [Point2::new(1.0, 1.0), Point2::new(2.0, 3.6), Point2::new(6.0, 3.6), Point2::new(7.5, 1.5)];
    let mut pts = vec![corners[0]];
    for w in corners.windows(2) {
        let n = (w[0].distance(w[1]) / 0.08).ceil() as usize;
        for i in 1..=n {
            let jitter = Point2::new(rng.gen_range(-0.02..0.02), rng.gen_range(-0.02..0.02));
            let p = w[0].lerp(w[1], i as f64 / n as f64);
            pts.push(if i == n { p } else { p + jitter });
        }
    }
    let k_last = pts.len() as i64 - 1;
    let seq = PointSequence::new(0.1, 0, pts);
    let corridor = construct_safe_corridor(&seq, &ws).unwrap();
    let mut pairs = SatisfactionSet::new();
    pairs.insert(SatisfactionPair { tick: k_last, prop: AtomicProp::positive(ws.region("goal").unwrap().clone()) });
    let x0 = [1.0, 1.0, PI / 3.0];
    let model = unicycle();
    let p = build_nlp(&seq, &pairs, &corridor, model, &x0, Weights::unicycle_default(), DEFAULT_MARGIN).unwrap();
    let (xs, us) = model.warm_start(&x0, &seq.points);
    let z0 = p.stack(&xs, &us);
    (p, z0)
}

#[test]
fn accepted_solution_is_consistent() {
    for seed in 0..3 {
        let (p, z0) = corridor_case(seed);
        let sol = solve_nlp(&p, &z0, &SolverOptions::default()).unwrap();
        let report = check_constraints(&p, &sol.states, &sol.inputs);
        assert!(report.max() <= 1e-4, "{report:?}");
        assert_eq!(report.max(), sol.max_violation);
        let rolled = rollout(&p.model, &p.x0, &sol.inputs).unwrap();
        let gap = rolled.iter().zip(&sol.states).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(gap <= 1e-6, "rollout gap {gap}");
        let last = p.positions(&sol.states).pop().unwrap();
        assert!(Aabb::new(7.0, 8.0, 1.0, 2.0).contains(last));
        for e in &sol.log {
            assert!(e.merit_end <= e.merit_start, "{e:?}");
        }
    }
}

#[test]
fn solving_twice_gives_identical_results() {
    let (p, z0) = corridor_case(7);
    let a = solve_nlp(&p, &z0, &SolverOptions::default()).unwrap();
    let b = solve_nlp(&p, &z0, &SolverOptions::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn build_reports_infeasible_pairs() {
    let ws = Workspace::new(Aabb::new(0.0, 10.0, 0.0, 6.0), vec![Aabb::new(4.0, 5.0, 0.0, 6.0)], vec![]).unwrap();
    let seq = PointSequence::new(0.1, 0, vec![Point2::new(1.0, 1.0), Point2::new(1.1, 1.0)]);
    let corridor = construct_safe_corridor(&seq, &ws).unwrap();
    let far = AtomicProp::positive(Region::new("far", Aabb::new(6.0, 7.0, 1.0, 2.0)));
    let x0 = [1.0, 1.0, 0.0];
    let mut pairs = SatisfactionSet::new();
    pairs.insert(SatisfactionPair { tick: 1, prop: far.clone() });
    let r = build_nlp(&seq, &pairs, &corridor, unicycle(), &x0, Weights::unicycle_default(), DEFAULT_MARGIN);
    assert!(matches!(r, Err(BuildError::EmptyIntersection { step: 1, .. })));
    let mut off = SatisfactionSet::new();
    off.insert(SatisfactionPair { tick: 5, prop: far });
    let r = build_nlp(&seq, &off, &corridor, unicycle(), &x0, Weights::unicycle_default(), DEFAULT_MARGIN);
    assert_eq!(r.unwrap_err(), BuildError::PairOffGrid { tick: 5 });
}

proptest! {
    #[test]
    fn rollout_single_step_equals_step(x in -5.0..5.0f64, y in -5.0..5.0f64, th in -PI..PI, v in -4.0..4.0f64, w in -1.0..1.0f64) {
        let m = unicycle();
        let states = rollout(&m, &[x, y, th], &[v, w]).unwrap();
        let mut next = [0.0; 3];
        m.step(&[x, y, th], &[v, w], &mut next);
        prop_assert_eq!(&states[3..], &next[..]);
    }
}
