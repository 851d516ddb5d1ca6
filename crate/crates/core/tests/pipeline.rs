use core::f64::consts::PI;

use stlplan_core::optimizer::Unicycle;
use stlplan_core::pipeline::{replan_seed, Stage};
use stlplan_core::{parse_formula, run_pipeline, verify_corridor, Aabb, Region, Scenario, Workspace};

fn scenario() -> Scenario {
    let ws = Workspace::new(
        Aabb::new(0.0, 10.0, 0.0, 6.0),
        vec![Aabb::new(4.5, 5.5, 0.0, 2.0), Aabb::new(6.5, 7.5, 4.0, 6.0)],
        vec![
            Region::new("home", Aabb::new(2.5, 4.0, 0.5, 2.0)),
            Region::new("dock", Aabb::new(8.0, 9.5, 4.0, 5.5)),
        ],
    )
    .unwrap();
    let f = parse_formula("F[0,10] G[0,3] home & F[15,30] dock", &ws, 0.1).unwrap();
    let mut sc = Scenario::new(ws, f, [1.0, 1.0, 0.0], Unicycle::new(0.1, 4.0, PI / 3.0));
    sc.planner.max_speed = 1.5;
    sc.planner.seed = 11;
    sc
}

#[test]
fn small_task_end_to_end() {
    let sc = scenario();
    let out = run_pipeline(&sc).unwrap();
    assert!(out.satisfied && out.collision_free && out.inputs_in_bounds);
    assert_eq!(out.trajectory.len(), 301);
    assert!(verify_corridor(&out.corridor, &out.plan.waypoints, &sc.workspace).is_ok());
    assert!(out.solution.max_violation <= 1e-4);
    assert_eq!(run_pipeline(&sc).unwrap(), out);
}

#[test]
fn period_mismatch_is_rejected() {
    let mut sc = scenario();
    sc.model.tau = 0.05;
    let err = run_pipeline(&sc).unwrap_err();
    assert_eq!(err.stage, Stage::Decompose);
    assert_eq!(err.attempts, 0);
}

#[test]
fn replan_seeds_differ() {
    assert_eq!(replan_seed(5, 0), 5);
    let seeds: Vec<u64> = (0..4).map(|r| replan_seed(5, r)).collect();
    for i in 0..4 {
        for j in i + 1..4 {
            assert_ne!(seeds[i], seeds[j]);
        }
    }
}
