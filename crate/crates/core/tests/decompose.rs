#![allow(clippy::type_complexity)]

mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stlplan_core::decompose::{compute_cuts, split_subtask, Split};
use stlplan_core::geometry::Region;
use stlplan_core::stl::{oracle_satisfies, oracle_satisfies_formula};
use stlplan_core::{decompose, parse_formula, Aabb, Formula, SubTask, TemporalKind, TickInterval, Workspace};

fn named_ws(names: &[&str]) -> Workspace {
    let regions = names
        .iter()
        .enumerate()
        .map(|(i, n)| Region::new(*n, Aabb::new(i as f64, i as f64 + 1.5, 0.0, 2.0)))
        .collect();
    Workspace::new(Aabb::new(0.0, 10.0, 0.0, 6.0), vec![], regions).unwrap()
}

fn iv(a: i64, b: i64) -> TickInterval {
    TickInterval::new(a, b)
}

#[test]
fn first_scenario_local_tasks() {
    let ws = named_ws(&["mu1", "mu2", "mu3", "mu4", "mu5", "mu6"]);
    let f = parse_formula(
        "G[0,10] F[0,10] (mu1 & mu2) & !mu4 U[0,30] mu3 & G[30,46] F[0,4] mu5 & F[0,60] mu6",
        &ws,
        0.1,
    )
    .unwrap();
    let d = decompose(&f);
    assert_eq!(d.cuts, vec![0, 200, 300, 500, 600]);
    let d = d.with_fallback_assignment();
    let shape: Vec<Vec<(TemporalKind, TickInterval, Option<TickInterval>, String)>> = d
        .local_tasks
        .iter()
        .map(|t| t.subtasks.iter().map(|s| (s.kind, s.outer, s.inner, s.prop.label())).collect())
        .collect();
    use TemporalKind::*;
    assert_eq!(
        shape,
        vec![
            vec![(AlwaysEventually, iv(0, 100), Some(iv(0, 100)), "mu1&mu2".to_string()), (Always, iv(0, 200), None, "!mu4".into())],
            vec![(Always, iv(200, 300), None, "!mu4".into()), (Eventually, iv(200, 300), None, "mu3".into())],
            vec![(AlwaysEventually, iv(300, 460), Some(iv(0, 40)), "mu5".into())],
            vec![(Eventually, iv(500, 600), None, "mu6".into())],
        ]
    );
}

#[test]
fn second_and_third_scenario_cuts() {
    let ws = named_ws(&["mu1", "mu2", "mu3", "mu4", "mu5"]);
    let f = parse_formula("!mu4 U[0,20] mu1 & !mu5 U[20,40] mu2 & F[0,60] mu3", &ws, 0.1).unwrap();
    let d = decompose(&f);
    assert_eq!(d.cuts, vec![0, 200, 400, 600]);
    assert_eq!(d.disjunctive_sets.len(), 1);
    let outers: Vec<TickInterval> = d.disjunctive_sets[0].pieces.iter().map(|p| p.outer).collect();
    assert_eq!(outers, vec![iv(0, 200), iv(200, 400), iv(400, 600)]);

    let f = parse_formula("F[0,10] G[0,5] mu1 & F[0,25] mu2 & F[30,40] G[0,5] mu3 & F[30,50] mu4", &ws, 0.1).unwrap();
    assert_eq!(compute_cuts(&f), vec![0, 150, 250, 450, 500]);
    assert_eq!(decompose(&f).local_tasks.len(), 4);
}

#[test]
fn until_becomes_always_and_eventually() {
    let ws = named_ws(&["a", "b"]);
    let f = parse_formula("a U[0,2] b", &ws, 1.0).unwrap();
    assert_eq!(f.subtasks.len(), 2);
    assert_eq!(f.subtasks[0].kind, TemporalKind::Always);
    assert_eq!(f.subtasks[1].kind, TemporalKind::Eventually);
    assert_eq!(f.subtasks[0].outer, iv(0, 2));
}

/// Random formula with pairwise disjoint nested ATIs over ticks `[0, h]`.
fn random_formula(rng: &mut ChaCha8Rng, ws: &Workspace) -> Formula {
    let h = rng.gen_range(4..=40i64);
    let mut subtasks = Vec::new();
    // Nested sub-tasks on disjoint slots.
    let mut t = 0;
    while t < h && rng.gen_bool(0.6) {
        let e = rng.gen_range(0..=3i64);
        let lo = rng.gen_range(t..=h);
        let hi_max = h - e;
        if lo > hi_max {
            break;
        }
        let hi = rng.gen_range(lo..=hi_max.min(lo + 8));
        let p = prop(ws, if rng.gen_bool(0.5) { "a" } else { "b" }, false);
        let inner = iv(rng.gen_range(0..=e), e);
        subtasks.push(if rng.gen_bool(0.5) {
            SubTask::eventually_always(iv(lo, hi), inner, p)
        } else {
            SubTask::always_eventually(iv(lo, hi), inner, p)
        });
        t = hi + e + 1;
    }
    let n = rng.gen_range(1..=4);
    for _ in 0..n {
        let a = rng.gen_range(0..=h);
        let b = rng.gen_range(a..=h);
        let p = prop(ws, if rng.gen_bool(0.5) { "a" } else { "b" }, rng.gen_bool(0.25));
        subtasks.push(if rng.gen_bool(0.5) { SubTask::eventually(iv(a, b), p) } else { SubTask::always(iv(a, b), p) });
    }
    Formula { tau: 0.1, subtasks }
}

fn mostly_inside(rng: &mut ChaCha8Rng, ws: &Workspace, len: usize) -> stlplan_core::PointSequence {
    let a = ws.region("a").unwrap().bounds;
    let b = ws.region("b").unwrap().bounds;
    let both = a.intersection(&b).unwrap();
    let points = (0..len)
        .map(|_| match rng.gen_range(0..10) {
            0..=5 => point_for(rng, &both, &ws.bounds, true),
            6 => point_for(rng, &a, &ws.bounds, true),
            7 => point_for(rng, &b, &ws.bounds, true),
            _ => point_for(rng, &a, &ws.bounds, false),
        })
        .collect();
    stlplan_core::PointSequence::new(0.1, 0, points)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn structure_and_soundness(seed in any::<u64>()) {
        let ws = square_ws();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_formula(&mut rng, &ws);
        let d = decompose(&f);
        let h = f.horizon();
        prop_assert_eq!(d.cuts[0], 0);
        prop_assert_eq!(*d.cuts.last().unwrap(), h);
        prop_assert!(d.cuts.windows(2).all(|w| w[0] < w[1]));
        for (t, w) in d.local_tasks.iter().zip(d.cuts.windows(2)) {
            prop_assert_eq!(t.uati, iv(w[0], w[1]));
            for s in &t.subtasks {
                prop_assert!(t.uati.contains_interval(s.ati()));
            }
        }
        for s in &f.subtasks {
            match split_subtask(s, &d.cuts) {
                Split::Whole(w) => prop_assert_eq!(&w, s),
                Split::Conjunction(p) | Split::Disjunction(p) => {
                    prop_assert!(!s.is_nested());
                    prop_assert_eq!(p.first().unwrap().outer.lo, s.outer.lo);
                    prop_assert_eq!(p.last().unwrap().outer.hi, s.outer.hi);
                    prop_assert!(p.windows(2).all(|w| w[0].outer.hi == w[1].outer.lo));
                }
            }
        }

        let seq = mostly_inside(&mut rng, &ws, h as usize + 1);
        let local_ok = d.local_tasks.iter().flat_map(|t| &t.subtasks).all(|s| oracle_satisfies(&seq, s, &ws).unwrap());
        let sets_ok = d.disjunctive_sets.iter().all(|set| set.pieces.iter().any(|p| oracle_satisfies(&seq, p, &ws).unwrap()));
        if local_ok && sets_ok {
            prop_assert!(oracle_satisfies_formula(&seq, &f, &ws).unwrap());
        }
    }
}

#[test]
fn soundness_premise_is_not_vacuous() {
    let ws = square_ws();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut hits = 0;
    for _ in 0..200 {
        let f = random_formula(&mut rng, &ws);
        let d = decompose(&f);
        let seq = mostly_inside(&mut rng, &ws, f.horizon() as usize + 1);
        let local_ok = d.local_tasks.iter().flat_map(|t| &t.subtasks).all(|s| oracle_satisfies(&seq, s, &ws).unwrap());
        let sets_ok = d.disjunctive_sets.iter().all(|set| set.pieces.iter().any(|p| oracle_satisfies(&seq, p, &ws).unwrap()));
        if local_ok && sets_ok {
            hits += 1;
            assert!(oracle_satisfies_formula(&seq, &f, &ws).unwrap());
        }
    }
    assert!(hits >= 20, "only {hits} instances met the premise");
}
