//! Local planning over one UATI and the local-to-global synthesis.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::discretize::con;
use super::rrt::{gen_tree, tick_time, EdgeRules, GoalSet, Hold, StVertex, TimedAvoid, TreeGoal, TreeParams};
use super::{GlobalPlan, PlannerError, PlannerParams};
use crate::decompose::{Decomposition, LocalTask};
use crate::geometry::{Point2, Workspace};
use crate::satisfaction::{stl_sat, SatisfactionSet};
use crate::stl::{AtomicProp, PointSequence, TemporalKind, TickInterval};

enum Step {
    Once(TreeGoal),
    /// Revisit `set` at least every `e` ticks across `ati`.
    Patrol { set: GoalSet, ati: TickInterval, e: i64 },
}

struct Target {
    /// Index into the local sub-tasks, `None` for the exit condition.
    source: Option<usize>,
    step: Step,
}

/// Why one attempt at a local task failed: the sub-task index, or `None`
/// when the exit condition could not be met.
type Culprit = Option<usize>;

/// Plans one local task from `q_init`. The last waypoint additionally
/// satisfies every proposition in `exit`.
pub fn plan_local(
    task: &LocalTask,
    q_init: Point2,
    exit: &[AtomicProp],
    ws: &Workspace,
    tau: f64,
    params: &PlannerParams,
    local_index: usize,
) -> Result<(PointSequence, SatisfactionSet), PlannerError> {
    if !ws.is_free(q_init) {
        return Err(PlannerError::StartBlocked { x: q_init.x, y: q_init.y });
    }
    let mut failures: BTreeMap<Culprit, usize> = BTreeMap::new();
    for attempt in 0..params.max_restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(params.seed, local_index as u64, attempt as u64));
        match attempt_local(task, q_init, exit, ws, tau, params, &mut rng) {
            Ok(out) => return Ok(out),
            Err(c) => *failures.entry(c).or_default() += 1,
        }
    }
    let (culprit, count) = failures
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(c, n)| (*c, *n))
        .unwrap_or((None, 0));
    Err(PlannerError::LocalFailed {
        local: local_index,
        uati: task.uati,
        culprit: match culprit {
            Some(i) => task.subtasks[i].display(tau).to_string(),
            None => String::from("exit condition"),
        },
        failures: count,
        attempts: params.max_restarts.max(1),
    })
}

fn attempt_local(
    task: &LocalTask,
    q_init: Point2,
    exit: &[AtomicProp],
    ws: &Workspace,
    tau: f64,
    params: &PlannerParams,
    rng: &mut ChaCha8Rng,
) -> Result<(PointSequence, SatisfactionSet), Culprit> {
    let uati = task.uati;
    let (avoid, targets) = targets_for(task, exit, tau)?;
    let rules = EdgeRules { ws, avoid: &avoid, max_speed: params.max_speed };
    let tree_params = TreeParams {
        delta_tar: params.delta_tar,
        step: params.step,
        delta_t: params.delta_t,
        max_iters: params.max_iters_per_tree,
    };
    let time_range = (tick_time(uati.lo, tau), tick_time(uati.hi, tau) + params.lambda1);

    let mut path = alloc::vec![StVertex::root(q_init, tick_time(uati.lo, tau))];
    let mut now = uati.lo;
    let mut reach = |goal: TreeGoal, path: &mut Vec<StVertex>, now: &mut i64, culprit: Culprit| -> Result<i64, Culprit> {
        let window = TickInterval::try_new(goal.first_tick.lo.max(*now), goal.first_tick.hi).ok_or(culprit)?;
        let goal = TreeGoal { first_tick: window, ..goal };
        let root = *path.last().expect("non-empty path");
        let found = gen_tree(root, &goal, &rules, time_range, tau, &tree_params, rng).map_err(|_| culprit)?;
        let arrival = *found.vertices.last().expect("non-empty chain");
        path.extend(found.vertices.into_iter().skip(1));
        let end = goal.hold_end(found.first_tick);
        let t_end = tick_time(end, tau);
        if t_end > arrival.time {
            path.push(StVertex { pos: arrival.pos, time: t_end, parent: None });
        }
        *now = end;
        Ok(found.first_tick)
    };

    for target in targets {
        match target.step {
            Step::Once(goal) => {
                reach(goal, &mut path, &mut now, target.source)?;
            }
            Step::Patrol { set, ati, e } => {
                let mut window = TickInterval::new(ati.lo, ati.lo + e);
                loop {
                    let goal = TreeGoal { set: set.clone(), first_tick: window, hold: Hold::For(0) };
                    let k = reach(goal, &mut path, &mut now, target.source)?;
                    if k >= ati.hi - e {
                        break;
                    }
                    window = TickInterval::new(k + 1, (k + e).min(ati.hi));
                }
            }
        }
    }

    let seq = con(&path, uati, tau).map_err(|_| None)?;
    let mut pairs = SatisfactionSet::new();
    for (i, sub) in task.subtasks.iter().enumerate() {
        match stl_sat(&seq, sub, ws) {
            Ok((true, set)) => pairs.merge(&set),
            _ => return Err(Some(i)),
        }
    }
    Ok((seq, pairs))
}

/// Splits the local sub-tasks into time-windowed avoid regions and an
/// ordered target list ending with the exit condition.
fn targets_for(task: &LocalTask, exit: &[AtomicProp], tau: f64) -> Result<(Vec<TimedAvoid>, Vec<Target>), Culprit> {
    let uati = task.uati;
    let mut avoid = Vec::new();
    let mut keyed: Vec<((u8, i64), Target)> = Vec::new();
    for (i, sub) in task.subtasks.iter().enumerate() {
        let set = GoalSet::from_props(core::iter::once(&sub.prop)).ok_or(Some(i))?;
        let (a, b) = (sub.outer.lo, sub.outer.hi);
        let once = |first: TickInterval, hold: Hold| Step::Once(TreeGoal { set: set.clone(), first_tick: first, hold });
        let (key, step) = match (sub.kind, sub.inner) {
            (TemporalKind::Always, _) if sub.prop.negated => {
                avoid.push(TimedAvoid {
                    region: sub.prop.region.bounds,
                    from: tick_time(a, tau),
                    to: tick_time(b, tau),
                });
                continue;
            }
            (TemporalKind::Always, _) => ((0, a), once(TickInterval::new(uati.lo, a), Hold::Until(b))),
            (TemporalKind::Eventually, _) => ((1, a), once(TickInterval::new(a, b), Hold::For(0))),
            (TemporalKind::EventuallyAlways, Some(inner)) => (
                (1, a + inner.lo),
                once(TickInterval::new(a + inner.lo, b + inner.lo), Hold::For(inner.len())),
            ),
            (TemporalKind::AlwaysEventually, Some(inner)) => {
                let ati = sub.ati();
                if inner.len() == 0 {
                    ((0, ati.lo), once(TickInterval::new(uati.lo, ati.lo), Hold::Until(ati.hi)))
                } else {
                    ((1, ati.lo), Step::Patrol { set, ati, e: inner.len() })
                }
            }
            _ => unreachable!("nested kinds carry an inner interval"),
        };
        keyed.push((key, Target { source: Some(i), step }));
    }
    keyed.sort_by_key(|(k, _)| *k);
    let mut targets: Vec<Target> = keyed.into_iter().map(|(_, t)| t).collect();
    let exit_set = GoalSet::from_props(exit).ok_or(None)?;
    targets.push(Target {
        source: None,
        step: Step::Once(TreeGoal { set: exit_set, first_tick: uati, hold: Hold::Until(uati.hi) }),
    });
    Ok((avoid, targets))
}

/// Propositions the last waypoint of local task `i` must satisfy: those of
/// the next task's `G` sub-tasks that start exactly at the shared cut.
fn exit_props(decomp: &Decomposition, i: usize) -> Vec<AtomicProp> {
    let Some(next) = decomp.local_tasks.get(i + 1) else {
        return Vec::new();
    };
    next.subtasks
        .iter()
        .filter(|s| s.kind == TemporalKind::Always && s.outer.lo == next.uati.lo)
        .map(|s| s.prop.clone())
        .collect()
}

/// Plans every local task in order and stitches the results.
pub fn plan_global(decomp: &Decomposition, p0: Point2, ws: &Workspace, params: &PlannerParams) -> Result<GlobalPlan, PlannerError> {
    params.validate()?;
    let tau = decomp.tau;
    let mut history = PointSequence::new(tau, 0, Vec::new());
    let mut pairs = SatisfactionSet::new();
    let mut local_tasks = Vec::with_capacity(decomp.local_tasks.len());
    let mut resolutions = alloc::vec![usize::MAX; decomp.disjunctive_sets.len()];
    let mut q = p0;

    for (i, base) in decomp.local_tasks.iter().enumerate() {
        let mut task = base.clone();
        for (n, set) in decomp.disjunctive_sets.iter().enumerate() {
            if decomp.local_index_for(set.final_piece().ati()) != Some(i) {
                continue;
            }
            let earlier = set.pieces[..set.pieces.len() - 1].iter().enumerate().find_map(|(j, piece)| {
                match stl_sat(&history, piece, ws) {
                    Ok((true, found)) => Some((j, found)),
                    _ => None,
                }
            });
            match earlier {
                Some((j, found)) => {
                    resolutions[n] = j;
                    pairs.merge(&found);
                }
                None => {
                    resolutions[n] = set.pieces.len() - 1;
                    task.subtasks.push(set.final_piece().clone());
                }
            }
        }
        let exit = exit_props(decomp, i);
        let (seq, local_pairs) = plan_local(&task, q, &exit, ws, tau, params, i)?;
        q = *seq.points.last().expect("local sequence is non-empty");
        history.stitch(&seq);
        pairs.merge(&local_pairs);
        local_tasks.push(task);
    }

    Ok(GlobalPlan { waypoints: history, pairs, local_tasks, resolutions })
}

/// SplitMix64 over the three inputs.
pub(crate) fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
