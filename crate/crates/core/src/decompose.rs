//! Timeline decomposition of a conjunctive task into local tasks.
//!
//! Cut points are the ATI upper bounds that do not fall strictly inside a
//! nested sub-task's ATI, plus zero. Each sub-task is then split at the cuts
//! lying strictly inside its ATI: `G` splits into a conjunction, `F` into a
//! disjunction whose resolution is deferred to the planner, and nested
//! sub-tasks never split.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::stl::{format_seconds, Formula, SubTask, TemporalKind, TickInterval};

/// Conjunction of local sub-tasks over one slice of the timeline.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTask {
    pub uati: TickInterval,
    pub subtasks: Vec<SubTask>,
}

/// The pieces of an `F` sub-task whose ATI crosses a cut. Exactly one piece
/// has to hold.
#[derive(Debug, Clone, PartialEq)]
pub struct DisjunctiveFSet {
    /// Index of the originating sub-task in the formula.
    pub source: usize,
    pub pieces: Vec<SubTask>,
}

impl DisjunctiveFSet {
    pub fn final_piece(&self) -> &SubTask {
        self.pieces.last().expect("disjunctive sets have at least two pieces")
    }
}

/// How a single sub-task is distributed over the cuts.
#[derive(Debug, Clone, PartialEq)]
pub enum Split {
    Whole(SubTask),
    Conjunction(Vec<SubTask>),
    Disjunction(Vec<SubTask>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub tau: f64,
    /// `xi_0 = 0 < xi_1 < ... < xi_N = horizon`, in ticks.
    pub cuts: Vec<i64>,
    pub local_tasks: Vec<LocalTask>,
    pub disjunctive_sets: Vec<DisjunctiveFSet>,
}

/// Sorted cut points in ticks, starting at 0 and ending at the horizon.
pub fn compute_cuts(formula: &Formula) -> Vec<i64> {
    let nested: Vec<TickInterval> = formula.subtasks.iter().filter(|s| s.is_nested()).map(|s| s.ati()).collect();
    let mut cuts: Vec<i64> = formula
        .subtasks
        .iter()
        .map(|s| s.ati().hi)
        .filter(|&xi| !nested.iter().any(|n| n.interior_contains(xi)))
        .collect();
    cuts.push(0);
    cuts.sort_unstable();
    cuts.dedup();
    assert_eq!(
        cuts.last().copied(),
        Some(formula.horizon()),
        "horizon lies inside a nested ATI"
    );
    cuts
}

/// Splits `sub` at every cut strictly inside its ATI.
pub fn split_subtask(sub: &SubTask, cuts: &[i64]) -> Split {
    let ati = sub.ati();
    let inner_cuts: Vec<i64> = cuts.iter().copied().filter(|&c| ati.interior_contains(c)).collect();
    if inner_cuts.is_empty() {
        return Split::Whole(sub.clone());
    }
    assert!(!sub.is_nested(), "nested sub-task spans a cut");
    let mut bounds = Vec::with_capacity(inner_cuts.len() + 2);
    bounds.push(ati.lo);
    bounds.extend(inner_cuts);
    bounds.push(ati.hi);
    let pieces: Vec<SubTask> = bounds
        .windows(2)
        .map(|w| sub.with_outer(TickInterval::new(w[0], w[1])))
        .collect();
    match sub.kind {
        TemporalKind::Always => Split::Conjunction(pieces),
        TemporalKind::Eventually => Split::Disjunction(pieces),
        _ => unreachable!(),
    }
}

/// Decomposes `formula` into local tasks. Disjunctive sets are left
/// unassigned.
pub fn decompose(formula: &Formula) -> Decomposition {
    let cuts = compute_cuts(formula);
    let mut local_tasks: Vec<LocalTask> = cuts
        .windows(2)
        .map(|w| LocalTask { uati: TickInterval::new(w[0], w[1]), subtasks: Vec::new() })
        .collect();
    let mut disjunctive_sets = Vec::new();
    for (source, sub) in formula.subtasks.iter().enumerate() {
        match split_subtask(sub, &cuts) {
            Split::Whole(s) => assign(&mut local_tasks, s),
            Split::Conjunction(pieces) => {
                for p in pieces {
                    assign(&mut local_tasks, p);
                }
            }
            Split::Disjunction(pieces) => disjunctive_sets.push(DisjunctiveFSet { source, pieces }),
        }
    }
    Decomposition { tau: formula.tau, cuts, local_tasks, disjunctive_sets }
}

fn assign(tasks: &mut [LocalTask], sub: SubTask) {
    let ati = sub.ati();
    let slot = tasks
        .iter_mut()
        .find(|t| t.uati.contains_interval(ati))
        .expect("every piece fits one local UATI");
    slot.subtasks.push(sub);
}

impl Decomposition {
    /// Index of the first local task whose closed UATI contains `ati`.
    pub fn local_index_for(&self, ati: TickInterval) -> Option<usize> {
        self.local_tasks.iter().position(|t| t.uati.contains_interval(ati))
    }

    /// Copy in which every disjunctive set is resolved to its final piece.
    ///
    /// This is what the planner ends up with when no earlier piece happens to
    /// be satisfied along the way.
    pub fn with_fallback_assignment(&self) -> Decomposition {
        let mut out = self.clone();
        for set in &self.disjunctive_sets {
            assign(&mut out.local_tasks, set.final_piece().clone());
        }
        out.disjunctive_sets.clear();
        out
    }

    /// Human-readable listing of cuts, local tasks and disjunctive sets.
    pub fn report(&self) -> String {
        let tau = self.tau;
        let mut s = String::new();
        let cuts: Vec<String> = self.cuts.iter().map(|&c| format_seconds(c, tau)).collect();
        let _ = writeln!(s, "cuts: ({})", cuts.join(", "));
        for (i, t) in self.local_tasks.iter().enumerate() {
            let _ = writeln!(
                s,
                "local task {} on [{}, {}]:",
                i + 1,
                format_seconds(t.uati.lo, tau),
                format_seconds(t.uati.hi, tau)
            );
            if t.subtasks.is_empty() {
                let _ = writeln!(s, "  (empty)");
            }
            for sub in &t.subtasks {
                let _ = writeln!(s, "  {}", sub.display(tau));
            }
        }
        for (n, d) in self.disjunctive_sets.iter().enumerate() {
            let _ = writeln!(s, "disjunctive set {} (sub-task {}), one of:", n + 1, d.source + 1);
            for p in &d.pieces {
                let _ = writeln!(s, "  {}", p.display(tau));
            }
        }
        s
    }
}
