//! Dynamic race detection over step executions.
//!
//! A window starts when a step execution starts (step call or iterator
//! entry) and ends at the next schedule transition that needs all instances
//! idle. Within a window, two distinct instances touching the same
//! parameter or array cell with at least one write is a race. Skipped writes
//! to null instances are not writes and are never recorded.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::rules::{Access, Rule, VarKey};
use super::state::ExecState;
use crate::ir::Label;
use crate::program::ValidatedProgram;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RaceKind {
    WriteWrite,
    ReadWrite,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RaceReport {
    /// Ordinal of the step execution in the run, from 0.
    pub window: usize,
    pub opened_by: Rule,
    /// The step(s) executed in the window, e.g. `reachability` or `T.init`.
    pub step: String,
    /// Iteration of the innermost enclosing fixpoint or iterator, from 1.
    pub loop_iteration: Option<u64>,
    pub target: Label,
    pub target_name: String,
    pub target_type: String,
    pub var: String,
    pub kind: RaceKind,
    pub writers: Vec<Label>,
    pub readers: Vec<Label>,
}

#[derive(Debug, Clone)]
struct Window {
    index: usize,
    opened_by: Rule,
    step: String,
    loop_iteration: Option<u64>,
    accesses: BTreeMap<(Label, VarKey), (BTreeSet<Label>, BTreeSet<Label>)>,
}

/// Accumulates accesses per window and turns them into reports.
#[derive(Debug, Clone, Default)]
pub struct RaceTracker {
    open: Option<Window>,
    next_index: usize,
    reports: Vec<RaceReport>,
    /// Race count per closed window, indexed by window ordinal.
    per_window: Vec<usize>,
}

impl RaceTracker {
    pub fn open(
        &mut self,
        opened_by: Rule,
        step: String,
        loop_iteration: Option<u64>,
        state: &ExecState,
        program: &ValidatedProgram,
    ) {
        self.close(state, program);
        self.open = Some(Window { index: self.next_index, opened_by, step, loop_iteration, accesses: BTreeMap::new() });
        self.next_index += 1;
    }

    pub fn record(&mut self, actor: Label, access: Access) {
        if let Some(w) = &mut self.open {
            let (writers, readers) = w.accesses.entry((access.target, access.var)).or_default();
            if access.write {
                writers.insert(actor);
            } else {
                readers.insert(actor);
            }
        }
    }

    pub fn close(&mut self, state: &ExecState, program: &ValidatedProgram) {
        let Some(w) = self.open.take() else { return };
        let before = self.reports.len();
        for ((target, var), (writers, readers)) in w.accesses {
            if writers.is_empty() || writers.union(&readers).nth(1).is_none() {
                continue;
            }
            let kind = if writers.len() >= 2 { RaceKind::WriteWrite } else { RaceKind::ReadWrite };
            let (target_type, var_name) = match (state.instance(target), var) {
                (Some(inst), VarKey::Param(slot)) => {
                    let info = program.struct_info(inst.ty);
                    (info.name.to_string(), info.slot_name(slot).to_string())
                }
                (_, VarKey::Cell(i)) => ("Array".to_string(), format!("[{i}]")),
                (None, VarKey::Param(slot)) => ("?".to_string(), format!("#{slot}")),
            };
            self.reports.push(RaceReport {
                window: w.index,
                opened_by: w.opened_by,
                step: w.step.clone(),
                loop_iteration: w.loop_iteration,
                target,
                target_name: program.label_name(target),
                target_type,
                var: var_name,
                kind,
                writers: writers.into_iter().collect(),
                readers: readers.into_iter().collect(),
            });
        }
        self.per_window.resize(w.index + 1, 0);
        self.per_window[w.index] = self.reports.len() - before;
    }

    pub fn reports(&self) -> &[RaceReport] {
        &self.reports
    }

    pub fn into_reports(self) -> Vec<RaceReport> {
        self.reports
    }

    /// Number of races found in each closed window.
    pub fn per_window(&self) -> &[usize] {
        &self.per_window
    }
}
