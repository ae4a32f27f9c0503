//! Scheduling policies and the execution driver.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::race::{RaceReport, RaceTracker};
use super::rules::{
    apply_transition, command_rule, enabled_transitions, schedule_rule, ApplyOptions, EngineError, Rule, RuntimeFault,
    StepRecord, Transition,
};
use super::state::{initial_state_with, ExecState, LabelOrder, RtItem};
use super::trace::TraceEvent;
use crate::ir::Label;
use crate::program::{SchedItem, ValidatedProgram};

/// How the driver picks among enabled transitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SchedulerPolicy {
    /// Rounds in which every busy instance executes one command, in creation
    /// order. Schedule rules fire between rounds.
    Lockstep,
    /// Uniform choice among enabled transitions from a seeded generator.
    SeededRandom(u64),
    /// Always the oldest busy instance; schedule rules only when no command
    /// can fire.
    Sequential,
}

impl SchedulerPolicy {
    /// Parses `lockstep`, `random` or `sequential`; `seed` is used by `random`.
    pub fn parse(name: &str, seed: u64) -> Result<Self, String> {
        match name {
            "lockstep" => Ok(Self::Lockstep),
            "random" => Ok(Self::SeededRandom(seed)),
            "sequential" => Ok(Self::Sequential),
            other => Err(format!("unknown policy `{other}` (expected lockstep, random or sequential)")),
        }
    }
}

impl fmt::Display for SchedulerPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Lockstep => f.write_str("lockstep"),
            Self::SeededRandom(seed) => write!(f, "random(seed {seed})"),
            Self::Sequential => f.write_str("sequential"),
        }
    }
}

impl FromStr for SchedulerPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Iterations allowed per fixpoint or iterator activation.
    pub max_fixpoint_iterations: u64,
    pub max_total_transitions: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_fixpoint_iterations: 10_000, max_total_transitions: 50_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub policy: SchedulerPolicy,
    pub limits: Limits,
    pub label_order: LabelOrder,
    pub apply: ApplyOptions,
    /// Keep a [`TraceEvent`] per transition.
    pub trace: bool,
    /// Track accesses and report races per step execution.
    pub races: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            policy: SchedulerPolicy::Lockstep,
            limits: Limits::default(),
            label_order: LabelOrder::Ascending,
            apply: ApplyOptions::default(),
            trace: false,
            races: false,
        }
    }
}

impl RunOptions {
    pub fn with_policy(policy: SchedulerPolicy) -> Self {
        Self { policy, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    /// A limit tripped; `reason` names it and the active loop, if any.
    DivergenceSuspected {
        reason: String,
    },
    /// No transition is enabled although the run has not finished.
    Stuck,
    RuntimeFault {
        label: Label,
        fault: RuntimeFault,
    },
}

impl RunStatus {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunStatus::Completed => 0,
            RunStatus::DivergenceSuspected { .. } => 2,
            RunStatus::Stuck => 3,
            RunStatus::RuntimeFault { .. } => 4,
        }
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunStatus::Completed => f.write_str("completed"),
            RunStatus::DivergenceSuspected { reason } => write!(f, "divergence suspected: {reason}"),
            RunStatus::Stuck => f.write_str("stuck"),
            RunStatus::RuntimeFault { label, fault } => write!(f, "runtime fault in instance {label}: {fault}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub state: ExecState,
    pub status: RunStatus,
    pub transitions: u64,
    pub trace: Vec<TraceEvent>,
    pub races: Vec<RaceReport>,
    pub warnings: Vec<String>,
}

/// A run in progress. Drive it with [`Execution::step`] to observe every
/// transition, or finish it with [`Execution::run`].
pub struct Execution<'p> {
    program: &'p ValidatedProgram,
    state: ExecState,
    opts: RunOptions,
    rng: ChaCha8Rng,
    /// Lockstep: slots still to move in the current round, last first.
    round: Vec<u32>,
    /// Iteration counter per active fixpoint/iterator, innermost last.
    loop_iterations: Vec<u64>,
    transitions: u64,
    trace: Vec<TraceEvent>,
    races: RaceTracker,
    warnings: Vec<String>,
    status: Option<RunStatus>,
}

impl<'p> Execution<'p> {
    pub fn new(program: &'p ValidatedProgram, opts: RunOptions) -> Self {
        Self::resume(program, initial_state_with(program, opts.label_order), opts)
    }

    /// Continues from an arbitrary state. Loops already active in `state`
    /// start with an iteration count of 1.
    pub fn resume(program: &'p ValidatedProgram, state: ExecState, opts: RunOptions) -> Self {
        let seed = match opts.policy {
            SchedulerPolicy::SeededRandom(seed) => seed,
            _ => 0,
        };
        let depth = state.stability.len();
        Self {
            program,
            state,
            opts,
            rng: ChaCha8Rng::seed_from_u64(seed),
            round: Vec::new(),
            loop_iterations: vec![1; depth],
            transitions: 0,
            trace: Vec::new(),
            races: RaceTracker::default(),
            warnings: Vec::new(),
            status: None,
        }
    }

    pub fn state(&self) -> &ExecState {
        &self.state
    }

    pub fn program(&self) -> &'p ValidatedProgram {
        self.program
    }

    pub fn status(&self) -> Option<&RunStatus> {
        self.status.as_ref()
    }

    pub fn transitions(&self) -> u64 {
        self.transitions
    }

    pub fn races(&self) -> &RaceTracker {
        &self.races
    }

    /// The schedule rule that is enabled now, if any.
    pub fn pending_schedule_rule(&self) -> Option<Rule> {
        schedule_rule(&self.state, self.program)
    }

    /// Iteration counters of the active loops, innermost last.
    pub fn loop_iterations(&self) -> &[u64] {
        &self.loop_iterations
    }

    fn choose(&mut self) -> Option<Transition> {
        let (state, program) = (&self.state, self.program);
        match self.opts.policy {
            SchedulerPolicy::Lockstep => loop {
                if let Some(slot) = self.round.pop() {
                    if command_rule(state, program, slot as usize).is_some() {
                        return Some(Transition::Command(state.label_of(slot as usize)));
                    }
                    continue;
                }
                if let Some(rule) = schedule_rule(state, program) {
                    return Some(Transition::Schedule(rule));
                }
                let mut slots: Vec<u32> = state
                    .active_slots()
                    .iter()
                    .copied()
                    .filter(|&s| command_rule(state, program, s as usize).is_some())
                    .collect();
                if slots.is_empty() {
                    return None;
                }
                slots.sort_unstable_by(|a, b| b.cmp(a));
                self.round = slots;
            },
            SchedulerPolicy::SeededRandom(_) => {
                let active = state.active_slots();
                let sched = schedule_rule(state, program);
                let n = active.len() + usize::from(sched.is_some());
                if n == 0 {
                    return None;
                }
                let k = self.rng.gen_range(0..n);
                if k == active.len() {
                    return sched.map(Transition::Schedule);
                }
                let slot = active[k] as usize;
                if command_rule(state, program, slot).is_some() {
                    return Some(Transition::Command(state.label_of(slot)));
                }
                // Some busy instance is blocked: choose among the enabled ones.
                let enabled = enabled_transitions(state, program);
                if enabled.is_empty() {
                    return None;
                }
                let k = self.rng.gen_range(0..enabled.len());
                Some(enabled[k])
            }
            SchedulerPolicy::Sequential => {
                let slot = state
                    .active_slots()
                    .iter()
                    .copied()
                    .filter(|&s| command_rule(state, program, s as usize).is_some())
                    .min();
                match slot {
                    Some(s) => Some(Transition::Command(state.label_of(s as usize))),
                    None => schedule_rule(state, program).map(Transition::Schedule),
                }
            }
        }
    }

    fn describe_window(&self, rule: Rule) -> String {
        match self.state.schedule.front() {
            Some(RtItem::Item(item @ (SchedItem::Call { .. } | SchedItem::Iter { .. }))) => {
                self.program.render_schedule(std::slice::from_ref(item))
            }
            _ => rule.to_string(),
        }
    }

    fn active_loop_description(&self) -> Option<String> {
        self.state.schedule.iter().find_map(|item| match item {
            RtItem::AFix { body, relevance } => Some(
                self.program.render_schedule(&[SchedItem::Fix { body: body.clone(), relevance: relevance.clone() }]),
            ),
            RtItem::AIter { steps, .. } => {
                Some(self.program.render_schedule(&[SchedItem::Iter { steps: steps.clone() }]))
            }
            RtItem::Item(_) => None,
        })
    }

    fn finish(&mut self, status: RunStatus) {
        self.races.close(&self.state, self.program);
        self.status = Some(status);
    }

    /// Executes one transition. Returns `None` once the run has finished;
    /// the outcome is then available from [`Execution::status`].
    pub fn step(&mut self) -> Option<StepRecord> {
        if self.status.is_some() {
            return None;
        }
        let Some(transition) = self.choose() else {
            let status = if self.state.schedule.is_empty() && self.state.done() {
                RunStatus::Completed
            } else {
                RunStatus::Stuck
            };
            self.finish(status);
            return None;
        };
        if self.transitions >= self.opts.limits.max_total_transitions {
            let mut reason = format!("transition limit of {} reached", self.opts.limits.max_total_transitions);
            if let Some(active) = self.active_loop_description() {
                reason.push_str(&format!(" inside {active}"));
            }
            self.finish(RunStatus::DivergenceSuspected { reason });
            return None;
        }

        let window = match transition {
            Transition::Schedule(rule @ (Rule::InitG | Rule::InitL | Rule::IterInit)) if self.opts.races => {
                Some((rule, self.describe_window(rule)))
            }
            Transition::Schedule(Rule::IterIter) => None,
            Transition::Schedule(_) if self.opts.races => {
                self.races.close(&self.state, self.program);
                None
            }
            _ => None,
        };

        let record = match apply_transition(&mut self.state, self.program, transition, self.opts.apply) {
            Ok(r) => r,
            Err(EngineError::Fault { label, fault }) => {
                self.finish(RunStatus::RuntimeFault { label, fault });
                return None;
            }
            Err(e @ EngineError::IllegalTransition(_)) => panic!("engine defect: {e}"),
        };
        self.transitions += 1;

        if let Some((rule, step)) = window {
            let iteration = self.loop_iterations.last().copied();
            self.races.open(rule, step, iteration, &self.state, self.program);
        }
        if let (true, Some(actor), Some(access)) = (self.opts.races, record.actor, record.access) {
            self.races.record(actor, access);
        }
        if let Some(w) = &record.warning {
            self.warnings.push(format!("{}: {w}", self.program.label_name(record.actor.expect("command"))));
        }
        if self.opts.trace {
            self.trace.push(TraceEvent::new(self.transitions - 1, &record, &self.state, self.program));
        }

        match record.rule {
            r if r.is_fix_init() || r == Rule::IterInit => self.loop_iterations.push(1),
            Rule::FixTerm | Rule::IterTerm => {
                self.loop_iterations.pop();
            }
            Rule::FixIter | Rule::IterIter => {
                let count = self.loop_iterations.last_mut().expect("active loop");
                *count += 1;
                if *count > self.opts.limits.max_fixpoint_iterations {
                    let reason = format!(
                        "{} exceeded {} iterations",
                        self.active_loop_description().unwrap_or_else(|| "loop".into()),
                        self.opts.limits.max_fixpoint_iterations
                    );
                    self.finish(RunStatus::DivergenceSuspected { reason });
                }
            }
            _ => {}
        }
        Some(record)
    }

    /// Steps until `stop` holds after a transition or the run finishes.
    /// Returns whether `stop` fired.
    pub fn run_until(&mut self, mut stop: impl FnMut(&Self, &StepRecord) -> bool) -> bool {
        while let Some(rec) = self.step() {
            if stop(self, &rec) {
                return true;
            }
        }
        false
    }

    /// Executes the remaining transitions and returns the outcome.
    pub fn run(mut self) -> RunResult {
        while self.step().is_some() {}
        RunResult {
            status: self.status.expect("finished run"),
            state: self.state,
            transitions: self.transitions,
            trace: self.trace,
            races: self.races.into_reports(),
            warnings: self.warnings,
        }
    }
}

/// Runs `program` to completion, divergence or fault.
pub fn run(program: &ValidatedProgram, opts: RunOptions) -> RunResult {
    Execution::new(program, opts).run()
}
