//! Differential check of a compiled machine against direct simulation.

use serde::Serialize;
use thiserror::Error;

use super::compile::compile_tm;
use super::extract::extract_with_flag;
use super::machine::{tm_step, StepResult, TMConfiguration, TmError, TuringMachine};
use crate::engine::{Execution, Limits, RaceReport, Rule, RunOptions, SchedulerPolicy};
use crate::{load_program, Extensions, FrontendError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    /// Every checkpoint matched. `halted` holds the acceptance flag if the
    /// machine halted within the bound.
    Agreement { steps: u64, halted: Option<bool> },
    /// The first mismatch, after `step` machine steps.
    Divergence { step: u64, reason: String },
}

impl Verdict {
    pub fn is_agreement(&self) -> bool {
        matches!(self, Verdict::Agreement { .. })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiffReport {
    pub verdict: Verdict,
    /// Idle states compared against the simulation.
    pub checkpoints: u64,
    pub transitions: u64,
    pub races: Vec<RaceReport>,
}

#[derive(Debug, Error)]
pub enum DiffError {
    #[error(transparent)]
    Machine(#[from] TmError),
    #[error("compiled program was rejected: {0}")]
    Frontend(#[from] FrontendError),
}

/// Compiles `tm` on `input`, runs it under `policy` and compares the
/// configuration at every fixpoint checkpoint with [`tm_step`], for at most
/// `bound` machine steps. A race inside any `transition` execution also
/// counts as divergence.
pub fn differential_check(
    tm: &TuringMachine,
    input: &[i64],
    bound: u64,
    policy: SchedulerPolicy,
) -> Result<DiffReport, DiffError> {
    let source = compile_tm(tm, input)?;
    let program = load_program(&source, Extensions::none())?;
    let opts = RunOptions {
        limits: Limits { max_fixpoint_iterations: bound + 2, ..Limits::default() },
        races: true,
        ..RunOptions::with_policy(policy)
    };
    let mut exec = Execution::new(&program, opts);
    let mut config = TMConfiguration::initial(input);
    let mut steps = 0u64;
    let mut checkpoints = 0u64;

    let divergence = |step: u64, reason: String| Verdict::Divergence { step, reason };
    let verdict = loop {
        let Some(rec) = exec.step() else {
            let status = exec.status().expect("finished run").clone();
            break divergence(steps, format!("run ended before the fixpoint terminated: {status}"));
        };
        if !(rec.rule.is_fix_init() || matches!(rec.rule, Rule::FixIter | Rule::FixTerm)) {
            continue;
        }
        if let Some(r) = exec.races().reports().first() {
            break divergence(steps, format!("race on {}.{} during {}", r.target_name, r.var, r.step));
        }
        let (found, flag) = match extract_with_flag(exec.state(), &program) {
            Ok(x) => x,
            Err(e) => break divergence(steps, e.to_string()),
        };
        checkpoints += 1;
        let mut halted = None;
        match (rec.rule, tm_step(&config, tm)) {
            (Rule::FixIter, StepResult::Next(next)) => {
                config = next;
                steps += 1;
            }
            (Rule::FixIter, StepResult::Halt { .. }) => {
                break divergence(steps, "the program changed state after the machine halted".into());
            }
            (Rule::FixTerm, StepResult::Halt { accepting }) => halted = Some(accepting),
            (Rule::FixTerm, StepResult::Next(_)) => {
                break divergence(steps, "the program reached a fixpoint while the machine can still move".into());
            }
            _ => {}
        }
        if found != config {
            break divergence(steps, format!("expected {config}, found {found}"));
        }
        if flag != tm.is_accepting(config.state) {
            break divergence(steps, format!("accepting flag is {flag} in state {}", config.state));
        }
        if halted.is_some() || steps >= bound {
            break Verdict::Agreement { steps, halted };
        }
    };
    Ok(DiffReport { verdict, checkpoints, transitions: exec.transitions(), races: exec.races().reports().to_vec() })
}
