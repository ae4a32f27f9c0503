//! Sequentially consistent execution: state, transition rules, schedulers,
//! race detection and canonical relabelling.

pub mod canon;
pub mod commands;
pub mod race;
pub mod rules;
pub mod run;
pub mod state;
pub mod trace;

pub use canon::canonicalize;
pub use commands::CommandList;
pub use race::{RaceKind, RaceReport, RaceTracker};
pub use rules::{
    apply_transition, done, enabled_transitions, Access, ApplyOptions, EngineError, Rule, RuntimeFault, StepRecord,
    Transition, VarKey,
};
pub use run::{run, Execution, Limits, RunOptions, RunResult, RunStatus, SchedulerPolicy};
pub use state::{
    initial_state, initial_state_with, ArrayInstance, Entry, ExecState, LabelOrder, RtItem, StructInstance,
};
pub use trace::{write_jsonl, TraceEvent};
