//! Turing machines: direct simulation, compilation to AuDaLa, and a
//! differential check between the two.

mod compile;
mod diff;
mod extract;
mod machine;
mod random;

pub use compile::compile_tm;
pub use diff::{differential_check, DiffError, DiffReport, Verdict};
pub use extract::{extract_configuration, extract_with_flag, ExtractError};
pub use machine::{tm_step, Dir, Rule, StepResult, TMConfiguration, TmError, TuringMachine};
pub use random::random_tm;
