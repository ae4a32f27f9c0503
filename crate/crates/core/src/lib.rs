//! Reference interpreter for AuDaLa, a data-autonomous parallel language.
//!
//! Pipeline: [`syntax::parse_program`] → [`syntax::check_well_formed`]
//! (desugars, checks, lowers) → [`engine::run`]. The [`tm`] module compiles
//! Turing machines to AuDaLa and checks the result against a direct
//! simulation.

pub mod engine;
pub mod ext;
pub mod ir;
pub mod program;
pub mod syntax;
pub mod tm;

use thiserror::Error;

pub use ext::Extensions;
pub use program::ValidatedProgram;

/// Anything that can go wrong before a program runs.
#[derive(Debug, Error)]
pub enum FrontendError {
    #[error("parse error at {0}")]
    Parse(#[from] syntax::ParseError),
    #[error("{} well-formedness error(s); first: {}", .0.len(), .0[0])]
    WellFormedness(Vec<syntax::WfError>),
}

/// Parses, desugars and checks `source`.
pub fn load_program(source: &str, ext: Extensions) -> Result<ValidatedProgram, FrontendError> {
    let ast = syntax::parse_program(source)?;
    syntax::check_well_formed(ast, ext).map_err(FrontendError::WellFormedness)
}
