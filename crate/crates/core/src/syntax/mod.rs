//! Lexing, parsing, desugaring and well-formedness checking.

pub mod ast;
pub mod check;
pub mod desugar;
pub mod lexer;
pub mod parser;
pub mod pretty;

use serde::Serialize;
use thiserror::Error;

pub use ast::Pos;
pub use check::{check_well_formed, WfError, WfKind};
pub use desugar::desugar;
pub use parser::{parse_program, parse_schedule};
pub use pretty::{pretty_program, pretty_schedule};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
    /// Well-formedness rule violated at parse time, if any (keywords used as
    /// identifiers are rule 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<u8>,
}

impl ParseError {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        Self { pos, message: message.into(), rule: None }
    }

    pub fn keyword_as_identifier(pos: Pos, keyword: &str) -> Self {
        Self { pos, message: format!("keyword `{keyword}` cannot be used as an identifier"), rule: Some(1) }
    }
}
