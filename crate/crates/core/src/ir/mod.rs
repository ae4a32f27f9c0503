//! Stack-machine commands and the lowering from statements to commands.

pub mod command;
pub mod lower;
pub mod value;

pub use command::{render_commands, render_inline, Command, StructRef, VarRef};
pub use lower::{default_val, interp_expr, interp_statements, LowerCtx};
pub use value::{Label, Value};
