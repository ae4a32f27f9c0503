use std::fmt::Write;
use std::sync::Arc;

use super::value::{Label, Value};
use crate::syntax::ast::{BinOp, SynType};

/// A variable named by a read or write command, with its resolved position
/// in the environment of the instance the command targets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarRef {
    pub name: Arc<str>,
    pub slot: u16,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructRef {
    pub name: Arc<str>,
    pub id: u16,
}

/// The atomic actions executed by struct instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Push(Value),
    PushThis,
    Read(VarRef),
    Write(VarRef),
    Cons(StructRef),
    If(Arc<[Command]>),
    Not,
    Op(BinOp),
    /// Indexed array read; stack `..;array;index`.
    ReadA,
    /// Indexed array write; stack `..;value;array;index`.
    WriteA,
    /// Array allocation; stack `..;size`. Cells start at `default`.
    Arr {
        elem: SynType,
        default: Value,
    },
    /// Array size; stack `..;array`.
    Asize,
}

impl Command {
    /// One-line rendering; `If` bodies are elided.
    pub fn head_text(&self, label_name: &dyn Fn(Label) -> String) -> String {
        match self {
            Command::Push(v) => format!("Push({})", v.render(label_name)),
            Command::PushThis => "Push(this)".into(),
            Command::Read(v) => format!("Rd({})", v.name),
            Command::Write(v) => format!("Wr({})", v.name),
            Command::Cons(s) => format!("Cons({})", s.name),
            Command::If(body) => format!("If(<{} commands>)", body.len()),
            Command::Not => "Not".into(),
            Command::Op(op) => format!("Op({op})"),
            Command::ReadA => "RdA".into(),
            Command::WriteA => "WrA".into(),
            Command::Arr { elem, .. } => format!("Arr({elem})"),
            Command::Asize => "Asize".into(),
        }
    }

    /// Number of commands including those nested in `If` bodies.
    pub fn size(&self) -> usize {
        match self {
            Command::If(body) => 1 + body.iter().map(Command::size).sum::<usize>(),
            _ => 1,
        }
    }
}

/// Stable textual form: one command per line, `If` bodies indented by two
/// spaces and closed by a `)` line.
pub fn render_commands(commands: &[Command], label_name: &dyn Fn(Label) -> String) -> String {
    let mut out = String::new();
    render_into(&mut out, commands, 0, label_name);
    out
}

fn render_into(out: &mut String, commands: &[Command], depth: usize, label_name: &dyn Fn(Label) -> String) {
    for cmd in commands {
        for _ in 0..depth {
            out.push_str("  ");
        }
        match cmd {
            Command::If(body) => {
                out.push_str("If(\n");
                render_into(out, body, depth + 1, label_name);
                for _ in 0..depth {
                    out.push_str("  ");
                }
                out.push_str(")\n");
            }
            other => {
                let _ = writeln!(out, "{}", other.head_text(label_name));
            }
        }
    }
}

/// Single-line rendering `a; b; If(c; d)`.
pub fn render_inline(commands: &[Command], label_name: &dyn Fn(Label) -> String) -> String {
    let parts: Vec<String> = commands
        .iter()
        .map(|c| match c {
            Command::If(body) => format!("If({})", render_inline(body, label_name)),
            other => other.head_text(label_name),
        })
        .collect();
    parts.join("; ")
}
