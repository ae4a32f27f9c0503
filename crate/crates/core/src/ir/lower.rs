//! The interpretation function from checked statements to command lists.
//!
//! Input must come out of the well-formedness checker: every slot and every
//! `null`/`array(..)` type annotation is expected to be filled in.

use std::sync::Arc;

use super::command::{Command, StructRef, VarRef};
use super::value::{Label, Value};
use crate::syntax::ast::*;

/// Program-level facts lowering needs: struct identities and the null array.
pub struct LowerCtx<'a> {
    /// Struct names in declaration order; index = struct id = null label.
    pub structs: &'a [Arc<str>],
    pub null_array: Label,
}

impl LowerCtx<'_> {
    fn struct_ref(&self, name: &str) -> StructRef {
        let id = self
            .structs
            .iter()
            .position(|s| &**s == name)
            .unwrap_or_else(|| panic!("unresolved struct `{name}` reached lowering"));
        StructRef { name: self.structs[id].clone(), id: id as u16 }
    }
}

/// The null value of a syntactic type.
pub fn default_val(ty: &SynType, ctx: &LowerCtx<'_>) -> Value {
    match ty {
        SynType::Nat | SynType::Int => Value::Int(0),
        SynType::Bool => Value::Bool(false),
        SynType::String => Value::Str(Arc::from("")),
        SynType::Struct(name) => Value::Label(Label(ctx.struct_ref(name).id as u32)),
        SynType::Array(_) => Value::Label(ctx.null_array),
    }
}

pub fn interp_statements(stmts: &[Stmt], ctx: &LowerCtx<'_>) -> Vec<Command> {
    let mut out = Vec::new();
    for stmt in stmts {
        stmt_into(stmt, ctx, &mut out);
    }
    out
}

pub fn interp_expr(expr: &Expr, ctx: &LowerCtx<'_>) -> Vec<Command> {
    let mut out = Vec::new();
    expr_into(expr, ctx, &mut out);
    out
}

fn var_ref(name: &Name, slot: Option<u16>) -> VarRef {
    VarRef {
        name: Arc::from(name.text.as_str()),
        slot: slot.unwrap_or_else(|| panic!("unresolved variable `{}` reached lowering", name.text)),
    }
}

fn stmt_into(stmt: &Stmt, ctx: &LowerCtx<'_>, out: &mut Vec<Command>) {
    match stmt {
        Stmt::If(if_stmt) => {
            assert!(if_stmt.is_core(), "else chains must be desugared before lowering");
            let (cond, body) = &if_stmt.branches[0];
            expr_into(cond, ctx, out);
            out.push(Command::If(interp_statements(body, ctx).into()));
        }
        Stmt::VarDecl { name, value, slot, .. } => {
            expr_into(value, ctx, out);
            out.push(Command::PushThis);
            out.push(Command::Write(var_ref(name, *slot)));
        }
        Stmt::Update { target, value } => {
            expr_into(value, ctx, out);
            match target.segments.split_last() {
                None => {
                    out.push(Command::PushThis);
                    out.push(Command::Write(var_ref(&target.head, target.head_slot)));
                }
                Some((last, prefix)) => {
                    chain_into(target, prefix, ctx, out);
                    match last {
                        Segment::Field { name, slot } => out.push(Command::Write(var_ref(name, *slot))),
                        Segment::Index(index) => {
                            expr_into(index, ctx, out);
                            out.push(Command::WriteA);
                        }
                    }
                }
            }
        }
        Stmt::Construct { ty, args } => construct_into(ty, args, ctx, out),
    }
}

/// `⟦x1.⋯.xn⟧` restricted to the given segments of `chain`.
fn chain_into(chain: &VarChain, segments: &[Segment], ctx: &LowerCtx<'_>, out: &mut Vec<Command>) {
    out.push(Command::PushThis);
    out.push(Command::Read(var_ref(&chain.head, chain.head_slot)));
    for seg in segments {
        match seg {
            Segment::Field { name, slot } => out.push(Command::Read(var_ref(name, *slot))),
            Segment::Index(index) => {
                expr_into(index, ctx, out);
                out.push(Command::ReadA);
            }
        }
    }
}

fn construct_into(ty: &Name, args: &[Expr], ctx: &LowerCtx<'_>, out: &mut Vec<Command>) {
    for arg in args {
        expr_into(arg, ctx, out);
    }
    out.push(Command::Cons(ctx.struct_ref(&ty.text)));
}

fn expr_into(expr: &Expr, ctx: &LowerCtx<'_>, out: &mut Vec<Command>) {
    match expr {
        Expr::Lit(Literal::Int(n), _) => out.push(Command::Push(Value::Int(*n))),
        Expr::Lit(Literal::Bool(b), _) => out.push(Command::Push(Value::Bool(*b))),
        Expr::Lit(Literal::Str(s), _) => out.push(Command::Push(Value::Str(Arc::from(s.as_str())))),
        Expr::This(_) => out.push(Command::PushThis),
        Expr::Null { ty, .. } => {
            let ty = ty.as_ref().expect("untyped null reached lowering");
            out.push(Command::Push(default_val(ty, ctx)));
        }
        Expr::Var(chain) => chain_into(chain, &chain.segments, ctx, out),
        Expr::ArraySize(chain) => {
            chain_into(chain, &chain.segments, ctx, out);
            out.push(Command::Asize);
        }
        Expr::Not(inner, _) => {
            expr_into(inner, ctx, out);
            out.push(Command::Not);
        }
        Expr::Binary { op, lhs, rhs, .. } => {
            expr_into(lhs, ctx, out);
            expr_into(rhs, ctx, out);
            out.push(Command::Op(*op));
        }
        Expr::Construct { ty, args } => construct_into(ty, args, ctx, out),
        Expr::ArrayNew { size, elem, .. } => {
            let elem = elem.clone().expect("untyped array(..) reached lowering");
            expr_into(size, ctx, out);
            let default = default_val(&elem, ctx);
            out.push(Command::Arr { elem, default });
        }
    }
}
