//! Well-formedness and type checking.
//!
//! Checks the six structural rules (keywords are rejected earlier by the
//! parser), resolves every name to an environment slot, annotates `null`
//! and `array(..)` with their types, and verifies that extension syntax is
//! only used when the matching extension is enabled.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use super::ast::*;
use super::desugar::desugar;
use crate::ext::Extensions;
use crate::program::ValidatedProgram;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WfKind {
    /// One of the numbered well-formedness rules.
    Rule(u8),
    Type,
    /// Unknown or duplicated struct, step, parameter or variable name.
    Name,
    /// Syntax belonging to an extension that is not enabled.
    Extension,
}

impl fmt::Display for WfKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WfKind::Rule(n) => write!(f, "rule-{n}"),
            WfKind::Type => f.write_str("type"),
            WfKind::Name => f.write_str("name"),
            WfKind::Extension => f.write_str("extension"),
        }
    }
}

impl Serialize for WfKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{pos}: [{kind}] {message}")]
pub struct WfError {
    pub kind: WfKind,
    pub message: String,
    pub pos: Pos,
}

/// Checks `program` (desugaring it first) and builds the executable form.
pub fn check_well_formed(program: Program, ext: Extensions) -> Result<ValidatedProgram, Vec<WfError>> {
    let mut program = desugar(program);
    let mut checker = Checker::new(&program, ext);
    let mut locals = Vec::with_capacity(program.structs.len());
    for (idx, def) in program.structs.iter_mut().enumerate() {
        locals.push(checker.check_struct(idx, def));
    }
    checker.check_schedule(&program.schedule);
    if checker.errors.is_empty() {
        Ok(ValidatedProgram::build(program, locals, ext))
    } else {
        Err(checker.errors)
    }
}

struct Sig {
    name: String,
    params: Vec<(String, SynType)>,
    steps: Vec<String>,
}

struct Checker {
    sigs: Vec<Sig>,
    index: HashMap<String, usize>,
    ext: Extensions,
    errors: Vec<WfError>,
}

/// Per-step resolution state.
struct StepCx<'a> {
    this: usize,
    scopes: Vec<HashMap<String, (SynType, u16)>>,
    /// Every local declared anywhere in the step, to tell rule 6 apart from
    /// a plain unknown name.
    declared_in_step: HashSet<String>,
    /// Locals of the whole struct, slot = params.len() + index.
    locals: &'a mut Vec<(String, SynType)>,
}

impl StepCx<'_> {
    fn lookup(&self, name: &str) -> Option<&(SynType, u16)> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }
}

enum ChainType {
    Value(SynType),
    /// The chain ends in `.s` applied to an array.
    Size,
}

fn collect_decls(stmts: &[Stmt], out: &mut HashSet<String>) {
    for stmt in stmts {
        match stmt {
            Stmt::VarDecl { name, .. } => {
                out.insert(name.text.clone());
            }
            Stmt::If(i) => {
                for (_, body) in &i.branches {
                    collect_decls(body, out);
                }
            }
            _ => {}
        }
    }
}

impl Checker {
    fn new(program: &Program, ext: Extensions) -> Self {
        let sigs: Vec<Sig> = program
            .structs
            .iter()
            .map(|d| Sig {
                name: d.name.text.clone(),
                params: d.params.iter().map(|p| (p.name.text.clone(), p.ty.clone())).collect(),
                steps: d.steps.iter().map(|s| s.name.text.clone()).collect(),
            })
            .collect();
        let mut checker = Self { sigs: Vec::new(), index: HashMap::new(), ext, errors: Vec::new() };
        for (i, (sig, def)) in sigs.iter().zip(&program.structs).enumerate() {
            if checker.index.insert(sig.name.clone(), i).is_some() {
                checker.error(WfKind::Name, def.name.pos, format!("struct `{}` is declared more than once", sig.name));
            }
        }
        // Duplicate declarations resolve to the first one.
        let mut first = HashMap::new();
        for (i, sig) in sigs.iter().enumerate() {
            first.entry(sig.name.clone()).or_insert(i);
        }
        checker.index = first;
        checker.sigs = sigs;
        checker
    }

    fn error(&mut self, kind: WfKind, pos: Pos, message: impl Into<String>) {
        self.errors.push(WfError { kind, message: message.into(), pos });
    }

    fn require_ext(&mut self, enabled: bool, flag: &str, what: &str, pos: Pos) {
        if !enabled {
            self.error(WfKind::Extension, pos, format!("{what} requires the `{flag}` extension (`--ext {flag}`)"));
        }
    }

    fn check_type(&mut self, ty: &SynType, pos: Pos) {
        match ty {
            SynType::Struct(name) if !self.index.contains_key(name) => {
                self.error(WfKind::Name, pos, format!("unknown struct type `{name}`"));
            }
            SynType::Array(elem) => {
                self.require_ext(self.ext.arrays, "arrays", "array type", pos);
                self.check_type(elem, pos);
            }
            _ => {}
        }
    }

    fn param_of(&self, sid: usize, name: &str) -> Option<(u16, SynType)> {
        self.sigs[sid]
            .params
            .iter()
            .position(|(p, _)| p == name)
            .map(|i| (i as u16, self.sigs[sid].params[i].1.clone()))
    }

    fn check_struct(&mut self, sid: usize, def: &mut StructDef) -> Vec<(String, SynType)> {
        let mut seen = HashSet::new();
        for p in &def.params {
            if !seen.insert(p.name.text.as_str()) {
                self.error(
                    WfKind::Rule(3),
                    p.name.pos,
                    format!("parameter `{}` is declared more than once", p.name.text),
                );
            }
            self.check_type(&p.ty, p.name.pos);
        }
        let mut seen = HashSet::new();
        for s in &def.steps {
            if !seen.insert(s.name.text.as_str()) {
                self.error(
                    WfKind::Rule(2),
                    s.name.pos,
                    format!("step `{}` is declared more than once in `{}`", s.name.text, def.name.text),
                );
            }
        }
        let mut locals = Vec::new();
        for step in &mut def.steps {
            let mut declared_in_step = HashSet::new();
            collect_decls(&step.body, &mut declared_in_step);
            let mut cx = StepCx { this: sid, scopes: vec![HashMap::new()], declared_in_step, locals: &mut locals };
            self.block(&mut step.body, &mut cx);
        }
        locals
    }

    fn block(&mut self, stmts: &mut [Stmt], cx: &mut StepCx<'_>) {
        cx.scopes.push(HashMap::new());
        for stmt in stmts {
            self.stmt(stmt, cx);
        }
        cx.scopes.pop();
    }

    fn stmt(&mut self, stmt: &mut Stmt, cx: &mut StepCx<'_>) {
        match stmt {
            Stmt::If(if_stmt) => {
                for (cond, body) in &mut if_stmt.branches {
                    self.expect_type(cond, &SynType::Bool, cx, "if condition");
                    self.block(body, cx);
                }
                if let Some(body) = &mut if_stmt.otherwise {
                    self.block(body, cx);
                }
            }
            Stmt::VarDecl { ty, name, value, slot } => {
                self.check_type(ty, name.pos);
                self.expect_type(value, ty, cx, "initializer");
                if self.param_of(cx.this, &name.text).is_some() {
                    self.error(
                        WfKind::Rule(4),
                        name.pos,
                        format!("local variable `{}` shadows a parameter", name.text),
                    );
                    return;
                }
                if cx.lookup(&name.text).is_some() {
                    self.error(
                        WfKind::Rule(5),
                        name.pos,
                        format!("local variable `{}` is already declared", name.text),
                    );
                    return;
                }
                let n_params = self.sigs[cx.this].params.len();
                let idx = match cx.locals.iter().position(|(l, _)| *l == name.text) {
                    Some(i) => i,
                    None => {
                        cx.locals.push((name.text.clone(), ty.clone()));
                        cx.locals.len() - 1
                    }
                };
                let s = (n_params + idx) as u16;
                *slot = Some(s);
                cx.scopes.last_mut().expect("scope").insert(name.text.clone(), (ty.clone(), s));
            }
            Stmt::Update { target, value } => {
                let Some(ty) = self.chain(target, cx, false) else {
                    // Still check the value for its own errors.
                    self.infer(value, None, cx);
                    return;
                };
                let ChainType::Value(ty) = ty else { unreachable!("size chains are not assignable") };
                self.expect_type(value, &ty, cx, "assigned value");
            }
            Stmt::Construct { ty, args } => {
                self.construct(ty, args, cx);
            }
        }
    }

    fn expect_type(&mut self, expr: &mut Expr, want: &SynType, cx: &mut StepCx<'_>, what: &str) {
        if let Some(got) = self.infer(expr, Some(want), cx) {
            if !got.assignable_to(want) {
                self.error(WfKind::Type, expr.pos(), format!("{what} has type {got}, expected {want}"));
            }
        }
    }

    fn construct(&mut self, ty: &Name, args: &mut [Expr], cx: &mut StepCx<'_>) -> Option<SynType> {
        let Some(&sid) = self.index.get(&ty.text) else {
            self.error(WfKind::Name, ty.pos, format!("unknown struct type `{}`", ty.text));
            for a in args.iter_mut() {
                self.infer(a, None, cx);
            }
            return None;
        };
        let params: Vec<(String, SynType)> = self.sigs[sid].params.clone();
        if params.len() != args.len() {
            self.error(
                WfKind::Type,
                ty.pos,
                format!("`{}` takes {} arguments, {} given", ty.text, params.len(), args.len()),
            );
            for a in args.iter_mut() {
                self.infer(a, None, cx);
            }
            return Some(SynType::Struct(ty.text.clone()));
        }
        for (arg, (pname, pty)) in args.iter_mut().zip(&params) {
            self.expect_type(arg, pty, cx, &format!("argument `{pname}` of `{}`", ty.text));
        }
        Some(SynType::Struct(ty.text.clone()))
    }

    /// Resolves a variable chain; on success every slot in it is filled.
    fn chain(&mut self, chain: &mut VarChain, cx: &mut StepCx<'_>, allow_size: bool) -> Option<ChainType> {
        let head = &chain.head;
        let mut ty = if let Some((ty, slot)) = cx.lookup(&head.text).cloned() {
            chain.head_slot = Some(slot);
            ty
        } else if let Some((slot, ty)) = self.param_of(cx.this, &head.text) {
            chain.head_slot = Some(slot);
            ty
        } else if cx.declared_in_step.contains(&head.text) {
            self.error(
                WfKind::Rule(6),
                head.pos,
                format!("local variable `{}` is used before its declaration", head.text),
            );
            return None;
        } else {
            let msg = format!("unknown variable `{}` in struct `{}`", head.text, self.sigs[cx.this].name);
            self.error(WfKind::Name, head.pos, msg);
            return None;
        };
        let n = chain.segments.len();
        for (i, seg) in chain.segments.iter_mut().enumerate() {
            match seg {
                Segment::Field { name, slot } => match &ty {
                    SynType::Struct(sname) => {
                        let sid = self.index[sname];
                        let Some((s, pty)) = self.param_of(sid, &name.text) else {
                            self.error(
                                WfKind::Name,
                                name.pos,
                                format!("struct `{sname}` has no parameter `{}`", name.text),
                            );
                            return None;
                        };
                        *slot = Some(s);
                        ty = pty;
                    }
                    SynType::Array(_) if name.text == "s" && allow_size && i + 1 == n => {
                        return Some(ChainType::Size);
                    }
                    other => {
                        let msg = if name.text == "s" && matches!(other, SynType::Array(_)) {
                            "array size `.s` cannot be assigned or followed by further segments".to_string()
                        } else {
                            format!("`.{}` applied to a value of type {other}", name.text)
                        };
                        self.error(WfKind::Type, name.pos, msg);
                        return None;
                    }
                },
                Segment::Index(index) => {
                    let pos = index.pos();
                    self.require_ext(self.ext.arrays, "arrays", "array indexing", pos);
                    self.expect_type(index, &SynType::Nat, cx, "array index");
                    match &ty {
                        SynType::Array(elem) => ty = (**elem).clone(),
                        other => {
                            self.error(
                                WfKind::Type,
                                pos,
                                format!("indexing a value of type {other}, which is not an array"),
                            );
                            return None;
                        }
                    }
                }
            }
        }
        Some(ChainType::Value(ty))
    }

    /// Infers the type of `expr`, annotating it. `expected` guides `null` and
    /// `array(..)`. Returns `None` when an error has already been reported.
    fn infer(&mut self, expr: &mut Expr, expected: Option<&SynType>, cx: &mut StepCx<'_>) -> Option<SynType> {
        match expr {
            Expr::Lit(Literal::Int(n), _) => Some(if *n >= 0 { SynType::Nat } else { SynType::Int }),
            Expr::Lit(Literal::Bool(_), _) => Some(SynType::Bool),
            Expr::Lit(Literal::Str(_), _) => Some(SynType::String),
            Expr::This(_) => Some(SynType::Struct(self.sigs[cx.this].name.clone())),
            Expr::Null { ty, pos } => match expected {
                Some(t @ (SynType::Struct(_) | SynType::Array(_))) => {
                    *ty = Some(t.clone());
                    Some(t.clone())
                }
                Some(other) => {
                    self.error(WfKind::Type, *pos, format!("`null` used where a value of type {other} is expected"));
                    None
                }
                None => {
                    self.error(WfKind::Type, *pos, "cannot infer the type of `null` here");
                    None
                }
            },
            Expr::Var(chain) => match self.chain(chain, cx, true)? {
                ChainType::Value(t) => Some(t),
                ChainType::Size => {
                    let mut chain = chain.clone();
                    chain.segments.pop();
                    *expr = Expr::ArraySize(chain);
                    Some(SynType::Nat)
                }
            },
            Expr::ArraySize(chain) => match self.chain(chain, cx, false)? {
                ChainType::Value(SynType::Array(_)) => Some(SynType::Nat),
                ChainType::Value(other) => {
                    self.error(WfKind::Type, chain.pos(), format!("`.s` applied to a value of type {other}"));
                    None
                }
                ChainType::Size => None,
            },
            Expr::Not(inner, pos) => {
                let pos = *pos;
                let t = self.infer(inner, Some(&SynType::Bool), cx)?;
                if t != SynType::Bool {
                    self.error(WfKind::Type, pos, format!("`!` applied to a value of type {t}"));
                    return None;
                }
                Some(SynType::Bool)
            }
            Expr::Binary { op, lhs, rhs, pos } => {
                let (op, pos) = (*op, *pos);
                self.binary(op, lhs, rhs, pos, cx)
            }
            Expr::Construct { ty, args } => self.construct(ty, args, cx),
            Expr::ArrayNew { size, elem, pos } => {
                let pos = *pos;
                self.require_ext(self.ext.arrays, "arrays", "`array(..)`", pos);
                self.expect_type(size, &SynType::Nat, cx, "array size");
                match expected {
                    Some(SynType::Array(e)) => {
                        *elem = Some((**e).clone());
                        expected.cloned()
                    }
                    Some(other) => {
                        self.error(
                            WfKind::Type,
                            pos,
                            format!("`array(..)` used where a value of type {other} is expected"),
                        );
                        None
                    }
                    None => {
                        self.error(WfKind::Type, pos, "cannot infer the element type of `array(..)` here");
                        None
                    }
                }
            }
        }
    }

    fn binary(&mut self, op: BinOp, lhs: &mut Expr, rhs: &mut Expr, pos: Pos, cx: &mut StepCx<'_>) -> Option<SynType> {
        use BinOp::*;
        match op {
            And | Or => {
                let l = self.infer(lhs, Some(&SynType::Bool), cx);
                let r = self.infer(rhs, Some(&SynType::Bool), cx);
                let (l, r) = (l?, r?);
                if l != SynType::Bool || r != SynType::Bool {
                    self.error(WfKind::Type, pos, format!("`{op}` needs Bool operands, found {l} and {r}"));
                    return None;
                }
                Some(SynType::Bool)
            }
            Add | Sub | Mul | Div | Rem | Lt | Le | Gt | Ge => {
                let l = self.infer(lhs, Some(&SynType::Int), cx);
                let r = self.infer(rhs, Some(&SynType::Int), cx);
                let (l, r) = (l?, r?);
                if !l.is_numeric() || !r.is_numeric() {
                    self.error(WfKind::Type, pos, format!("`{op}` needs numeric operands, found {l} and {r}"));
                    return None;
                }
                Some(match op {
                    Lt | Le | Gt | Ge => SynType::Bool,
                    Sub => SynType::Int,
                    _ if l == SynType::Nat && r == SynType::Nat => SynType::Nat,
                    _ => SynType::Int,
                })
            }
            Eq | Ne => {
                // Type the side that is not `null` first so `null` can borrow its type.
                let (l, r) = if matches!(lhs, Expr::Null { .. }) {
                    let r = self.infer(rhs, None, cx)?;
                    let l = self.infer(lhs, Some(&r), cx)?;
                    (l, r)
                } else {
                    let l = self.infer(lhs, None, cx)?;
                    let r = self.infer(rhs, Some(&l), cx)?;
                    (l, r)
                };
                if !(l.assignable_to(&r) || r.assignable_to(&l)) {
                    self.error(WfKind::Type, pos, format!("cannot compare {l} with {r}"));
                    return None;
                }
                Some(SynType::Bool)
            }
        }
    }

    fn check_schedule(&mut self, schedule: &Schedule) {
        for item in &schedule.items {
            match item {
                ScheduleItem::GlobalCall(step) => self.check_global_step(step),
                ScheduleItem::LocalCall { ty, step } => match self.index.get(&ty.text) {
                    None => self.error(WfKind::Name, ty.pos, format!("unknown struct type `{}`", ty.text)),
                    Some(&sid) if !self.sigs[sid].steps.contains(&step.text) => {
                        self.error(
                            WfKind::Name,
                            step.pos,
                            format!("struct `{}` does not declare step `{}`", ty.text, step.text),
                        );
                    }
                    Some(_) => {}
                },
                ScheduleItem::Fix(body) => self.check_schedule(body),
                ScheduleItem::FixOn(body, params) => {
                    if let Some(first) = params.first() {
                        self.require_ext(self.ext.param_fix, "param-fix", "a parameter-specific fixpoint", first.pos);
                    }
                    for p in params {
                        if !self.sigs.iter().any(|s| s.params.iter().any(|(n, _)| *n == p.text)) {
                            self.error(WfKind::Name, p.pos, format!("no struct declares a parameter `{}`", p.text));
                        }
                    }
                    self.check_schedule(body);
                }
                ScheduleItem::Iter(steps) => {
                    if let Some(first) = steps.first() {
                        self.require_ext(self.ext.iter, "iter", "`Iter(..)`", first.pos);
                    }
                    for s in steps {
                        self.check_global_step(s);
                    }
                }
            }
        }
    }

    fn check_global_step(&mut self, step: &Name) {
        if !self.sigs.iter().any(|s| s.steps.contains(&step.text)) {
            self.error(WfKind::Name, step.pos, format!("no struct declares step `{}`", step.text));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn check(src: &str, ext: Extensions) -> Result<ValidatedProgram, Vec<WfError>> {
        check_well_formed(parse_program(src).expect("parses"), ext)
    }

    fn kinds(src: &str) -> Vec<WfKind> {
        match check(src, Extensions::all()) {
            Ok(_) => vec![],
            Err(errs) => errs.into_iter().map(|e| e.kind).collect(),
        }
    }

    #[test]
    fn duplicate_step_is_rule_2() {
        assert_eq!(kinds("struct A (x: Int) { init {} init {} } init"), vec![WfKind::Rule(2)]);
    }

    #[test]
    fn duplicate_param_is_rule_3() {
        assert_eq!(kinds("struct A (x: Int, x: Bool) {} "), vec![WfKind::Rule(3)]);
    }

    #[test]
    fn local_shadowing_param_is_rule_4() {
        assert_eq!(kinds("struct A (x: Int) { s { Int x := 1; } } s"), vec![WfKind::Rule(4)]);
    }

    #[test]
    fn redeclared_local_is_rule_5() {
        assert_eq!(kinds("struct A (x: Int) { s { Int y := 1; Int y := 2; } } s"), vec![WfKind::Rule(5)]);
    }

    #[test]
    fn use_before_declaration_is_rule_6() {
        assert_eq!(kinds("struct A (x: Int) { s { x := y; Int y := 1; } } s"), vec![WfKind::Rule(6)]);
    }

    #[test]
    fn local_scoped_to_its_block() {
        let src = "struct A (x: Int) { s { if (x = 0) then { Int y := 1; } x := y; } } s";
        assert_eq!(kinds(src), vec![WfKind::Rule(6)]);
    }

    #[test]
    fn unknown_step_in_schedule() {
        assert_eq!(kinds("struct A (x: Int) { s {} } t"), vec![WfKind::Name]);
        assert_eq!(kinds("struct A (x: Int) { s {} } A.t"), vec![WfKind::Name]);
        assert_eq!(kinds("struct A (x: Int) { s {} } B.s"), vec![WfKind::Name]);
    }

    #[test]
    fn type_errors() {
        assert_eq!(kinds("struct A (x: Int) { s { if (x) then { } } } s"), vec![WfKind::Type]);
        assert_eq!(kinds("struct A (x: Int) { s { x := true; } } s"), vec![WfKind::Type]);
        assert_eq!(kinds("struct A (x: Nat) { s { x := x - 1; } } s"), vec![WfKind::Type]);
        assert_eq!(kinds("struct A (x: Int) { s { A(true); } } s"), vec![WfKind::Type]);
        assert_eq!(kinds("struct A (x: Int) { s { A(1, 2); } } s"), vec![WfKind::Type]);
        assert_eq!(kinds("struct A (x: Int) { s { x := x.s; } } s"), vec![WfKind::Type]);
        assert_eq!(kinds("struct A (x: String) { s { if (x < x) then {} } } s"), vec![WfKind::Type]);
    }

    #[test]
    fn null_takes_type_from_context() {
        let p = check("struct A (n: A) { s { if (n != null) then { n := null; } } } s", Extensions::none()).unwrap();
        let body = &p.ast().structs[0].steps[0].body;
        let Stmt::If(i) = &body[0] else { panic!() };
        let Expr::Binary { rhs, .. } = &i.branches[0].0 else { panic!() };
        assert_eq!(**rhs, Expr::Null { ty: Some(SynType::Struct("A".into())), pos: rhs.pos() });
    }

    #[test]
    fn extension_syntax_needs_flag() {
        let src = "struct A (a: Array(Int)) { s { a := array(2); } } s";
        let errs = check(src, Extensions::none()).unwrap_err();
        assert!(errs.iter().all(|e| e.kind == WfKind::Extension));
        assert!(errs[0].message.contains("--ext arrays"));
        assert!(check(src, Extensions { arrays: true, ..Extensions::none() }).is_ok());

        let errs = check("struct A (x: Int) { s {} } Fix(s, x)", Extensions::none()).unwrap_err();
        assert!(errs[0].message.contains("--ext param-fix"));
        let errs = check("struct A (x: Int) { s {} } Iter(s)", Extensions::none()).unwrap_err();
        assert!(errs[0].message.contains("--ext iter"));
    }

    #[test]
    fn size_rewritten_and_index_typed() {
        let src = "struct A (a: Array(Int), n: Nat) { s { if (n < a.s) then { a[n] := 3; n := n + 1; } } } s";
        let p = check(src, Extensions::all()).unwrap();
        let Stmt::If(i) = &p.ast().structs[0].steps[0].body[0] else { panic!() };
        let Expr::Binary { rhs, .. } = &i.branches[0].0 else { panic!() };
        assert!(matches!(**rhs, Expr::ArraySize(_)));
        assert_eq!(kinds("struct A (a: Array(Int), n: Int) { s { a[n] := 3; } } s"), vec![WfKind::Type]);
    }

    #[test]
    fn fix_on_param_must_exist() {
        assert_eq!(kinds("struct A (x: Int) { s {} } Fix(s, y)"), vec![WfKind::Name]);
    }

    #[test]
    fn errors_serialize_with_rule_tags() {
        let errs = check("struct A (x: Int) { s {} s {} } s", Extensions::none()).unwrap_err();
        let json = serde_json::to_value(&errs).unwrap();
        assert_eq!(json[0]["kind"], "rule-2");
        assert_eq!(json[0]["pos"]["line"], 1);
    }
}
