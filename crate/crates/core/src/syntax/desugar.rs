//! Removal of `else if` / `else` chains.
//!
//! A chain `if (c1) {B1} else if (c2) {B2} ... else {O}` becomes
//!
//! ```text
//! Bool t := c1;
//! if (t) then { B1 }
//! if (!t && c2) then { t := true; B2 }
//! ...
//! if (!t) then { O }
//! ```
//!
//! with one fresh guard variable `t` per chain. The `t := true` marker is
//! only emitted in branches that have later branches to suppress.

use std::collections::BTreeSet;

use super::ast::*;

pub fn desugar(mut program: Program) -> Program {
    for def in &mut program.structs {
        let mut fresh = FreshNames::for_struct(def);
        for step in &mut def.steps {
            let body = std::mem::take(&mut step.body);
            step.body = desugar_block(body, &mut fresh);
        }
    }
    program
}

struct FreshNames {
    taken: BTreeSet<String>,
    next: usize,
}

impl FreshNames {
    fn for_struct(def: &StructDef) -> Self {
        let mut taken: BTreeSet<String> = def.params.iter().map(|p| p.name.text.clone()).collect();
        fn collect(stmts: &[Stmt], taken: &mut BTreeSet<String>) {
            for stmt in stmts {
                match stmt {
                    Stmt::VarDecl { name, .. } => {
                        taken.insert(name.text.clone());
                    }
                    Stmt::Update { target, .. } => {
                        taken.insert(target.head.text.clone());
                    }
                    Stmt::If(i) => {
                        for (_, body) in &i.branches {
                            collect(body, taken);
                        }
                        if let Some(body) = &i.otherwise {
                            collect(body, taken);
                        }
                    }
                    Stmt::Construct { .. } => {}
                }
            }
        }
        for step in &def.steps {
            collect(&step.body, &mut taken);
        }
        Self { taken, next: 0 }
    }

    fn fresh(&mut self) -> String {
        loop {
            let candidate = format!("_chain{}", self.next);
            self.next += 1;
            if self.taken.insert(candidate.clone()) {
                return candidate;
            }
        }
    }
}

fn desugar_block(stmts: Vec<Stmt>, fresh: &mut FreshNames) -> Vec<Stmt> {
    let mut out = Vec::with_capacity(stmts.len());
    for stmt in stmts {
        match stmt {
            Stmt::If(if_stmt) if if_stmt.is_core() => {
                let (cond, body) = if_stmt.branches.into_iter().next().expect("core if has a branch");
                out.push(Stmt::If(IfStmt {
                    branches: vec![(cond, desugar_block(body, fresh))],
                    otherwise: None,
                    pos: if_stmt.pos,
                }));
            }
            Stmt::If(if_stmt) => expand_chain(if_stmt, fresh, &mut out),
            other => out.push(other),
        }
    }
    out
}

fn expand_chain(chain: IfStmt, fresh: &mut FreshNames, out: &mut Vec<Stmt>) {
    let pos = chain.pos;
    let guard = Name::new(fresh.fresh(), pos);
    let guard_ref = || Expr::Var(VarChain::simple(guard.clone()));
    let not_guard = || Expr::Not(Box::new(guard_ref()), pos);
    let core_if = |cond: Expr, body: Vec<Stmt>| Stmt::If(IfStmt { branches: vec![(cond, body)], otherwise: None, pos });

    let has_else = chain.otherwise.is_some();
    let n = chain.branches.len();
    for (i, (cond, body)) in chain.branches.into_iter().enumerate() {
        let mut body = desugar_block(body, fresh);
        if i == 0 {
            out.push(Stmt::VarDecl { ty: SynType::Bool, name: guard.clone(), value: cond, slot: None });
            out.push(core_if(guard_ref(), body));
            continue;
        }
        if i + 1 < n || has_else {
            body.insert(
                0,
                Stmt::Update { target: VarChain::simple(guard.clone()), value: Expr::Lit(Literal::Bool(true), pos) },
            );
        }
        let cond = Expr::Binary { op: BinOp::And, lhs: Box::new(not_guard()), rhs: Box::new(cond), pos };
        out.push(core_if(cond, body));
    }
    if let Some(body) = chain.otherwise {
        out.push(core_if(not_guard(), desugar_block(body, fresh)));
    }
}

/// True when no `else` construct remains anywhere in the program.
pub fn is_core(program: &Program) -> bool {
    fn block(stmts: &[Stmt]) -> bool {
        stmts.iter().all(|s| match s {
            Stmt::If(i) => i.is_core() && i.branches.iter().all(|(_, b)| block(b)),
            _ => true,
        })
    }
    program.structs.iter().all(|d| d.steps.iter().all(|s| block(&s.body)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_program, pretty_program};

    #[test]
    fn program_without_else_is_unchanged() {
        let src = "struct A (x: Int) { s { if (x == 1) then { x := 2; } } } s";
        let p = parse_program(src).unwrap();
        assert_eq!(desugar(p.clone()), p);
    }

    #[test]
    fn two_branch_chain_shape() {
        let src =
            "struct A (x: Int, a: Bool, b: Bool) { s { if (a) then { x := 1; } else if (b) then { x := 2; } } } s";
        let out = pretty_program(&desugar(parse_program(src).unwrap()));
        let expected = "struct A (x: Int, a: Bool, b: Bool) {
    s {
        Bool _chain0 := a;
        if (_chain0) then {
            x := 1;
        }
        if (!_chain0 && b) then {
            x := 2;
        }
    }
}

s
";
        assert_eq!(out, expected);
    }

    #[test]
    fn chain_with_else_marks_taken_branches() {
        let src = "struct A (x: Int) { s { if (x = 0) { x := 1; } else if (x = 1) { x := 2; } else if (x = 2) { x := 3; } else { x := 0; } } } s";
        let p = desugar(parse_program(src).unwrap());
        assert!(is_core(&p));
        let out = pretty_program(&p);
        assert_eq!(out.matches("_chain0 := true;").count(), 2);
        assert!(out.contains("if (!_chain0) then {"));
    }

    #[test]
    fn fresh_names_avoid_collisions() {
        let src = "struct A (_chain0: Bool) { s { if (_chain0) { } else { } } } s";
        let out = pretty_program(&desugar(parse_program(src).unwrap()));
        assert!(out.contains("Bool _chain1 := _chain0;"));
    }

    #[test]
    fn nested_chains_get_their_own_guard() {
        let src = "struct A (x: Int) { s { if (x = 0) { if (x = 1) { } else { } } else { } } } s";
        let p = desugar(parse_program(src).unwrap());
        assert!(is_core(&p));
        let out = pretty_program(&p);
        assert!(out.contains("_chain0") && out.contains("_chain1"));
    }
}
