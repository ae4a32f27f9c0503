use std::fmt::Write;

use super::ast::*;

/// Renders a program back to source text that parses to the same tree.
pub fn pretty_program(program: &Program) -> String {
    let mut out = String::new();
    for def in &program.structs {
        let params: Vec<String> = def.params.iter().map(|p| format!("{}: {}", p.name.text, p.ty)).collect();
        let _ = write!(out, "struct {} ({})", def.name.text, params.join(", "));
        if def.steps.is_empty() {
            out.push_str(" {}\n\n");
            continue;
        }
        out.push_str(" {\n");
        for step in &def.steps {
            let _ = writeln!(out, "    {} {{", step.name.text);
            pretty_block(&mut out, &step.body, 2);
            out.push_str("    }\n");
        }
        out.push_str("}\n\n");
    }
    out.push_str(&pretty_schedule(&program.schedule));
    out.push('\n');
    out
}

pub fn pretty_schedule(schedule: &Schedule) -> String {
    let items: Vec<String> = schedule.items.iter().map(pretty_item).collect();
    items.join(" < ")
}

fn pretty_item(item: &ScheduleItem) -> String {
    match item {
        ScheduleItem::GlobalCall(step) => step.text.clone(),
        ScheduleItem::LocalCall { ty, step } => format!("{}.{}", ty.text, step.text),
        ScheduleItem::Fix(body) => format!("Fix({})", pretty_schedule(body)),
        ScheduleItem::FixOn(body, params) => {
            let names: Vec<&str> = params.iter().map(|p| p.text.as_str()).collect();
            format!("Fix({}, {})", pretty_schedule(body), names.join(", "))
        }
        ScheduleItem::Iter(steps) => {
            let names: Vec<&str> = steps.iter().map(|s| s.text.as_str()).collect();
            format!("Iter({})", names.join("; "))
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

pub fn pretty_block(out: &mut String, stmts: &[Stmt], depth: usize) {
    for stmt in stmts {
        pretty_stmt(out, stmt, depth);
    }
}

fn pretty_stmt(out: &mut String, stmt: &Stmt, depth: usize) {
    indent(out, depth);
    match stmt {
        Stmt::If(if_stmt) => {
            for (i, (cond, body)) in if_stmt.branches.iter().enumerate() {
                if i > 0 {
                    out.push_str(" else ");
                }
                let _ = writeln!(out, "if ({}) then {{", pretty_expr(cond));
                pretty_block(out, body, depth + 1);
                indent(out, depth);
                out.push('}');
            }
            if let Some(body) = &if_stmt.otherwise {
                out.push_str(" else {\n");
                pretty_block(out, body, depth + 1);
                indent(out, depth);
                out.push('}');
            }
            out.push('\n');
        }
        Stmt::VarDecl { ty, name, value, .. } => {
            let _ = writeln!(out, "{ty} {} := {};", name.text, pretty_expr(value));
        }
        Stmt::Update { target, value } => {
            let _ = writeln!(out, "{} := {};", pretty_chain(target), pretty_expr(value));
        }
        Stmt::Construct { ty, args } => {
            let _ = writeln!(out, "{}({});", ty.text, pretty_args(args));
        }
    }
}

fn pretty_args(args: &[Expr]) -> String {
    let args: Vec<String> = args.iter().map(pretty_expr).collect();
    args.join(", ")
}

pub fn pretty_chain(chain: &VarChain) -> String {
    let mut s = chain.head.text.clone();
    for seg in &chain.segments {
        match seg {
            Segment::Field { name, .. } => {
                s.push('.');
                s.push_str(&name.text);
            }
            Segment::Index(index) => {
                let _ = write!(s, "[{}]", pretty_expr(index));
            }
        }
    }
    s
}

fn escape(s: &str) -> String {
    let mut out = String::from('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn pretty_expr(expr: &Expr) -> String {
    match expr {
        Expr::Lit(Literal::Int(n), _) => n.to_string(),
        Expr::Lit(Literal::Bool(b), _) => b.to_string(),
        Expr::Lit(Literal::Str(s), _) => escape(s),
        Expr::This(_) => "this".into(),
        Expr::Null { .. } => "null".into(),
        Expr::Var(chain) => pretty_chain(chain),
        Expr::ArraySize(chain) => format!("{}.s", pretty_chain(chain)),
        Expr::Not(inner, _) => match **inner {
            Expr::Binary { .. } => format!("!({})", pretty_expr(inner)),
            _ => format!("!{}", pretty_expr(inner)),
        },
        Expr::Binary { op, lhs, rhs, .. } => {
            let wrap = |e: &Expr, strict: bool| match e {
                Expr::Binary { op: inner, .. }
                    if inner.precedence() < op.precedence() || (strict && inner.precedence() == op.precedence()) =>
                {
                    format!("({})", pretty_expr(e))
                }
                _ => pretty_expr(e),
            };
            format!("{} {} {}", wrap(lhs, false), op.symbol(), wrap(rhs, true))
        }
        Expr::Construct { ty, args } => format!("{}({})", ty.text, pretty_args(args)),
        Expr::ArrayNew { size, .. } => format!("array({})", pretty_expr(size)),
    }
}
