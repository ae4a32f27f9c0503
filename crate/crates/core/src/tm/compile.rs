//! Turing machine to AuDaLa source.

use std::fmt::Write;

use super::machine::{Dir, TmError, TuringMachine};

/// Emits a program with a doubly linked `TapeCell` list and a single
/// `Control` instance whose `transition` step performs one machine step.
/// `init < Fix(transition)` then runs the machine until it halts.
pub fn compile_tm(tm: &TuringMachine, input: &[i64]) -> Result<String, TmError> {
    tm.validate()?;
    tm.check_input(input)?;

    let mut rules = tm.delta.clone();
    rules.sort_by_key(|r| (r.0, r.1));

    let mut out = String::new();
    let input_text: Vec<String> = input.iter().map(i64::to_string).collect();
    writeln!(out, "// Compiled Turing machine with {} state(s), started on {}.", tm.states.len(), input_text.join(" "))
        .unwrap();
    out.push_str("struct TapeCell (left: TapeCell, right: TapeCell, symbol: Int){}\n");
    out.push_str("struct Control (head: TapeCell, state: Int, accepting: Bool) {\n");
    out.push_str("\ttransition {\n");
    for (i, r) in rules.iter().enumerate() {
        let kw = if i == 0 { "\t\tif" } else { "\t\telse if" };
        writeln!(out, "{kw} (state == {} && head.symbol == {}) then{{", r.0, r.1).unwrap();
        writeln!(out, "\t\t\thead.symbol := {};", r.3).unwrap();
        writeln!(out, "\t\t\tstate := {};", r.2).unwrap();
        writeln!(out, "\t\t\taccepting := {};", tm.is_accepting(r.2)).unwrap();
        let (side, fresh) = match r.4 {
            Dir::L => ("left", "TapeCell(null, head, 0)"),
            Dir::R => ("right", "TapeCell(head, null, 0)"),
        };
        writeln!(out, "\t\t\tif (head != null && head.{side} == null) then {{").unwrap();
        writeln!(out, "\t\t\t\thead.{side} := {fresh};").unwrap();
        out.push_str("\t\t\t}\n");
        writeln!(out, "\t\t\thead := head.{side};").unwrap();
        out.push_str("\t\t}\n");
    }
    out.push_str("\t}\n");
    out.push_str("\tinit {\n");
    for (i, s) in input.iter().enumerate() {
        writeln!(out, "\t\tTapeCell cell{i} := TapeCell(null, null, {s});").unwrap();
    }
    for i in 0..input.len().saturating_sub(1) {
        writeln!(out, "\t\tcell{}.left := cell{i};", i + 1).unwrap();
        writeln!(out, "\t\tcell{i}.right := cell{};", i + 1).unwrap();
    }
    writeln!(out, "\t\tControl(cell0, 0, {});", tm.is_accepting(0)).unwrap();
    out.push_str("\t}\n}\n");
    out.push_str("init < Fix(transition)\n");
    Ok(out)
}
