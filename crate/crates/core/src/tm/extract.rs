//! Reading a machine configuration back out of an idle AuDaLa state.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::machine::TMConfiguration;
use crate::engine::ExecState;
use crate::ir::{Label, Value};
use crate::program::ValidatedProgram;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("state is not idle: some instance still has commands")]
    NotIdle,
    #[error("state does not encode a machine configuration: {0}")]
    MalformedWorld(String),
}

fn malformed(msg: impl Into<String>) -> ExtractError {
    ExtractError::MalformedWorld(msg.into())
}

/// The configuration held by the single non-null `Control` instance.
/// Returns the configuration and that instance's `accepting` flag.
pub fn extract_with_flag(
    state: &ExecState,
    program: &ValidatedProgram,
) -> Result<(TMConfiguration, bool), ExtractError> {
    if !state.done() {
        return Err(ExtractError::NotIdle);
    }
    let control_ty = program.struct_id("Control").ok_or_else(|| malformed("no Control struct"))?;
    let cell_ty = program.struct_id("TapeCell").ok_or_else(|| malformed("no TapeCell struct"))?;
    let controls: Vec<Label> = state.instances_of(control_ty).filter(|&l| !program.is_null_label(l)).collect();
    let [control] = controls[..] else {
        return Err(malformed(format!("expected exactly one Control instance, found {}", controls.len())));
    };

    let get = |label: Label, name: &str| -> Result<Value, ExtractError> {
        state.var(program, label, name).cloned().ok_or_else(|| malformed(format!("{label} has no `{name}`")))
    };
    let int = |v: Value| v.as_int().ok_or_else(|| malformed("expected an Int"));
    let link = |v: Value| -> Result<Option<Label>, ExtractError> {
        let l = v.as_label().ok_or_else(|| malformed("expected a TapeCell label"))?;
        if program.is_null_label(l) {
            return Ok(None);
        }
        match state.instance(l) {
            Some(inst) if inst.ty == cell_ty => Ok(Some(l)),
            _ => Err(malformed(format!("{l} is not a TapeCell"))),
        }
    };

    let q = int(get(control, "state")?)?;
    let accepting = get(control, "accepting")?.as_bool().ok_or_else(|| malformed("accepting is not a Bool"))?;
    let head = link(get(control, "head")?)?.ok_or_else(|| malformed("the head is null"))?;

    let mut config = TMConfiguration { state: q, tape: BTreeMap::new() };
    let mut seen = BTreeSet::from([head]);
    config.set(0, int(get(head, "symbol")?)?);
    for (side, back, dir) in [("left", "right", -1i64), ("right", "left", 1)] {
        let mut cur = head;
        let mut pos = 0i64;
        while let Some(next) = link(get(cur, side)?)? {
            if !seen.insert(next) {
                return Err(malformed("tape links form a cycle"));
            }
            if link(get(next, back)?)? != Some(cur) {
                return Err(malformed(format!("{next}.{back} does not point back to {cur}")));
            }
            pos += dir;
            config.set(pos, int(get(next, "symbol")?)?);
            cur = next;
        }
    }
    let cells = state.instances_of(cell_ty).filter(|&l| !program.is_null_label(l)).count();
    if cells != seen.len() {
        return Err(malformed(format!("{} TapeCell instance(s) are not on the tape", cells - seen.len())));
    }
    Ok((config, accepting))
}

/// The machine configuration encoded by an idle state.
pub fn extract_configuration(state: &ExecState, program: &ValidatedProgram) -> Result<TMConfiguration, ExtractError> {
    extract_with_flag(state, program).map(|(c, _)| c)
}
