use std::io::{self, Write};

use serde::Serialize;

use super::rules::{Rule, StepRecord, VarKey};
use super::state::ExecState;
use crate::program::ValidatedProgram;

/// One executed transition, as written to JSON-lines traces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEvent {
    pub index: u64,
    pub rule: Rule,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    /// `label.param` or `label[i]` when the transition changed a value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub changed: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub created: Option<String>,
    pub stability: Vec<bool>,
}

impl TraceEvent {
    pub fn new(index: u64, rec: &StepRecord, state: &ExecState, program: &ValidatedProgram) -> Self {
        let name = |l| program.label_name(l);
        let changed = rec.access.filter(|_| rec.changed).map(|a| match a.var {
            VarKey::Param(slot) => {
                let ty = state.instance(a.target).map(|i| i.ty).expect("struct target");
                format!("{}.{}", name(a.target), program.struct_info(ty).slot_name(slot))
            }
            VarKey::Cell(i) => format!("{}[{i}]", name(a.target)),
        });
        Self {
            index,
            rule: rec.rule,
            label: rec.actor.map(name),
            command: rec.command.as_ref().map(|c| c.head_text(&name)),
            changed,
            created: rec.created.map(name),
            stability: state.stability().to_vec(),
        }
    }
}

pub fn write_jsonl(events: &[TraceEvent], mut out: impl Write) -> io::Result<()> {
    for e in events {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
