//! Transition rules: which transitions are enabled in a state and what
//! applying one does.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::commands::CommandList;
use super::state::{Entry, ExecState, RtItem, StructInstance};
use crate::ext::paramfix::{self, Relevance};
use crate::ext::{arrays, iter};
use crate::ir::{Command, Label, Value};
use crate::program::{SchedItem, ValidatedProgram};
use crate::syntax::ast::BinOp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    ComPush,
    ComPushThis,
    ComRd,
    ComWr,
    ComWrN,
    ComWrNSkip,
    ComNot,
    ComOp,
    ComCons,
    ComIfT,
    ComIfF,
    ComRdA,
    ComWrA,
    ComAsize,
    ComArr,
    InitG,
    InitL,
    FixInit,
    FixInitG,
    FixInitS,
    FixIter,
    FixTerm,
    IterInit,
    IterIter,
    IterTerm,
}

impl Rule {
    pub fn is_schedule_rule(self) -> bool {
        matches!(
            self,
            Rule::InitG
                | Rule::InitL
                | Rule::FixInit
                | Rule::FixInitG
                | Rule::FixInitS
                | Rule::FixIter
                | Rule::FixTerm
                | Rule::IterInit
                | Rule::IterIter
                | Rule::IterTerm
        )
    }

    pub fn is_fix_init(self) -> bool {
        matches!(self, Rule::FixInit | Rule::FixInitG | Rule::FixInitS)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// An enabled transition: a command of one instance, or a schedule rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transition {
    Command(Label),
    Schedule(Rule),
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "fault")]
pub enum RuntimeFault {
    #[error("division by zero")]
    DivisionByZero,
    #[error("array size {size} is not positive")]
    BadArraySize { size: i64 },
    #[error("index {index} out of bounds for array of size {size}")]
    IndexOutOfBounds { index: i64, size: usize },
    #[error("read through the null array")]
    NullArrayAccess,
    #[error("write through the null array")]
    NullArrayWrite,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("runtime fault in instance {label}: {fault}")]
    Fault { label: Label, fault: RuntimeFault },
    #[error("transition {0:?} is not enabled")]
    IllegalTransition(Transition),
}

/// The variable of an access: a parameter slot or an array cell index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum VarKey {
    Param(u16),
    Cell(u32),
}

/// A read or write of a parameter or array cell by a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Access {
    pub target: Label,
    pub var: VarKey,
    pub write: bool,
}

/// What one transition did, for tracing, race detection and tests.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub rule: Rule,
    pub actor: Option<Label>,
    pub command: Option<Command>,
    pub access: Option<Access>,
    /// A parameter or array cell received a different value.
    pub changed: bool,
    pub created: Option<Label>,
    /// The actor just finished an iterator block.
    pub block_completed: bool,
    pub warning: Option<String>,
}

impl StepRecord {
    fn schedule(rule: Rule) -> Self {
        Self {
            rule,
            actor: None,
            command: None,
            access: None,
            changed: false,
            created: None,
            block_completed: false,
            warning: None,
        }
    }

    pub(crate) fn command(rule: Rule, actor: Label, command: Command) -> Self {
        Self { actor: Some(actor), command: Some(command), ..Self::schedule(rule) }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ApplyOptions {
    /// Writes through the null array fault instead of being skipped.
    pub strict_null_array: bool,
}

fn top(stack: &[Value], depth: usize) -> Option<&Value> {
    stack.len().checked_sub(depth + 1).map(|i| &stack[i])
}

fn struct_at<'s>(state: &'s ExecState, value: Option<&Value>) -> Option<(usize, &'s StructInstance)> {
    let slot = state.slot_of(value?.as_label()?)?;
    state.struct_ref(slot).map(|i| (slot, i))
}

fn array_at(state: &ExecState, value: Option<&Value>) -> bool {
    value.and_then(Value::as_label).and_then(|l| state.array(l)).is_some()
}

fn op_applies(op: BinOp, a: &Value, b: &Value) -> bool {
    use BinOp::*;
    match op {
        Eq | Ne => std::mem::discriminant(a) == std::mem::discriminant(b),
        And | Or => matches!((a, b), (Value::Bool(_), Value::Bool(_))),
        _ => matches!((a, b), (Value::Int(_), Value::Int(_))),
    }
}

/// The rule the head command of `slot` would fire, if its premises hold.
/// Value faults (division by zero, bad indices) count as enabled; they are
/// reported when the transition is applied.
pub(crate) fn command_rule(state: &ExecState, program: &ValidatedProgram, slot: usize) -> Option<Rule> {
    let inst = state.struct_ref(slot)?;
    let stack = &inst.stack;
    let rule = match inst.commands.head()? {
        Command::Push(_) => Rule::ComPush,
        Command::PushThis => Rule::ComPushThis,
        Command::Read(var) => {
            let (_, target) = struct_at(state, top(stack, 0))?;
            (target.env.len() > var.slot as usize).then_some(Rule::ComRd)?
        }
        Command::Write(var) => {
            top(stack, 1)?;
            let (tslot, target) = struct_at(state, top(stack, 0))?;
            if target.env.len() <= var.slot as usize {
                return None;
            }
            let is_param = program.struct_info(target.ty).is_param(var.slot);
            if is_param && program.is_null_label(state.label_of(tslot)) {
                Rule::ComWrNSkip
            } else if program.extensions().param_fix {
                Rule::ComWrN
            } else {
                Rule::ComWr
            }
        }
        Command::Cons(s) => {
            let n = program.struct_info(s.id).params.len();
            (stack.len() >= n).then_some(Rule::ComCons)?
        }
        Command::If(_) => match top(stack, 0)? {
            Value::Bool(true) => Rule::ComIfT,
            Value::Bool(false) => Rule::ComIfF,
            _ => return None,
        },
        Command::Not => top(stack, 0)?.as_bool().map(|_| Rule::ComNot)?,
        Command::Op(op) => {
            let (a, b) = (top(stack, 1)?, top(stack, 0)?);
            op_applies(*op, a, b).then_some(Rule::ComOp)?
        }
        Command::ReadA => {
            top(stack, 0)?.as_int()?;
            array_at(state, top(stack, 1)).then_some(Rule::ComRdA)?
        }
        Command::WriteA => {
            top(stack, 2)?;
            top(stack, 0)?.as_int()?;
            array_at(state, top(stack, 1)).then_some(Rule::ComWrA)?
        }
        Command::Arr { .. } => top(stack, 0)?.as_int().map(|_| Rule::ComArr)?,
        Command::Asize => array_at(state, top(stack, 0)).then_some(Rule::ComAsize)?,
    };
    Some(rule)
}

/// The schedule rule enabled in `state`, if any. All of them require
/// `Done` except topping up an iterator.
pub(crate) fn schedule_rule(state: &ExecState, program: &ValidatedProgram) -> Option<Rule> {
    let head = state.schedule.front()?;
    let done = state.done();
    let top = state.stability.last().copied();
    match head {
        RtItem::AIter { blocks, .. } => {
            if done && top == Some(true) {
                Some(Rule::IterTerm)
            } else if top == Some(false) && iter::top_up_possible(state, blocks) {
                Some(Rule::IterIter)
            } else {
                None
            }
        }
        _ if !done => None,
        RtItem::AFix { .. } => Some(if top == Some(true) { Rule::FixTerm } else { Rule::FixIter }),
        RtItem::Item(SchedItem::Call { only: None, .. }) => Some(Rule::InitG),
        RtItem::Item(SchedItem::Call { only: Some(_), .. }) => Some(Rule::InitL),
        RtItem::Item(SchedItem::Fix { relevance, .. }) => Some(match (program.extensions().param_fix, relevance) {
            (false, _) => Rule::FixInit,
            (true, Relevance::All) => Rule::FixInitG,
            (true, Relevance::Only(_)) => Rule::FixInitS,
        }),
        RtItem::Item(SchedItem::Iter { .. }) => Some(Rule::IterInit),
    }
}

/// Every enabled transition: one per instance whose head command can fire,
/// plus at most one schedule rule.
pub fn enabled_transitions(state: &ExecState, program: &ValidatedProgram) -> Vec<Transition> {
    let mut slots: Vec<u32> = state.active_slots().to_vec();
    slots.sort_unstable();
    let mut out: Vec<Transition> = slots
        .into_iter()
        .filter(|&s| command_rule(state, program, s as usize).is_some())
        .map(|s| Transition::Command(state.label_of(s as usize)))
        .collect();
    if let Some(rule) = schedule_rule(state, program) {
        out.push(Transition::Schedule(rule));
    }
    out
}

pub fn done(state: &ExecState) -> bool {
    state.done()
}

/// Applies `transition`, which must be enabled.
pub fn apply_transition(
    state: &mut ExecState,
    program: &ValidatedProgram,
    transition: Transition,
    opts: ApplyOptions,
) -> Result<StepRecord, EngineError> {
    match transition {
        Transition::Command(label) => {
            let slot = state.slot_of(label).ok_or(EngineError::IllegalTransition(transition))?;
            let rule = command_rule(state, program, slot).ok_or(EngineError::IllegalTransition(transition))?;
            apply_command(state, program, slot, rule, opts)
        }
        Transition::Schedule(rule) => {
            if schedule_rule(state, program) != Some(rule) {
                return Err(EngineError::IllegalTransition(transition));
            }
            Ok(apply_schedule(state, program, rule))
        }
    }
}

fn eval_op(op: BinOp, a: Value, b: Value) -> Result<Value, RuntimeFault> {
    use BinOp::*;
    Ok(match (op, a, b) {
        (Eq, a, b) => Value::Bool(a == b),
        (Ne, a, b) => Value::Bool(a != b),
        (And, Value::Bool(a), Value::Bool(b)) => Value::Bool(a && b),
        (Or, Value::Bool(a), Value::Bool(b)) => Value::Bool(a || b),
        (op, Value::Int(a), Value::Int(b)) => match op {
            Lt => Value::Bool(a < b),
            Le => Value::Bool(a <= b),
            Gt => Value::Bool(a > b),
            Ge => Value::Bool(a >= b),
            Add => Value::Int(a.wrapping_add(b)),
            Sub => Value::Int(a.wrapping_sub(b)),
            Mul => Value::Int(a.wrapping_mul(b)),
            Div if b == 0 => return Err(RuntimeFault::DivisionByZero),
            Div => Value::Int(a.wrapping_div(b)),
            Rem if b == 0 => return Err(RuntimeFault::DivisionByZero),
            Rem => Value::Int(a.wrapping_rem(b)),
            _ => unreachable!("premise checked"),
        },
        _ => unreachable!("premise checked"),
    })
}

fn apply_command(
    state: &mut ExecState,
    program: &ValidatedProgram,
    slot: usize,
    rule: Rule,
    opts: ApplyOptions,
) -> Result<StepRecord, EngineError> {
    let label = state.label_of(slot);
    let fault = |fault| EngineError::Fault { label, fault };
    let cmd = state.struct_ref(slot).and_then(|i| i.commands.head()).cloned().expect("enabled");
    let mut rec = StepRecord::command(rule, label, cmd.clone());
    match cmd {
        Command::Push(v) => state.struct_mut(slot).stack.push(v),
        Command::PushThis => state.struct_mut(slot).stack.push(Value::Label(label)),
        Command::Read(var) => {
            let inst = state.struct_mut(slot);
            let target = inst.stack.pop().and_then(|v| v.as_label()).expect("premise");
            let tslot = state.slot_of(target).expect("premise");
            let t = state.struct_ref(tslot).expect("premise");
            let value = t.env[var.slot as usize].clone();
            if program.struct_info(t.ty).is_param(var.slot) {
                rec.access = Some(Access { target, var: VarKey::Param(var.slot), write: false });
            }
            state.struct_mut(slot).stack.push(value);
        }
        Command::Write(var) => {
            let inst = state.struct_mut(slot);
            let target = inst.stack.pop().and_then(|v| v.as_label()).expect("premise");
            let value = inst.stack.pop().expect("premise");
            if rule != Rule::ComWrNSkip {
                let tslot = state.slot_of(target).expect("premise");
                let t = state.struct_mut(tslot);
                let ty = t.ty;
                let unchanged = t.env[var.slot as usize] == value;
                t.env[var.slot as usize] = value;
                if program.struct_info(ty).is_param(var.slot) {
                    let param = program.param_index(ty, var.slot);
                    paramfix::conjoin_param_write(&mut state.stability, &state.levels, param, unchanged);
                    rec.access = Some(Access { target, var: VarKey::Param(var.slot), write: true });
                    rec.changed = !unchanged;
                }
            }
        }
        Command::Cons(s) => {
            let info = program.struct_info(s.id);
            let inst = state.struct_mut(slot);
            let args = inst.stack.split_off(inst.stack.len() - info.params.len());
            let mut env = info.env0.clone();
            for (cell, arg) in env.iter_mut().zip(args) {
                *cell = arg;
            }
            let fresh = state.push_entry(Entry::Struct(StructInstance {
                ty: s.id,
                commands: CommandList::default(),
                stack: Vec::new(),
                env,
            }));
            state.struct_mut(slot).stack.push(Value::Label(fresh));
            state.stability.iter_mut().for_each(|s| *s = false);
            rec.created = Some(fresh);
        }
        Command::If(body) => {
            let inst = state.struct_mut(slot);
            let taken = inst.stack.pop().and_then(|v| v.as_bool()).expect("premise");
            if taken {
                rec.block_completed = inst.commands.enter(body);
                state.refresh_active(slot);
                return Ok(rec);
            }
        }
        Command::Not => {
            let inst = state.struct_mut(slot);
            let b = inst.stack.pop().and_then(|v| v.as_bool()).expect("premise");
            inst.stack.push(Value::Bool(!b));
        }
        Command::Op(op) => {
            let inst = state.struct_mut(slot);
            let n = inst.stack.len();
            let (a, b) = (inst.stack[n - 2].clone(), inst.stack[n - 1].clone());
            let v = eval_op(op, a, b).map_err(fault)?;
            inst.stack.truncate(n - 2);
            inst.stack.push(v);
        }
        Command::ReadA => arrays::read_array(state, slot, &mut rec).map_err(fault)?,
        Command::WriteA => arrays::write_array(state, slot, &mut rec, opts.strict_null_array).map_err(fault)?,
        Command::Arr { default, .. } => arrays::alloc_array(state, slot, default, &mut rec).map_err(fault)?,
        Command::Asize => arrays::array_size(state, slot),
    }
    rec.block_completed = state.struct_mut(slot).commands.advance();
    state.refresh_active(slot);
    Ok(rec)
}

fn push_front_items(state: &mut ExecState, items: &Arc<[SchedItem]>) {
    for item in items.iter().rev() {
        state.schedule.push_front(RtItem::Item(item.clone()));
    }
}

fn apply_schedule(state: &mut ExecState, program: &ValidatedProgram, rule: Rule) -> StepRecord {
    match rule {
        Rule::InitG | Rule::InitL => {
            let Some(RtItem::Item(SchedItem::Call { step, only })) = state.schedule.pop_front() else {
                unreachable!("schedule head checked")
            };
            state.load_all(|ty| {
                if only.is_some_and(|t| t != ty) {
                    return None;
                }
                let body = program.struct_info(ty).body(step).cloned();
                Some(body.map(CommandList::load).unwrap_or_default())
            });
        }
        r if r.is_fix_init() => {
            let Some(RtItem::Item(SchedItem::Fix { body, relevance })) = state.schedule.pop_front() else {
                unreachable!("schedule head checked")
            };
            state.schedule.push_front(RtItem::AFix { body: body.clone(), relevance: relevance.clone() });
            push_front_items(state, &body);
            state.stability.push(true);
            state.levels.push(relevance);
        }
        Rule::FixIter => {
            let Some(RtItem::AFix { body, .. }) = state.schedule.front() else { unreachable!("schedule head checked") };
            let body = body.clone();
            push_front_items(state, &body);
            *state.stability.last_mut().expect("active fixpoint") = true;
        }
        Rule::FixTerm | Rule::IterTerm => {
            state.schedule.pop_front();
            state.stability.pop();
            state.levels.pop();
        }
        Rule::IterInit => iter::iter_init(state, program),
        Rule::IterIter => iter::iter_iter(state),
        _ => unreachable!("{rule} is a command rule"),
    }
    StepRecord::schedule(rule)
}
