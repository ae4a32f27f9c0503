//! Arrays: allocation, indexed access and size queries over a flat memory.
//!
//! An array instance is a start address and a size. Cells are allocated
//! with a bump allocator starting at address 1 and are never freed; the
//! null array sits at the reserved address 0 with size 0.

use crate::engine::rules::{Access, RuntimeFault, StepRecord, VarKey};
use crate::engine::state::{ArrayInstance, Entry, ExecState};
use crate::ext::paramfix;
use crate::ir::{Label, Value};

fn pop_int(stack: &mut Vec<Value>) -> i64 {
    stack.pop().and_then(|v| v.as_int()).expect("premise")
}

fn pop_label(stack: &mut Vec<Value>) -> Label {
    stack.pop().and_then(|v| v.as_label()).expect("premise")
}

fn peek_array(state: &ExecState, slot: usize, depth: usize) -> (Label, ArrayInstance) {
    let stack = &state.struct_ref(slot).expect("struct").stack;
    let label = stack[stack.len() - 1 - depth].as_label().expect("premise");
    (label, state.array(label).expect("premise"))
}

fn is_null_array(state: &ExecState, label: Label) -> bool {
    state.slot_of(label).is_some_and(|s| s < state.reserved as usize)
}

fn check_index(index: i64, array: ArrayInstance) -> Result<usize, RuntimeFault> {
    if index < 0 || index as usize >= array.size {
        return Err(RuntimeFault::IndexOutOfBounds { index, size: array.size });
    }
    Ok(index as usize)
}

/// `RdA`: stack `π;ℓ′;v` becomes `π;M(α+v)`.
pub(crate) fn read_array(state: &mut ExecState, slot: usize, rec: &mut StepRecord) -> Result<(), RuntimeFault> {
    let (label, array) = peek_array(state, slot, 1);
    if is_null_array(state, label) {
        return Err(RuntimeFault::NullArrayAccess);
    }
    let stack = &state.struct_ref(slot).expect("struct").stack;
    let index = check_index(stack[stack.len() - 1].as_int().expect("premise"), array)?;
    let value = state.memory[array.start + index].clone();
    let stack = &mut state.struct_mut(slot).stack;
    stack.truncate(stack.len() - 2);
    stack.push(value);
    rec.access = Some(Access { target: label, var: VarKey::Cell(index as u32), write: false });
    Ok(())
}

/// `WrA`: stack `π;v1;ℓ′;v2` becomes `π`, storing `v1` at `α+v2`. Every
/// stability entry is conjoined with whether the cell kept its value.
pub(crate) fn write_array(
    state: &mut ExecState,
    slot: usize,
    rec: &mut StepRecord,
    strict_null: bool,
) -> Result<(), RuntimeFault> {
    let (label, array) = peek_array(state, slot, 1);
    if is_null_array(state, label) {
        if strict_null {
            return Err(RuntimeFault::NullArrayWrite);
        }
        let stack = &mut state.struct_mut(slot).stack;
        stack.truncate(stack.len() - 3);
        rec.warning = Some("write through the null array skipped".into());
        return Ok(());
    }
    let stack = &state.struct_ref(slot).expect("struct").stack;
    let index = check_index(stack[stack.len() - 1].as_int().expect("premise"), array)?;
    let stack = &mut state.struct_mut(slot).stack;
    let _ = pop_int(stack);
    let _ = pop_label(stack);
    let value = stack.pop().expect("premise");
    let cell = &mut state.memory[array.start + index];
    let unchanged = *cell == value;
    *cell = value;
    paramfix::conjoin_cell_write(&mut state.stability, unchanged);
    rec.access = Some(Access { target: label, var: VarKey::Cell(index as u32), write: true });
    rec.changed = !unchanged;
    Ok(())
}

/// `Arr(T)`: stack `π;s` becomes `π;ℓ′` for a fresh array of `s` cells
/// holding the default value of `T`. Stability is unaffected.
pub(crate) fn alloc_array(
    state: &mut ExecState,
    slot: usize,
    default: Value,
    rec: &mut StepRecord,
) -> Result<(), RuntimeFault> {
    let stack = &state.struct_ref(slot).expect("struct").stack;
    let size = stack[stack.len() - 1].as_int().expect("premise");
    if size < 1 {
        return Err(RuntimeFault::BadArraySize { size });
    }
    let _ = pop_int(&mut state.struct_mut(slot).stack);
    let start = state.memory.len();
    state.memory.resize(start + size as usize, default);
    let fresh = state.push_entry(Entry::Array(ArrayInstance { start, size: size as usize }));
    state.struct_mut(slot).stack.push(Value::Label(fresh));
    rec.created = Some(fresh);
    Ok(())
}

/// `Asize`: stack `π;ℓ′` becomes `π;s`.
pub(crate) fn array_size(state: &mut ExecState, slot: usize) {
    let stack = &mut state.struct_mut(slot).stack;
    let label = pop_label(stack);
    let size = state.array(label).expect("premise").size;
    state.struct_mut(slot).stack.push(Value::Int(size as i64));
}
