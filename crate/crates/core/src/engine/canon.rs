//! Canonical relabelling for comparing states modulo fresh labels.

use super::state::{ArrayInstance, Entry, ExecState, LabelOrder};
use crate::ir::{Label, Value};

/// Renumbers fresh labels by first occurrence in a breadth-first walk that
/// starts at the null instances and follows environments, then stacks, then
/// array cells. Instances the walk cannot reach are taken in creation order.
/// Array memory is laid out again contiguously in the new label order.
pub fn canonicalize(state: &ExecState) -> ExecState {
    let n = state.entries.len();
    let reserved = state.reserved as usize;
    let mut new_slot = vec![usize::MAX; n];
    let mut order: Vec<usize> = Vec::with_capacity(n);
    fn visit(slot: usize, order: &mut Vec<usize>, new_slot: &mut [usize]) {
        if new_slot[slot] == usize::MAX {
            new_slot[slot] = order.len();
            order.push(slot);
        }
    }
    for slot in 0..reserved.min(n) {
        visit(slot, &mut order, &mut new_slot);
    }
    let mut head = 0;
    let mut next_unvisited = reserved;
    loop {
        while head < order.len() {
            let slot = order[head];
            head += 1;
            let mut refs = Vec::new();
            match &state.entries[slot] {
                Entry::Struct(inst) => refs.extend(inst.env.iter().chain(&inst.stack)),
                Entry::Array(a) if a.size > 0 => refs.extend(&state.memory[a.start..a.start + a.size]),
                Entry::Array(_) => {}
            }
            for v in refs {
                if let Value::Label(l) = v {
                    if let Some(s) = state.slot_of(*l) {
                        visit(s, &mut order, &mut new_slot);
                    }
                }
            }
        }
        while next_unvisited < n && new_slot[next_unvisited] != usize::MAX {
            next_unvisited += 1;
        }
        if next_unvisited == n {
            break;
        }
        visit(next_unvisited, &mut order, &mut new_slot);
    }

    let relabel = |v: &Value| match v {
        Value::Label(l) => Value::Label(Label(new_slot[state.slot_of(*l).expect("defined label")] as u32)),
        other => other.clone(),
    };
    let mut memory = vec![Value::Int(0)];
    let mut entries = Vec::with_capacity(n);
    for &slot in &order {
        entries.push(match &state.entries[slot] {
            Entry::Struct(inst) => {
                let mut inst = inst.clone();
                inst.env = inst.env.iter().map(relabel).collect();
                inst.stack = inst.stack.iter().map(relabel).collect();
                Entry::Struct(inst)
            }
            Entry::Array(a) if a.size == 0 => Entry::Array(*a),
            Entry::Array(a) => {
                let start = memory.len();
                memory.extend(state.memory[a.start..a.start + a.size].iter().map(relabel));
                Entry::Array(ArrayInstance { start, size: a.size })
            }
        });
    }
    let mut out = state.clone();
    out.entries = entries;
    out.memory = memory;
    out.order = LabelOrder::Ascending;
    out.reindex();
    out
}
