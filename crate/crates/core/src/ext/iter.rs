//! Iterators: an unsynchronised loop over a list of steps.
//!
//! `Iter(s1; ...; sn)` loads every instance with its block (the bodies of
//! the listed steps, concatenated) and then keeps topping up instances that
//! ran out of work while the loop is unstable. Only entry and exit wait for
//! all instances.

use std::sync::Arc;

use crate::engine::commands::CommandList;
use crate::engine::state::{Entry, ExecState, RtItem};
use crate::ext::paramfix::Relevance;
use crate::ir::Command;
use crate::program::{SchedItem, ValidatedProgram};

/// Replaces the `Iter` head with its marker, loads every instance with its
/// block and opens a stability level.
pub(crate) fn iter_init(state: &mut ExecState, program: &ValidatedProgram) {
    let Some(RtItem::Item(SchedItem::Iter { steps })) = state.schedule.pop_front() else {
        unreachable!("schedule head checked")
    };
    let blocks: Arc<[Arc<[Command]>]> =
        (0..program.structs().len()).map(|ty| program.iter_block(ty as u16, &steps)).collect();
    state.load_all(|ty| Some(CommandList::load_block(blocks[ty as usize].clone())));
    state.schedule.push_front(RtItem::AIter { steps, blocks });
    state.stability.push(true);
    // The stability function of an iterator level tracks every parameter.
    state.levels.push(Relevance::All);
}

/// Whether some instance is idle although its block is nonempty.
pub(crate) fn top_up_possible(state: &ExecState, blocks: &[Arc<[Command]>]) -> bool {
    blocks.iter().enumerate().any(|(ty, b)| !b.is_empty() && state.count_by_struct[ty] > state.active_by_struct[ty])
}

/// Appends its block to every instance whose command list does not already
/// end with it, and marks the loop level stable again.
pub(crate) fn iter_iter(state: &mut ExecState) {
    let Some(RtItem::AIter { blocks, .. }) = state.schedule.front() else { unreachable!("schedule head checked") };
    let blocks = blocks.clone();
    for slot in 0..state.entries.len() {
        let Entry::Struct(inst) = &mut state.entries[slot] else { continue };
        let block = &blocks[inst.ty as usize];
        if !inst.commands.ends_with(block) {
            inst.commands.append_block(block.clone());
            state.refresh_active(slot);
        }
    }
    *state.stability.last_mut().expect("active iterator") = true;
}
