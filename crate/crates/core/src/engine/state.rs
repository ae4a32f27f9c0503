use std::collections::VecDeque;
use std::sync::Arc;

use super::commands::CommandList;
use crate::ext::paramfix::Relevance;
use crate::ir::{Command, Label, Value};
use crate::program::{SchedItem, StepId, ValidatedProgram};

/// A schedule entry at run time: a program item or one of the internal
/// loop markers inserted by fixpoint and iterator initialisation.
#[derive(Debug, Clone, PartialEq)]
pub enum RtItem {
    Item(SchedItem),
    /// Active fixpoint over `body`.
    AFix {
        body: Arc<[SchedItem]>,
        relevance: Relevance,
    },
    /// Active iterator; `blocks[t]` is the block of struct `t`.
    AIter {
        steps: Arc<[StepId]>,
        blocks: Arc<[Arc<[Command]>]>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructInstance {
    pub ty: u16,
    pub commands: CommandList,
    /// Top of stack is the last element.
    pub stack: Vec<Value>,
    /// Parameters first, then step-local variables.
    pub env: Vec<Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrayInstance {
    /// First address; 0 is the empty address of the null array.
    pub start: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entry {
    Struct(StructInstance),
    Array(ArrayInstance),
}

/// How fresh labels are numbered. Only the raw label values differ; the
/// creation order, and hence every scheduling decision, is the same.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LabelOrder {
    #[default]
    Ascending,
    /// Counts down from `u32::MAX`.
    Descending,
}

/// `⟨schedule, struct environment, stability stack⟩` plus the stability
/// function and the memory of the extensions.
///
/// Instances are kept in creation order ("slots"); a label maps to its slot
/// arithmetically according to the [`LabelOrder`].
#[derive(Debug, Clone)]
pub struct ExecState {
    pub(crate) schedule: VecDeque<RtItem>,
    pub(crate) entries: Vec<Entry>,
    pub(crate) stability: Vec<bool>,
    /// Stability function, one level per stability entry.
    pub(crate) levels: Vec<Relevance>,
    /// Array memory indexed by address; address 0 is never allocated.
    pub(crate) memory: Vec<Value>,
    pub(crate) reserved: u32,
    pub(crate) order: LabelOrder,
    active: Vec<u32>,
    active_pos: Vec<u32>,
    pub(crate) count_by_struct: Vec<usize>,
    pub(crate) active_by_struct: Vec<usize>,
}

const NOT_ACTIVE: u32 = u32::MAX;

impl PartialEq for ExecState {
    fn eq(&self, other: &Self) -> bool {
        self.schedule == other.schedule
            && self.stability == other.stability
            && self.levels == other.levels
            && self.memory == other.memory
            && self.reserved == other.reserved
            && self.slot_labels().eq(other.slot_labels())
            && self.entries == other.entries
    }
}

/// Builds the initial state: the program schedule and one null instance per
/// struct type (plus the null array when arrays are enabled).
pub fn initial_state(program: &ValidatedProgram) -> ExecState {
    initial_state_with(program, LabelOrder::Ascending)
}

pub fn initial_state_with(program: &ValidatedProgram, order: LabelOrder) -> ExecState {
    let mut entries = Vec::new();
    for (ty, info) in program.structs().iter().enumerate() {
        entries.push(Entry::Struct(StructInstance {
            ty: ty as u16,
            commands: CommandList::default(),
            stack: Vec::new(),
            env: info.env0.clone(),
        }));
    }
    if program.null_array().is_some() {
        entries.push(Entry::Array(ArrayInstance { start: 0, size: 0 }));
    }
    let n = program.structs().len();
    ExecState {
        schedule: program.schedule().iter().cloned().map(RtItem::Item).collect(),
        active_pos: vec![NOT_ACTIVE; entries.len()],
        entries,
        stability: Vec::new(),
        levels: Vec::new(),
        memory: vec![Value::Int(0)],
        reserved: program.reserved_labels(),
        order,
        active: Vec::new(),
        count_by_struct: vec![1; n],
        active_by_struct: vec![0; n],
    }
}

impl ExecState {
    pub fn label_of(&self, slot: usize) -> Label {
        let slot = slot as u32;
        match self.order {
            _ if slot < self.reserved => Label(slot),
            LabelOrder::Ascending => Label(slot),
            LabelOrder::Descending => Label(u32::MAX - (slot - self.reserved)),
        }
    }

    pub fn slot_of(&self, label: Label) -> Option<usize> {
        let slot = match self.order {
            _ if label.0 < self.reserved => label.0,
            LabelOrder::Ascending => label.0,
            LabelOrder::Descending => (u32::MAX - label.0).checked_add(self.reserved)?,
        };
        ((slot as usize) < self.entries.len()).then_some(slot as usize)
    }

    /// Every defined label, in creation order.
    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.slot_labels()
    }

    fn slot_labels(&self) -> impl Iterator<Item = Label> + '_ {
        (0..self.entries.len()).map(|s| self.label_of(s))
    }

    pub fn entry(&self, label: Label) -> Option<&Entry> {
        self.slot_of(label).map(|s| &self.entries[s])
    }

    pub fn instance(&self, label: Label) -> Option<&StructInstance> {
        match self.entry(label)? {
            Entry::Struct(i) => Some(i),
            Entry::Array(_) => None,
        }
    }

    pub fn array(&self, label: Label) -> Option<ArrayInstance> {
        match self.entry(label)? {
            Entry::Array(a) => Some(*a),
            Entry::Struct(_) => None,
        }
    }

    /// Labels of all struct instances of type `ty` (null instance first).
    pub fn instances_of(&self, ty: u16) -> impl Iterator<Item = Label> + '_ {
        self.entries.iter().enumerate().filter_map(move |(slot, e)| match e {
            Entry::Struct(i) if i.ty == ty => Some(self.label_of(slot)),
            _ => None,
        })
    }

    /// Value of parameter or local `name` of instance `label`.
    pub fn var(&self, program: &ValidatedProgram, label: Label, name: &str) -> Option<&Value> {
        let inst = self.instance(label)?;
        let info = program.struct_info(inst.ty);
        let slot = info.params.iter().chain(&info.locals).position(|(n, _)| &**n == name)?;
        inst.env.get(slot)
    }

    /// Contents of array `label`.
    pub fn array_cells(&self, label: Label) -> Option<&[Value]> {
        let a = self.array(label)?;
        Some(if a.size == 0 { &[] } else { &self.memory[a.start..a.start + a.size] })
    }

    pub fn memory_len(&self) -> usize {
        self.memory.len() - 1
    }

    pub fn stability(&self) -> &[bool] {
        &self.stability
    }

    pub fn stability_levels(&self) -> &[Relevance] {
        &self.levels
    }

    pub fn schedule(&self) -> &VecDeque<RtItem> {
        &self.schedule
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    /// No struct instance has a command left.
    pub fn done(&self) -> bool {
        self.active.is_empty()
    }

    /// Slots with a nonempty command list, in no particular order.
    pub(crate) fn active_slots(&self) -> &[u32] {
        &self.active
    }

    pub(crate) fn struct_mut(&mut self, slot: usize) -> &mut StructInstance {
        match &mut self.entries[slot] {
            Entry::Struct(i) => i,
            Entry::Array(_) => panic!("slot {slot} holds an array"),
        }
    }

    pub(crate) fn struct_ref(&self, slot: usize) -> Option<&StructInstance> {
        match &self.entries[slot] {
            Entry::Struct(i) => Some(i),
            Entry::Array(_) => None,
        }
    }

    pub(crate) fn push_entry(&mut self, entry: Entry) -> Label {
        if let Entry::Struct(i) = &entry {
            self.count_by_struct[i.ty as usize] += 1;
        }
        self.entries.push(entry);
        self.active_pos.push(NOT_ACTIVE);
        let slot = self.entries.len() - 1;
        self.refresh_active(slot);
        self.label_of(slot)
    }

    /// Re-derives membership of `slot` in the active set after its command
    /// list changed.
    pub(crate) fn refresh_active(&mut self, slot: usize) {
        let (busy, ty) = match &self.entries[slot] {
            Entry::Struct(i) => (!i.commands.is_empty(), i.ty as usize),
            Entry::Array(_) => return,
        };
        let pos = self.active_pos[slot];
        if busy && pos == NOT_ACTIVE {
            self.active_pos[slot] = self.active.len() as u32;
            self.active.push(slot as u32);
            self.active_by_struct[ty] += 1;
        } else if !busy && pos != NOT_ACTIVE {
            let last = *self.active.last().expect("nonempty");
            self.active.swap_remove(pos as usize);
            if last as usize != slot {
                self.active_pos[last as usize] = pos;
            }
            self.active_pos[slot] = NOT_ACTIVE;
            self.active_by_struct[ty] -= 1;
        }
    }

    /// Rebuilds derived indices from `entries`; used after bulk rewrites.
    pub(crate) fn reindex(&mut self) {
        self.active.clear();
        self.active_pos = vec![NOT_ACTIVE; self.entries.len()];
        self.count_by_struct.iter_mut().for_each(|c| *c = 0);
        self.active_by_struct.iter_mut().for_each(|c| *c = 0);
        for slot in 0..self.entries.len() {
            if let Entry::Struct(i) = &self.entries[slot] {
                self.count_by_struct[i.ty as usize] += 1;
            }
            self.refresh_active(slot);
        }
    }

    /// Replaces the command list of every struct instance selected by
    /// `pick`, clearing its stack.
    pub(crate) fn load_all(&mut self, mut pick: impl FnMut(u16) -> Option<CommandList>) {
        for slot in 0..self.entries.len() {
            let Entry::Struct(inst) = &mut self.entries[slot] else { continue };
            if let Some(list) = pick(inst.ty) {
                inst.commands = list;
                inst.stack.clear();
                self.refresh_active(slot);
            }
        }
    }

    /// Test hook: installs `commands` as the command list of `label`.
    #[doc(hidden)]
    pub fn set_commands(&mut self, label: Label, commands: Vec<Command>) {
        let slot = self.slot_of(label).expect("defined label");
        self.struct_mut(slot).commands = CommandList::load(commands.into());
        self.refresh_active(slot);
    }

    /// Test hook: replaces the stack of `label`.
    #[doc(hidden)]
    pub fn set_stack(&mut self, label: Label, stack: Vec<Value>) {
        let slot = self.slot_of(label).expect("defined label");
        self.struct_mut(slot).stack = stack;
    }
}
