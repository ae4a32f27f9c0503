//! A checked program in executable form: per-struct layouts, lowered step
//! bodies and the schedule with names resolved to ids.

use std::sync::Arc;

use crate::ext::paramfix::Relevance;
use crate::ext::Extensions;
use crate::ir::{self, render_commands, Command, Label, LowerCtx, Value};
use crate::syntax::ast::{Program, Schedule, ScheduleItem, SynType};
use crate::syntax::pretty::pretty_program;

pub type StepId = u16;

/// Schedule item with resolved names.
#[derive(Debug, Clone, PartialEq)]
pub enum SchedItem {
    /// Step call; `only` restricts it to one struct type (local call).
    Call {
        step: StepId,
        only: Option<u16>,
    },
    Fix {
        body: Arc<[SchedItem]>,
        relevance: Relevance,
    },
    Iter {
        steps: Arc<[StepId]>,
    },
}

#[derive(Debug, Clone)]
pub struct StructInfo {
    pub name: Arc<str>,
    pub params: Vec<(Arc<str>, SynType)>,
    /// Step-local variables; they live in the environment after the params.
    pub locals: Vec<(Arc<str>, SynType)>,
    /// Initial environment: defaults for every parameter and local.
    pub env0: Vec<Value>,
    /// Lowered bodies indexed by step id; `None` when the struct lacks the step.
    bodies: Vec<Option<Arc<[Command]>>>,
    /// Offset of this struct's parameters in the flattened parameter list.
    param_base: usize,
}

impl StructInfo {
    pub fn is_param(&self, slot: u16) -> bool {
        (slot as usize) < self.params.len()
    }

    pub fn slot_name(&self, slot: u16) -> &str {
        let slot = slot as usize;
        match self.params.get(slot) {
            Some((n, _)) => n,
            None => &self.locals[slot - self.params.len()].0,
        }
    }

    pub fn body(&self, step: StepId) -> Option<&Arc<[Command]>> {
        self.bodies.get(step as usize).and_then(Option::as_ref)
    }
}

#[derive(Debug, Clone)]
pub struct ValidatedProgram {
    ast: Program,
    ext: Extensions,
    structs: Vec<StructInfo>,
    steps: Vec<Arc<str>>,
    schedule: Arc<[SchedItem]>,
    total_params: usize,
}

impl ValidatedProgram {
    /// Assembles the executable form. `ast` must have passed the checker and
    /// `locals[k]` lists the locals of struct `k` in slot order.
    pub(crate) fn build(ast: Program, locals: Vec<Vec<(String, SynType)>>, ext: Extensions) -> Self {
        let names: Vec<Arc<str>> = ast.structs.iter().map(|d| Arc::from(d.name.text.as_str())).collect();
        let null_array = Label(names.len() as u32);
        let ctx = LowerCtx { structs: &names, null_array };

        let mut steps: Vec<Arc<str>> = Vec::new();
        for def in &ast.structs {
            for s in &def.steps {
                if !steps.iter().any(|n| **n == *s.name.text) {
                    steps.push(Arc::from(s.name.text.as_str()));
                }
            }
        }

        let mut structs = Vec::with_capacity(ast.structs.len());
        let mut param_base = 0;
        for (def, locals) in ast.structs.iter().zip(locals) {
            let params: Vec<(Arc<str>, SynType)> =
                def.params.iter().map(|p| (Arc::from(p.name.text.as_str()), p.ty.clone())).collect();
            let locals: Vec<(Arc<str>, SynType)> = locals.into_iter().map(|(n, t)| (Arc::from(n), t)).collect();
            let env0 = params.iter().chain(&locals).map(|(_, t)| ir::default_val(t, &ctx)).collect();
            let mut bodies = vec![None; steps.len()];
            for s in &def.steps {
                let id = steps.iter().position(|n| **n == *s.name.text).expect("interned");
                // Rule 2 guarantees one body per name; keep the first regardless.
                if bodies[id].is_none() {
                    bodies[id] = Some(Arc::from(ir::interp_statements(&s.body, &ctx)));
                }
            }
            let n_params = params.len();
            structs.push(StructInfo { name: names[structs.len()].clone(), params, locals, env0, bodies, param_base });
            param_base += n_params;
        }

        let mut program = Self { ast, ext, structs, steps, schedule: Arc::from(Vec::new()), total_params: param_base };
        program.schedule = program.resolve_schedule(&program.ast.schedule).into();
        program
    }

    fn resolve_schedule(&self, schedule: &Schedule) -> Vec<SchedItem> {
        schedule
            .items
            .iter()
            .map(|item| match item {
                ScheduleItem::GlobalCall(step) => {
                    SchedItem::Call { step: self.step_id(&step.text).expect("checked"), only: None }
                }
                ScheduleItem::LocalCall { ty, step } => SchedItem::Call {
                    step: self.step_id(&step.text).expect("checked"),
                    only: Some(self.struct_id(&ty.text).expect("checked")),
                },
                ScheduleItem::Fix(body) => {
                    SchedItem::Fix { body: self.resolve_schedule(body).into(), relevance: Relevance::All }
                }
                ScheduleItem::FixOn(body, params) => {
                    let names: Vec<&str> = params.iter().map(|p| p.text.as_str()).collect();
                    SchedItem::Fix { body: self.resolve_schedule(body).into(), relevance: self.relevance_of(&names) }
                }
                ScheduleItem::Iter(steps) => {
                    SchedItem::Iter { steps: steps.iter().map(|s| self.step_id(&s.text).expect("checked")).collect() }
                }
            })
            .collect()
    }

    /// Relevance flags for a parameter-specific fixpoint over `names`. A name
    /// shared by several structs is relevant in all of them.
    pub fn relevance_of(&self, names: &[&str]) -> Relevance {
        let mut flags = vec![false; self.total_params];
        for info in &self.structs {
            for (i, (p, _)) in info.params.iter().enumerate() {
                if names.contains(&&**p) {
                    flags[info.param_base + i] = true;
                }
            }
        }
        Relevance::Only(flags.into())
    }

    pub fn ast(&self) -> &Program {
        &self.ast
    }

    pub fn source_text(&self) -> String {
        pretty_program(&self.ast)
    }

    pub fn extensions(&self) -> Extensions {
        self.ext
    }

    pub fn structs(&self) -> &[StructInfo] {
        &self.structs
    }

    pub fn struct_info(&self, id: u16) -> &StructInfo {
        &self.structs[id as usize]
    }

    pub fn struct_id(&self, name: &str) -> Option<u16> {
        self.structs.iter().position(|s| &*s.name == name).map(|i| i as u16)
    }

    pub fn step_id(&self, name: &str) -> Option<StepId> {
        self.steps.iter().position(|s| &**s == name).map(|i| i as StepId)
    }

    pub fn step_name(&self, id: StepId) -> &str {
        &self.steps[id as usize]
    }

    pub fn schedule(&self) -> &Arc<[SchedItem]> {
        &self.schedule
    }

    pub fn total_params(&self) -> usize {
        self.total_params
    }

    /// Position of parameter `slot` of struct `ty` in the flattened list.
    pub fn param_index(&self, ty: u16, slot: u16) -> usize {
        self.structs[ty as usize].param_base + slot as usize
    }

    pub fn null_label(&self, ty: u16) -> Label {
        Label(ty as u32)
    }

    pub fn null_array(&self) -> Option<Label> {
        self.ext.arrays.then_some(Label(self.structs.len() as u32))
    }

    /// Number of labels reserved for null instances.
    pub fn reserved_labels(&self) -> u32 {
        self.structs.len() as u32 + u32::from(self.ext.arrays)
    }

    pub fn is_null_label(&self, label: Label) -> bool {
        label.0 < self.reserved_labels()
    }

    /// Display name for a label: `null_T` for null instances, `#n` otherwise.
    pub fn label_name(&self, label: Label) -> String {
        let n = self.structs.len() as u32;
        if label.0 < n {
            format!("null_{}", self.structs[label.0 as usize].name)
        } else if self.ext.arrays && label.0 == n {
            "null_array".into()
        } else {
            label.to_string()
        }
    }

    pub fn default_val(&self, ty: &SynType) -> Value {
        let names: Vec<Arc<str>> = self.structs.iter().map(|s| s.name.clone()).collect();
        ir::default_val(ty, &LowerCtx { structs: &names, null_array: Label(names.len() as u32) })
    }

    /// `I(ℓ, S⁺)` for instances of `ty`: the bodies of `steps` concatenated.
    pub fn iter_block(&self, ty: u16, steps: &[StepId]) -> Arc<[Command]> {
        let info = &self.structs[ty as usize];
        let mut block = Vec::new();
        for &s in steps {
            if let Some(body) = info.body(s) {
                block.extend(body.iter().cloned());
            }
        }
        block.into()
    }

    /// Rendered commands of `Struct.step`, or `None` if the struct or step
    /// does not exist. A struct without the step renders as empty.
    pub fn render_step_ir(&self, struct_name: &str, step: &str) -> Option<String> {
        let ty = self.struct_id(struct_name)?;
        let step = self.step_id(step)?;
        let body = self.structs[ty as usize].body(step).map(|b| &b[..]).unwrap_or(&[]);
        Some(render_commands(body, &|l| self.label_name(l)))
    }

    pub fn render_schedule(&self, items: &[SchedItem]) -> String {
        let parts: Vec<String> = items
            .iter()
            .map(|item| match item {
                SchedItem::Call { step, only: None } => self.step_name(*step).to_string(),
                SchedItem::Call { step, only: Some(ty) } => {
                    format!("{}.{}", self.structs[*ty as usize].name, self.step_name(*step))
                }
                SchedItem::Fix { body, relevance: Relevance::All } => format!("Fix({})", self.render_schedule(body)),
                SchedItem::Fix { body, relevance: Relevance::Only(flags) } => {
                    let mut names: Vec<&str> = Vec::new();
                    for info in &self.structs {
                        for (i, (p, _)) in info.params.iter().enumerate() {
                            if flags[info.param_base + i] && !names.contains(&&**p) {
                                names.push(p);
                            }
                        }
                    }
                    format!("Fix({}, {})", self.render_schedule(body), names.join(", "))
                }
                SchedItem::Iter { steps } => {
                    let names: Vec<&str> = steps.iter().map(|s| self.step_name(*s)).collect();
                    format!("Iter({})", names.join("; "))
                }
            })
            .collect();
        parts.join(" < ")
    }
}
