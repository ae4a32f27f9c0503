//! Parameter-specific fixpoints.
//!
//! Each active fixpoint level carries a [`Relevance`]: the parameters whose
//! changes make that level unstable. A plain `Fix` is relevant to every
//! parameter, so the base fixpoint rules are the special case where every
//! level is [`Relevance::All`].

use std::sync::Arc;

use crate::syntax::ast::{Name, Program, Schedule, ScheduleItem};

/// The stability-function entry of one fixpoint level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Relevance {
    All,
    /// Flags over the flattened `(struct, parameter)` list of the program.
    Only(Arc<[bool]>),
}

impl Relevance {
    pub fn covers(&self, param: usize) -> bool {
        match self {
            Relevance::All => true,
            Relevance::Only(flags) => flags[param],
        }
    }
}

/// Stability update for a write to parameter `param`: level `k` stays
/// stable iff the value was unchanged or the parameter is irrelevant there.
pub fn conjoin_param_write(stability: &mut [bool], levels: &[Relevance], param: usize, unchanged: bool) {
    if unchanged {
        return;
    }
    for (stable, rel) in stability.iter_mut().zip(levels) {
        if rel.covers(param) {
            *stable = false;
        }
    }
}

/// Array cells count as relevant at every level.
pub fn conjoin_cell_write(stability: &mut [bool], unchanged: bool) {
    if !unchanged {
        stability.iter_mut().for_each(|s| *s = false);
    }
}

/// Rewrites every `Fix(sc)` into `Fix(sc, p1, ..., pn)` over all parameters
/// declared in the program. The result must behave exactly like the input.
pub fn fix_on_all_params(program: &Program) -> Program {
    let mut names: Vec<Name> = Vec::new();
    for def in &program.structs {
        for p in &def.params {
            if !names.iter().any(|n| n.text == p.name.text) {
                names.push(p.name.clone());
            }
        }
    }
    fn rewrite(schedule: &Schedule, names: &[Name]) -> Schedule {
        let items = schedule
            .items
            .iter()
            .map(|item| match item {
                ScheduleItem::Fix(body) if !names.is_empty() => {
                    ScheduleItem::FixOn(rewrite(body, names), names.to_vec())
                }
                ScheduleItem::Fix(body) => ScheduleItem::Fix(rewrite(body, names)),
                ScheduleItem::FixOn(body, params) => ScheduleItem::FixOn(rewrite(body, names), params.clone()),
                other => other.clone(),
            })
            .collect();
        Schedule { items }
    }
    let mut out = program.clone();
    out.schedule = rewrite(&program.schedule, &names);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irrelevant_change_keeps_levels_stable() {
        let levels = [Relevance::All, Relevance::Only(Arc::from(vec![true, false]))];
        let mut st = [true, true];
        conjoin_param_write(&mut st, &levels, 1, false);
        assert_eq!(st, [false, true]);
        let mut st = [true, true];
        conjoin_param_write(&mut st, &levels, 0, false);
        assert_eq!(st, [false, false]);
        let mut st = [true, true];
        conjoin_param_write(&mut st, &levels, 0, true);
        assert_eq!(st, [true, true]);
    }
}
