#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use audala::engine::Rule;
use audala::engine::{canonicalize, ExecState, Execution, Limits, RunOptions, SchedulerPolicy};
use audala::ir::{Label, Value};
use audala::{load_program, Extensions, ValidatedProgram};

/// Corpus programs with the extensions they need.
pub const CORPUS: &[(&str, &str)] = &[
    ("reachability", ""),
    ("reachability_iter", "iter"),
    ("reachability_arrays", "arrays"),
    ("shivering_plate", ""),
    ("shivering_plate_fixon", "param-fix"),
    ("tm_walk_to_two", ""),
];

pub fn source(name: &str) -> String {
    let path = format!("{}/corpus/{name}.adl", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn load(name: &str) -> ValidatedProgram {
    let ext = CORPUS.iter().find(|(n, _)| *n == name).map(|(_, e)| *e).unwrap_or("");
    load_program(&source(name), ext.parse::<Extensions>().unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Programs whose plain fixpoint never settles get a smaller cap.
pub fn limits_for(name: &str, cap: u64) -> Limits {
    if name == "shivering_plate" {
        Limits { max_fixpoint_iterations: cap, ..Limits::default() }
    } else {
        Limits::default()
    }
}

pub fn policies(seeds: u64) -> Vec<SchedulerPolicy> {
    let mut v = vec![SchedulerPolicy::Lockstep, SchedulerPolicy::Sequential];
    v.extend((0..seeds).map(SchedulerPolicy::SeededRandom));
    v
}

/// Non-null instances of `ty_name` in creation order.
pub fn instances(state: &ExecState, program: &ValidatedProgram, ty_name: &str) -> Vec<Label> {
    let ty = program.struct_id(ty_name).unwrap();
    state.instances_of(ty).filter(|&l| !program.is_null_label(l)).collect()
}

pub fn label(v: &Value) -> Label {
    v.as_label().expect("label value")
}

/// Breadth-first search over `adj` from `source`.
pub fn bfs(adj: &BTreeMap<Label, Vec<Label>>, source: Label) -> BTreeSet<Label> {
    let mut seen = BTreeSet::from([source]);
    let mut queue = VecDeque::from([source]);
    while let Some(n) = queue.pop_front() {
        for &m in adj.get(&n).into_iter().flatten() {
            if seen.insert(m) {
                queue.push_back(m);
            }
        }
    }
    seen
}

/// A step execution: the idle state in which it starts and the number of
/// races the reference run found in it.
pub struct Window {
    pub opened_by: Rule,
    pub pre: ExecState,
    pub races: usize,
}

/// Runs `program` under lockstep with race detection and returns every
/// step execution it performs.
pub fn windows(program: &ValidatedProgram, limits: Limits) -> Vec<Window> {
    let opts = RunOptions { limits, races: true, ..RunOptions::default() };
    let mut exec = Execution::new(program, opts);
    let mut out = Vec::new();
    loop {
        let pre = match exec.pending_schedule_rule() {
            Some(Rule::InitG | Rule::InitL | Rule::IterInit) if exec.state().done() => Some(exec.state().clone()),
            _ => None,
        };
        let Some(rec) = exec.step() else { break };
        if matches!(rec.rule, Rule::InitG | Rule::InitL | Rule::IterInit) {
            out.push(Window { opened_by: rec.rule, pre: pre.expect("idle before a step starts"), races: 0 });
        }
    }
    let per_window = exec.races().per_window();
    for (i, w) in out.iter_mut().enumerate() {
        w.races = per_window.get(i).copied().unwrap_or(0);
    }
    out
}

/// Executes the step execution starting in `pre` under `policy` and returns
/// the canonical state once it is over.
pub fn replay_window(program: &ValidatedProgram, pre: &ExecState, policy: SchedulerPolicy) -> ExecState {
    let mut exec = Execution::resume(program, pre.clone(), RunOptions::with_policy(policy));
    let first = exec.step().expect("window opens");
    assert!(matches!(first.rule, Rule::InitG | Rule::InitL | Rule::IterInit), "opened by {:?}", first.rule);
    loop {
        if exec.state().done() && exec.pending_schedule_rule() != Some(Rule::IterIter) {
            return canonicalize(exec.state());
        }
        exec.step().unwrap_or_else(|| panic!("run ended inside a window: {:?}", exec.status()));
    }
}
