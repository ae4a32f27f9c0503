mod common;

use audala::engine::{
    canonicalize, initial_state, run, write_jsonl, ApplyOptions, Execution, LabelOrder, Limits, Rule, RunOptions,
    RunStatus, RuntimeFault, SchedulerPolicy,
};
use audala::ir::{Command, Value};
use audala::{load_program, Extensions, ValidatedProgram};
use common::*;
use proptest::prelude::*;

fn prog(src: &str) -> ValidatedProgram {
    load_program(src, Extensions::all()).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

fn int(v: Option<&Value>) -> i64 {
    v.and_then(Value::as_int).unwrap()
}

const COUNTER: &str = "
struct C (live: Bool, n: Int, m: Int) {
    bump {
        if (live) then {
            if (n < 3) then {
                n := n + 1;
            }
            m := m + 1;
        }
    }
    init {
        C(true, 0, 0);
    }
}
";

#[test]
fn plain_fixpoint_iterates_until_nothing_changes() {
    let p = prog(&format!("{COUNTER}init < Fix(bump)"));
    let opts = RunOptions { limits: Limits { max_fixpoint_iterations: 50, ..Limits::default() }, ..Default::default() };
    // `m` grows forever, so the plain fixpoint never settles.
    let r = run(&p, opts);
    assert!(matches!(r.status, RunStatus::DivergenceSuspected { .. }), "{}", r.status);
}

#[test]
fn restricted_fixpoint_ignores_irrelevant_changes() {
    let p = prog(&format!("{COUNTER}init < Fix(bump, n)"));
    let r = run(&p, RunOptions::default());
    assert_eq!(r.status, RunStatus::Completed);
    let c = instances(&r.state, &p, "C")[0];
    // Three changing iterations and one stable one.
    assert_eq!(int(r.state.var(&p, c, "n")), 3);
    assert_eq!(int(r.state.var(&p, c, "m")), 4);
}

#[test]
fn changing_write_clears_every_stability_entry() {
    let src = COUNTER.replace("m := m + 1;", "");
    let p = load_program(&format!("{src}init < Fix(Fix(bump) < bump)"), Extensions::none()).unwrap();
    let mut exec = Execution::new(&p, RunOptions::default());
    let mut nested_changes = 0;
    while let Some(rec) = exec.step() {
        if rec.rule == Rule::ComWr && rec.changed && exec.state().stability().len() == 2 {
            assert_eq!(exec.state().stability(), [false, false]);
            nested_changes += 1;
        }
    }
    assert_eq!(nested_changes, 3);
    assert_eq!(exec.status(), Some(&RunStatus::Completed));
}

#[test]
fn restricted_levels_only_see_their_parameters() {
    let p = prog(&format!("{COUNTER}init < Fix(Fix(bump, n) < bump, live)"));
    let mut exec = Execution::new(&p, RunOptions::default());
    let (mut n_writes, mut m_writes) = (0, 0);
    while let Some(rec) = exec.step() {
        let Some(Command::Write(var)) = &rec.command else { continue };
        if rec.rule != Rule::ComWrN || !rec.changed || exec.state().stability().len() != 2 {
            continue;
        }
        match &*var.name {
            "n" => {
                // Relevant to the inner level only.
                assert_eq!(exec.state().stability(), [true, false]);
                n_writes += 1;
            }
            "m" => {
                assert!(exec.state().stability()[0]);
                m_writes += 1;
            }
            _ => {}
        }
    }
    assert_eq!(n_writes, 3);
    assert!(m_writes > 0);
    assert_eq!(exec.status(), Some(&RunStatus::Completed));
}

#[test]
fn instance_creation_clears_stability() {
    let src = "
struct A (k: Int) {
    grow {
        if (k = 1) then {
            A(2);
        }
    }
    init {
        A(1);
    }
}
init < Fix(grow, k)";
    let p = prog(src);
    let mut exec = Execution::new(&p, RunOptions::default());
    let mut cons_in_fix = 0;
    while let Some(rec) = exec.step() {
        if rec.rule == Rule::ComCons && !exec.state().stability().is_empty() {
            assert_eq!(exec.state().stability(), [false]);
            cons_in_fix += 1;
        }
    }
    // Every iteration creates another A(2) from the single A(1), so the
    // fixpoint never stabilises.
    assert!(cons_in_fix > 1);
    assert!(matches!(exec.status(), Some(RunStatus::DivergenceSuspected { .. })));
}

#[test]
fn writes_through_null_are_skipped() {
    let src = "
struct N (v: Int, next: N) {
    poke {
        next.v := 7;
    }
    init {
        N(1, null);
    }
}
init < Fix(poke)";
    let p = prog(src);
    let mut exec = Execution::new(&p, RunOptions { races: true, ..Default::default() });
    let mut skips = 0;
    while let Some(rec) = exec.step() {
        if rec.rule == Rule::ComWrNSkip {
            skips += 1;
            assert!(!rec.changed);
            assert_eq!(exec.state().stability(), [true]);
        }
    }
    assert_eq!(exec.status(), Some(&RunStatus::Completed));
    // Both the null instance and the real one write through null.
    assert_eq!(skips, 2);
    let null = p.null_label(p.struct_id("N").unwrap());
    assert_eq!(exec.state().var(&p, null, "v"), Some(&Value::Int(0)));
    // Two writers on null.v, but skipped writes are not accesses.
    assert!(exec.races().reports().is_empty());
}

#[test]
fn local_call_runs_only_the_named_struct() {
    let src = "
struct A (x: Int) {
    mark {
        x := 1;
    }
    init {
        A(0);
        B(0);
    }
}
struct B (x: Int) {
    mark {
        x := 2;
    }
}
init < A.mark";
    let p = prog(src);
    let r = run(&p, RunOptions::default());
    let a = instances(&r.state, &p, "A")[0];
    let b = instances(&r.state, &p, "B")[0];
    assert_eq!(int(r.state.var(&p, a, "x")), 1);
    assert_eq!(int(r.state.var(&p, b, "x")), 0);
}

#[test]
fn step_locals_are_not_parameters() {
    let src = "
struct A (x: Int) {
    go {
        Int t := x + 5;
        x := t * 2;
    }
    init {
        A(1);
    }
}
init < go";
    let p = prog(src);
    let r = run(&p, RunOptions { races: true, ..Default::default() });
    let a = instances(&r.state, &p, "A")[0];
    assert_eq!(int(r.state.var(&p, a, "x")), 12);
    assert!(r.races.is_empty());
}

#[test]
fn division_by_zero_faults() {
    let src = "
struct A (x: Int) {
    go {
        x := 10 / x;
    }
    init {
        A(0);
    }
}
init < go";
    let r = run(&prog(src), RunOptions::default());
    assert!(matches!(r.status, RunStatus::RuntimeFault { fault: RuntimeFault::DivisionByZero, .. }));
    assert_eq!(r.status.exit_code(), 4);
}

#[test]
fn transition_limit_reports_divergence() {
    let p = load("reachability");
    let opts = RunOptions { limits: Limits { max_total_transitions: 20, ..Limits::default() }, ..Default::default() };
    let r = run(&p, opts);
    assert_eq!(r.transitions, 20);
    match r.status {
        RunStatus::DivergenceSuspected { reason } => assert!(reason.contains("transition limit"), "{reason}"),
        other => panic!("{other}"),
    }
}

#[test]
fn lockstep_rounds_follow_creation_order() {
    let p = load("reachability");
    let mut exec = Execution::new(&p, RunOptions::default());
    // Skip to the first reachability round.
    exec.run_until(|_, rec| rec.rule == Rule::FixInit);
    exec.step().unwrap();
    let mut actors = Vec::new();
    for _ in 0..4 {
        actors.push(exec.step().unwrap().actor.unwrap());
    }
    assert!(actors.windows(2).all(|w| w[0] < w[1]), "{actors:?}");
}

#[test]
fn sequential_finishes_one_instance_before_the_next() {
    let p = load("reachability");
    let mut exec = Execution::new(&p, RunOptions::with_policy(SchedulerPolicy::Sequential));
    exec.run_until(|_, rec| rec.rule == Rule::FixInit);
    exec.step().unwrap();
    let mut order = Vec::new();
    while let Some(rec) = exec.step() {
        match rec.actor {
            Some(a) if order.last() != Some(&a) => order.push(a),
            Some(_) => {}
            None => break,
        }
    }
    let mut sorted = order.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(order, sorted);
}

#[test]
fn null_array_writes_warn_or_fault() {
    let src = "
struct H (a: Array(Int), live: Bool) {
    go {
        if (live) then {
            a[0] := 1;
        }
    }
    init {
        H(null, true);
    }
}
init < go";
    let p = prog(src);
    let r = run(&p, RunOptions::default());
    assert_eq!(r.status, RunStatus::Completed);
    assert_eq!(r.warnings.len(), 1, "{:?}", r.warnings);
    let strict = RunOptions { apply: ApplyOptions { strict_null_array: true }, ..Default::default() };
    let r = run(&p, strict);
    assert!(matches!(r.status, RunStatus::RuntimeFault { fault: RuntimeFault::NullArrayWrite, .. }));

    let read = src.replace("a[0] := 1;", "live := a[0] = 1;");
    let r = run(&prog(&read), RunOptions::default());
    assert!(matches!(r.status, RunStatus::RuntimeFault { fault: RuntimeFault::NullArrayAccess, .. }));
}

#[test]
fn array_size_and_default_cells() {
    let src = "
struct H (a: Array(Bool), s: Int, first: Bool, live: Bool) {
    go {
        if (live) then {
            s := a.s;
            first := a[0];
        }
    }
    init {
        H(array(3), 0, true, true);
    }
}
init < H.go";
    let p = prog(src);
    let r = run(&p, RunOptions::default());
    assert_eq!(r.status, RunStatus::Completed);
    let h = instances(&r.state, &p, "H")[0];
    assert_eq!(int(r.state.var(&p, h, "s")), 3);
    assert_eq!(r.state.var(&p, h, "first"), Some(&Value::Bool(false)));
}

#[test]
fn canonical_form_is_idempotent_and_order_independent() {
    for (name, _) in CORPUS {
        let p = load(name);
        let limits = limits_for(name, 40);
        let asc = run(&p, RunOptions { limits, ..Default::default() });
        let desc = run(&p, RunOptions { limits, label_order: LabelOrder::Descending, ..Default::default() });
        let c = canonicalize(&asc.state);
        assert_eq!(canonicalize(&c), c, "{name}");
        assert_eq!(canonicalize(&desc.state), c, "{name}");
        assert_ne!(desc.state, asc.state, "{name}: descending labels should differ before canonicalisation");
    }
}

#[test]
fn initial_state_has_only_null_instances() {
    let p = load("reachability");
    let s = initial_state(&p);
    assert!(s.labels().all(|l| p.is_null_label(l)));
    assert!(s.done());
    assert!(s.stability().is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn same_seed_same_trace(seed in any::<u64>(), idx in 0usize..6) {
        let (name, _) = CORPUS[idx];
        let p = load(name);
        let opts = RunOptions {
            trace: true,
            limits: limits_for(name, 10),
            ..RunOptions::with_policy(SchedulerPolicy::SeededRandom(seed))
        };
        let (a, b) = (run(&p, opts), run(&p, opts));
        prop_assert_eq!(&a.trace, &b.trace);
        let (mut ja, mut jb) = (Vec::new(), Vec::new());
        write_jsonl(&a.trace, &mut ja).unwrap();
        write_jsonl(&b.trace, &mut jb).unwrap();
        prop_assert_eq!(ja, jb);
    }

    #[test]
    fn skipped_writes_change_nothing(seed in any::<u64>(), idx in 0usize..6) {
        let (name, _) = CORPUS[idx];
        let p = load(name);
        let opts = RunOptions { limits: limits_for(name, 10), ..RunOptions::with_policy(SchedulerPolicy::SeededRandom(seed)) };
        let mut exec = Execution::new(&p, opts);
        let mut before = exec.state().clone();
        while let Some(rec) = exec.step() {
            if rec.rule == Rule::ComWrNSkip {
                let after = exec.state();
                prop_assert_eq!(after.stability(), before.stability());
                for l in after.labels() {
                    prop_assert_eq!(&after.instance(l).map(|i| &i.env), &before.instance(l).map(|i| &i.env));
                }
            }
            before = exec.state().clone();
        }
    }

    #[test]
    fn fresh_label_order_does_not_matter(seed in any::<u64>(), idx in 0usize..6) {
        let (name, _) = CORPUS[idx];
        let p = load(name);
        let limits = limits_for(name, 10);
        let policy = SchedulerPolicy::SeededRandom(seed);
        let asc = run(&p, RunOptions { limits, ..RunOptions::with_policy(policy) });
        let desc = run(&p, RunOptions { limits, label_order: LabelOrder::Descending, ..RunOptions::with_policy(policy) });
        prop_assert_eq!(canonicalize(&asc.state), canonicalize(&desc.state));
    }
}
