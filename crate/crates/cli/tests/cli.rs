use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(name)
}

fn audala(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_audala")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_reachability_matches_bfs() {
    let out = audala(&["run", path(&corpus("reachability.adl"))]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut reach = BTreeMap::new();
    let mut adj: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for line in text.lines() {
        let (label, rest) = line.split_once(' ').unwrap();
        if let Some(v) = rest.strip_prefix("Node(reach = ") {
            reach.insert(label.to_string(), v.trim_end_matches(')') == "true");
        } else if let Some(v) = rest.strip_prefix("Edge(in = ") {
            let (from, to) = v.trim_end_matches(')').split_once(", out = ").unwrap();
            adj.entry(from.to_string()).or_default().push(to.to_string());
        }
    }
    assert_eq!(reach.len(), 4);
    // The first node is the source; everything BFS reaches must be marked.
    let source = reach.keys().next().unwrap().clone();
    let mut seen = BTreeSet::from([source.clone()]);
    let mut queue = VecDeque::from([source]);
    while let Some(n) = queue.pop_front() {
        for m in adj.get(&n).into_iter().flatten() {
            if seen.insert(m.clone()) {
                queue.push_back(m.clone());
            }
        }
    }
    for (label, r) in &reach {
        assert_eq!(*r, seen.contains(label), "{label}");
    }
    assert!(reach.values().all(|&r| r));
}

#[test]
fn unstable_fixpoint_exits_with_divergence() {
    let out = audala(&["run", path(&corpus("shivering_plate.adl")), "--max-fixpoint-iterations", "1000"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeded 1000 iterations"));
}

#[test]
fn parameter_specific_fixpoint_terminates() {
    let out = audala(&["run", path(&corpus("shivering_plate_fixon.adl")), "--ext", "param-fix"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn missing_extension_is_a_frontend_error() {
    let out = audala(&["run", path(&corpus("shivering_plate_fixon.adl"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--ext param-fix"));
    let out = audala(&["check", path(&corpus("reachability_iter.adl")), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["ok"], false);
    assert_eq!(doc["diagnostics"][0]["kind"], "extension");
}

#[test]
fn unreadable_file_exits_1() {
    let out = audala(&["run", "/nonexistent/program.adl"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn dump_ir_golden() {
    let out = audala(&["dump-ir", path(&corpus("reachability.adl")), "--step", "Edge.reachability"]);
    assert_eq!(out.status.code(), Some(0));
    let expected = "\
Push(this)
Rd(in)
Rd(reach)
Push(true)
Op(=)
If(
  Push(true)
  Push(this)
  Rd(out)
  Wr(reach)
)
";
    assert_eq!(stdout(&out), expected);
}

#[test]
fn dump_ir_lists_every_step() {
    let out = audala(&["dump-ir", path(&corpus("reachability.adl"))]);
    let text = stdout(&out);
    assert!(text.contains("Edge.init:"));
    assert!(text.contains("Edge.reachability:"));
}

#[test]
fn compiled_machine_has_no_races() {
    let out = audala(&["race-check", path(&corpus("tm_walk_to_two.adl"))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "no races\n");
}

#[test]
fn race_check_reports_the_reachability_write_write_race() {
    let out = audala(&["race-check", path(&corpus("reachability.adl")), "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let races = doc["races"].as_array().unwrap();
    assert!(races.iter().any(|r| r["kind"] == "write-write" && r["var"] == "reach" && r["loop_iteration"] == 2));
}

#[test]
fn compile_then_diff_check() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("tm.adl");
    let tm = corpus("tm_walk_to_two.json");
    let out = audala(&["compile-tm", path(&tm), "-o", out_file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let checked = audala(&["check", out_file.to_str().unwrap()]);
    assert_eq!(checked.status.code(), Some(0));

    let out = audala(&["diff-check", path(&tm), "--steps", "50", "--seed", "11"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "Agreement: halted after 3 step(s), accepting = true\n");

    let out = audala(&["diff-check", path(&tm), "--input", "1,1,1", "--steps", "10", "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["verdict"]["verdict"], "agreement");
    assert_eq!(doc["verdict"]["halted"], serde_json::Value::Null);
}

#[test]
fn compile_tm_rejects_symbols_outside_the_input_alphabet() {
    let out = audala(&["compile-tm", path(&corpus("tm_walk_to_two.json")), "--input", "1,0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let trace = dir.path().join(format!("t{i}.jsonl"));
        let out = audala(&[
            "run",
            path(&corpus("reachability_iter.adl")),
            "--ext",
            "iter",
            "--seed",
            "7",
            "--race-check",
            "--json",
            "--trace",
            trace.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        outputs.push((out.stdout, std::fs::read(&trace).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert!(!outputs[0].1.is_empty());
}

#[test]
fn arrays_program_runs_with_the_extension() {
    let out = audala(&["run", path(&corpus("reachability_arrays.adl")), "--ext", "arrays", "--policy", "sequential"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().filter(|l| l.contains(" Node(")).all(|l| l.contains("reach = true")));
}
