use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use audala::engine::{
    canonicalize, write_jsonl, ApplyOptions, Entry, ExecState, Limits, RaceReport, RunOptions, RunResult,
    SchedulerPolicy,
};
use audala::tm::{compile_tm, differential_check, TuringMachine, Verdict};
use audala::{load_program, Extensions, FrontendError, ValidatedProgram};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value as Json};

// Standard output writes that fail with an error rather than a panic, so a
// closed pipe ends the program quietly.
macro_rules! out {
    ($($t:tt)*) => { write!(io::stdout().lock(), $($t)*)? };
}

macro_rules! outln {
    ($($t:tt)*) => { writeln!(io::stdout().lock(), $($t)*)? };
}

/// Exit status of `diff-check` when the compiled program and the machine disagree.
const EXIT_DIVERGENCE: u8 = 5;

#[derive(Parser)]
#[command(name = "audala", version, about = "Reference interpreter for the AuDaLa language")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a program and print the final parameter values.
    Run {
        file: PathBuf,
        #[command(flatten)]
        front: FrontArgs,
        #[command(flatten)]
        engine: EngineArgs,
        /// Write every transition to FILE as JSON lines.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
        /// Also report races found during the run.
        #[arg(long)]
        race_check: bool,
    },
    /// Parse and check a program without running it.
    Check {
        file: PathBuf,
        #[command(flatten)]
        front: FrontArgs,
    },
    /// Print the command lists of a program's steps.
    DumpIr {
        file: PathBuf,
        /// Only this step, written `Struct.step`.
        #[arg(long, value_name = "STRUCT.STEP")]
        step: Option<String>,
        #[command(flatten)]
        front: FrontArgs,
    },
    /// Run a program and report races per step execution.
    RaceCheck {
        file: PathBuf,
        #[command(flatten)]
        front: FrontArgs,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Compile a Turing machine description to a program.
    CompileTm {
        tm: PathBuf,
        /// Output file; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        input: InputArg,
    },
    /// Run a compiled machine and compare it with direct simulation.
    DiffCheck {
        tm: PathBuf,
        /// Maximum number of machine steps to compare.
        #[arg(long, default_value_t = 50)]
        steps: u64,
        /// Scheduler; defaults to `random` when --seed is given, else `lockstep`.
        #[arg(long, value_parser = ["lockstep", "random", "sequential"])]
        policy: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct FrontArgs {
    /// Enabled extensions, comma separated: param-fix, iter, arrays.
    #[arg(long, default_value = "")]
    ext: Extensions,
    /// Machine-readable output and diagnostics.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EngineArgs {
    /// Scheduler; defaults to `random` when --seed is given, else `lockstep`.
    #[arg(long, value_parser = ["lockstep", "random", "sequential"])]
    policy: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = Limits::default().max_fixpoint_iterations)]
    max_fixpoint_iterations: u64,
    #[arg(long, default_value_t = Limits::default().max_total_transitions)]
    max_transitions: u64,
    /// Fault on writes through the null array instead of skipping them.
    #[arg(long)]
    strict_null_array: bool,
}

#[derive(Args)]
struct InputArg {
    /// Comma-separated input symbols; overrides the file's `input`.
    #[arg(long)]
    input: Option<String>,
}

fn policy(name: Option<&str>, seed: Option<u64>) -> Result<SchedulerPolicy> {
    let name = name.unwrap_or(if seed.is_some() { "random" } else { "lockstep" });
    SchedulerPolicy::parse(name, seed.unwrap_or(0)).map_err(anyhow::Error::msg)
}

impl EngineArgs {
    fn options(&self) -> Result<RunOptions> {
        Ok(RunOptions {
            limits: Limits {
                max_fixpoint_iterations: self.max_fixpoint_iterations,
                max_total_transitions: self.max_transitions,
            },
            apply: ApplyOptions { strict_null_array: self.strict_null_array },
            ..RunOptions::with_policy(policy(self.policy.as_deref(), self.seed)?)
        })
    }
}

/// Either a loaded program or the exit code after reporting why not.
fn load(path: &Path, front: &FrontArgs) -> Result<std::result::Result<ValidatedProgram, ExitCode>> {
    let source = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let err = match load_program(&source, front.ext) {
        Ok(p) => return Ok(Ok(p)),
        Err(e) => e,
    };
    let file = path.display();
    if front.json {
        let diagnostics = match &err {
            FrontendError::Parse(e) => json!([{ "kind": "parse", "error": e }]),
            FrontendError::WellFormedness(errs) => json!(errs),
        };
        outln!("{}", json!({ "file": file.to_string(), "ok": false, "diagnostics": diagnostics }));
    } else {
        match &err {
            FrontendError::Parse(e) => eprintln!("{file}:{e}"),
            FrontendError::WellFormedness(errs) => {
                for e in errs {
                    eprintln!("{file}:{e}");
                }
            }
        }
    }
    Ok(Err(ExitCode::from(1)))
}

macro_rules! load_or_exit {
    ($path:expr, $front:expr) => {
        match load($path, $front)? {
            Ok(p) => p,
            Err(code) => return Ok(code),
        }
    };
}

/// Label, type name, and (field, rendered value) pairs of one instance.
type Row = (String, String, Vec<(String, String)>);

fn instance_rows(state: &ExecState, program: &ValidatedProgram) -> Vec<Row> {
    let name = |l| program.label_name(l);
    let mut rows = Vec::new();
    for label in state.labels() {
        if program.is_null_label(label) || Some(label) == program.null_array() {
            continue;
        }
        match state.entry(label).expect("listed label") {
            Entry::Struct(inst) => {
                let info = program.struct_info(inst.ty);
                let params =
                    info.params.iter().zip(&inst.env).map(|((p, _), v)| (p.to_string(), v.render(&name))).collect();
                rows.push((name(label), info.name.to_string(), params));
            }
            Entry::Array(_) => {
                let cells = state.array_cells(label).unwrap_or(&[]);
                let params = cells.iter().enumerate().map(|(i, v)| (i.to_string(), v.render(&name))).collect();
                rows.push((name(label), "Array".to_string(), params));
            }
        }
    }
    rows
}

fn race_line(r: &RaceReport, program: &ValidatedProgram) -> String {
    let names = |ls: &[audala::ir::Label]| {
        if ls.is_empty() {
            "-".to_string()
        } else {
            ls.iter().map(|&l| program.label_name(l)).collect::<Vec<_>>().join(" ")
        }
    };
    let iteration = r.loop_iteration.map(|i| format!(", iteration {i}")).unwrap_or_default();
    let kind = serde_json::to_value(r.kind).expect("serializable");
    format!(
        "window {} ({}{iteration}): {} race on {}.{} ({}), writers {}, readers {}",
        r.window,
        r.step,
        kind.as_str().unwrap_or("?"),
        r.target_name,
        r.var,
        r.target_type,
        names(&r.writers),
        names(&r.readers)
    )
}

fn status_json(result: &RunResult) -> Json {
    let mut v = serde_json::to_value(&result.status).expect("serializable");
    v["exit_code"] = json!(result.status.exit_code());
    v["transitions"] = json!(result.transitions);
    v
}

fn cmd_run(file: &Path, front: &FrontArgs, engine: &EngineArgs, trace: Option<&Path>, races: bool) -> Result<ExitCode> {
    let program = load_or_exit!(file, front);
    let opts = RunOptions { trace: trace.is_some(), races, ..engine.options()? };
    let result = audala::engine::run(&program, opts);
    if let Some(path) = trace {
        let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(f);
        write_jsonl(&result.trace, &mut w)?;
        w.flush()?;
    }
    let canon = canonicalize(&result.state);
    let rows = instance_rows(&canon, &program);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if front.json {
        let instances: Vec<Json> = rows
            .iter()
            .map(|(label, ty, params)| {
                let values: serde_json::Map<String, Json> =
                    params.iter().map(|(k, v)| (k.clone(), Json::String(v.clone()))).collect();
                json!({ "label": label, "type": ty, "values": values })
            })
            .collect();
        let mut doc = json!({ "result": status_json(&result), "instances": instances, "warnings": result.warnings });
        if races {
            doc["races"] = json!(result.races);
        }
        writeln!(out, "{doc}")?;
    } else {
        for (label, ty, params) in &rows {
            let fields: Vec<String> = params.iter().map(|(k, v)| format!("{k} = {v}")).collect();
            writeln!(out, "{label} {ty}({})", fields.join(", "))?;
        }
        for w in &result.warnings {
            eprintln!("warning: {w}");
        }
        if races {
            for r in &result.races {
                eprintln!("race: {}", race_line(r, &program));
            }
        }
        eprintln!("{} after {} transitions", result.status, result.transitions);
    }
    Ok(ExitCode::from(result.status.exit_code() as u8))
}

fn cmd_check(file: &Path, front: &FrontArgs) -> Result<ExitCode> {
    let program = load_or_exit!(file, front);
    if front.json {
        outln!("{}", json!({ "file": file.display().to_string(), "ok": true, "diagnostics": [] }));
    } else {
        outln!(
            "{}: ok ({} struct(s), schedule {})",
            file.display(),
            program.structs().len(),
            program.render_schedule(program.schedule())
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_dump_ir(file: &Path, step: Option<&str>, front: &FrontArgs) -> Result<ExitCode> {
    let program = load_or_exit!(file, front);
    if let Some(spec) = step {
        let Some((s, st)) = spec.split_once('.') else { bail!("--step expects Struct.step, got `{spec}`") };
        let Some(text) = program.render_step_ir(s, st) else { bail!("no struct `{s}` or step `{st}`") };
        out!("{text}");
        return Ok(ExitCode::SUCCESS);
    }
    for info in program.structs() {
        for step in program.ast().structs.iter().find(|d| d.name.text == *info.name).into_iter().flat_map(|d| &d.steps)
        {
            outln!("{}.{}:", info.name, step.name.text);
            let text = program.render_step_ir(&info.name, &step.name.text).expect("declared step");
            for line in text.lines() {
                outln!("  {line}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_race_check(file: &Path, front: &FrontArgs, engine: &EngineArgs) -> Result<ExitCode> {
    let program = load_or_exit!(file, front);
    let result = audala::engine::run(&program, RunOptions { races: true, ..engine.options()? });
    if front.json {
        outln!("{}", json!({ "result": status_json(&result), "races": result.races }));
    } else {
        if result.races.is_empty() {
            outln!("no races");
        }
        for r in &result.races {
            outln!("{}", race_line(r, &program));
        }
        eprintln!("{} after {} transitions", result.status, result.transitions);
    }
    Ok(ExitCode::from(result.status.exit_code() as u8))
}

fn read_tm(path: &Path, input: &InputArg) -> Result<(TuringMachine, Vec<i64>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let tm = TuringMachine::from_json(&text).with_context(|| format!("in {}", path.display()))?;
    let input = match &input.input {
        Some(s) => s
            .split(',')
            .map(|t| t.trim().parse::<i64>().with_context(|| format!("bad input symbol `{t}`")))
            .collect::<Result<Vec<_>>>()?,
        None => tm.input.clone(),
    };
    Ok((tm, input))
}

fn cmd_compile_tm(path: &Path, output: Option<&Path>, input: &InputArg) -> Result<ExitCode> {
    let (tm, input) = read_tm(path, input)?;
    let source = compile_tm(&tm, &input)?;
    match output {
        Some(out) => fs::write(out, source).with_context(|| format!("writing {}", out.display()))?,
        None => out!("{source}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_diff_check(
    path: &Path,
    steps: u64,
    policy_name: Option<&str>,
    seed: Option<u64>,
    input: &InputArg,
    as_json: bool,
) -> Result<ExitCode> {
    let (tm, input) = read_tm(path, input)?;
    let policy = policy(policy_name, seed)?;
    let report = differential_check(&tm, &input, steps, policy)?;
    if as_json {
        outln!("{}", serde_json::to_string(&report)?);
    } else {
        match &report.verdict {
            Verdict::Agreement { steps, halted: Some(accepting) } => {
                outln!("Agreement: halted after {steps} step(s), accepting = {accepting}")
            }
            Verdict::Agreement { steps, halted: None } => {
                outln!("Agreement: no halt within {steps} step(s)")
            }
            Verdict::Divergence { step, reason } => outln!("Divergence after {step} step(s): {reason}"),
        }
        eprintln!("{policy}, {} checkpoint(s), {} transitions", report.checkpoints, report.transitions);
    }
    Ok(if report.verdict.is_agreement() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_DIVERGENCE) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.cmd {
        Cmd::Run { file, front, engine, trace, race_check } => {
            cmd_run(file, front, engine, trace.as_deref(), *race_check)
        }
        Cmd::Check { file, front } => cmd_check(file, front),
        Cmd::DumpIr { file, step, front } => cmd_dump_ir(file, step.as_deref(), front),
        Cmd::RaceCheck { file, front, engine } => cmd_race_check(file, front, engine),
        Cmd::CompileTm { tm, output, input } => cmd_compile_tm(tm, output.as_deref(), input),
        Cmd::DiffCheck { tm, steps, policy, seed, input, json } => {
            cmd_diff_check(tm, *steps, policy.as_deref(), *seed, input, *json)
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
