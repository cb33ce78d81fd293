use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use puppy_core::dynamics::policy::PolicySpec;
use puppy_core::dynamics::sim::{fixed_step_simulate, simulate_path, SimError};
use puppy_core::dynamics::trace::{Outcome, Trace};
use puppy_core::embedding::Embedding;
use puppy_core::generate::{generate as generate_spec, random_configuration, GenerateError, GeneratorParams};
use puppy_core::geom::{format_rational, int, parse_rational, Rational};
use puppy_core::scenario::{Mode, Scenario, ScenarioError};
use puppy_core::strategy::{run_strategy, StrategyError};
use puppy_core::verify::{check_trace, compare_runs, VerifyError, Violation};

use crate::render::render_svg;
use crate::{CliError, Exit, Report};

/// `NonOrthogonalEdge("d")` becomes `NonOrthogonalEdge`.
fn variant<T: std::fmt::Debug>(v: &T) -> String {
    let s = format!("{v:?}");
    s.split(['(', ' ', '{']).next().unwrap_or_default().to_string()
}

fn scenario_error(err: ScenarioError) -> CliError {
    let kind = match &err {
        ScenarioError::Parse(_) => "Parse".to_string(),
        ScenarioError::Embedding(e) => variant(e),
        ScenarioError::Sim(e) => variant(e),
        ScenarioError::Strategy(StrategyError::Embedding(e)) => variant(e),
        ScenarioError::Strategy(StrategyError::Sim(e)) => variant(e),
        ScenarioError::Strategy(e) => variant(e),
    };
    let exit = if err.is_validation() || matches!(err, ScenarioError::Sim(SimError::PreconditionViolation(_))) {
        Exit::Validation
    } else {
        Exit::Invariant
    };
    CliError::new(exit, format!("{kind}: {err}"))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn load_scenario(path: &Path, allow_crossings: bool) -> Result<Scenario, CliError> {
    let mut s = Scenario::from_json(&read(path)?).map_err(scenario_error)?;
    if allow_crossings {
        s.embedding.allow_crossings = true;
    }
    Ok(s)
}

/// Resolves `--policy` and `--seed` against what the scenario asks for.
pub fn pick_policy(current: &PolicySpec, name: Option<&str>, seed: Option<u64>) -> Result<PolicySpec, CliError> {
    let mut p = match name {
        Some(n) => PolicySpec::parse(n).ok_or_else(|| CliError::new(Exit::Validation, format!("unknown policy {n:?}")))?,
        None => current.clone(),
    };
    if let (PolicySpec::Random(s), Some(seed)) = (&mut p, seed) {
        *s = seed;
    }
    Ok(p)
}

pub fn validate(path: &Path, allow_crossings: bool) -> Result<Report, CliError> {
    let s = load_scenario(path, allow_crossings)?;
    let emb = s.validate().map_err(scenario_error)?;
    let mut text = format!("valid: {} vertices, {} edges", emb.vertex_count(), emb.edge_count());
    if emb.crossing_count() > 0 {
        text += &format!(", {} crossings", emb.crossing_count());
    }
    Ok(Report { exit: Exit::Success, text })
}

#[derive(Debug, Default, Clone)]
pub struct RunOptions {
    pub trace: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub check: bool,
    pub policy: Option<String>,
    pub seed: Option<u64>,
    pub allow_crossings: bool,
    pub cap_moves: Option<usize>,
}

fn describe(outcome: &Outcome) -> String {
    match outcome {
        Outcome::Captured { time } => format!("captured at t={}", format_rational(time)),
        Outcome::Running => "not captured".to_string(),
        Outcome::CapExceeded => "cap exceeded without capture".to_string(),
    }
}

fn violation_lines(v: &[Violation]) -> String {
    v.iter().map(|v| format!("\n  {v}")).collect()
}

pub fn run(path: &Path, opts: &RunOptions) -> Result<Report, CliError> {
    let mut s = load_scenario(path, opts.allow_crossings)?;
    s.policy = pick_policy(&s.policy, opts.policy.as_deref(), opts.seed)?;
    if let Some(n) = opts.cap_moves {
        s.caps.get_or_insert(puppy_core::scenario::CapsSpec { max_moves: None, max_prunings: None }).max_moves = Some(n);
    }
    let run = s.execute().map_err(scenario_error)?;
    if let Some(p) = &opts.trace {
        write(p, &run.trace.to_jsonl_string())?;
    }
    if let Some(p) = &opts.svg {
        write(p, &render_svg(&run.trace).map_err(|e| CliError::new(Exit::Invariant, e.to_string()))?)?;
    }
    let mut text = format!("outcome: {}", describe(&run.trace.outcome));
    if let Some(r) = &run.report {
        text += &format!("; {} moves, {} prunings", r.moves, r.prunings);
    }
    if opts.check {
        let log = run.report.as_ref().map(|r| r.log.as_slice()).unwrap_or(&[]);
        let v = check_trace(&run.trace, log).map_err(|e| CliError::new(Exit::Invariant, e.to_string()))?;
        if !v.is_empty() {
            return Ok(Report { exit: Exit::Invariant, text: format!("{text}\n{} violations:{}", v.len(), violation_lines(&v)) });
        }
        text += "\ncheck: no violations";
    }
    let exit = if run.trace.is_captured() { Exit::Success } else { Exit::NoCapture };
    Ok(Report { exit, text })
}

#[derive(Debug, Clone)]
pub struct GenerateOptions {
    pub seed: u64,
    pub edges: (usize, usize),
    pub generic: bool,
    pub grid: Option<(usize, usize)>,
    pub extra: f64,
}

fn generate_error(e: GenerateError) -> CliError {
    CliError::new(Exit::Validation, format!("{}: {e}", variant(&e)))
}

/// Salt so that start positions do not reuse the drawing's random stream.
const START_SALT: u64 = 0x5eed_0f_57a7;

fn start_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ START_SALT)
}

pub fn generate_scenario(opts: &GenerateOptions) -> Result<Scenario, CliError> {
    let params = GeneratorParams {
        seed: opts.seed,
        grid: opts.grid,
        edges: opts.edges,
        extra_cycle_prob: opts.extra,
        generic_mode: opts.generic,
    };
    let spec = generate_spec(&params).map_err(generate_error)?;
    let emb = Embedding::build(&spec).map_err(|e| CliError::new(Exit::Invariant, e.to_string()))?;
    let initial = random_configuration(&mut start_rng(opts.seed), &emb);
    let mut s = Scenario::new(&emb, &initial, PolicySpec::First);
    s.name = Some(format!("generated-{}", opts.seed));
    Ok(s)
}

pub fn generate(opts: &GenerateOptions, out: Option<&Path>) -> Result<Report, CliError> {
    let text = generate_scenario(opts)?.to_json();
    match out {
        Some(p) => {
            write(p, &text)?;
            Ok(Report { exit: Exit::Success, text: format!("wrote {}", p.display()) })
        }
        None => Ok(Report { exit: Exit::Success, text: text.trim_end().to_string() }),
    }
}

#[derive(Debug, Clone)]
pub struct BatchOptions {
    pub count: usize,
    pub seed: u64,
    pub edges: (usize, usize),
    pub policies: Vec<PolicySpec>,
    pub starts: usize,
    pub include: Vec<PathBuf>,
    pub out: Option<PathBuf>,
    pub allow_crossings: bool,
    pub cap_moves: Option<usize>,
}

struct Job {
    label: String,
    source: Result<Scenario, CliError>,
}

#[derive(Debug, Default, Serialize)]
pub struct RunSummary {
    pub label: String,
    pub outcome: String,
    pub edges: usize,
    pub moves: usize,
    pub prunings: usize,
    pub violations: Vec<String>,
    pub error: Option<String>,
}

#[derive(Debug, Default, Serialize)]
pub struct BatchReport {
    pub runs: usize,
    pub captured: usize,
    pub not_captured: usize,
    pub validation_failures: usize,
    pub errors: usize,
    pub violations: usize,
    pub total_prunings: usize,
    pub max_prunings_per_edge: String,
    pub problems: Vec<RunSummary>,
}

fn batch_jobs(opts: &BatchOptions) -> Vec<Job> {
    let mut jobs = Vec::new();
    for i in 0..opts.count {
        let seed = opts.seed.wrapping_add(i as u64);
        let gen = GenerateOptions { seed, edges: opts.edges, generic: i % 2 == 1, grid: None, extra: 0.2 };
        let base = generate_scenario(&gen);
        let emb = base.as_ref().ok().map(|s| s.embedding().expect("generated drawings validate"));
        // The first draw reproduces the start that `generate` writes.
        let mut rng = start_rng(seed);
        for k in 0..opts.starts {
            let initial = emb.as_ref().map(|e| random_configuration(&mut rng, e));
            for p in &opts.policies {
                let policy = match p {
                    PolicySpec::Random(s) => PolicySpec::Random(s.wrapping_add(seed.wrapping_mul(31)).wrapping_add(k as u64)),
                    other => other.clone(),
                };
                let label = format!("g{seed}-s{k}-{}", policy.name());
                let source = match (&emb, &initial, &base) {
                    (Some(emb), Some(initial), _) => {
                        let mut sc = Scenario::new(emb, initial, policy);
                        sc.name = Some(label.clone());
                        Ok(sc)
                    }
                    (_, _, Err(e)) => Err(CliError::new(e.exit, e.message.clone())),
                    _ => unreachable!(),
                };
                jobs.push(Job { label, source });
            }
        }
    }
    for path in &opts.include {
        jobs.push(Job { label: path.display().to_string(), source: load_scenario(path, opts.allow_crossings) });
    }
    jobs
}

fn run_job(job: &Job, opts: &BatchOptions) -> (RunSummary, Option<Exit>) {
    let mut summary = RunSummary { label: job.label.clone(), ..Default::default() };
    let mut scenario = match &job.source {
        Ok(s) => s.clone(),
        Err(e) => {
            summary.error = Some(e.message.clone());
            return (summary, Some(e.exit));
        }
    };
    if let Some(n) = opts.cap_moves {
        scenario.caps.get_or_insert(puppy_core::scenario::CapsSpec { max_moves: None, max_prunings: None }).max_moves = Some(n);
    }
    if let Ok(emb) = scenario.embedding() {
        summary.edges = emb.edge_count();
    }
    let run = match scenario.execute() {
        Ok(r) => r,
        Err(e) => {
            let e = scenario_error(e);
            summary.error = Some(e.message);
            return (summary, Some(e.exit));
        }
    };
    summary.outcome = describe(&run.trace.outcome);
    let log = run.report.as_ref().map(|r| r.log.as_slice()).unwrap_or(&[]);
    if let Some(r) = &run.report {
        summary.moves = r.moves;
        summary.prunings = r.prunings;
    }
    match check_trace(&run.trace, log) {
        Ok(v) => summary.violations = v.iter().map(|v| v.to_string()).collect(),
        Err(e) => summary.violations.push(e.to_string()),
    }
    if let Some(dir) = &opts.out {
        let name = job.label.replace(['/', '\\'], "_");
        if let Err(e) = write(&dir.join(format!("{name}.jsonl")), &run.trace.to_jsonl_string()) {
            summary.error = Some(e.message);
            return (summary, Some(Exit::Io));
        }
    }
    let status = if !summary.violations.is_empty() {
        Some(Exit::Invariant)
    } else if !run.trace.is_captured() {
        Some(Exit::NoCapture)
    } else {
        None
    };
    (summary, status)
}

pub fn batch(opts: &BatchOptions) -> Result<Report, CliError> {
    if let Some(dir) = &opts.out {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let jobs = batch_jobs(opts);
    let results: Vec<(RunSummary, Option<Exit>)> = jobs.par_iter().map(|j| run_job(j, opts)).collect();
    let mut report = BatchReport { runs: results.len(), ..Default::default() };
    let mut worst = Rational::from_integer(0.into());
    let mut exit = Exit::Success;
    let rank = |e: Exit| match e {
        Exit::Success => 0,
        Exit::Validation => 1,
        Exit::NoCapture => 2,
        Exit::Invariant => 3,
        Exit::Io => 4,
    };
    for (s, status) in results {
        report.total_prunings += s.prunings;
        if s.edges > 0 {
            let r = Rational::new((s.prunings as i64).into(), (s.edges as i64).into());
            worst = worst.max(r);
        }
        report.violations += s.violations.len();
        match status {
            Some(Exit::Validation) => report.validation_failures += 1,
            Some(_) if s.error.is_some() => report.errors += 1,
            _ if s.outcome.starts_with("captured") => report.captured += 1,
            _ => report.not_captured += 1,
        }
        if let Some(st) = status {
            if rank(st) > rank(exit) {
                exit = st;
            }
            report.problems.push(s);
        }
    }
    report.max_prunings_per_edge = format_rational(&worst);
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    Ok(Report { exit, text })
}

pub fn render(trace_path: &Path, svg: Option<&Path>) -> Result<Report, CliError> {
    let file = fs::File::open(trace_path).map_err(|e| CliError::io(trace_path, e))?;
    let trace = Trace::read_jsonl(std::io::BufReader::new(file))
        .map_err(|e| CliError::new(Exit::Validation, format!("MalformedTrace: {e}")))?;
    let text = render_svg(&trace).map_err(|e| CliError::new(Exit::Validation, format!("MalformedTrace: {e}")))?;
    match svg {
        Some(p) => {
            write(p, &text)?;
            Ok(Report { exit: Exit::Success, text: format!("wrote {}", p.display()) })
        }
        None => Ok(Report { exit: Exit::Success, text: text.trim_end().to_string() }),
    }
}

#[derive(Debug, Default, Clone)]
pub struct CompareOptions {
    pub delta: Option<String>,
    /// Event-driven trace to use instead of simulating afresh.
    pub trace: Option<PathBuf>,
    pub policy: Option<String>,
    pub seed: Option<u64>,
    pub allow_crossings: bool,
}

pub fn compare(path: &Path, opts: &CompareOptions) -> Result<Report, CliError> {
    let mut s = load_scenario(path, opts.allow_crossings)?;
    s.policy = pick_policy(&s.policy, opts.policy.as_deref(), opts.seed)?;
    let emb = s.validate().map_err(scenario_error)?;
    let initial = s.initial(&emb).map_err(|e| scenario_error(e.into()))?;
    let moves = match &s.mode {
        Mode::Strategy => {
            let caps = s.caps(&emb);
            run_strategy(&emb, &initial, s.policy.build().as_mut(), &caps)
                .map_err(|e| scenario_error(e.into()))?
                .path
        }
        Mode::Replay { .. } => s.moves(&emb).map_err(|e| scenario_error(e.into()))?,
    };
    let delta = match &opts.delta {
        Some(d) => parse_rational(d).map_err(|e| CliError::new(Exit::Validation, format!("bad --delta: {e:?}")))?,
        None => emb.min_coordinate_gap().unwrap_or_else(|| int(1)) / int(4),
    };
    let event = match &opts.trace {
        Some(p) => {
            let file = fs::File::open(p).map_err(|e| CliError::io(p, e))?;
            Trace::read_jsonl(std::io::BufReader::new(file))
                .map_err(|e| CliError::new(Exit::Validation, format!("MalformedTrace: {e}")))?
        }
        None => simulate_path(&emb, &initial, &moves, s.policy.build().as_mut()).map_err(|e| scenario_error(e.into()))?,
    };
    let fixed = fixed_step_simulate(&emb, &initial, &moves, s.policy.build().as_mut(), &delta)
        .map_err(|e| scenario_error(e.into()))?;
    let v = compare_runs(&event, &fixed, &delta).map_err(|e| match e {
        VerifyError::IncompatibleTraces(_) => CliError::new(Exit::Validation, format!("IncompatibleTraces: {e}")),
        VerifyError::MalformedTrace(_) => CliError::new(Exit::Validation, format!("MalformedTrace: {e}")),
    })?;
    let head = format!(
        "compared {} moves at delta {}: event {}, fixed-step {}",
        moves.len(),
        format_rational(&delta),
        describe(&event.outcome),
        describe(&fixed.outcome)
    );
    if v.is_empty() {
        Ok(Report { exit: Exit::Success, text: format!("{head}\nagree") })
    } else {
        Ok(Report { exit: Exit::Invariant, text: format!("{head}\n{} mismatches:{}", v.len(), violation_lines(&v)) })
    }
}
