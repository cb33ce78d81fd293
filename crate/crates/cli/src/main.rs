use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use puppy_cli::commands::{self, BatchOptions, CompareOptions, GenerateOptions, RunOptions};
use puppy_cli::{CliError, Exit, Report};
use puppy_core::dynamics::policy::PolicySpec;

#[derive(Parser)]
#[command(name = "puppy", version, about = "Catch a puppy on an orthogonal drawing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct PolicyArgs {
    /// Puppy policy: first, random or adversarial.
    #[arg(long)]
    policy: Option<String>,
    /// Seed for the random policy.
    #[arg(long)]
    seed: Option<u64>,
    /// Accept drawings whose edges cross.
    #[arg(long)]
    allow_crossings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file.
    Validate {
        file: PathBuf,
        #[arg(long)]
        allow_crossings: bool,
    },
    /// Run a scenario (strategy or replay).
    Run {
        file: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Check the trace and fail on any violation.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        cap_moves: Option<usize>,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Write a random scenario.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edge count range, `LO..HI` or a single number.
        #[arg(long, default_value = "10..50", value_parser = parse_range)]
        edges: (usize, usize),
        /// Give every horizontal edge its own height.
        #[arg(long)]
        generic: bool,
        /// Grid size `WxH`.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(usize, usize)>,
        /// Share of edges that close cycles.
        #[arg(long, default_value_t = 0.2)]
        extra: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a campaign of generated scenarios on a worker pool.
    Batch {
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "10..50", value_parser = parse_range)]
        edges: (usize, usize),
        /// Comma-separated policies.
        #[arg(long, default_value = "first,random,adversarial")]
        policies: String,
        /// Random starts per drawing.
        #[arg(long, default_value_t = 3)]
        starts: usize,
        /// Extra scenario files to run as they are.
        #[arg(long)]
        include: Vec<PathBuf>,
        /// Directory for per-run traces.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        allow_crossings: bool,
        #[arg(long)]
        cap_moves: Option<usize>,
    },
    /// Draw a trace as SVG.
    Render {
        trace: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run the event-driven and fixed-step simulators and compare them.
    Compare {
        file: PathBuf,
        /// Step `P/Q`; defaults to a quarter of the smallest coordinate gap.
        #[arg(long)]
        delta: Option<String>,
        /// Use this event trace instead of simulating.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        policy: PolicyArgs,
    },
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s.split_once("..").unwrap_or((s, s));
    let n = |t: &str| t.trim().trim_start_matches('=').parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((n(lo)?, n(hi)?))
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WxH")?;
    Ok((w.parse().map_err(|e| format!("{e}"))?, h.parse().map_err(|e| format!("{e}"))?))
}

fn dispatch(cli: Cli) -> Result<Report, CliError> {
    match cli.command {
        Command::Validate { file, allow_crossings } => commands::validate(&file, allow_crossings),
        Command::Run { file, trace, svg, check, cap_moves, policy } => commands::run(
            &file,
            &RunOptions {
                trace,
                svg,
                check,
                policy: policy.policy,
                seed: policy.seed,
                allow_crossings: policy.allow_crossings,
                cap_moves,
            },
        ),
        Command::Generate { seed, edges, generic, grid, extra, out } => {
            commands::generate(&GenerateOptions { seed, edges, generic, grid, extra }, out.as_deref())
        }
        Command::Batch { count, seed, edges, policies, starts, include, out, allow_crossings, cap_moves } => {
            let policies = policies
                .split(',')
                .filter(|p| !p.is_empty())
                .map(|p| PolicySpec::parse(p.trim()).ok_or_else(|| CliError::new(Exit::Validation, format!("unknown policy {p:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            commands::batch(&BatchOptions { count, seed, edges, policies, starts, include, out, allow_crossings, cap_moves })
        }
        Command::Render { trace, svg } => commands::render(&trace, svg.as_deref()),
        Command::Compare { file, delta, trace, policy } => commands::compare(
            &file,
            &CompareOptions { delta, trace, policy: policy.policy, seed: policy.seed, allow_crossings: policy.allow_crossings },
        ),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(r) => {
            // A closed pipe is not an error worth a panic.
            let _ = writeln!(std::io::stdout(), "{}", r.text);
            ExitCode::from(r.exit.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit.code() as u8)
        }
    }
}
