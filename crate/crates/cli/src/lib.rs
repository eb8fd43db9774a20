//! `remr`: evaluate deployment-plan reliability from a scenario file.
//!
//! Exit codes: 0 on success, 2 for unreadable or invalid input, 3 when a
//! scenario is too large for exact evaluation.

pub mod render;

use std::ffi::OsString;
use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use remr_core::analysis::{cross_check, evaluate, min_completion_time};
use remr_core::montecarlo::{simulate, SimConfig, DEFAULT_CONFIDENCE_Z, DEFAULT_SEED};
use remr_core::pathset::{SearchLimits, DEFAULT_SEARCH_GUARD};
use remr_core::trace::{
    ingest_trace, machines_in, parse_google_task_usage, parse_trace, DiscretizationPolicy,
};
use remr_core::{parse_scenario, render_scenario, GuardError, Pmf, Scenario};

use crate::render::SweepGrid;

#[derive(Parser, Debug)]
#[command(
    name = "remr",
    version,
    about = "Deadline reliability of staged tasks on edge networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reliability of every plan and of the whole scenario.
    Evaluate(EvaluateArgs),
    /// Global reliability over a grid of input sizes and deadlines.
    Sweep(SweepArgs),
    /// Monte Carlo estimate of the global reliability.
    Simulate(SimulateArgs),
    /// Build resource pmfs from a CPU-usage trace.
    Ingest(IngestArgs),
    /// Validate a scenario and summarize its structure.
    Check(CheckArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Structured,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value = "table")]
    format: Format,
    /// Write results here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cap on state vectors visited by exact enumeration.
    #[arg(long, default_value_t = DEFAULT_SEARCH_GUARD)]
    guard: u64,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    input_size: Option<f64>,
    #[arg(long)]
    deadline: Option<f64>,
    /// Also run the exact, inclusion-exclusion and Monte Carlo oracles.
    #[arg(long)]
    cross_check: bool,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_delimiter = ',', required = true)]
    sweep_c: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    sweep_t: Vec<f64>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    input_size: Option<f64>,
    #[arg(long)]
    deadline: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Half-width multiplier of the confidence interval.
    #[arg(long, default_value_t = DEFAULT_CONFIDENCE_Z)]
    z: f64,
    /// Compare against the analytic reliability.
    #[arg(long)]
    cross_check: bool,
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// CSV with header `timestamp,machine_id,cpu_usage`.
    #[arg(long)]
    trace: PathBuf,
    /// Read a raw Google cluster-trace task_usage table instead.
    #[arg(long)]
    google: bool,
    /// Only this machine; default is every machine in the trace.
    #[arg(long)]
    machine: Option<String>,
    #[arg(long, default_value_t = 6)]
    levels: u32,
    /// Idle machine capacity in compute units; defaults to `levels`.
    #[arg(long)]
    capacity: Option<f64>,
    /// Scenario whose compute-node resources receive the pmfs.
    #[arg(long, requires = "assign")]
    splice: Option<PathBuf>,
    /// `MACHINE=NODE` pairs used with `--splice`.
    #[arg(long, value_parser = parse_assignment, requires = "splice")]
    assign: Vec<(String, String)>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    input_size: Option<f64>,
    /// Warn about plans that cannot meet this deadline.
    #[arg(long)]
    deadline: Option<f64>,
    #[arg(long, default_value = "table")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_assignment(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((m, n)) if !m.is_empty() && !n.is_empty() => Ok((m.to_owned(), n.to_owned())),
        _ => Err(format!("expected MACHINE=NODE, got `{s}`")),
    }
}

/// Captured result of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

/// Runs `remr` with `args` (program name first) and captures its output.
pub fn invoke<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut outcome = Outcome::default();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let text = err.render().to_string();
            if err.use_stderr() {
                outcome.code = 2;
                outcome.stderr = text;
            } else {
                outcome.stdout = text;
            }
            return outcome;
        }
    };
    if let Err(err) = run(cli, &mut outcome) {
        let _ = writeln!(outcome.stderr, "error: {err:#}");
        outcome.code = if err.downcast_ref::<GuardError>().is_some() {
            3
        } else {
            2
        };
    }
    outcome
}

fn run(cli: Cli, session: &mut Outcome) -> Result<()> {
    match cli.command {
        Command::Evaluate(args) => cmd_evaluate(args, session),
        Command::Sweep(args) => cmd_sweep(args, session),
        Command::Simulate(args) => cmd_simulate(args, session),
        Command::Ingest(args) => cmd_ingest(args, session),
        Command::Check(args) => cmd_check(args, session),
    }
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read scenario {}", path.display()))?;
    parse_scenario(&text).with_context(|| format!("invalid scenario {}", path.display()))
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        bail!("{name} must be positive, got {v}")
    }
}

/// `(input_size, deadline)` from flags, falling back to scenario defaults.
fn parameters(
    scenario: &Scenario,
    input: Option<f64>,
    deadline: Option<f64>,
) -> Result<(f64, f64)> {
    let defaults = scenario.defaults();
    let input = input
        .or(defaults.map(|d| d.input_size))
        .ok_or_else(|| anyhow!("--input-size missing and scenario has no defaults"))?;
    let deadline = deadline
        .or(defaults.map(|d| d.deadline))
        .ok_or_else(|| anyhow!("--deadline missing and scenario has no defaults"))?;
    Ok((
        positive("input size", input)?,
        positive("deadline", deadline)?,
    ))
}

fn emit(session: &mut Outcome, out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            session.stdout.push_str(text);
            Ok(())
        }
    }
}

fn cmd_evaluate(args: EvaluateArgs, session: &mut Outcome) -> Result<()> {
    let scenario = load_scenario(&args.common.scenario)?;
    let (input, deadline) = parameters(&scenario, args.input_size, args.deadline)?;
    let limits = SearchLimits {
        max_visited: args.common.guard,
    };
    let mut report = evaluate(&scenario, input, deadline, limits)?;
    if args.cross_check {
        let sim = SimConfig {
            trials: args.trials.max(1),
            seed: args.seed,
            confidence_z: DEFAULT_CONFIDENCE_Z,
        };
        report.diagnostics = Some(cross_check(&scenario, &report, limits, Some(&sim))?);
    }
    emit(
        session,
        args.common.out.as_deref(),
        &render::report(&report, args.common.format),
    )
}

fn cmd_sweep(args: SweepArgs, session: &mut Outcome) -> Result<()> {
    let scenario = load_scenario(&args.common.scenario)?;
    let limits = SearchLimits {
        max_visited: args.common.guard,
    };
    let mut input_sizes = args.sweep_c.clone();
    let mut deadlines = args.sweep_t.clone();
    for &c in &input_sizes {
        positive("input size", c)?;
    }
    for &t in &deadlines {
        positive("deadline", t)?;
    }
    input_sizes.sort_by(f64::total_cmp);
    input_sizes.dedup();
    deadlines.sort_by(f64::total_cmp);
    deadlines.dedup();
    let reliability = deadlines
        .iter()
        .map(|&t| {
            input_sizes
                .iter()
                .map(|&c| evaluate(&scenario, c, t, limits).map(|r| r.global))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let grid = SweepGrid {
        input_sizes,
        deadlines,
        reliability,
    };
    emit(
        session,
        args.common.out.as_deref(),
        &render::sweep(&grid, args.common.format),
    )
}

fn cmd_simulate(args: SimulateArgs, session: &mut Outcome) -> Result<()> {
    let scenario = load_scenario(&args.common.scenario)?;
    let (input, deadline) = parameters(&scenario, args.input_size, args.deadline)?;
    if args.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let cfg = SimConfig {
        trials: args.trials,
        seed: args.seed,
        confidence_z: args.z,
    };
    let result = simulate(&scenario, input, deadline, &cfg);
    let analytic = if args.cross_check {
        let limits = SearchLimits {
            max_visited: args.common.guard,
        };
        Some(evaluate(&scenario, input, deadline, limits)?)
    } else {
        None
    };
    emit(
        session,
        args.common.out.as_deref(),
        &render::simulation(
            &result,
            input,
            deadline,
            analytic.as_ref(),
            args.common.format,
        ),
    )
}

fn cmd_ingest(args: IngestArgs, session: &mut Outcome) -> Result<()> {
    let file = fs::File::open(&args.trace)
        .with_context(|| format!("cannot read trace {}", args.trace.display()))?;
    let series = if args.google {
        parse_google_task_usage(file)
    } else {
        parse_trace(file)
    }
    .with_context(|| format!("invalid trace {}", args.trace.display()))?;
    let policy = DiscretizationPolicy {
        levels: args.levels,
        machine_capacity: args.capacity.unwrap_or(f64::from(args.levels)),
    };
    let machines = match &args.machine {
        Some(m) => vec![m.clone()],
        None if args.splice.is_some() => args.assign.iter().map(|(m, _)| m.clone()).collect(),
        None => machines_in(&series),
    };
    let pmfs: Vec<(String, Pmf)> = machines
        .into_iter()
        .map(|m| ingest_trace(&series, &m, &policy).map(|pmf| (m, pmf)))
        .collect::<Result<_, _>>()?;

    let text = match &args.splice {
        Some(path) => {
            let mut scenario = load_scenario(path)?;
            for (machine, node) in &args.assign {
                let pmf = pmfs
                    .iter()
                    .find(|(m, _)| m == machine)
                    .map(|(_, p)| p.clone())
                    .ok_or_else(|| anyhow!("machine `{machine}` was not ingested"))?;
                scenario = scenario
                    .with_resource(node, pmf)
                    .with_context(|| format!("cannot splice into node `{node}`"))?;
            }
            render_scenario(&scenario)
        }
        None if args.machine.is_some() => {
            let mut s = serde_json::to_string_pretty(&pmfs[0].1)?;
            s.push('\n');
            s
        }
        None => render::fragments(&pmfs),
    };
    emit(session, args.out.as_deref(), &text)
}

fn cmd_check(args: CheckArgs, session: &mut Outcome) -> Result<()> {
    let scenario = load_scenario(&args.scenario)?;
    let defaults = scenario.defaults();
    let input = args.input_size.or(defaults.map(|d| d.input_size));
    let deadline = args.deadline.or(defaults.map(|d| d.deadline));
    if let Some(c) = input {
        positive("input size", c)?;
    }
    let plans: Vec<render::PlanSummary> = scenario
        .chains()
        .iter()
        .map(|chain| render::PlanSummary {
            name: chain.name.to_owned(),
            branches: chain.branch_count(),
            compute_nodes: chain.compute_count(),
            min_time: input.and_then(|c| min_completion_time(chain, c)),
        })
        .collect();
    if let Some(t) = deadline {
        for plan in &plans {
            let _ = match plan.min_time {
                Some(best) if best > t => writeln!(
                    session.stderr,
                    "warning: plan `{}` needs at least {best:.5} s, above the deadline {t}",
                    plan.name
                ),
                None if input.is_some() => writeln!(
                    session.stderr,
                    "warning: plan `{}` can never finish (a required capacity is always zero)",
                    plan.name
                ),
                _ => Ok(()),
            };
        }
    }
    let text = render::check(&scenario.summary(), &plans, input, args.format);
    emit(session, args.out.as_deref(), &text)
}
