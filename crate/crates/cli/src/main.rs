use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stripstream::harness::{
    aggregate, emit_rows, records_json, run_single, run_suite, Format, RunConfig, Suite,
};

#[derive(Parser)]
#[command(name = "stripstream", version, about = "Plan in STRIPS domains with stream-generated objects")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem.
    Plan(Box<PlanArgs>),
    /// Run a benchmark suite.
    Bench(BenchArgs),
}

#[derive(Args)]
struct PlanArgs {
    /// discrete, continuous, obstruction or distractor.
    #[arg(long)]
    domain: Option<String>,
    /// Kinematics formulation: u, t or c.
    #[arg(long)]
    kin: Option<String>,
    #[arg(long)]
    p0: Option<i64>,
    /// Gripper width.
    #[arg(long)]
    delta: Option<f64>,
    /// Extra poses (obstruction) or parked blocks (distractor).
    #[arg(long)]
    n: Option<usize>,
    /// incremental or focused.
    #[arg(long)]
    algo: Option<String>,
    /// Draws between planner calls (incremental).
    #[arg(long = "K")]
    k: Option<usize>,
    /// Placeholder objects per planner call (focused).
    #[arg(long)]
    theta: Option<usize>,
    /// Iterations whose draws are committed immediately (focused).
    #[arg(long = "eager-commits")]
    eager_commits: Option<usize>,
    /// gbfs or astar.
    #[arg(long)]
    strategy: Option<String>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long = "max-draws")]
    max_draws: Option<u64>,
    #[arg(long = "max-splan-calls")]
    max_splan_calls: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// csv, json or md.
    #[arg(long)]
    format: Option<String>,
    /// Flat key = value file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// table1, table2 or distractor.
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Base seed; trial t uses seed + t.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "csv")]
    format: String,
    /// Per-run wall-clock budget in seconds.
    #[arg(long, default_value_t = 120.0)]
    timeout: f64,
}

fn plan_config(a: &PlanArgs) -> stripstream::Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &a.config {
        let text = std::fs::read_to_string(path).map_err(|e| {
            stripstream::Error::InvalidConfig(format!("cannot read {}: {e}", path.display()))
        })?;
        cfg.apply_text(&text)?;
    }
    let flags: [(&str, Option<String>); 15] = [
        ("domain", a.domain.clone()),
        ("kin", a.kin.clone()),
        ("p0", a.p0.map(|v| v.to_string())),
        ("delta", a.delta.map(|v| v.to_string())),
        ("n", a.n.map(|v| v.to_string())),
        ("algo", a.algo.clone()),
        ("k", a.k.map(|v| v.to_string())),
        ("theta", a.theta.map(|v| v.to_string())),
        ("eager-commits", a.eager_commits.map(|v| v.to_string())),
        ("strategy", a.strategy.clone()),
        ("timeout", a.timeout.map(|v| v.to_string())),
        ("max-draws", a.max_draws.map(|v| v.to_string())),
        ("max-splan-calls", a.max_splan_calls.map(|v| v.to_string())),
        ("seed", a.seed.map(|v| v.to_string())),
        ("format", a.format.clone()),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn plan(a: &PlanArgs) -> stripstream::Result<u8> {
    let cfg = plan_config(a)?;
    let record = run_single(&cfg)?;
    let out = match cfg.format {
        Format::Json => records_json(std::slice::from_ref(&record)),
        f => emit_rows(&[aggregate(&cfg, std::slice::from_ref(&record))], f),
    };
    print!("{out}");
    if let Some(steps) = &record.plan {
        for s in steps {
            eprintln!("{s}");
        }
    }
    Ok(match record.status.as_str() {
        "solved" => 0,
        "infeasible" => 2,
        _ => 3,
    })
}

fn bench(a: &BenchArgs) -> stripstream::Result<u8> {
    let suite: Suite = a.suite.parse()?;
    let format: Format = a.format.parse()?;
    let base = RunConfig {
        seed: a.seed,
        timeout_s: a.timeout,
        format,
        ..RunConfig::default()
    };
    base.validate()?;
    let (rows, _) = run_suite(&suite.configs(&base), a.trials)?;
    print!("{}", emit_rows(&rows, format));
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Plan(a) => plan(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
