//! `kinklab <scenario> [--config path.json] [--out dir] [--seed n]`
//! `kinklab sweep --template path.json --grid path.json [--out dir]`

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kinklab_core::expcli::{self, ExperimentConfig, RunStatus, Scenario};
use kinklab_core::Error;
use serde_json::Value;

#[derive(Parser)]
#[command(name = "kinklab", version, about = "Numerical experiments on the fourth-order phi^4 kink")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON config; omitted keys take the scenario defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed (overrides `seed`)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SweepArgs {
    /// Config template; must name the scenario
    #[arg(long)]
    template: PathBuf,
    /// Parameter grid: {"dotted.key": [values, ...], ...}
    #[arg(long)]
    grid: PathBuf,
    #[arg(long, default_value = "runs/sweep")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Lowest eigenpairs of the linearized operators
    Spectrum(RunArgs),
    /// Coercivity quotients
    Coercivity(RunArgs),
    /// Integration-by-parts and virial time-derivative identities
    Identities(RunArgs),
    /// Kernel functions of the fourth-order operator
    Kernel4(RunArgs),
    /// Operator norms of the smoothing multipliers
    Multipliers(RunArgs),
    /// Linear growth rates around the vacuum
    Vacuum(RunArgs),
    /// Perturbed-kink evolution with full diagnostics
    Orbital(RunArgs),
    /// Long run tracking the local decay functionals
    Decay(RunArgs),
    /// Virial functionals along a trajectory
    VirialTrace(RunArgs),
    /// Picard iteration against time splitting
    PicardVsStrang(RunArgs),
    /// Run a config template over a parameter grid in parallel
    Sweep(SweepArgs),
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::InvalidParameter { .. } | Error::UnknownScenario(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn read_json(path: &Path, what: &str) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{what} `{}`: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{what} `{}`: {e}", path.display())))
}

fn run_one(scenario: Scenario, args: RunArgs) -> Result<ExitCode, Failure> {
    let mut doc = match &args.config {
        Some(p) => read_json(p, "--config")?,
        None => Value::Object(Default::default()),
    };
    if let Some(Value::String(s)) = doc.get("scenario") {
        if s != scenario.name() {
            return Err(Failure::Usage(format!("invalid config `scenario`: file says `{s}` but the command is `{scenario}`")));
        }
    }
    if let Some(obj) = doc.as_object_mut() {
        if let Some(out) = &args.out {
            obj.insert("output_dir".into(), Value::String(out.to_string_lossy().into_owned()));
        }
        if let Some(seed) = args.seed {
            obj.insert("seed".into(), seed.into());
        }
    }
    let cfg = ExperimentConfig::from_value(doc, Some(scenario))?;
    let outcome = expcli::run(&cfg)?;
    let m = &outcome.manifest;
    for c in &m.checks {
        println!("{}", c.line());
    }
    println!(
        "{scenario}: {:?}, {} passed, {} failed, {:.2} s -> {}",
        m.status,
        m.acceptance.passed,
        m.acceptance.failed,
        m.wall_time_s,
        cfg.output_dir.display()
    );
    match m.status {
        RunStatus::Completed => Ok(ExitCode::SUCCESS),
        RunStatus::Failed => Err(Failure::Runtime(m.error.clone().unwrap_or_default())),
    }
}

fn run_sweep(args: SweepArgs) -> Result<ExitCode, Failure> {
    let template = read_json(&args.template, "--template")?;
    let grid = read_json(&args.grid, "--grid")?;
    let index = expcli::sweep(&template, &grid, &args.out)?;
    for c in &index.cells {
        let params = serde_json::to_string(&c.parameters).unwrap_or_default();
        match &c.error {
            Some(e) => println!("cell {:03} {params}: {:?} ({e})", c.index, c.status),
            None => println!("cell {:03} {params}: {:?}", c.index, c.status),
        }
    }
    println!("{} cells -> {}", index.cells.len(), args.out.join("index.json").display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Spectrum(a) => run_one(Scenario::Spectrum, a),
        Command::Coercivity(a) => run_one(Scenario::Coercivity, a),
        Command::Identities(a) => run_one(Scenario::Identities, a),
        Command::Kernel4(a) => run_one(Scenario::Kernel4, a),
        Command::Multipliers(a) => run_one(Scenario::Multipliers, a),
        Command::Vacuum(a) => run_one(Scenario::Vacuum, a),
        Command::Orbital(a) => run_one(Scenario::Orbital, a),
        Command::Decay(a) => run_one(Scenario::Decay, a),
        Command::VirialTrace(a) => run_one(Scenario::VirialTrace, a),
        Command::PicardVsStrang(a) => run_one(Scenario::PicardVsStrang, a),
        Command::Sweep(a) => run_sweep(a),
    };
    match res {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
