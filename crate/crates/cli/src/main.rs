use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use softaqm::metrics::{write_summary_csv, write_trace_csv, SummaryRow};
use softaqm::scenario::{oracle_for, print_target_curve, run_point, RunFailure, SweepError};
use softaqm::{parse_scenario, run_sweep, ScenarioConfig, SoftTargetCurve, SweepSpec};

#[derive(Parser)]
#[command(name = "softaqm", version, about = "Soft-target AQM simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and write its trace and summary.
    Run {
        scenario: PathBuf,
        /// Overrides the seed in the scenario file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = "SOFTAQM_OUT", default_value = "out")]
        out: PathBuf,
    },
    /// Run a parameter sweep.
    Sweep {
        spec: PathBuf,
        #[arg(long, env = "SOFTAQM_OUT", default_value = "out")]
        out: PathBuf,
    },
    /// Print the soft target curve as CSV.
    #[command(allow_negative_numbers = true)]
    Curve {
        /// Base target, milliseconds.
        #[arg(long)]
        q0: f64,
        /// Target span, milliseconds.
        #[arg(long)]
        q1: f64,
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
    /// Check a scenario file without running it.
    Validate { scenario: PathBuf },
}

/// Failure classes map to exit codes 1 and 2.
enum Failure {
    Invalid(String),
    Runtime(String),
}

impl Failure {
    fn runtime(e: impl std::fmt::Display) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run {
            scenario,
            seed,
            out,
        } => run(&scenario, seed, &out),
        Command::Sweep { spec, out } => sweep(&spec, &out),
        Command::Curve { q0, q1, grid } => curve(q0, q1, grid),
        Command::Validate { scenario } => validate(&scenario),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<ScenarioConfig, Failure> {
    parse_scenario(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn run(path: &Path, seed: Option<u64>, out: &Path) -> Result<(), Failure> {
    let cfg = load(path)?;
    let seed = seed.unwrap_or(cfg.seed);
    let (output, summary) = run_point(&cfg, seed).map_err(|e| match e {
        RunFailure::Sim(softaqm::sim::SimError::Config(c)) => Failure::Invalid(c.to_string()),
        other => Failure::runtime(other),
    })?;

    let dir = out.join(&cfg.name).join(format!("seed-{seed}"));
    fs::create_dir_all(&dir).map_err(|e| Failure::runtime(format!("{}: {e}", dir.display())))?;
    let trace_path = dir.join("trace.csv");
    write_trace_csv(&output.trace, &trace_path).map_err(Failure::runtime)?;
    let row = SummaryRow {
        scenario: cfg.name.clone(),
        controller: cfg.controller.name().to_string(),
        n_flows: cfg.n_flows,
        seed,
        summary: Some(summary),
        oracle: oracle_for(&cfg),
        error: None,
    };
    let summary_path = out.join("summary.csv");
    write_summary_csv(&[row], &summary_path).map_err(Failure::runtime)?;

    let mut stdout = io::stdout().lock();
    let _ = writeln!(
        stdout,
        "scenario     {} ({}, {} flows, seed {seed})",
        cfg.name, cfg.controller, cfg.n_flows
    );
    let _ = writeln!(stdout, "mean_delay   {:.6} s", summary.mean_delay);
    let _ = writeln!(stdout, "p99_delay    {:.6} s", summary.p99_delay);
    let _ = writeln!(stdout, "mean_p       {:.6e}", summary.mean_p.value());
    let _ = writeln!(stdout, "drop_rate    {:.6e}", summary.drop_rate.value());
    let _ = writeln!(stdout, "mark_rate    {:.6e}", summary.mark_rate.value());
    let _ = writeln!(stdout, "goodput      {:.6e} B/s", summary.goodput);
    if let Some(o) = oracle_for(&cfg) {
        let _ = writeln!(
            stdout,
            "oracle       p {:.6e}, delay {:.6} s",
            o.p.value(),
            o.q
        );
    }
    let _ = writeln!(stdout, "trace        {}", trace_path.display());
    Ok(())
}

fn sweep(path: &Path, out: &Path) -> Result<(), Failure> {
    let spec = SweepSpec::from_path(path)
        .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    let records = run_sweep(&spec, Some(out)).map_err(|e| match e {
        SweepError::Config(c) => Failure::Invalid(format!("{}: {c}", path.display())),
        other => Failure::runtime(other),
    })?;
    let failed = records.iter().filter(|r| r.row.error.is_some()).count();
    println!(
        "{} runs, {failed} failed; summary in {}",
        records.len(),
        out.join("summary.csv").display()
    );
    if failed > 0 {
        for r in records
            .iter()
            .filter_map(|r| r.row.error.as_ref().map(|e| (r, e)))
        {
            eprintln!("  seed {}: {}", r.0.run.seed, r.1);
        }
        return Err(Failure::Runtime(format!(
            "{failed} of {} runs failed",
            records.len()
        )));
    }
    Ok(())
}

fn curve(q0_ms: f64, q1_ms: f64, grid: usize) -> Result<(), Failure> {
    let curve = SoftTargetCurve::new(q0_ms / 1e3, q1_ms / 1e3)
        .map_err(|e| Failure::Invalid(e.to_string()))?;
    if grid < 2 {
        return Err(Failure::Invalid(format!(
            "--grid must be at least 2, got {grid}"
        )));
    }
    print_target_curve(&curve, grid, io::stdout().lock()).map_err(Failure::runtime)
}

fn validate(path: &Path) -> Result<(), Failure> {
    let cfg = load(path)?;
    println!(
        "{}: ok ({}, {} flows, {} s)",
        path.display(),
        cfg.controller,
        cfg.n_flows,
        cfg.duration
    );
    Ok(())
}
