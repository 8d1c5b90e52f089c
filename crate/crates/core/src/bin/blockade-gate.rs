use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use blockade_gate::experiments::{
    run_gates, run_random_shifts, run_sweep_n, run_theory_deviation, run_transfer_error, ExperimentConfig,
    IntegratorKind, Report, Sign, SweepMode,
};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "blockade-gate",
    version,
    about = "Multi-qubit blockade gate simulations and error estimates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// sweep-n setting.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Sign of random shifts.
    #[arg(long, global = true, value_enum)]
    sign: Option<SignArg>,
    /// Random registers per size.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Integrator tolerance (rtol = atol).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Propagator for random-shift registers.
    #[arg(long, global = true, value_enum)]
    integrator: Option<IntegratorArg>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Two-level transfer error over drive scale and pulse duration.
    TransferError,
    /// Error against register size (mode a, b or c).
    SweepN,
    /// Simulation and estimate for random blockade shifts.
    RandomShifts,
    /// Per-register relative deviation of the estimate.
    TheoryDeviation,
    /// Dark-state parameters for named gates (JSON).
    Gates,
}

#[derive(ValueEnum, Clone, Copy)]
enum ModeArg {
    A,
    B,
    C,
}

#[derive(ValueEnum, Clone, Copy)]
enum SignArg {
    Positive,
    Mixed,
}

#[derive(ValueEnum, Clone, Copy)]
enum IntegratorArg {
    Adaptive,
    Exponential,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::TransferError => "transfer-error",
            Command::SweepN => "sweep-n",
            Command::RandomShifts => "random-shifts",
            Command::TheoryDeviation => "theory-deviation",
            Command::Gates => "gates",
        }
    }
}

fn config(cli: &Cli) -> blockade_gate::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.tol {
        cfg.tol = t;
    }
    if let Some(m) = cli.mode {
        cfg.sweep_n.mode = match m {
            ModeArg::A => SweepMode::A,
            ModeArg::B => SweepMode::B,
            ModeArg::C => SweepMode::C,
        };
    }
    if let Some(s) = cli.sign {
        cfg.random_shifts.sign = match s {
            SignArg::Positive => Sign::Positive,
            SignArg::Mixed => Sign::Mixed,
        };
    }
    if let Some(n) = cli.samples {
        cfg.random_shifts.samples = n;
    }
    if let Some(i) = cli.integrator {
        cfg.random_shifts.integrator = match i {
            IntegratorArg::Adaptive => IntegratorKind::Adaptive,
            IntegratorArg::Exponential => IntegratorKind::Exponential,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn output(cli: &Cli) -> io::Result<Box<dyn Write>> {
    Ok(match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: &Cli) -> blockade_gate::Result<bool> {
    let cfg = config(cli)?;
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| blockade_gate::Error::Config(e.to_string()))?;
    }
    let command = cli.command.name();
    let report: Report = match cli.command {
        Command::Gates => {
            let r = run_gates(&cfg)?;
            let mut out = output(cli)?;
            serde_json::to_writer_pretty(&mut out, &r).map_err(|e| blockade_gate::Error::Parse(e.to_string()))?;
            writeln!(out)?;
            out.flush()?;
            return Ok(true);
        }
        Command::TransferError => run_transfer_error(&cfg)?,
        Command::SweepN => run_sweep_n(&cfg)?,
        Command::RandomShifts => run_random_shifts(&cfg)?,
        Command::TheoryDeviation => run_theory_deviation(&cfg)?,
    };
    report.write_csv(command, &cfg, output(cli)?)?;
    for f in &report.failures {
        eprintln!("failed: {f}");
    }
    Ok(report.is_complete())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
