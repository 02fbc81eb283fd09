use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use stablearn::config::default_gates;
use stablearn::{run, CircuitSource, DopingKind, ExperimentConfig, Format, HarnessError, Mode};
use stablearn_core::LearnerConfig;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Test,
    Learn,
    Validate,
    Calibrate,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DopingArg {
    T,
    HaarU1,
}

/// Learn and test quantum states of high stabilizer dimension on simulated copies.
#[derive(Debug, Parser)]
#[command(name = "stablearn", version)]
struct Cli {
    /// test: stabilizer-dimension tester; learn: full learner;
    /// validate: exact identity suites; calibrate: tomography constant sweep.
    #[arg(value_enum)]
    mode: ModeArg,
    /// Qubit count (calibrate ignores it).
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Non-Clifford gates per generated circuit; largest t̂ for calibrate.
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Circuit file used by every trial instead of random circuits.
    #[arg(long, value_name = "FILE")]
    circuit: Option<PathBuf>,
    /// Clifford gates per random circuit [default: 4n²].
    #[arg(long)]
    gates: Option<usize>,
    #[arg(long, value_enum, default_value = "t")]
    doping: DopingArg,
    /// Report path; stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Tester threshold [default: n - 2t, or 1 with --haar].
    #[arg(long)]
    k: Option<usize>,
    /// Test Haar-random states; success means rejection.
    #[arg(long)]
    haar: bool,
    /// Success rate needed for exit code 0 [default: 1 - delta; 1 for validate].
    #[arg(long)]
    threshold: Option<f64>,
    /// Learner configuration JSON (tomography constant and cap).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Where calibrate writes the chosen learner configuration.
    #[arg(long, value_name = "FILE")]
    config_out: Option<PathBuf>,
    /// Comma-separated constants for calibrate.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let mode = match cli.mode {
        ModeArg::Test => Mode::Test,
        ModeArg::Learn => Mode::Learn,
        ModeArg::Validate => Mode::Validate,
        ModeArg::Calibrate => Mode::Calibrate,
    };
    let mut cfg = ExperimentConfig::new(mode, cli.n);
    cfg.t = cli.t.unwrap_or(cfg.t);
    cfg.eps = cli.eps.unwrap_or(cfg.eps);
    cfg.delta = cli.delta.unwrap_or(cfg.delta);
    cfg.trials = cli.trials.unwrap_or(cfg.trials);
    cfg.seed = cli.seed;
    cfg.circuit = match &cli.circuit {
        Some(path) => CircuitSource::File(path.clone()),
        None => CircuitSource::Random {
            gates: cli.gates.unwrap_or_else(|| default_gates(cli.n)),
            doping: match cli.doping {
                DopingArg::T => DopingKind::T,
                DopingArg::HaarU1 => DopingKind::HaarU1,
            },
        },
    };
    cfg.k = cli.k;
    cfg.haar = cli.haar;
    cfg.threshold = cli.threshold;
    if let Some(path) = &cli.config {
        cfg.learner = LearnerConfig::load(path)?;
    }
    if let Some(grid) = &cli.grid {
        cfg.calibration_grid = grid.clone();
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<bool, HarnessError> {
    let cfg = build_config(cli)?;
    let report = run(&cfg)?;
    let format = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    let sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    match format {
        Format::Json => report.write_json(sink)?,
        Format::Csv => report.write_csv(sink)?,
    }
    if let (Some(path), Some(c)) = (&cli.config_out, report.chosen_constant) {
        LearnerConfig {
            tomography_constant: c,
            ..cfg.learner
        }
        .save(path)?;
    }
    let a = &report.aggregate;
    eprintln!(
        "{}/{} trials succeeded ({:.4}, threshold {:.4})",
        a.successes, a.trials, a.success_rate, a.threshold
    );
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
