use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ptgup::model::{ModelParams, StateIndex};
use ptgup::oracle::{DEFAULT_CUTOFF, DEFAULT_MAX_ROWS};
use ptgup_cli::{
    cmd_correction, cmd_spectrum, cmd_sweep, cmd_verify, cmd_wavefunction, CliError, Fault,
    Format, GridSpec, RunConfig, SweepRange, EXIT_CHECKS_FAILED,
};

/// Spectrum, first-order minimal-length corrections and numerical
/// verification for the PT-symmetric coupled oscillator.
#[derive(Parser)]
#[command(name = "ptgup", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Energies and first-order shifts for all states with n1 + n2 <= nmax
    Spectrum(Common),
    /// Phase diagram over a range of couplings (CSV by default)
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        lambda_min: f64,
        #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
        lambda_max: f64,
        #[arg(long, default_value_t = 61)]
        steps: usize,
    },
    /// Compare closed forms against the truncated-basis oracle
    Verify {
        #[command(flatten)]
        common: Common,
        /// Largest basis size (rows) the oracle may allocate
        #[arg(long, default_value_t = DEFAULT_MAX_ROWS)]
        max_rows: usize,
        #[arg(long, value_enum, hide = true)]
        inject: Option<Injection>,
    },
    /// Sample a normal-mode eigenfunction and its first-order correction
    Wavefunction {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Per-state correction coefficients and matrix elements
    Correction(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long = "m", default_value_t = 1.0, allow_hyphen_values = true)]
    mass: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    wx: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    wy: f64,
    /// Imaginary coupling strength [default: 0; verify scans 0, 0.5, 1, 2]
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Minimal-length deformation [default: 0; verify scans 0, 1e-3]
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 4)]
    nmax: usize,
    /// Explicit state as n1,n2 (repeatable); overrides --nmax where used
    #[arg(long, value_parser = parse_state)]
    state: Vec<StateIndex>,
    /// Oracle basis size per mode
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    cutoff: usize,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GridArgs {
    /// Half-width of the square sample grid
    #[arg(long, default_value_t = 3.0)]
    extent: f64,
    /// Samples per axis
    #[arg(long, default_value_t = 21)]
    points: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Injection {
    PrintedRotation,
    PrintedAlpha1,
}

fn parse_state(s: &str) -> Result<StateIndex, String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected n1,n2, got {s:?}"))?;
    let n = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok(StateIndex::new(n(a)?, n(b)?))
}

fn config(common: Common, default_format: Format) -> Result<RunConfig, CliError> {
    let params = ModelParams::new(
        common.mass,
        common.wx,
        common.wy,
        common.lambda.unwrap_or(0.0),
        common.beta.unwrap_or(0.0),
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut cfg = RunConfig::new(params);
    cfg.lambda_given = common.lambda.is_some();
    cfg.beta_given = common.beta.is_some();
    cfg.nmax = common.nmax;
    cfg.states = common.state;
    cfg.cutoff = common.cutoff;
    cfg.format = match common.format {
        Some(OutputFormat::Json) => Format::Json,
        Some(OutputFormat::Csv) => Format::Csv,
        None => default_format,
    };
    cfg.out = common.out;
    cfg.seed = common.seed;
    Ok(cfg)
}

/// Output document and whether the run counts as a success.
fn run(cli: Cli) -> Result<(String, Option<PathBuf>, bool), CliError> {
    let (cfg, doc, ok) = match cli.command {
        Command::Spectrum(common) => {
            let cfg = config(common, Format::Json)?;
            let doc = cmd_spectrum(&cfg)?;
            (cfg, doc, true)
        }
        Command::Sweep {
            common,
            lambda_min,
            lambda_max,
            steps,
        } => {
            let mut cfg = config(common, Format::Csv)?;
            cfg.sweep = SweepRange {
                lambda_min,
                lambda_max,
                steps,
            };
            let doc = cmd_sweep(&cfg)?;
            (cfg, doc, true)
        }
        Command::Verify {
            common,
            max_rows,
            inject,
        } => {
            let mut cfg = config(common, Format::Json)?;
            cfg.max_rows = max_rows;
            cfg.fault = inject.map(|i| match i {
                Injection::PrintedRotation => Fault::PrintedRotation,
                Injection::PrintedAlpha1 => Fault::PrintedAlpha1,
            });
            let (doc, report) = cmd_verify(&cfg)?;
            for c in report.failed() {
                eprintln!("check failed: {} (max_dev {:e} > {:e}) {}", c.name, c.max_dev, c.tolerance, c.detail);
            }
            (cfg, doc, report.all_pass)
        }
        Command::Wavefunction { common, grid } => {
            let mut cfg = config(common, Format::Json)?;
            cfg.grid = GridSpec {
                extent: grid.extent,
                points: grid.points,
            };
            let doc = cmd_wavefunction(&cfg)?;
            (cfg, doc, true)
        }
        Command::Correction(common) => {
            let cfg = config(common, Format::Json)?;
            let doc = cmd_correction(&cfg)?;
            (cfg, doc, true)
        }
    };
    Ok((doc, cfg.out, ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((doc, out, ok)) => {
            let written = match out {
                Some(path) => std::fs::write(&path, doc),
                None => std::io::stdout().lock().write_all(doc.as_bytes()),
            };
            if let Err(e) = written {
                let e = CliError::from(e);
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code() as u8);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(EXIT_CHECKS_FAILED as u8)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
