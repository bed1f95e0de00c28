//! Subcommand implementations for the `ptgup` binary.
//!
//! Every command returns the finished output document as a string; the
//! binary only decides where it goes and which exit code to use.

mod commands;
mod verify;

use std::path::PathBuf;

use ptgup::model::{ModelError, ModelParams, StateIndex};
use ptgup::oracle::{OracleError, DEFAULT_CUTOFF, DEFAULT_MAX_ROWS};
use ptgup::perturbation::PerturbationError;
use thiserror::Error;

pub use commands::{cmd_correction, cmd_spectrum, cmd_sweep, cmd_wavefunction};
pub use verify::{cmd_verify, run_verify, Check, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const EXIT_RESOURCE: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Resource(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Numerical(_) | CliError::Io(_) => EXIT_NUMERICAL,
            CliError::Resource(_) => EXIT_RESOURCE,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::InvalidParams(_) => CliError::Usage(e.to_string()),
            ModelError::ModesUnavailable => CliError::Domain(e.to_string()),
        }
    }
}

impl From<PerturbationError> for CliError {
    fn from(e: PerturbationError) -> Self {
        match e {
            PerturbationError::Model(m) => m.into(),
            PerturbationError::AsymmetricGrid | PerturbationError::ShapeMismatch { .. } => {
                CliError::Usage(e.to_string())
            }
            PerturbationError::Degeneracy { .. } | PerturbationError::Hermite(_) => {
                CliError::Domain(e.to_string())
            }
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Model(m) => m.into(),
            OracleError::Perturbation(p) => p.into(),
            OracleError::CutoffTooSmall { .. } | OracleError::QuadratureOrderTooLow { .. } => {
                CliError::Usage(e.to_string())
            }
            OracleError::ZeroFrequency
            | OracleError::OutsideSafeZone { .. }
            | OracleError::BrokenPhaseUnsupported => CliError::Domain(e.to_string()),
            OracleError::ResourceGuard { .. } => CliError::Resource(e.to_string()),
            OracleError::Convergence(_) | OracleError::TrackingAmbiguous { .. } => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Deliberate defects for exercising the verification suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    PrintedRotation,
    PrintedAlpha1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub steps: usize,
}

impl SweepRange {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.lambda_min.is_finite() && self.lambda_max.is_finite()) {
            return Err(CliError::Usage("sweep bounds must be finite".into()));
        }
        if self.steps < 2 {
            return Err(CliError::Usage(format!("sweep needs at least 2 steps, got {}", self.steps)));
        }
        if self.lambda_min >= self.lambda_max {
            return Err(CliError::Usage(format!(
                "sweep range is empty: lambda-min {} must be below lambda-max {}",
                self.lambda_min, self.lambda_max
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let span = self.lambda_max - self.lambda_min;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.lambda_max
                } else {
                    self.lambda_min + span * i as f64 / (self.steps - 1) as f64
                }
            })
            .collect()
    }
}

impl Default for SweepRange {
    fn default() -> Self {
        Self {
            lambda_min: 0.0,
            lambda_max: 3.0,
            steps: 61,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub extent: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            extent: 3.0,
            points: 21,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    /// `verify` runs its default coupling/deformation grid unless these were
    /// given explicitly.
    pub lambda_given: bool,
    pub beta_given: bool,
    pub nmax: usize,
    pub states: Vec<StateIndex>,
    pub sweep: SweepRange,
    pub cutoff: usize,
    pub max_rows: usize,
    pub grid: GridSpec,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl RunConfig {
    pub fn new(params: ModelParams) -> Self {
        Self {
            params,
            lambda_given: true,
            beta_given: true,
            nmax: 4,
            states: Vec::new(),
            sweep: SweepRange::default(),
            cutoff: DEFAULT_CUTOFF,
            max_rows: DEFAULT_MAX_ROWS,
            grid: GridSpec::default(),
            format: Format::Json,
            out: None,
            seed: 0,
            fault: None,
        }
    }

    /// Explicit `--state` list, or every state with `n1 + n2 ≤ nmax`.
    pub fn state_list(&self) -> Vec<StateIndex> {
        if self.states.is_empty() {
            StateIndex::up_to_total(self.nmax)
        } else {
            self.states.clone()
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params.validate()?;
        if !(self.grid.extent.is_finite() && self.grid.extent > 0.0) {
            return Err(CliError::Usage("grid extent must be positive".into()));
        }
        if self.grid.points == 0 {
            return Err(CliError::Usage("grid needs at least one point".into()));
        }
        Ok(())
    }
}

/// Shortest round-trip decimal form; never locale dependent.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub(crate) fn params_json(p: &ModelParams) -> serde_json::Value {
    serde_json::json!({
        "m": p.mass,
        "wx": p.omega_x,
        "wy": p.omega_y,
        "lambda": p.lambda,
        "beta": p.beta,
    })
}

pub(crate) fn to_json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values always serialize");
    s.push('\n');
    s
}

pub(crate) fn to_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(row).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ascii"))
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_grid_hits_both_ends() {
        let r = SweepRange {
            lambda_min: 0.0,
            lambda_max: 3.0,
            steps: 61,
        };
        let v = r.values();
        assert_eq!(v.len(), 61);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[30], 1.5);
        assert_eq!(v[60], 3.0);
    }

    #[test]
    fn sweep_validation() {
        let bad = |lambda_min, lambda_max, steps| {
            SweepRange {
                lambda_min,
                lambda_max,
                steps,
            }
            .validate()
            .unwrap_err()
            .exit_code()
        };
        assert_eq!(bad(1.0, 1.0, 2), EXIT_USAGE);
        assert_eq!(bad(2.0, 1.0, 5), EXIT_USAGE);
        assert_eq!(bad(0.0, 1.0, 1), EXIT_USAGE);
        assert_eq!(bad(0.0, f64::INFINITY, 5), EXIT_USAGE);
    }

    #[test]
    fn exit_code_mapping() {
        let code = |e: OracleError| CliError::from(e).exit_code();
        assert_eq!(code(OracleError::ResourceGuard { rows: 10, limit: 5 }), EXIT_RESOURCE);
        assert_eq!(code(OracleError::CutoffTooSmall { cutoff: 2, min: 8 }), EXIT_USAGE);
        assert_eq!(code(OracleError::Model(ModelError::ModesUnavailable)), EXIT_DOMAIN);
        assert_eq!(
            code(OracleError::TrackingAmbiguous {
                state: StateIndex::new(0, 0),
                overlap: 0.5
            }),
            EXIT_NUMERICAL
        );
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.1 + 0.2, 1e-300, -0.0475, 1.0 / 3.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }
}
