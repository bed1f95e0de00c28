//! Closed-form spectrum, eigenfunctions and first-order β corrections for a
//! PT-symmetric 2D oscillator with an `iλxy` coupling and a generalized
//! uncertainty deformation, plus a brute-force numerical oracle.

pub mod hermite;
pub mod ladder;
pub mod model;
pub mod oracle;
pub mod perturbation;

pub use model::{
    classify_phase, derive_modes, energy, DerivedModes, ModelError, ModelParams, NormalModes,
    PhaseClass, StateIndex,
};
pub use perturbation::{delta_energy, wavefunction_correction, CorrectionReport, PerturbationError};
