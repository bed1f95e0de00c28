//! Brute-force verification of the closed forms.
//!
//! The oracle never touches the normal-mode machinery: it assembles the full
//! Hamiltonian in the decoupled `(ωx, ωy)` product basis, diagonalizes it
//! numerically, and compares. The closed-form energies are only used to
//! label which numeric eigenvalue belongs to which `(n1, n2)`.

pub mod eigen;
mod hamiltonian;
mod quadrature;

use std::cell::OnceCell;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub use eigen::EigenError;
pub use hamiltonian::{
    build_hamiltonian, build_hamiltonian_guarded, TruncatedHamiltonian, DEFAULT_CUTOFF,
    DEFAULT_MAX_ROWS, MIN_CUTOFF,
};
pub use quadrature::quadrature_matrix_element;

use crate::hermite::hermite_functions;
use crate::model::{derive_modes, energy, DerivedModes, ModelError, ModelParams, StateIndex};
use crate::perturbation::{delta_energy, PerturbationError, SampleGrid, Wavefunction};

/// Minimum eigenvector overlap accepted when following a level across β.
pub const TRACKING_OVERLAP: f64 = 0.9;
/// Eigenpairs handed out by the oracle satisfy `‖Hv − Ev‖ < 1e−8 ‖v‖`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Perturbation(#[from] PerturbationError),
    #[error("oracle basis needs nonzero ωx and ωy")]
    ZeroFrequency,
    #[error("cutoff {cutoff} below minimum {min}")]
    CutoffTooSmall { cutoff: usize, min: usize },
    #[error("basis of {rows} states exceeds the resource guard of {limit}")]
    ResourceGuard { rows: usize, limit: usize },
    #[error("eigensolver failure: {0}")]
    Convergence(#[from] EigenError),
    #[error("state {state} lies outside the truncation-safe zone n1 + n2 ≤ {limit}")]
    OutsideSafeZone { state: StateIndex, limit: usize },
    #[error("could not track state {state} across β: best eigenvector overlap {overlap:.3}")]
    TrackingAmbiguous { state: StateIndex, overlap: f64 },
    #[error("quadrature path needs real normal-mode widths; use the ladder path")]
    BrokenPhaseUnsupported,
    #[error("quadrature order {order} too low, need at least {min}")]
    QuadratureOrderTooLow { order: usize, min: usize },
}

/// Basis rows sharing one total parity `(−1)^{n1+n2}`. The full Hamiltonian
/// is block diagonal in this split: `iλxy` changes both quantum numbers by
/// one and the quartic terms change each by an even amount.
#[derive(Debug, Clone)]
struct ParityBlock {
    rows: Vec<usize>,
}

impl ParityBlock {
    fn new(cutoff: usize, parity: usize) -> Self {
        let rows = (0..cutoff * cutoff)
            .filter(|r| (r / cutoff + r % cutoff) % 2 == parity)
            .collect();
        Self { rows }
    }

    fn for_state(cutoff: usize, state: StateIndex) -> Self {
        Self::new(cutoff, state.total() % 2)
    }

    fn extract(&self, matrix: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n = self.rows.len();
        DMatrix::from_fn(n, n, |i, j| matrix[(self.rows[i], self.rows[j])])
    }

    fn position(&self, row: usize) -> Option<usize> {
        self.rows.binary_search(&row).ok()
    }

    fn embed(&self, v: &DVector<Complex64>, dim: usize) -> DVector<Complex64> {
        let mut out = DVector::zeros(dim);
        for (i, &r) in self.rows.iter().enumerate() {
            out[r] = v[i];
        }
        out
    }
}

fn sort_spectrum(values: &mut [Complex64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

fn block_structure_holds(matrix: &DMatrix<Complex64>, cutoff: usize) -> bool {
    let n = matrix.nrows();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let same = ((i / cutoff + i % cutoff) + (j / cutoff + j % cutoff)) % 2 == 0;
            same || matrix[(i, j)].norm() == 0.0
        })
    })
}

/// Eigenvalues of an arbitrary matrix over the product basis, sorted by
/// `(Re, Im)`.
pub fn diagonalize_matrix(
    matrix: &DMatrix<Complex64>,
    cutoff: usize,
) -> Result<Vec<Complex64>, OracleError> {
    let mut values = if block_structure_holds(matrix, cutoff) {
        let mut all = Vec::with_capacity(matrix.nrows());
        for parity in 0..2 {
            let block = ParityBlock::new(cutoff, parity);
            all.extend(eigen::eigenvalues(&block.extract(matrix))?);
        }
        all
    } else {
        eigen::eigenvalues(matrix)?
    };
    sort_spectrum(&mut values);
    Ok(values)
}

/// Eigenvalues of the truncated Hamiltonian, sorted by `(Re, Im)`.
pub fn diagonalize(h: &TruncatedHamiltonian) -> Result<Vec<Complex64>, OracleError> {
    diagonalize_guarded(h, DEFAULT_MAX_ROWS)
}

pub fn diagonalize_guarded(
    h: &TruncatedHamiltonian,
    max_rows: usize,
) -> Result<Vec<Complex64>, OracleError> {
    if h.dim() > max_rows {
        return Err(OracleError::ResourceGuard {
            rows: h.dim(),
            limit: max_rows,
        });
    }
    diagonalize_matrix(&h.matrix, h.cutoff)
}

fn residual_checked(
    matrix: &DMatrix<Complex64>,
    value: Complex64,
    v: DVector<Complex64>,
) -> Result<DVector<Complex64>, OracleError> {
    let residual = (matrix * &v - &v * value).norm() / v.norm();
    if residual < RESIDUAL_TOLERANCE {
        Ok(v)
    } else {
        Err(EigenError::InverseIteration {
            value,
            residual,
            tolerance: RESIDUAL_TOLERANCE,
        }
        .into())
    }
}

/// Right eigenvector (unit norm, full basis) for `value`, seeded with the
/// basis vector of `seed`. Inside a degenerate eigenspace this returns the
/// spectral projection of the seed.
pub fn eigenvector_for(
    h: &TruncatedHamiltonian,
    matrix: &DMatrix<Complex64>,
    value: Complex64,
    seed: StateIndex,
) -> Result<DVector<Complex64>, OracleError> {
    let block = ParityBlock::for_state(h.cutoff, seed);
    let sub = block.extract(matrix);
    let mut start = DVector::zeros(block.rows.len());
    if let Some(pos) = h.index(seed).and_then(|r| block.position(r)) {
        start[pos] = Complex64::new(1.0, 0.0);
    }
    let v = eigen::eigenvector(&sub, value, Some(&start))?;
    let full = block.embed(&v, h.dim());
    residual_checked(matrix, value, full)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchedPair {
    pub state: StateIndex,
    pub analytic: Complex64,
    pub numeric: Complex64,
}

impl MatchedPair {
    pub fn deviation(&self) -> f64 {
        (self.analytic - self.numeric).norm()
    }
}

/// Closed-form levels against the truncated-basis spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumComparison {
    /// Sorted by real part.
    pub analytic: Vec<(StateIndex, Complex64)>,
    pub numeric: Vec<Complex64>,
    pub pairs: Vec<MatchedPair>,
    pub max_abs_deviation: f64,
    pub max_rel_deviation: f64,
    pub cutoff: usize,
    pub compared: usize,
    /// Requested states dropped because `n1 + n2 > cutoff / 2`.
    pub excluded: Vec<StateIndex>,
}

impl SpectrumComparison {
    /// Injective matching, greedy on global smallest distance.
    pub fn new(
        mut analytic: Vec<(StateIndex, Complex64)>,
        numeric: Vec<Complex64>,
        cutoff: usize,
    ) -> Self {
        let limit = cutoff / 2;
        let excluded: Vec<StateIndex> = analytic
            .iter()
            .filter(|(s, _)| s.total() > limit)
            .map(|(s, _)| *s)
            .collect();
        analytic.retain(|(s, _)| s.total() <= limit);
        analytic.sort_by(|a, b| a.1.re.total_cmp(&b.1.re).then(a.0.cmp(&b.0)));

        let mut candidates: Vec<(f64, usize, usize)> = analytic
            .iter()
            .enumerate()
            .flat_map(|(i, (_, e))| {
                numeric
                    .iter()
                    .enumerate()
                    .map(move |(j, z)| ((e - z).norm(), i, j))
            })
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut analytic_used = vec![false; analytic.len()];
        let mut numeric_used = vec![false; numeric.len()];
        let mut pairs = Vec::with_capacity(analytic.len());
        for (_, i, j) in candidates {
            if analytic_used[i] || numeric_used[j] {
                continue;
            }
            analytic_used[i] = true;
            numeric_used[j] = true;
            pairs.push(MatchedPair {
                state: analytic[i].0,
                analytic: analytic[i].1,
                numeric: numeric[j],
            });
            if pairs.len() == analytic.len() {
                break;
            }
        }
        pairs.sort_by_key(|p| p.state);
        let max_abs_deviation = pairs.iter().map(MatchedPair::deviation).fold(0.0, f64::max);
        let max_rel_deviation = pairs
            .iter()
            .map(|p| p.deviation() / p.analytic.norm().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        Self {
            compared: pairs.len(),
            analytic,
            numeric,
            pairs,
            max_abs_deviation,
            max_rel_deviation,
            cutoff,
            excluded,
        }
    }
}

/// Compares `E(n1, n2) + ΔE(n1, n2)` for `n1 + n2 ≤ nmax` with the numeric
/// spectrum at the same β (exact when β = 0).
pub fn compare_spectrum(
    params: &ModelParams,
    cutoff: usize,
    nmax: usize,
) -> Result<SpectrumComparison, OracleError> {
    let modes = derive_modes(params)?;
    let h = build_hamiltonian(params, cutoff)?;
    compare_with(&h, &modes, nmax)
}

/// As [`compare_spectrum`], for an already assembled Hamiltonian.
pub fn compare_with(
    h: &TruncatedHamiltonian,
    modes: &DerivedModes,
    nmax: usize,
) -> Result<SpectrumComparison, OracleError> {
    let numeric = diagonalize_matrix(&h.matrix, h.cutoff)?;
    let analytic = analytic_levels(modes, &h.params, nmax)?;
    Ok(SpectrumComparison::new(analytic, numeric, h.cutoff))
}

pub fn analytic_levels(
    modes: &DerivedModes,
    params: &ModelParams,
    nmax: usize,
) -> Result<Vec<(StateIndex, Complex64)>, OracleError> {
    StateIndex::up_to_total(nmax)
        .into_iter()
        .map(|s| {
            let mut e = energy(modes, s)?;
            if params.beta != 0.0 {
                e += delta_energy(modes, s, params)?;
            }
            Ok((s, e))
        })
        .collect()
}

/// Largest distance from an eigenvalue among the lowest `count` (by real
/// part) to the nearest conjugate of any eigenvalue in the list. Zero for a
/// spectrum closed under complex conjugation.
pub fn conjugate_closure_defect(sorted: &[Complex64], count: usize) -> f64 {
    sorted
        .iter()
        .take(count)
        .map(|z| {
            sorted
                .iter()
                .map(|w| (w - z.conj()).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Follows levels of a fixed parameter point across small β steps.
pub struct BetaTracker {
    h: TruncatedHamiltonian,
    modes: DerivedModes,
    /// Block spectra indexed by parity, then β ∈ {0, +h, −h} at `step`.
    spectra: [[OnceCell<Vec<Complex64>>; 3]; 2],
    step: OnceCell<f64>,
}

impl BetaTracker {
    pub fn new(params: &ModelParams, cutoff: usize) -> Result<Self, OracleError> {
        Self::from_hamiltonian(build_hamiltonian(params, cutoff)?)
    }

    pub fn from_hamiltonian(h: TruncatedHamiltonian) -> Result<Self, OracleError> {
        let modes = derive_modes(&h.params)?;
        modes.normal_modes()?;
        Ok(Self {
            h,
            modes,
            spectra: Default::default(),
            step: OnceCell::new(),
        })
    }

    pub fn hamiltonian(&self) -> &TruncatedHamiltonian {
        &self.h
    }

    fn block_spectrum(
        &self,
        state: StateIndex,
        slot: usize,
        sub: &DMatrix<Complex64>,
    ) -> Result<&[Complex64], OracleError> {
        let cell = &self.spectra[state.total() % 2][slot];
        if cell.get().is_none() {
            let _ = cell.set(eigen::eigenvalues(sub)?);
        }
        Ok(cell.get().expect("just filled"))
    }

    /// Numeric level and eigenvector at `beta` continuously connected to
    /// `reference` (a β = 0 eigenvector), chosen by maximal overlap.
    fn follow(
        &self,
        state: StateIndex,
        slot: usize,
        beta: f64,
        anchor: Complex64,
        reference: &DVector<Complex64>,
    ) -> Result<(Complex64, f64), OracleError> {
        let block = ParityBlock::for_state(self.h.cutoff, state);
        let full = self.h.with_beta(beta);
        let sub = block.extract(&full);
        let mut values = self.block_spectrum(state, slot, &sub)?.to_vec();
        values.sort_by(|a, b| (a - anchor).norm().total_cmp(&(b - anchor).norm()));
        // A small uniform admixture lets inverse iteration reach levels the
        // reference is orthogonal to; those then simply score low overlap.
        let floor = Complex64::new(1e-3 / (block.rows.len() as f64).sqrt(), 0.0);
        let seed: DVector<Complex64> = DVector::from_iterator(
            block.rows.len(),
            block.rows.iter().map(|&r| reference[r] + floor),
        );
        let mut best = (values[0], 0.0);
        for &value in values.iter().take(4) {
            let Ok(v) = eigen::eigenvector(&sub, value, Some(&seed)) else {
                continue;
            };
            let Ok(v) = residual_checked(&full, value, block.embed(&v, self.h.dim())) else {
                continue;
            };
            let overlap = reference.dotc(&v).norm();
            if overlap > best.1 {
                best = (value, overlap);
            }
        }
        Ok(best)
    }

    /// `[E(β=h) − E(β=−h)] / 2h` for the level labelled `state`.
    pub fn slope(&self, state: StateIndex, step: f64) -> Result<Complex64, OracleError> {
        let limit = self.h.cutoff / 2;
        if state.total() > limit {
            return Err(OracleError::OutsideSafeZone { state, limit });
        }
        let label = energy(&self.modes, state)?;
        if *self.step.get_or_init(|| step) != step {
            return Self::from_hamiltonian(self.h.clone())?.slope(state, step);
        }
        let block = ParityBlock::for_state(self.h.cutoff, state);
        let base = block.extract(&self.h.undeformed);
        let anchor = self
            .block_spectrum(state, 0, &base)?
            .iter()
            .copied()
            .min_by(|a, b| (a - label).norm().total_cmp(&(b - label).norm()))
            .expect("non-empty block");
        let reference = eigenvector_for(&self.h, &self.h.undeformed, anchor, state)?;
        let mut ends = [Complex64::new(0.0, 0.0); 2];
        for ((end, beta), slot) in ends.iter_mut().zip([step, -step]).zip([1, 2]) {
            let (value, overlap) = self.follow(state, slot, beta, anchor, &reference)?;
            if overlap < TRACKING_OVERLAP {
                return Err(OracleError::TrackingAmbiguous { state, overlap });
            }
            *end = value;
        }
        Ok((ends[0] - ends[1]) / (2.0 * step))
    }
}

/// Finite-difference `dE/dβ` at β = 0 for one level.
pub fn beta_slope(
    params: &ModelParams,
    state: StateIndex,
    cutoff: usize,
    step: f64,
) -> Result<Complex64, OracleError> {
    BetaTracker::new(params, cutoff)?.slope(state, step)
}

/// `φ_n(x)` of the oracle basis: orthonormal oscillator functions of
/// frequency `omega`.
fn basis_functions(count: usize, mass: f64, omega: f64, x: f64) -> Vec<f64> {
    let scale = (mass * omega).sqrt();
    let norm = scale.sqrt();
    hermite_functions(count, scale * x)
        .into_iter()
        .map(|v| v * norm)
        .collect()
}

/// Samples the numeric β = 0 eigenfunction of `state` on `grid`.
pub fn numeric_eigenfunction(
    h: &TruncatedHamiltonian,
    modes: &DerivedModes,
    state: StateIndex,
    grid: &SampleGrid,
) -> Result<Vec<Complex64>, OracleError> {
    let label = energy(modes, state)?;
    let block = ParityBlock::for_state(h.cutoff, state);
    let anchor = eigen::eigenvalues(&block.extract(&h.undeformed))?
        .into_iter()
        .min_by(|a, b| (a - label).norm().total_cmp(&(b - label).norm()))
        .expect("non-empty block");
    let v = eigenvector_for(h, &h.undeformed, anchor, state)?;
    let p = &h.params;
    let n = h.cutoff;
    Ok(grid
        .points()
        .map(|(x, y)| {
            let fx = basis_functions(n, p.mass, p.omega_x, x);
            let fy = basis_functions(n, p.mass, p.omega_y, y);
            let mut acc = Complex64::new(0.0, 0.0);
            for (i1, a) in fx.iter().enumerate() {
                for (i2, b) in fy.iter().enumerate() {
                    acc += v[i1 * n + i2] * (a * b);
                }
            }
            acc
        })
        .collect())
}

/// Largest pointwise mismatch between the numeric eigenfunction and the
/// closed-form `ψ_{n1,n2}` (built through the normal-mode rotation of
/// `modes`), after fitting the free complex scale; relative to `max|Φ|`.
pub fn eigenfunction_deviation(
    h: &TruncatedHamiltonian,
    modes: &DerivedModes,
    state: StateIndex,
    grid: &SampleGrid,
) -> Result<f64, OracleError> {
    let numeric = numeric_eigenfunction(h, modes, state, grid)?;
    let analytic = Wavefunction::new(modes, state, &h.params, false)?.sample(grid);
    let (num, den) = analytic
        .iter()
        .zip(&numeric)
        .fold((Complex64::new(0.0, 0.0), 0.0), |(n, d), (a, b)| {
            (n + a.conj() * b, d + a.norm_sqr())
        });
    let scale = if den > 0.0 { num / den } else { Complex64::new(0.0, 0.0) };
    let peak = numeric.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let worst = analytic
        .iter()
        .zip(&numeric)
        .map(|(a, b)| (b - scale * a).norm())
        .fold(0.0, f64::max);
    Ok(if peak > 0.0 { worst / peak } else { f64::INFINITY })
}
