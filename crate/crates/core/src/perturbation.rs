//! First-order corrections from the minimal-length deformation
//! `H_I = (β/m)(∂x⁴ + ∂y⁴ + 2∂x²∂y²)`.
//!
//! The biharmonic operator is invariant under the complex-orthogonal
//! normal-mode rotation, so `H_I = (β/m)(∂X⁴ + ∂Y⁴ + 2∂X²∂Y²)` with
//! `∂X = √(α1²/2)(a₁ − a₁†)` and likewise for `Y`. Matrix elements use the
//! bilinear (non-conjugating) pairing: the ladder formulas are polynomials in
//! `α1², α2²` and are evaluated directly at complex values in the broken
//! phase.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Rational64;
use thiserror::Error;

use crate::hermite::{HermiteError, HermiteEvaluator};
use crate::ladder::ladder_element;
use crate::model::{energy, DerivedModes, ModelError, ModelParams, PhaseClass, StateIndex};

/// Relative size of `|E_n − E_m|` below which a denominator counts as zero.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Offsets `(m1 − n1, m2 − n2)` reachable by `H_I`, diagonal included.
pub const SELECTION_OFFSETS: [(i64, i64); 13] = [
    (0, 0),
    (2, 0),
    (-2, 0),
    (4, 0),
    (-4, 0),
    (0, 2),
    (0, -2),
    (0, 4),
    (0, -4),
    (2, 2),
    (2, -2),
    (-2, 2),
    (-2, -2),
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PerturbationError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Hermite(#[from] HermiteError),
    #[error("degenerate denominator for state {state}: coupled to {partner} ({reason})")]
    Degeneracy {
        state: StateIndex,
        partner: StateIndex,
        reason: &'static str,
    },
    #[error("sample grid is not symmetric under the requested parity")]
    AsymmetricGrid,
    #[error("sample count {got} does not match grid size {expected}")]
    ShapeMismatch { got: usize, expected: usize },
}

/// Which coefficient multiplies `3(n2² + n2 + ½)` in the closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeltaEnergyForm {
    /// `α2⁴`, consistent with the special cases and the ladder algebra.
    #[default]
    Corrected,
    /// `α1⁴` as the general formula is commonly printed. Only used to prove
    /// the verification harness rejects it.
    PrintedAlpha1,
}

/// Whether `H_I` can connect `bra` and `ket` at all.
pub fn selection_allowed(bra: StateIndex, ket: StateIndex) -> bool {
    let d1 = bra.n1 as i64 - ket.n1 as i64;
    let d2 = bra.n2 as i64 - ket.n2 as i64;
    SELECTION_OFFSETS.contains(&(d1, d2))
}

/// States `m ≠ n` with a possibly nonzero `⟨m|H_I|n⟩`; at most 12.
pub fn coupled_states(state: StateIndex) -> Vec<StateIndex> {
    SELECTION_OFFSETS
        .iter()
        .skip(1)
        .filter_map(|&(d1, d2)| state.offset(d1, d2))
        .collect()
}

/// Exact coefficients of `(α1⁴, α2⁴, α1²α2²)` inside the `β/2m` bracket of
/// the closed-form energy shift.
pub fn delta_energy_coefficients(state: StateIndex) -> [Rational64; 3] {
    let n1 = state.n1 as i64;
    let n2 = state.n2 as i64;
    let quartic = |n: i64| Rational64::new(3 * (2 * n * n + 2 * n + 1), 2);
    [
        quartic(n1),
        quartic(n2),
        Rational64::from_integer((2 * n1 + 1) * (2 * n2 + 1)),
    ]
}

/// Closed-form `ΔE = ⟨ψ_n|H_I|ψ_n⟩`:
/// `(β/2m)[3(n1² + n1 + ½)α1⁴ + 3(n2² + n2 + ½)α2⁴ + (2n1 + 1)(2n2 + 1)α1²α2²]`.
pub fn delta_energy(
    modes: &DerivedModes,
    state: StateIndex,
    params: &ModelParams,
) -> Result<Complex64, PerturbationError> {
    delta_energy_with(modes, state, params, DeltaEnergyForm::Corrected)
}

pub fn delta_energy_with(
    modes: &DerivedModes,
    state: StateIndex,
    params: &ModelParams,
    form: DeltaEnergyForm,
) -> Result<Complex64, PerturbationError> {
    let nm = modes.normal_modes()?;
    let (a1, a2) = (nm.alpha1_sq, nm.alpha2_sq);
    let n1 = state.n1 as f64;
    let n2 = state.n2 as f64;
    let second = match form {
        DeltaEnergyForm::Corrected => a2 * a2,
        DeltaEnergyForm::PrintedAlpha1 => a1 * a1,
    };
    let bracket = a1 * a1 * (3.0 * (n1 * n1 + n1 + 0.5))
        + second * (3.0 * (n2 * n2 + n2 + 0.5))
        + a1 * a2 * ((2.0 * n1 + 1.0) * (2.0 * n2 + 1.0));
    Ok(bracket * (params.beta / (2.0 * params.mass)))
}

/// `⟨ψ_bra|H_I|ψ_ket⟩` from exact ladder algebra in the normal-mode basis.
pub fn h_int_matrix_element(
    modes: &DerivedModes,
    bra: StateIndex,
    ket: StateIndex,
    params: &ModelParams,
) -> Result<Complex64, PerturbationError> {
    let nm = modes.normal_modes()?;
    if !selection_allowed(bra, ket) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (a1, a2) = (nm.alpha1_sq, nm.alpha2_sq);
    let delta = |m: usize, n: usize| if m == n { 1.0 } else { 0.0 };
    let quartic_x = a1 * a1 * (0.25 * ladder_element(4, bra.n1, ket.n1) * delta(bra.n2, ket.n2));
    let quartic_y = a2 * a2 * (0.25 * delta(bra.n1, ket.n1) * ladder_element(4, bra.n2, ket.n2));
    // 2 ∂X²∂Y² = 2 (α1²/2)(α2²/2) (a₁−a₁†)²(a₂−a₂†)²
    let mixed = a1 * a2 * (0.5 * ladder_element(2, bra.n1, ket.n1) * ladder_element(2, bra.n2, ket.n2));
    Ok((quartic_x + quartic_y + mixed) * (params.beta / params.mass))
}

/// First-order energy and wavefunction correction for one state.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionReport {
    pub state: StateIndex,
    pub delta_e: Complex64,
    /// `⟨ψ_m|H_I|ψ_n⟩` for every selection-allowed `m`, diagonal included.
    pub matrix_elements: BTreeMap<StateIndex, Complex64>,
    /// `M_m = ⟨ψ_m|H_I|ψ_n⟩ / (E_n − E_m)`, diagonal excluded.
    pub m_coefficients: BTreeMap<StateIndex, Complex64>,
    /// The corrected state has the same PT eigenvalue as the unperturbed one.
    pub pt_preserved: bool,
}

pub fn wavefunction_correction(
    modes: &DerivedModes,
    state: StateIndex,
    params: &ModelParams,
) -> Result<CorrectionReport, PerturbationError> {
    modes.normal_modes()?;
    if modes.phase == PhaseClass::Critical {
        return Err(PerturbationError::Degeneracy {
            state,
            partner: state.swapped(),
            reason: "exceptional point: normal-mode frequencies coalesce",
        });
    }
    let e_n = energy(modes, state)?;
    let tolerance = DEGENERACY_TOLERANCE * e_n.norm().max(1.0);

    let mut matrix_elements = BTreeMap::new();
    let mut m_coefficients = BTreeMap::new();
    let delta_e = h_int_matrix_element(modes, state, state, params)?;
    matrix_elements.insert(state, delta_e);
    for m in coupled_states(state) {
        let element = h_int_matrix_element(modes, m, state, params)?;
        let gap = e_n - energy(modes, m)?;
        if gap.norm() < tolerance {
            return Err(PerturbationError::Degeneracy {
                state,
                partner: m,
                reason: "vanishing energy denominator",
            });
        }
        matrix_elements.insert(m, element);
        m_coefficients.insert(m, element / gap);
    }

    // PT maps ψ_m to (−1)^{m1} ψ_m (x-parity) and conjugates coefficients;
    // with even offsets the correction keeps the eigenvalue iff every M is real.
    let pt_preserved = modes.states_are_pt_symmetric()
        && m_coefficients
            .values()
            .all(|m: &Complex64| m.im.abs() <= 1e-12 * m.norm().max(1.0));

    Ok(CorrectionReport {
        state,
        delta_e,
        matrix_elements,
        m_coefficients,
        pt_preserved,
    })
}

/// Closed-form normal-mode eigenfunction, optionally with its first-order
/// correction, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Wavefunction {
    terms: Vec<(Complex64, StateIndex)>,
    modes: DerivedModes,
    alpha1: Complex64,
    alpha2: Complex64,
    evaluator: HermiteEvaluator,
}

impl Wavefunction {
    pub fn new(
        modes: &DerivedModes,
        state: StateIndex,
        params: &ModelParams,
        include_correction: bool,
    ) -> Result<Self, PerturbationError> {
        let nm = modes.normal_modes()?;
        let mut terms = vec![(Complex64::new(1.0, 0.0), state)];
        if include_correction {
            let report = wavefunction_correction(modes, state, params)?;
            terms.extend(report.m_coefficients.iter().map(|(m, c)| (*c, *m)));
        }
        let evaluator = HermiteEvaluator::default();
        if let Some((_, s)) = terms.iter().find(|(_, s)| s.n1.max(s.n2) > evaluator.max_degree) {
            return Err(HermiteError::DegreeTooLarge {
                degree: s.n1.max(s.n2),
                max: evaluator.max_degree,
            }
            .into());
        }
        Ok(Self {
            terms,
            modes: *modes,
            alpha1: nm.alpha1_sq.sqrt(),
            alpha2: nm.alpha2_sq.sqrt(),
            evaluator,
        })
    }

    fn basis_value(&self, state: StateIndex, big_x: Complex64, big_y: Complex64) -> Complex64 {
        let (a1, a2) = (self.alpha1, self.alpha2);
        let mut denom = PI;
        for n in [state.n1, state.n2] {
            for k in 1..=n {
                denom *= 2.0 * k as f64;
            }
        }
        let norm = (a1 * a2 / denom).sqrt();
        let gauss = (-(a1 * a1 * big_x * big_x) * 0.5 - (a2 * a2 * big_y * big_y) * 0.5).exp();
        // Degrees were checked in `new`.
        let h1 = self.evaluator.eval(state.n1, a1 * big_x).unwrap_or_default();
        let h2 = self.evaluator.eval(state.n2, a2 * big_y).unwrap_or_default();
        norm * gauss * h1 * h2
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        // `new` succeeded, so the modes (and hence the rotation) exist.
        let rotation = self.modes.rotation().expect("modes checked at construction");
        let (big_x, big_y) = rotation.apply(x, y);
        self.terms
            .iter()
            .map(|(c, s)| c * self.basis_value(*s, big_x, big_y))
            .sum()
    }

    pub fn sample(&self, grid: &SampleGrid) -> Vec<Complex64> {
        grid.points().map(|(x, y)| self.eval(x, y)).collect()
    }
}

/// `ψ_{n1,n2}(x, y)` (plus `Σ M ψ_m` if requested).
pub fn evaluate_wavefunction(
    modes: &DerivedModes,
    state: StateIndex,
    x: f64,
    y: f64,
    include_correction: bool,
    params: &ModelParams,
) -> Result<Complex64, PerturbationError> {
    Ok(Wavefunction::new(modes, state, params, include_correction)?.eval(x, y))
}

/// Rectangular sample grid; samples are stored row-major over `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl SampleGrid {
    /// `points × points` grid on `[−extent, extent]²`.
    pub fn symmetric(extent: f64, points: usize) -> Self {
        let axis: Vec<f64> = if points < 2 {
            vec![0.0; points]
        } else {
            (0..points)
                .map(|i| -extent + 2.0 * extent * i as f64 / (points - 1) as f64)
                .collect()
        };
        Self {
            xs: axis.clone(),
            ys: axis,
        }
    }

    pub fn len(&self) -> usize {
        self.xs.len() * self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs
            .iter()
            .flat_map(move |&x| self.ys.iter().map(move |&y| (x, y)))
    }
}

fn mirrored(axis: &[f64]) -> bool {
    let scale = axis.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    axis.iter()
        .zip(axis.iter().rev())
        .all(|(a, b)| (a + b).abs() <= 1e-12 * scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityAxis {
    /// `x → −x`
    X,
    /// `y → −y`
    Y,
}

/// Samples of `(PTψ)(x, y) = conj(ψ(−x, y))` (or `conj(ψ(x, −y))`).
pub fn pt_apply(
    grid: &SampleGrid,
    samples: &[Complex64],
    axis: ParityAxis,
) -> Result<Vec<Complex64>, PerturbationError> {
    if samples.len() != grid.len() {
        return Err(PerturbationError::ShapeMismatch {
            got: samples.len(),
            expected: grid.len(),
        });
    }
    let symmetric = match axis {
        ParityAxis::X => mirrored(&grid.xs),
        ParityAxis::Y => mirrored(&grid.ys),
    };
    if !symmetric {
        return Err(PerturbationError::AsymmetricGrid);
    }
    let (nx, ny) = (grid.xs.len(), grid.ys.len());
    let mut out = Vec::with_capacity(samples.len());
    for ix in 0..nx {
        for iy in 0..ny {
            let src = match axis {
                ParityAxis::X => (nx - 1 - ix) * ny + iy,
                ParityAxis::Y => ix * ny + (ny - 1 - iy),
            };
            out.push(samples[src].conj());
        }
    }
    Ok(out)
}

/// Best-fit PT eigenvalue `η` with `PTψ ≈ ηψ`, and the residual
/// `max|PTψ − ηψ| / max|ψ|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtEigenvalue {
    pub value: Complex64,
    pub deviation: f64,
}

pub fn pt_eigenvalue(
    grid: &SampleGrid,
    samples: &[Complex64],
    axis: ParityAxis,
) -> Result<PtEigenvalue, PerturbationError> {
    let transformed = pt_apply(grid, samples, axis)?;
    let (num, den) = samples
        .iter()
        .zip(&transformed)
        .fold((Complex64::new(0.0, 0.0), 0.0), |(n, d), (s, t)| {
            (n + s.conj() * t, d + s.norm_sqr())
        });
    let value = if den > 0.0 { num / den } else { Complex64::new(0.0, 0.0) };
    let scale = samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
    let worst = samples
        .iter()
        .zip(&transformed)
        .map(|(s, t)| (t - value * s).norm())
        .fold(0.0, f64::max);
    Ok(PtEigenvalue {
        value,
        deviation: if scale > 0.0 { worst / scale } else { 0.0 },
    })
}
