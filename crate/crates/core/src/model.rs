//! Physical parameters, normal-mode data and the exact unperturbed spectrum
//! of the 2D anisotropic oscillator with an imaginary `iλxy` coupling.
//!
//! The Hamiltonian is `p²/2m + ½m(ωx²x² + ωy²y²) + iλxy` with ħ = 1. Its
//! potential matrix `[[ωx², iλ/m], [iλ/m, ωy²]]` is complex symmetric, so the
//! normal-mode transformation is complex orthogonal (`RᵀR = I`) rather than
//! unitary, and the mode frequencies `c1, c2` are real only while
//! `|λ| ≤ λ_c = |mω−²/2|`.
//!
//! All square roots of complex quantities use the principal branch.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative width of the band around `λ_c` that is classified as critical.
pub const CRITICAL_BAND: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    /// ω− = 0 with λ ≠ 0: the mode frequencies have no finite closed form.
    #[error("normal modes unavailable in the isotropic broken phase (ωx = ωy, λ ≠ 0)")]
    ModesUnavailable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub mass: f64,
    pub omega_x: f64,
    pub omega_y: f64,
    pub lambda: f64,
    /// Minimal-length deformation strength (units of length²).
    pub beta: f64,
}

impl ModelParams {
    pub fn new(
        mass: f64,
        omega_x: f64,
        omega_y: f64,
        lambda: f64,
        beta: f64,
    ) -> Result<Self, ModelError> {
        let p = Self {
            mass,
            omega_x,
            omega_y,
            lambda,
            beta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let fields = [
            ("mass", self.mass),
            ("omega_x", self.omega_x),
            ("omega_y", self.omega_y),
            ("lambda", self.lambda),
            ("beta", self.beta),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(ModelError::InvalidParams(format!("{name} must be finite")));
        }
        if self.mass <= 0.0 {
            return Err(ModelError::InvalidParams("mass must be positive".into()));
        }
        if self.omega_x < 0.0 || self.omega_y < 0.0 {
            return Err(ModelError::InvalidParams(
                "frequencies must be non-negative".into(),
            ));
        }
        if self.beta < 0.0 {
            return Err(ModelError::InvalidParams("beta must be non-negative".into()));
        }
        Ok(())
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    pub fn with_beta(self, beta: f64) -> Self {
        Self { beta, ..self }
    }

    /// ω+² = ωy² + ωx².
    pub fn omega_plus_sq(&self) -> f64 {
        self.omega_y * self.omega_y + self.omega_x * self.omega_x
    }

    /// ω−² = ωy² − ωx².
    pub fn omega_minus_sq(&self) -> f64 {
        self.omega_y * self.omega_y - self.omega_x * self.omega_x
    }

    /// Critical coupling λ_c = |m ω−² / 2|.
    pub fn lambda_crit(&self) -> f64 {
        (self.mass * self.omega_minus_sq() / 2.0).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseClass {
    Unbroken,
    Critical,
    Broken,
    IsotropicBroken,
    DecoupledIsotropic,
}

impl PhaseClass {
    pub fn label(self) -> &'static str {
        match self {
            PhaseClass::Unbroken => "unbroken",
            PhaseClass::Critical => "critical",
            PhaseClass::Broken => "broken",
            PhaseClass::IsotropicBroken => "isotropic_broken",
            PhaseClass::DecoupledIsotropic => "decoupled",
        }
    }

    /// Whether the closed-form spectrum is real.
    pub fn has_real_spectrum(self) -> bool {
        matches!(
            self,
            PhaseClass::Unbroken | PhaseClass::Critical | PhaseClass::DecoupledIsotropic
        )
    }
}

impl fmt::Display for PhaseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Quantum numbers `(n1, n2)` of the normal-mode product state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StateIndex {
    pub n1: usize,
    pub n2: usize,
}

impl StateIndex {
    pub const fn new(n1: usize, n2: usize) -> Self {
        Self { n1, n2 }
    }

    pub fn swapped(self) -> Self {
        Self::new(self.n2, self.n1)
    }

    pub fn total(self) -> usize {
        self.n1 + self.n2
    }

    /// State shifted by `(d1, d2)`, if both quantum numbers stay non-negative.
    pub fn offset(self, d1: i64, d2: i64) -> Option<Self> {
        let n1 = self.n1 as i64 + d1;
        let n2 = self.n2 as i64 + d2;
        (n1 >= 0 && n2 >= 0).then(|| Self::new(n1 as usize, n2 as usize))
    }

    /// All states with `n1 + n2 ≤ nmax`, ordered by total then `n1`.
    pub fn up_to_total(nmax: usize) -> Vec<Self> {
        (0..=nmax)
            .flat_map(|t| (0..=t).rev().map(move |n1| Self::new(n1, t - n1)))
            .collect()
    }
}

impl fmt::Display for StateIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.n1, self.n2)
    }
}

/// Sign convention of the second row of the normal-mode rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RotationConvention {
    /// `Y = b·x + a·y`, with the sign of `b` fixed by the eigenvector
    /// equation of the potential matrix. Complex orthogonal.
    #[default]
    Orthogonal,
    /// `Y = b·x − a·y` with `b = √((1−k)/2)`, as the transformation is
    /// commonly printed. Not orthogonal for λ ≠ 0; kept as a fault to inject
    /// into the verification harness.
    Printed,
}

/// Linear map `(x, y) → (X, Y)` onto normal-mode coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalModeRotation {
    pub matrix: [[Complex64; 2]; 2],
    /// False when the rotation is a convention rather than a diagonalizing
    /// transformation (at the exceptional point no such transformation
    /// exists and the 45° limit is used).
    pub exact: bool,
}

impl NormalModeRotation {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            matrix: [[one, zero], [zero, one]],
            exact: true,
        }
    }

    pub fn apply(&self, x: f64, y: f64) -> (Complex64, Complex64) {
        self.apply_complex(Complex64::new(x, 0.0), Complex64::new(y, 0.0))
    }

    pub fn apply_complex(&self, x: Complex64, y: Complex64) -> (Complex64, Complex64) {
        let r = &self.matrix;
        (r[0][0] * x + r[0][1] * y, r[1][0] * x + r[1][1] * y)
    }

    /// Inverse map `(X, Y) → (x, y)`.
    pub fn invert(&self, big_x: Complex64, big_y: Complex64) -> (Complex64, Complex64) {
        let r = &self.matrix;
        let det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
        (
            (r[1][1] * big_x - r[0][1] * big_y) / det,
            (-r[1][0] * big_x + r[0][0] * big_y) / det,
        )
    }

    /// Max-entry norm of `RᵀR − I` (transpose, not adjoint).
    pub fn orthogonality_defect(&self) -> f64 {
        let r = &self.matrix;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let dot = r[0][i] * r[0][j] + r[1][i] * r[1][j];
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }

    /// `R K Rᵀ` for a symmetric 2x2 matrix `K`.
    pub fn congruence(&self, k: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
        let r = &self.matrix;
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..2 {
                    for b in 0..2 {
                        acc += r[i][a] * k[a][b] * r[j][b];
                    }
                }
                out[i][j] = acc;
            }
        }
        out
    }
}

/// Frequencies and Gaussian widths of the two normal modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalModes {
    pub c1: Complex64,
    pub c2: Complex64,
    /// α1² = m·c1.
    pub alpha1_sq: Complex64,
    /// α2² = m·c2.
    pub alpha2_sq: Complex64,
    pub rotation: NormalModeRotation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedModes {
    pub mass: f64,
    pub omega_plus_sq: f64,
    pub omega_minus_sq: f64,
    pub lambda_crit: f64,
    /// k⁻¹ = √(1 − 4λ²/m²ω−⁴); `None` in the isotropic broken phase.
    pub k_inv: Option<Complex64>,
    pub phase: PhaseClass,
    modes: Option<NormalModes>,
}

impl DerivedModes {
    pub fn normal_modes(&self) -> Result<&NormalModes, ModelError> {
        self.modes.as_ref().ok_or(ModelError::ModesUnavailable)
    }

    pub fn c1(&self) -> Result<Complex64, ModelError> {
        Ok(self.normal_modes()?.c1)
    }

    pub fn c2(&self) -> Result<Complex64, ModelError> {
        Ok(self.normal_modes()?.c2)
    }

    pub fn alpha1_sq(&self) -> Result<Complex64, ModelError> {
        Ok(self.normal_modes()?.alpha1_sq)
    }

    pub fn alpha2_sq(&self) -> Result<Complex64, ModelError> {
        Ok(self.normal_modes()?.alpha2_sq)
    }

    pub fn rotation(&self) -> Result<&NormalModeRotation, ModelError> {
        Ok(&self.normal_modes()?.rotation)
    }

    /// True when every normal-mode product state is itself a PT eigenstate:
    /// real frequencies, a real `a` and a purely imaginary `b` in the
    /// rotation, so that PT maps `X → −X` (x-parity) or `Y → −Y` (y-parity).
    pub fn states_are_pt_symmetric(&self) -> bool {
        let Some(modes) = &self.modes else {
            return false;
        };
        if !self.phase.has_real_spectrum() || !modes.rotation.exact {
            return false;
        }
        let tol = 1e-12;
        let r = &modes.rotation.matrix;
        modes.c1.im.abs() <= tol
            && modes.c2.im.abs() <= tol
            && r[0][0].im.abs() <= tol
            && r[1][1].im.abs() <= tol
            && r[0][1].re.abs() <= tol
            && r[1][0].re.abs() <= tol
    }
}

/// Phase label of the parameter point.
pub fn classify_phase(params: &ModelParams) -> PhaseClass {
    let omega_minus_sq = params.omega_minus_sq();
    let lambda = params.lambda.abs();
    if omega_minus_sq == 0.0 {
        return if lambda == 0.0 {
            PhaseClass::DecoupledIsotropic
        } else {
            PhaseClass::IsotropicBroken
        };
    }
    let lambda_c = params.lambda_crit();
    if (lambda - lambda_c).abs() <= CRITICAL_BAND * lambda_c.max(1.0) {
        PhaseClass::Critical
    } else if lambda < lambda_c {
        PhaseClass::Unbroken
    } else {
        PhaseClass::Broken
    }
}

pub fn derive_modes(params: &ModelParams) -> Result<DerivedModes, ModelError> {
    derive_modes_with(params, RotationConvention::Orthogonal)
}

pub fn derive_modes_with(
    params: &ModelParams,
    convention: RotationConvention,
) -> Result<DerivedModes, ModelError> {
    params.validate()?;
    let m = params.mass;
    let wp2 = params.omega_plus_sq();
    let wm2 = params.omega_minus_sq();
    let phase = classify_phase(params);

    let mut derived = DerivedModes {
        mass: m,
        omega_plus_sq: wp2,
        omega_minus_sq: wm2,
        lambda_crit: params.lambda_crit(),
        k_inv: None,
        phase,
        modes: None,
    };

    let real = |v: f64| Complex64::new(v, 0.0);
    let (k_inv, c1_sq, c2_sq) = match phase {
        PhaseClass::IsotropicBroken => return Ok(derived),
        PhaseClass::DecoupledIsotropic => (real(1.0), real(wp2 / 2.0), real(wp2 / 2.0)),
        PhaseClass::Critical => (real(0.0), real(wp2 / 2.0), real(wp2 / 2.0)),
        PhaseClass::Unbroken | PhaseClass::Broken => {
            let ratio = params.lambda / (m * wm2 / 2.0);
            let k_inv = real(1.0 - ratio * ratio).sqrt();
            (
                k_inv,
                (real(wp2) - k_inv * wm2) * 0.5,
                (real(wp2) + k_inv * wm2) * 0.5,
            )
        }
    };

    // Real-valued roots in the real-spectrum phases so the energies carry an
    // exactly vanishing imaginary part.
    let root = |z: Complex64| {
        if phase.has_real_spectrum() {
            real(z.re.max(0.0).sqrt())
        } else {
            z.sqrt()
        }
    };
    let c1 = root(c1_sq);
    let c2 = root(c2_sq);

    let rotation = normal_mode_rotation(params, phase, k_inv, convention);
    derived.k_inv = Some(k_inv);
    derived.modes = Some(NormalModes {
        c1,
        c2,
        alpha1_sq: c1 * m,
        alpha2_sq: c2 * m,
        rotation,
    });
    Ok(derived)
}

fn normal_mode_rotation(
    params: &ModelParams,
    phase: PhaseClass,
    k_inv: Complex64,
    convention: RotationConvention,
) -> NormalModeRotation {
    let one = Complex64::new(1.0, 0.0);
    if params.lambda == 0.0 || phase == PhaseClass::DecoupledIsotropic {
        let mut r = NormalModeRotation::identity();
        if convention == RotationConvention::Printed {
            r.matrix[1][1] = -one;
        }
        return r;
    }
    if phase == PhaseClass::Critical {
        // Limiting 45° convention; no diagonalizing rotation exists here.
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let second = match convention {
            RotationConvention::Orthogonal => [h, h],
            RotationConvention::Printed => [h, -h],
        };
        return NormalModeRotation {
            matrix: [[h, -h], second],
            exact: false,
        };
    }

    let k = one / k_inv;
    let a = ((one + k) * 0.5).sqrt();
    match convention {
        RotationConvention::Orthogonal => {
            // First row (a, −b) is the c1² eigenvector of the potential
            // matrix, which fixes b/a = i m ω−² (1 − k⁻¹) / 2λ.
            let m = params.mass;
            let ratio = Complex64::new(0.0, m * params.omega_minus_sq() / (2.0 * params.lambda))
                * (one - k_inv);
            let b = ratio * a;
            NormalModeRotation {
                matrix: [[a, -b], [b, a]],
                exact: true,
            }
        }
        RotationConvention::Printed => {
            let b = ((one - k) * 0.5).sqrt();
            NormalModeRotation {
                matrix: [[a, -b], [b, -a]],
                exact: true,
            }
        }
    }
}

/// Unperturbed level `E = (n1 + ½)c1 + (n2 + ½)c2`.
pub fn energy(modes: &DerivedModes, state: StateIndex) -> Result<Complex64, ModelError> {
    let nm = modes.normal_modes()?;
    Ok(nm.c1 * (state.n1 as f64 + 0.5) + nm.c2 * (state.n2 as f64 + 0.5))
}

pub fn rotate_to_normal(
    modes: &DerivedModes,
    x: f64,
    y: f64,
) -> Result<(Complex64, Complex64), ModelError> {
    Ok(modes.rotation()?.apply(x, y))
}

/// Potential matrix `K` with `V = ½ m (x, y) K (x, y)ᵀ`.
pub fn potential_matrix(params: &ModelParams) -> [[Complex64; 2]; 2] {
    let off = Complex64::new(0.0, params.lambda / params.mass);
    [
        [Complex64::new(params.omega_x * params.omega_x, 0.0), off],
        [off, Complex64::new(params.omega_y * params.omega_y, 0.0)],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(lambda: f64) -> ModelParams {
        ModelParams::new(1.0, 1.0, 2.0, lambda, 0.0).unwrap()
    }

    #[test]
    fn decoupled_limit() {
        let d = derive_modes(&params(0.0)).unwrap();
        assert_eq!(d.phase, PhaseClass::Unbroken);
        assert_eq!(d.k_inv, Some(Complex64::new(1.0, 0.0)));
        assert_eq!(d.c1().unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(d.c2().unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(d.alpha1_sq().unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(d.alpha2_sq().unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(d.omega_plus_sq, 5.0);
        assert_eq!(d.omega_minus_sq, 3.0);
    }

    #[test]
    fn critical_point_coalesces_frequencies() {
        let d = derive_modes(&params(1.5)).unwrap();
        assert_eq!(d.phase, PhaseClass::Critical);
        assert_eq!(d.k_inv, Some(Complex64::new(0.0, 0.0)));
        let c = 2.5f64.sqrt();
        assert_abs_diff_eq!(d.c1().unwrap().re, c, epsilon = 1e-15);
        assert_eq!(d.c1().unwrap(), d.c2().unwrap());
        assert!(!d.rotation().unwrap().exact);
    }

    #[test]
    fn broken_phase_conjugate_frequencies() {
        let d = derive_modes(&params(2.0)).unwrap();
        assert_eq!(d.phase, PhaseClass::Broken);
        let k_inv = d.k_inv.unwrap();
        assert_abs_diff_eq!(k_inv.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k_inv.im, 7f64.sqrt() / 3.0, epsilon = 1e-15);
        let c1 = d.c1().unwrap();
        let c2 = d.c2().unwrap();
        let c1_sq = c1 * c1;
        assert_abs_diff_eq!(c1_sq.re, 2.5, epsilon = 1e-14);
        assert_abs_diff_eq!(c1_sq.im, -7f64.sqrt() / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!((c2 - c1.conj()).norm(), 0.0, epsilon = 1e-15);
        // Ground level is real because the pair is conjugate.
        let e00 = energy(&d, StateIndex::new(0, 0)).unwrap();
        assert_abs_diff_eq!(e00.im, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e00.re, c1.re, epsilon = 1e-15);
    }

    #[test]
    fn decoupled_energies() {
        let d = derive_modes(&params(0.0)).unwrap();
        assert_eq!(energy(&d, StateIndex::new(0, 0)).unwrap(), Complex64::new(1.5, 0.0));
        assert_eq!(energy(&d, StateIndex::new(2, 1)).unwrap(), Complex64::new(5.5, 0.0));
    }

    #[test]
    fn phase_examples() {
        assert_eq!(classify_phase(&params(1.0)), PhaseClass::Unbroken);
        assert_eq!(classify_phase(&params(-1.0)), PhaseClass::Unbroken);
        assert_eq!(classify_phase(&params(1.5 + 1e-10)), PhaseClass::Critical);
        assert_eq!(classify_phase(&params(1.5 + 1e-6)), PhaseClass::Broken);
        let iso = ModelParams::new(1.0, 2.0, 2.0, 0.1, 0.0).unwrap();
        assert_eq!(classify_phase(&iso), PhaseClass::IsotropicBroken);
        let free = ModelParams::new(1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(classify_phase(&free), PhaseClass::DecoupledIsotropic);
    }

    #[test]
    fn isotropic_coupling_withholds_modes() {
        let iso = ModelParams::new(1.0, 2.0, 2.0, 0.1, 0.0).unwrap();
        let d = derive_modes(&iso).unwrap();
        assert_eq!(d.phase, PhaseClass::IsotropicBroken);
        assert_eq!(d.k_inv, None);
        assert_eq!(d.c1(), Err(ModelError::ModesUnavailable));
        assert_eq!(
            energy(&d, StateIndex::new(0, 0)),
            Err(ModelError::ModesUnavailable)
        );
        assert!(rotate_to_normal(&d, 1.0, 0.0).is_err());
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(ModelParams::new(0.0, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, -1.0, 1.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 1.0, f64::NAN, 0.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 1.0, 0.0, -1e-3).is_err());
        assert!(ModelParams::new(1.0, 1.0, 1.0, 0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn rotation_examples() {
        let d = derive_modes(&params(0.0)).unwrap();
        let (x, y) = rotate_to_normal(&d, 3.0, 4.0).unwrap();
        assert_eq!((x.re, y.re), (3.0, 4.0));

        let crit = derive_modes(&params(1.5)).unwrap();
        let (x, y) = rotate_to_normal(&crit, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(x.re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(y.re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn rotation_diagonalizes_potential() {
        for &lambda in &[0.3, -0.7, 1.2, 1.49, 1.6, -2.0, 3.5] {
            for &(wx, wy) in &[(1.0, 2.0), (2.0, 1.0), (0.5, 1.7)] {
                let p = ModelParams::new(1.3, wx, wy, lambda, 0.0).unwrap();
                let d = derive_modes(&p).unwrap();
                if d.phase == PhaseClass::Critical {
                    continue;
                }
                let nm = d.normal_modes().unwrap();
                assert!(nm.rotation.orthogonality_defect() < 1e-12);
                let diag = nm.rotation.congruence(potential_matrix(&p));
                let scale = d.omega_plus_sq;
                assert!((diag[0][1]).norm() < 1e-12 * scale, "{lambda} {wx} {wy}");
                assert!((diag[0][0] - nm.c1 * nm.c1).norm() < 1e-12 * scale);
                assert!((diag[1][1] - nm.c2 * nm.c2).norm() < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn printed_rotation_is_not_orthogonal() {
        let d = derive_modes_with(&params(1.0), RotationConvention::Printed).unwrap();
        assert!(d.rotation().unwrap().orthogonality_defect() > 0.1);
        let diag = d.rotation().unwrap().congruence(potential_matrix(&params(1.0)));
        assert!(diag[0][1].norm() > 1e-3);
    }

    #[test]
    fn unbroken_states_are_pt_symmetric() {
        assert!(derive_modes(&params(0.8)).unwrap().states_are_pt_symmetric());
        assert!(derive_modes(&params(0.0)).unwrap().states_are_pt_symmetric());
        assert!(!derive_modes(&params(2.0)).unwrap().states_are_pt_symmetric());
        assert!(!derive_modes(&params(1.5)).unwrap().states_are_pt_symmetric());
    }

    #[test]
    fn state_enumeration() {
        let s = StateIndex::up_to_total(2);
        assert_eq!(s.len(), 6);
        assert_eq!(s[0], StateIndex::new(0, 0));
        assert!(s.iter().all(|st| st.total() <= 2));
        assert_eq!(StateIndex::new(1, 0).offset(-2, 0), None);
        assert_eq!(StateIndex::new(1, 0).offset(2, 2), Some(StateIndex::new(3, 2)));
    }
}
