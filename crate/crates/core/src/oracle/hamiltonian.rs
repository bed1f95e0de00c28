use nalgebra::DMatrix;
use num_complex::Complex64;

use super::OracleError;
use crate::model::{ModelParams, StateIndex};

pub const MIN_CUTOFF: usize = 8;
pub const DEFAULT_CUTOFF: usize = 30;
/// Default limit on the number of basis states (matrix rows).
pub const DEFAULT_MAX_ROWS: usize = 4096;

/// Full deformed Hamiltonian in the truncated product basis of the decoupled
/// `(ωx, ωy)` oscillators, `|n1, n2⟩` with `n1, n2 < cutoff`.
///
/// Every operator entry comes from exact ladder matrices built with a
/// padded dimension, so truncation never corrupts the retained block.
#[derive(Debug, Clone)]
pub struct TruncatedHamiltonian {
    pub cutoff: usize,
    pub params: ModelParams,
    /// `p²/2m + ½m(ωx²x² + ωy²y²) + iλxy`.
    pub undeformed: DMatrix<Complex64>,
    /// `(1/m)(∂x⁴ + ∂y⁴ + 2∂x²∂y²)`; the full matrix adds `β` times this.
    pub deformation: DMatrix<Complex64>,
    pub matrix: DMatrix<Complex64>,
}

impl TruncatedHamiltonian {
    pub fn dim(&self) -> usize {
        self.cutoff * self.cutoff
    }

    /// Row of the basis state `(n1, n2)`.
    pub fn index(&self, state: StateIndex) -> Option<usize> {
        (state.n1 < self.cutoff && state.n2 < self.cutoff)
            .then_some(state.n1 * self.cutoff + state.n2)
    }

    pub fn state(&self, row: usize) -> StateIndex {
        StateIndex::new(row / self.cutoff, row % self.cutoff)
    }

    /// Same basis with a different deformation strength (negative values
    /// allowed, for finite differences).
    pub fn with_beta(&self, beta: f64) -> DMatrix<Complex64> {
        &self.undeformed + &self.deformation * Complex64::new(beta, 0.0)
    }

    /// Largest `|H_ij − H_ji|` (complex symmetry, not Hermiticity).
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)]).norm());
            }
        }
        worst
    }
}

/// Single-mode operators in the number basis of frequency `omega`, mass `m`.
struct ModeOperators {
    position: DMatrix<f64>,
    /// `p²/2m + ½mω²x²`
    oscillator: DMatrix<f64>,
    d2: DMatrix<f64>,
    d4: DMatrix<f64>,
}

impl ModeOperators {
    fn new(cutoff: usize, mass: f64, omega: f64) -> Self {
        let padded = cutoff + 4;
        let lower = DMatrix::from_fn(padded, padded, |i, j| {
            if j == i + 1 {
                (j as f64).sqrt()
            } else {
                0.0
            }
        });
        let raise = lower.transpose();
        let x = (&lower + &raise) * (2.0 * mass * omega).powf(-0.5);
        let d = (&lower - &raise) * (mass * omega / 2.0).sqrt();
        let d2 = &d * &d;
        let d4 = &d2 * &d2;
        let x2 = &x * &x;
        let oscillator = &d2 * (-1.0 / (2.0 * mass)) + &x2 * (0.5 * mass * omega * omega);
        let keep = |m: &DMatrix<f64>| m.view((0, 0), (cutoff, cutoff)).into_owned();
        Self {
            position: keep(&x),
            oscillator: keep(&oscillator),
            d2: keep(&d2),
            d4: keep(&d4),
        }
    }
}

pub fn build_hamiltonian(
    params: &ModelParams,
    cutoff: usize,
) -> Result<TruncatedHamiltonian, OracleError> {
    build_hamiltonian_guarded(params, cutoff, DEFAULT_MAX_ROWS)
}

pub fn build_hamiltonian_guarded(
    params: &ModelParams,
    cutoff: usize,
    max_rows: usize,
) -> Result<TruncatedHamiltonian, OracleError> {
    params.validate()?;
    if cutoff < MIN_CUTOFF {
        return Err(OracleError::CutoffTooSmall { cutoff, min: MIN_CUTOFF });
    }
    if params.omega_x == 0.0 || params.omega_y == 0.0 {
        return Err(OracleError::ZeroFrequency);
    }
    let rows = cutoff * cutoff;
    if rows > max_rows {
        return Err(OracleError::ResourceGuard { rows, limit: max_rows });
    }

    let m = params.mass;
    let ox = ModeOperators::new(cutoff, m, params.omega_x);
    let oy = ModeOperators::new(cutoff, m, params.omega_y);
    let n = cutoff;
    let idx = |a: usize, b: usize| a * n + b;
    let band = |i: usize, w: usize| i.saturating_sub(w)..(i + w + 1).min(n);

    let mut undeformed = DMatrix::<Complex64>::zeros(rows, rows);
    let mut deformation = DMatrix::<Complex64>::zeros(rows, rows);
    let coupling = Complex64::new(0.0, params.lambda);
    for i1 in 0..n {
        for i2 in 0..n {
            let row = idx(i1, i2);
            for j1 in band(i1, 4) {
                for j2 in band(i2, 4) {
                    let col = idx(j1, j2);
                    let same1 = i1 == j1;
                    let same2 = i2 == j2;
                    let mut h0 = Complex64::new(0.0, 0.0);
                    if same2 {
                        h0 += ox.oscillator[(i1, j1)];
                    }
                    if same1 {
                        h0 += oy.oscillator[(i2, j2)];
                    }
                    h0 += coupling * (ox.position[(i1, j1)] * oy.position[(i2, j2)]);
                    let mut quartic = 2.0 * ox.d2[(i1, j1)] * oy.d2[(i2, j2)];
                    if same2 {
                        quartic += ox.d4[(i1, j1)];
                    }
                    if same1 {
                        quartic += oy.d4[(i2, j2)];
                    }
                    undeformed[(row, col)] = h0;
                    deformation[(row, col)] = Complex64::new(quartic / m, 0.0);
                }
            }
        }
    }
    let matrix = &undeformed + &deformation * Complex64::new(params.beta, 0.0);
    Ok(TruncatedHamiltonian {
        cutoff,
        params: *params,
        undeformed,
        deformation,
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(lambda: f64, beta: f64) -> ModelParams {
        ModelParams::new(1.0, 1.0, 2.0, lambda, beta).unwrap()
    }

    #[test]
    fn decoupled_hamiltonian_is_diagonal() {
        let h = build_hamiltonian(&params(0.0, 0.0), 8).unwrap();
        for i in 0..h.dim() {
            for j in 0..h.dim() {
                let v = h.matrix[(i, j)];
                if i == j {
                    let s = h.state(i);
                    let want = (s.n1 as f64 + 0.5) + 2.0 * (s.n2 as f64 + 0.5);
                    assert!((v - Complex64::new(want, 0.0)).norm() < 1e-12);
                } else {
                    assert!(v.norm() < 1e-12, "({i},{j}) = {v}");
                }
            }
        }
    }

    #[test]
    fn coupling_connects_diagonal_neighbours_only() {
        let p = params(0.7, 0.0);
        let h = build_hamiltonian(&p, 10).unwrap();
        for i in 0..h.dim() {
            for j in 0..h.dim() {
                if i == j {
                    continue;
                }
                let (a, b) = (h.state(i), h.state(j));
                let d1 = a.n1.abs_diff(b.n1);
                let d2 = a.n2.abs_diff(b.n2);
                let v = h.matrix[(i, j)];
                if (d1, d2) == (1, 1) {
                    // iλ x y with x = (2mωx)^{-1/2}(a+a†), y = (2mωy)^{-1/2}(a+a†)
                    let l1 = (a.n1.max(b.n1) as f64).sqrt();
                    let l2 = (a.n2.max(b.n2) as f64).sqrt();
                    let want = 0.7 / (2.0 * (1.0f64 * 2.0).sqrt()) * l1 * l2;
                    assert!(v.re.abs() < 1e-14);
                    assert!((v.im - want).abs() < 1e-13);
                } else {
                    assert!(v.norm() < 1e-13);
                }
            }
        }
        assert!(h.symmetry_defect() < 1e-12);
    }

    #[test]
    fn deformation_band_structure() {
        let h = build_hamiltonian(&params(0.4, 0.01), 12).unwrap();
        assert!(h.symmetry_defect() < 1e-12);
        for i in 0..h.dim() {
            for j in 0..h.dim() {
                let (a, b) = (h.state(i), h.state(j));
                let d1 = a.n1.abs_diff(b.n1);
                let d2 = a.n2.abs_diff(b.n2);
                if h.deformation[(i, j)].norm() > 0.0 {
                    assert!(d1 % 2 == 0 && d2 % 2 == 0 && d1 + d2 <= 4, "{a} {b}");
                }
                if d1 > 4 || d2 > 4 {
                    assert_eq!(h.matrix[(i, j)].norm(), 0.0);
                }
            }
        }
        // Exact quartic element ⟨4|∂⁴|0⟩ = (mω/2)² √24 for the x mode.
        let row = h.index(StateIndex::new(4, 0)).unwrap();
        let col = h.index(StateIndex::new(0, 0)).unwrap();
        assert!((h.deformation[(row, col)].re - 0.25 * 24f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn guards() {
        assert!(matches!(
            build_hamiltonian(&params(0.0, 0.0), 7),
            Err(OracleError::CutoffTooSmall { .. })
        ));
        assert!(matches!(
            build_hamiltonian(&params(0.0, 0.0), 65),
            Err(OracleError::ResourceGuard { rows: 4225, limit: 4096 })
        ));
        let flat = ModelParams::new(1.0, 0.0, 2.0, 0.0, 0.0).unwrap();
        assert!(matches!(build_hamiltonian(&flat, 8), Err(OracleError::ZeroFrequency)));
    }
}
