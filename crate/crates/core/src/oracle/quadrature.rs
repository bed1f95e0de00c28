//! `⟨ψ_bra|H_I|ψ_ket⟩` by Gauss–Hermite quadrature in normal coordinates.
//!
//! Independent of the ladder route: derivatives are taken pointwise through
//! `d^k/ds^k [e^{−s²/2} H_n]` and `H_n^{(j)} = 2^j n!/(n−j)! H_{n−j}`.

use num_complex::Complex64;

use super::OracleError;
use crate::hermite::{
    fourth_derivative_blocks, gauss_hermite_rule, hermite_functions, second_derivative_blocks,
    ExactPoly, QuadratureRule,
};
use crate::model::{DerivedModes, ModelParams, StateIndex};

/// Hermite polynomials normalized by `√(√π 2ⁿ n!)`, without the Gaussian.
fn normalized_hermite(count: usize, s: f64) -> Vec<f64> {
    let restore = (0.5 * s * s).exp();
    hermite_functions(count, s).into_iter().map(|v| v * restore).collect()
}

/// `∫ e^{−s²/2} h̃_a (d/ds)^k [e^{−s²/2} h̃_b] ds` for `k ∈ {0, 2, 4}`.
fn mode_integral(rule: &QuadratureRule, blocks: &[ExactPoly], a: usize, b: usize) -> f64 {
    let count = a.max(b) + 1;
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&s, &w)| {
            let h = normalized_hermite(count, s);
            let derivative: f64 = blocks
                .iter()
                .enumerate()
                .filter(|(j, _)| *j <= b)
                .map(|(j, poly)| {
                    // H_b^{(j)} in normalized form: 2^{j/2} √(b!/(b−j)!) h̃_{b−j}
                    let falling: f64 = (0..j).map(|i| (b - i) as f64).product();
                    let scale = 2f64.powf(j as f64 / 2.0) * falling.sqrt();
                    poly.eval(s) * scale * h[b - j]
                })
                .sum();
            w * h[a] * derivative
        })
        .sum()
}

/// Requires real normal-mode widths (unbroken or decoupled phase) and
/// `order ≥ max(bra_i + ket_i) + 8`.
pub fn quadrature_matrix_element(
    modes: &DerivedModes,
    bra: StateIndex,
    ket: StateIndex,
    params: &ModelParams,
    order: usize,
) -> Result<Complex64, OracleError> {
    let nm = modes.normal_modes()?;
    let real_positive = |z: Complex64| z.im == 0.0 && z.re > 0.0;
    if !real_positive(nm.alpha1_sq) || !real_positive(nm.alpha2_sq) {
        return Err(OracleError::BrokenPhaseUnsupported);
    }
    let min = (bra.n1 + ket.n1).max(bra.n2 + ket.n2) + 8;
    if order < min {
        return Err(OracleError::QuadratureOrderTooLow { order, min });
    }
    let rule = gauss_hermite_rule(order).map_err(crate::perturbation::PerturbationError::from)?;
    let identity = [ExactPoly::from_ints(&[1])];
    let second = second_derivative_blocks();
    let fourth = fourth_derivative_blocks();
    let integral = |k: usize, a: usize, b: usize| {
        let blocks: &[ExactPoly] = match k {
            0 => &identity,
            2 => &second,
            _ => &fourth,
        };
        mode_integral(&rule, blocks, a, b)
    };
    let (a1, a2) = (nm.alpha1_sq.re, nm.alpha2_sq.re);
    let value = a1 * a1 * integral(4, bra.n1, ket.n1) * integral(0, bra.n2, ket.n2)
        + a2 * a2 * integral(0, bra.n1, ket.n1) * integral(4, bra.n2, ket.n2)
        + 2.0 * a1 * a2 * integral(2, bra.n1, ket.n1) * integral(2, bra.n2, ket.n2);
    Ok(Complex64::new(value * params.beta / params.mass, 0.0))
}
