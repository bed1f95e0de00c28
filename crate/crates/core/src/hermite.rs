//! Physicists' Hermite polynomials `H_n` (weight `e^{−s²}`).
//!
//! Coefficient-level work (the fourth-derivative expansion) is done in exact
//! big-rational arithmetic; doubles appear only when evaluating.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub const DEFAULT_MAX_DEGREE: usize = 64;
pub const MAX_QUADRATURE_ORDER: usize = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HermiteError {
    #[error("Hermite degree {degree} exceeds the configured maximum {max}")]
    DegreeTooLarge { degree: usize, max: usize },
    #[error("quadrature order {0} outside 1..={MAX_QUADRATURE_ORDER}")]
    OrderOutOfRange(usize),
}

/// Evaluates `H_n` by the three-term recurrence, up to a degree limit.
#[derive(Debug, Clone, Copy)]
pub struct HermiteEvaluator {
    pub max_degree: usize,
}

impl Default for HermiteEvaluator {
    fn default() -> Self {
        Self {
            max_degree: DEFAULT_MAX_DEGREE,
        }
    }
}

impl HermiteEvaluator {
    pub fn eval(&self, n: usize, s: Complex64) -> Result<Complex64, HermiteError> {
        if n > self.max_degree {
            return Err(HermiteError::DegreeTooLarge {
                degree: n,
                max: self.max_degree,
            });
        }
        Ok(hermite_recurrence(n, s))
    }
}

fn hermite_recurrence(n: usize, s: Complex64) -> Complex64 {
    let mut prev = Complex64::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = s * 2.0;
    for k in 1..n {
        let next = s * cur * 2.0 - prev * (2.0 * k as f64);
        prev = cur;
        cur = next;
    }
    cur
}

/// `H_n(s)` with the default degree limit.
pub fn hermite_eval(n: usize, s: Complex64) -> Result<Complex64, HermiteError> {
    HermiteEvaluator::default().eval(n, s)
}

/// `H_n(s)` for real arguments, no degree limit.
pub fn hermite_real(n: usize, s: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * s;
    for k in 1..n {
        let next = 2.0 * s * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// k-th derivative of `H_n` at `s`, using `H_n' = 2n H_{n−1}`.
pub fn hermite_derivative(n: usize, k: usize, s: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    let factor: f64 = (0..k).map(|j| 2.0 * (n - j) as f64).product();
    factor * hermite_real(n - k, s)
}

/// Orthonormal Hermite functions `π^{−1/4} (2ⁿ n!)^{−1/2} e^{−s²/2} H_n(s)`
/// for `n = 0..count`, by the normalized recurrence (no overflow).
pub fn hermite_functions(count: usize, s: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(PI.powf(-0.25) * (-0.5 * s * s).exp());
    if count > 1 {
        out.push(std::f64::consts::SQRT_2 * s * out[0]);
    }
    for k in 1..count.saturating_sub(1) {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * s * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Polynomial with exact rational coefficients, index = power of `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactPoly {
    pub coefficients: Vec<BigRational>,
}

impl ExactPoly {
    pub fn from_ints(c: &[i64]) -> Self {
        Self {
            coefficients: c.iter().map(|&v| BigRational::from_integer(v.into())).collect(),
        }
    }

    pub fn degree(&self) -> Option<usize> {
        self.coefficients.iter().rposition(|c| !c.is_zero())
    }

    fn mul(&self, other: &Self) -> Self {
        if self.coefficients.is_empty() || other.coefficients.is_empty() {
            return Self { coefficients: vec![] };
        }
        let mut out = vec![BigRational::zero(); self.coefficients.len() + other.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coefficients.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { coefficients: out }
    }

    fn add_assign(&mut self, other: &Self) {
        if other.coefficients.len() > self.coefficients.len() {
            self.coefficients.resize(other.coefficients.len(), BigRational::zero());
        }
        for (a, b) in self.coefficients.iter_mut().zip(&other.coefficients) {
            *a += b;
        }
    }

    fn scaled(&self, k: &BigRational) -> Self {
        Self {
            coefficients: self.coefficients.iter().map(|c| c * k).collect(),
        }
    }

    fn derivative(&self) -> Self {
        Self {
            coefficients: self
                .coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(p, c)| c * BigRational::from_integer(BigInt::from(p)))
                .collect(),
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * s + c.to_f64().unwrap_or(f64::NAN))
    }
}

/// Exact coefficients of `H_n` from `H_{n+1} = 2s H_n − 2n H_{n−1}`.
pub fn hermite_poly(n: usize) -> ExactPoly {
    let mut prev = vec![BigInt::one()];
    if n == 0 {
        return ExactPoly {
            coefficients: prev.into_iter().map(BigRational::from_integer).collect(),
        };
    }
    let mut cur = vec![BigInt::zero(), BigInt::from(2)];
    for k in 1..n {
        let mut next = vec![BigInt::zero(); cur.len() + 1];
        for (p, c) in cur.iter().enumerate() {
            next[p + 1] += c * 2;
        }
        for (p, c) in prev.iter().enumerate() {
            next[p] -= c * BigInt::from(2 * k);
        }
        prev = cur;
        cur = next;
    }
    ExactPoly {
        coefficients: cur.into_iter().map(BigRational::from_integer).collect(),
    }
}

/// Polynomial multipliers of `H_n, H_n', H_n'', H_n''', H_n''''` in
/// `d⁴/ds⁴ [e^{−s²/2} H_n(s)] = e^{−s²/2} Σ_k block_k(s) H_n^{(k)}(s)`.
pub fn fourth_derivative_blocks() -> [ExactPoly; 5] {
    [
        ExactPoly::from_ints(&[3, 0, -6, 0, 1]),
        ExactPoly::from_ints(&[0, 12, 0, -4]),
        ExactPoly::from_ints(&[-6, 0, 6]),
        ExactPoly::from_ints(&[0, -4]),
        ExactPoly::from_ints(&[1]),
    ]
}

/// Multipliers for the second derivative:
/// `d²/ds² [e^{−s²/2} H_n] = e^{−s²/2} [(s² − 1) H_n − 2s H_n' + H_n'']`.
pub fn second_derivative_blocks() -> [ExactPoly; 3] {
    [
        ExactPoly::from_ints(&[-1, 0, 1]),
        ExactPoly::from_ints(&[0, -2]),
        ExactPoly::from_ints(&[1]),
    ]
}

/// `d⁴/ds⁴ [e^{−s²/2} H_n(s)] = e^{−s²/2} Σ_j coefficient_j H_{n+j}(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourthDerivativeExpansion {
    pub degree: usize,
    /// `(offset j, coefficient)` for every nonzero term; offsets are in
    /// `{−4, −2, 0, 2, 4}`.
    pub terms: Vec<(i64, BigRational)>,
}

impl FourthDerivativeExpansion {
    pub fn coefficient(&self, offset: i64) -> BigRational {
        self.terms
            .iter()
            .find(|(j, _)| *j == offset)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    /// Value of `d⁴/ds⁴ [e^{−s²/2} H_n(s)]` at `s`.
    pub fn eval(&self, s: f64) -> f64 {
        let poly: f64 = self
            .terms
            .iter()
            .map(|(j, c)| {
                let idx = (self.degree as i64 + j) as usize;
                c.to_f64().unwrap_or(f64::NAN) * hermite_real(idx, s)
            })
            .sum();
        poly * (-0.5 * s * s).exp()
    }
}

pub fn fourth_derivative_expansion(n: usize) -> FourthDerivativeExpansion {
    let mut derivative = hermite_poly(n);
    let mut total = ExactPoly { coefficients: vec![] };
    for block in fourth_derivative_blocks().iter() {
        total.add_assign(&block.mul(&derivative));
        derivative = derivative.derivative();
    }
    let terms = expand_in_hermite_basis(&total)
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(d, c)| (d as i64 - n as i64, c))
        .collect();
    FourthDerivativeExpansion { degree: n, terms }
}

/// Coefficients `b_d` with `p = Σ_d b_d H_d`, by peeling leading terms
/// (the leading coefficient of `H_d` is `2^d`).
fn expand_in_hermite_basis(p: &ExactPoly) -> Vec<BigRational> {
    let Some(deg) = p.degree() else {
        return vec![];
    };
    let mut rest = p.coefficients[..=deg].to_vec();
    let mut out = vec![BigRational::zero(); deg + 1];
    for d in (0..=deg).rev() {
        if rest[d].is_zero() {
            continue;
        }
        let lead = BigRational::from_integer(BigInt::one() << d);
        let c = &rest[d] / &lead;
        let h = hermite_poly(d).scaled(&c);
        for (r, hc) in rest.iter_mut().zip(&h.coefficients) {
            *r -= hc;
        }
        debug_assert!(rest[d].is_zero());
        out[d] = c;
    }
    debug_assert!(rest.iter().all(|c| c.abs().is_zero()));
    out
}

/// Gauss–Hermite rule for `∫ f(s) e^{−s²} ds`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub order: usize,
    /// Ascending.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&s, &w)| w * f(s))
            .sum()
    }
}

type RuleCache = RwLock<HashMap<usize, Arc<QuadratureRule>>>;

fn rule_cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Cached Gauss–Hermite rule of the given order.
pub fn gauss_hermite_rule(order: usize) -> Result<Arc<QuadratureRule>, HermiteError> {
    if !(1..=MAX_QUADRATURE_ORDER).contains(&order) {
        return Err(HermiteError::OrderOutOfRange(order));
    }
    if let Some(rule) = rule_cache().read().expect("rule cache poisoned").get(&order) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(compute_rule(order));
    let mut cache = rule_cache().write().expect("rule cache poisoned");
    Ok(Arc::clone(cache.entry(order).or_insert(rule)))
}

/// Nodes from the eigenvalues of the Jacobi matrix, each polished by Newton
/// iteration on the orthonormal recurrence; weights from the derivative.
fn compute_rule(n: usize) -> QuadratureRule {
    let pim4 = PI.powf(-0.25);
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i.abs_diff(j) == 1 {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut guesses: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    guesses.sort_by(f64::total_cmp);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    // Polish the non-negative half and mirror, so the rule is exactly symmetric.
    for i in 0..n.div_ceil(2) {
        let mut z = guesses[n - 1 - i].abs();
        if n % 2 == 1 && i == n / 2 {
            z = 0.0;
        }
        for _ in 0..20 {
            let (p, dp) = orthonormal_value_and_derivative(n, z, pim4);
            let step = p / dp;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, dp) = orthonormal_value_and_derivative(n, z, pim4);
        let w = 2.0 / (dp * dp);
        nodes[n - 1 - i] = z;
        nodes[i] = -z;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    QuadratureRule {
        order: n,
        nodes,
        weights,
    }
}

fn orthonormal_value_and_derivative(n: usize, z: f64, pim4: f64) -> (f64, f64) {
    let mut p1 = pim4;
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}
