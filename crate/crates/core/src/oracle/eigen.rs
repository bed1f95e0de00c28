//! Dense eigenvalue solver for general (non-Hermitian) complex matrices.
//!
//! Eigenvalues come from a Householder reduction to upper Hessenberg form
//! followed by single-shift implicit QR sweeps with Wilkinson shifts and
//! aggressive-free (classic) deflation. Eigenvectors are recovered on demand
//! by shifted inverse iteration against an LU factorization of the original
//! matrix.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("QR iteration did not converge after {sweeps} sweeps ({remaining} eigenvalues left)")]
    ConvergenceFailure { sweeps: usize, remaining: usize },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("inverse iteration for eigenvalue {value} did not reach residual {tolerance:e} (got {residual:e})")]
    InverseIteration {
        value: Complex64,
        residual: f64,
        tolerance: f64,
    },
}

/// Row-major square scratch matrix. Row operations dominate the QR sweeps,
/// so this layout beats nalgebra's column-major storage here.
struct RowMajor {
    n: usize,
    data: Vec<Complex64>,
}

impl RowMajor {
    fn from_dmatrix(a: &DMatrix<Complex64>) -> Self {
        let n = a.nrows();
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = a[(i, j)];
            }
        }
        Self { n, data }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    /// Mutable views of two distinct rows, `p < q`.
    fn two_rows(&mut self, p: usize, q: usize) -> (&mut [Complex64], &mut [Complex64]) {
        debug_assert!(p < q);
        let n = self.n;
        let (head, tail) = self.data.split_at_mut(q * n);
        (&mut head[p * n..(p + 1) * n], &mut tail[..n])
    }
}

/// Plane rotation `[[c, s], [-conj(s), c]]` with real `c`.
#[derive(Clone, Copy, Debug)]
struct Givens {
    c: f64,
    s: Complex64,
}

impl Givens {
    /// Rotation that maps `(a, b)` onto `(r, 0)`.
    fn zeroing(a: Complex64, b: Complex64) -> Self {
        let abs_a = a.norm();
        let abs_b = b.norm();
        if abs_b == 0.0 {
            return Self { c: 1.0, s: ZERO };
        }
        if abs_a == 0.0 {
            return Self {
                c: 0.0,
                s: b.conj() / abs_b,
            };
        }
        let r = abs_a.hypot(abs_b);
        let phase = a / abs_a;
        Self {
            c: abs_a / r,
            s: phase * b.conj() / r,
        }
    }

    #[inline]
    fn rotate(&self, x: Complex64, y: Complex64) -> (Complex64, Complex64) {
        (
            x * self.c + self.s * y,
            -self.s.conj() * x + y * self.c,
        )
    }

    /// Right multiplication by the conjugate transpose on a row pair `(x, y)`.
    #[inline]
    fn rotate_adjoint(&self, x: Complex64, y: Complex64) -> (Complex64, Complex64) {
        (
            x * self.c + y * self.s.conj(),
            -x * self.s + y * self.c,
        )
    }
}

/// Householder similarity reduction to upper Hessenberg form, in place.
fn reduce_to_hessenberg(a: &mut RowMajor) {
    let n = a.n;
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    let mut w = vec![ZERO; n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let mut norm_sq = 0.0;
        for i in 0..len {
            let x = a.at(k + 1 + i, k);
            v[i] = x;
            norm_sq += x.norm_sqr();
        }
        let tail_sq = norm_sq - v[0].norm_sqr();
        if tail_sq <= f64::MIN_POSITIVE {
            continue;
        }
        let norm = norm_sq.sqrt();
        let x0 = v[0];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        v[0] = x0 - alpha;
        let v_norm_sq = v[..len].iter().map(|z| z.norm_sqr()).sum::<f64>();
        let tau = 2.0 / v_norm_sq;

        // Left: rows k+1.., columns k..
        for j in k..n {
            w[j] = ZERO;
        }
        for i in 0..len {
            let vi = v[i].conj();
            let row = &a.data[(k + 1 + i) * n..(k + 2 + i) * n];
            for j in k..n {
                w[j] += vi * row[j];
            }
        }
        for i in 0..len {
            let f = v[i] * tau;
            let row = &mut a.data[(k + 1 + i) * n..(k + 2 + i) * n];
            for j in k..n {
                row[j] -= f * w[j];
            }
        }
        // Right: all rows, columns k+1..
        for i in 0..n {
            let row = &mut a.data[i * n..(i + 1) * n];
            let mut s = ZERO;
            for (r, vj) in row[k + 1..].iter().zip(&v[..len]) {
                s += r * vj;
            }
            let f = s * tau;
            for (r, vj) in row[k + 1..].iter_mut().zip(&v[..len]) {
                *r -= f * vj.conj();
            }
        }
        a.set(k + 1, k, alpha);
        for i in k + 2..n {
            a.set(i, k, ZERO);
        }
    }
}

/// Eigenvalue of the trailing 2x2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let e1 = mean + disc;
    let e2 = mean - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Eigenvalues of a Hessenberg matrix by single-shift implicit QR.
fn hessenberg_qr(h: &mut RowMajor) -> Result<Vec<Complex64>, EigenError> {
    let n = h.n;
    let mut eig = vec![ZERO; n];
    if n == 0 {
        return Ok(eig);
    }
    let eps = f64::EPSILON;
    let max_sweeps = 30 * n.max(10);
    let mut total_sweeps = 0usize;
    let mut hi = n - 1;
    let mut its = 0usize;
    loop {
        // Locate the start of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let sub = h.at(lo, lo - 1).norm();
            let mut scale = h.at(lo, lo).norm() + h.at(lo - 1, lo - 1).norm();
            if scale == 0.0 {
                scale = (lo.saturating_sub(1)..=hi.min(n - 1))
                    .map(|k| h.at(k, k).norm())
                    .fold(0.0, f64::max);
            }
            if sub <= eps * scale || sub < f64::MIN_POSITIVE {
                h.set(lo, lo - 1, ZERO);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h.at(hi, hi);
            its = 0;
            if hi == 0 {
                break;
            }
            hi -= 1;
            continue;
        }
        if total_sweeps >= max_sweeps {
            return Err(EigenError::ConvergenceFailure {
                sweeps: total_sweeps,
                remaining: hi + 1,
            });
        }
        total_sweeps += 1;
        its += 1;

        let shift = if its % 11 == 10 {
            // Exceptional shift to break cycling.
            h.at(hi, hi) + Complex64::new(0.75 * h.at(hi, hi - 1).norm(), 0.0)
        } else {
            wilkinson_shift(
                h.at(hi - 1, hi - 1),
                h.at(hi - 1, hi),
                h.at(hi, hi - 1),
                h.at(hi, hi),
            )
        };

        // Implicit single-shift sweep over the active window [lo, hi].
        let mut x = h.at(lo, lo) - shift;
        let mut y = h.at(lo + 1, lo);
        for k in lo..hi {
            let g = Givens::zeroing(x, y);
            let col_start = if k > lo { k - 1 } else { lo };
            {
                let (rp, rq) = h.two_rows(k, k + 1);
                for j in col_start..=hi {
                    let (a, b) = g.rotate(rp[j], rq[j]);
                    rp[j] = a;
                    rq[j] = b;
                }
            }
            if k > lo {
                h.set(k + 1, k - 1, ZERO);
            }
            let row_end = (k + 2).min(hi);
            for i in lo..=row_end {
                let (a, b) = g.rotate_adjoint(h.at(i, k), h.at(i, k + 1));
                h.set(i, k, a);
                h.set(i, k + 1, b);
            }
            if k + 1 < hi {
                x = h.at(k + 1, k);
                y = h.at(k + 2, k);
            }
        }
    }
    Ok(eig)
}

/// All eigenvalues of a square complex matrix, in no particular order.
pub fn eigenvalues(a: &DMatrix<Complex64>) -> Result<Vec<Complex64>, EigenError> {
    assert_eq!(a.nrows(), a.ncols(), "eigenvalues of a non-square matrix");
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(EigenError::NonFinite);
    }
    let mut h = RowMajor::from_dmatrix(a);
    reduce_to_hessenberg(&mut h);
    hessenberg_qr(&mut h)
}

/// Right eigenvector for a (previously computed) eigenvalue, normalized to
/// unit Euclidean norm.
///
/// `start` seeds the iteration; inside a degenerate eigenspace the result is
/// the spectral projection of the seed.
pub fn eigenvector(
    a: &DMatrix<Complex64>,
    value: Complex64,
    start: Option<&DVector<Complex64>>,
) -> Result<DVector<Complex64>, EigenError> {
    let n = a.nrows();
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    // Nudge the shift off the exact eigenvalue so the factorization stays
    // nonsingular; the nudge still leaves a huge amplification factor.
    let nudge = Complex64::new(scale * 1e-13, scale * 1e-13);
    let shifted = a - DMatrix::<Complex64>::identity(n, n) * (value + nudge);
    let lu = shifted.lu();
    let mut v = match start {
        Some(s) => s.clone(),
        None => DVector::from_fn(n, |i, _| {
            Complex64::new(1.0 + (i as f64 * 0.618_033_988).fract(), 0.1)
        }),
    };
    let tolerance = 1e-10 * scale;
    let mut residual = f64::INFINITY;
    for _ in 0..4 {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            break;
        }
        v /= Complex64::new(norm, 0.0);
        match lu.solve(&v) {
            Some(next) => v = next,
            None => break,
        }
        let norm = v.norm();
        v /= Complex64::new(norm, 0.0);
        residual = (a * &v - &v * value).norm();
        if residual < tolerance {
            return Ok(v);
        }
    }
    Err(EigenError::InverseIteration {
        value,
        residual,
        tolerance,
    })
}
