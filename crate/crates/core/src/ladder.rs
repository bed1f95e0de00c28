//! Exact matrix elements of powers of `(a − a†)` in the number basis.
//!
//! Every path from `|n⟩` to `|m⟩` picks up `√(max!/min!)` times an integer,
//! so `⟨m|(a − a†)^p|n⟩ = q · √(max(m,n)! / min(m,n)!)` with integer `q`.
//! The integers are tracked exactly; the square-root factor is applied in
//! floating point only on lookup.

/// Integer prefactors of `⟨n + Δ|(a − a†)^p|n⟩` for one ket level `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderBlock {
    pub ket: usize,
    pub power: u32,
    /// `(Δ, q)` for nonzero entries, ascending in Δ.
    pub entries: Vec<(i64, i128)>,
}

impl LadderBlock {
    pub fn new(ket: usize, power: u32) -> Self {
        // amplitude at level ℓ = q · √(ℓ!/n!) for ℓ ≥ n, q · √(n!/ℓ!) for ℓ < n
        let n = ket as i64;
        let width = power as i64;
        let offset = |level: i64| (level - n + width) as usize;
        let mut amp = vec![0i128; (2 * width + 1) as usize];
        amp[offset(n)] = 1;
        for _ in 0..power {
            let mut next = vec![0i128; amp.len()];
            for (idx, &q) in amp.iter().enumerate() {
                if q == 0 {
                    continue;
                }
                let level = idx as i64 - width + n;
                // a|ℓ⟩ = √ℓ |ℓ−1⟩
                if level > 0 {
                    let factor = if level > n { level as i128 } else { 1 };
                    next[offset(level - 1)] += q * factor;
                }
                // −a†|ℓ⟩ = −√(ℓ+1) |ℓ+1⟩
                let factor = if level >= n { 1 } else { (level + 1) as i128 };
                next[offset(level + 1)] -= q * factor;
            }
            amp = next;
        }
        let entries = amp
            .iter()
            .enumerate()
            .filter(|(_, q)| **q != 0)
            .map(|(idx, &q)| (idx as i64 - width, q))
            .collect();
        Self { ket, power, entries }
    }

    pub fn prefactor(&self, delta: i64) -> i128 {
        self.entries
            .iter()
            .find(|(d, _)| *d == delta)
            .map_or(0, |(_, q)| *q)
    }
}

/// `√(max!/min!)` as a float.
fn sqrt_factorial_ratio(a: usize, b: usize) -> f64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    ((lo + 1)..=hi).map(|k| k as f64).product::<f64>().sqrt()
}

/// `⟨bra|(a − a†)^power|ket⟩`.
pub fn ladder_element(power: u32, bra: usize, ket: usize) -> f64 {
    let delta = bra as i64 - ket as i64;
    if delta.unsigned_abs() > power as u64 || (delta + power as i64) % 2 != 0 {
        return 0.0;
    }
    let q = LadderBlock::new(ket, power).prefactor(delta);
    if q == 0 {
        return 0.0;
    }
    q as f64 * sqrt_factorial_ratio(bra, ket)
}
