//! Enumeration oracles shared by the integration and acceptance targets.

#![allow(dead_code)]

pub fn reverse_bits(i: usize, n: u32) -> usize {
    (0..n).fold(0, |acc, b| acc | (((i >> b) & 1) << (n - 1 - b)))
}

/// Row `i` of the transform as a position mask: `{j : j ⊆ i}`.
pub fn primal_row(i: usize, len: usize) -> u32 {
    (0..len).filter(|&j| j & !i == 0).fold(0, |m, j| m | 1 << j)
}

/// Row `i` of the transposed transform: `{j : i ⊆ j}`.
pub fn dual_row(i: usize, len: usize) -> u32 {
    (0..len).filter(|&j| i & !j == 0).fold(0, |m, j| m | 1 << j)
}

/// GF(2) basis keyed by the highest set bit.
#[derive(Default)]
pub struct Basis(pub [u32; 32]);

impl Basis {
    /// Inserts `v`; returns false when it was already in the span.
    pub fn insert(&mut self, mut v: u32) -> bool {
        while v != 0 {
            let top = 31 - v.leading_zeros() as usize;
            if self.0[top] == 0 {
                self.0[top] = v;
                return true;
            }
            v ^= self.0[top];
        }
        false
    }
}

/// Per-input erasure probability of genie-aided sequential decoding: `u_i` is
/// lost exactly when its restricted row lies in the span of the rows decoded
/// after it.
pub fn enumerate_profile(n: u32, eps: f64, rows: &[u32], order: &[usize]) -> Vec<f64> {
    let len = 1usize << n;
    // counts[i][k]: patterns with k erasures that lose u_i.
    let mut counts = vec![vec![0u64; len + 1]; len];
    for erased in 0u64..1 << len {
        let k = erased.count_ones() as usize;
        let seen = !(erased as u32) & ((1u64 << len) - 1) as u32;
        let mut basis = Basis::default();
        for &i in order.iter().rev() {
            if !basis.insert(rows[i] & seen) {
                counts[i][k] += 1;
            }
        }
    }
    counts
        .iter()
        .map(|c| {
            c.iter()
                .enumerate()
                .map(|(k, &m)| m as f64 * eps.powi(k as i32) * (1.0 - eps).powi((len - k) as i32))
                .sum()
        })
        .collect()
}

pub fn standard_order(n: u32) -> Vec<usize> {
    (0..1usize << n).map(|p| reverse_bits(p, n)).collect()
}

/// Minimum nonzero weight over the span of `rows`, by Gray-code enumeration.
pub fn exhaustive_min_weight(rows: &[u32]) -> u32 {
    let mut word = 0u32;
    let mut best = u32::MAX;
    for g in 1u64..1 << rows.len() {
        word ^= rows[g.trailing_zeros() as usize];
        best = best.min(word.count_ones());
    }
    best
}

