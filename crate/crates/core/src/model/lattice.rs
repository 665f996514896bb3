//! Index of the integer lattice spanned by a finite set of vectors.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Index `[Z^d : L]` of the lattice `L` generated by some offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeIndex {
    Finite(u64),
    /// The generators have rank `< d`.
    Infinite,
}

impl LatticeIndex {
    pub fn is_full(self) -> bool {
        self == LatticeIndex::Finite(1)
    }
}

impl fmt::Display for LatticeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeIndex::Finite(k) => write!(f, "{k}"),
            LatticeIndex::Infinite => write!(f, "infinite"),
        }
    }
}

/// Reduces the generator rows to row echelon form with unimodular row
/// operations and multiplies the pivots.
///
/// Every row must have length `d`.
pub fn lattice_index(rows: &[Vec<i64>], d: usize) -> LatticeIndex {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    let mut pivot_row = 0usize;
    let mut index: i128 = 1;
    for col in 0..d {
        loop {
            // smallest non-zero |entry| in this column at or below pivot_row
            let best = (pivot_row..m.len())
                .filter(|&r| m[r][col] != 0)
                .min_by_key(|&r| m[r][col].abs());
            let Some(best) = best else { break };
            m.swap(pivot_row, best);
            let mut done = true;
            for r in pivot_row + 1..m.len() {
                if m[r][col] != 0 {
                    let q = m[r][col].div_euclid(m[pivot_row][col]);
                    for c in col..d {
                        let sub = q * m[pivot_row][c];
                        m[r][c] -= sub;
                    }
                    if m[r][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < m.len() && m[pivot_row][col] != 0 {
            index *= m[pivot_row][col].abs();
            pivot_row += 1;
        } else {
            return LatticeIndex::Infinite;
        }
    }
    match u64::try_from(index) {
        Ok(k) => LatticeIndex::Finite(k),
        Err(_) => LatticeIndex::Finite(u64::MAX),
    }
}
