//! Set partitions of `{1..n}` and the chi-machinery of two-faced probability.
//!
//! Everything here is 0-based internally; `Display` output is 1-based to match
//! the usual combinatorial notation. The four partition families in play:
//!
//! - `P(n)`: all partitions,
//! - `NC(n)`: non-crossing partitions,
//! - `IN(n)`: interval partitions,
//! - `BNC(chi)` / `BI(chi)`: their images under the permutation `s_chi`.

mod enumerate;
mod kreweras;
mod mobius;
mod set_partition;

pub use enumerate::{
    bell_number, bi_table, bnc_table, catalan_number, enumerate_bi, enumerate_bnc,
    enumerate_interval_partitions, enumerate_noncrossing, enumerate_set_partitions, in_table,
    nc_table, nc_table_with_sizes, PartitionTable, ENUMERATION_CAP,
};
pub(crate) use enumerate::ALL_SIZES;
pub use kreweras::kreweras;
pub use mobius::{mobius, nc_mu_top, LatticeKind, MobiusCache};
pub use set_partition::SetPartition;

use std::fmt;

use crate::error::{Error, Result};

/// Left/right label of a word position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => write!(f, "L"),
            Side::Right => write!(f, "R"),
        }
    }
}

/// A map `chi: {1..n} -> {L, R}` together with its sorting permutation.
///
/// `s_chi` lists the left positions in increasing order followed by the right
/// positions in decreasing order; the order `prec_chi` on positions is the
/// order in which `s_chi` lists them.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ChiMap {
    sides: Vec<Side>,
}

impl ChiMap {
    pub fn new(sides: Vec<Side>) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::Size("chi map must have length >= 1".into()));
        }
        Ok(ChiMap { sides })
    }

    pub fn constant(n: usize, side: Side) -> Result<Self> {
        ChiMap::new(vec![side; n])
    }

    /// Parse a string like `"LRLR"`.
    pub fn parse(s: &str) -> Result<Self> {
        let sides = s
            .chars()
            .map(|c| match c {
                'L' | 'l' => Ok(Side::Left),
                'R' | 'r' => Ok(Side::Right),
                other => Err(Error::Parse {
                    at: format!("chi string `{s}`"),
                    msg: format!("unexpected character `{other}`"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        ChiMap::new(sides)
    }

    pub fn len(&self) -> usize {
        self.sides.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn side(&self, pos: usize) -> Side {
        self.sides[pos]
    }

    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    pub fn left_count(&self) -> usize {
        self.sides.iter().filter(|s| **s == Side::Left).count()
    }

    /// The permutation `s_chi` as a vector: `s[k]` is the position of
    /// prec-rank `k` (0-based).
    pub fn s_chi(&self) -> Vec<usize> {
        let mut perm = Vec::with_capacity(self.len());
        perm.extend((0..self.len()).filter(|&i| self.sides[i] == Side::Left));
        perm.extend((0..self.len()).rev().filter(|&i| self.sides[i] == Side::Right));
        perm
    }

    /// Inverse of `s_chi`: `rank[p]` is the prec-rank of position `p`.
    pub fn s_chi_rank(&self) -> Vec<usize> {
        let s = self.s_chi();
        let mut rank = vec![0; s.len()];
        for (k, &p) in s.iter().enumerate() {
            rank[p] = k;
        }
        rank
    }

    /// Bitmask with bit `i` set when position `i` is a right position.
    /// Used as a compact cache key; requires `n <= 32`.
    pub fn right_mask(&self) -> u32 {
        assert!(self.len() <= 32);
        let mut mask = 0u32;
        for (i, s) in self.sides.iter().enumerate() {
            if *s == Side::Right {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// The canonical doubling: position `k` expands to `2k-1, 2k` with the
    /// same side.
    pub fn doubled(&self) -> ChiMap {
        let mut sides = Vec::with_capacity(2 * self.len());
        for s in &self.sides {
            sides.push(*s);
            sides.push(*s);
        }
        ChiMap { sides }
    }
}

impl fmt::Display for ChiMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sides {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ChiMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Whether `join(pi, interval pairing) = 1_n`, decided by block adjacency in
/// the `s_chi` order. Requires even length and even blocks.
pub fn pairing_join_is_full(pi: &SetPartition, chi_hat: &ChiMap) -> Result<bool> {
    set_partition::pairing_join_is_full_impl(pi, chi_hat)
}
