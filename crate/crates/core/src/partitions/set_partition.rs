//! Set partitions in canonical form, order relations, joins, and the chi
//! predicates.

use std::fmt;

use crate::error::{Error, Result};
use crate::partitions::ChiMap;

/// A partition of `{0..n-1}` into disjoint nonempty blocks.
///
/// Canonical form: blocks sorted by their minimum element, elements ascending
/// inside each block. All constructors normalize to this form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Size("partition ground set must be nonempty".into()));
        }
        let mut seen = vec![false; n];
        let mut canon: Vec<Vec<usize>> = Vec::with_capacity(blocks.len());
        for block in blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            let mut b = block;
            b.sort_unstable();
            for &e in &b {
                if e >= n {
                    return Err(Error::InvalidPartition(format!(
                        "element {} out of range for n={}",
                        e + 1,
                        n
                    )));
                }
                if seen[e] {
                    return Err(Error::InvalidPartition(format!(
                        "element {} appears twice",
                        e + 1
                    )));
                }
                seen[e] = true;
            }
            b.dedup();
            canon.push(b);
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidPartition("blocks do not cover {1..n}".into()));
        }
        canon.sort_by_key(|b| b[0]);
        Ok(SetPartition { n, blocks: canon })
    }

    /// Build from 1-based block notation, handy in tests.
    pub fn from_blocks_1based(n: usize, blocks: &[&[usize]]) -> Result<Self> {
        let shifted = blocks
            .iter()
            .map(|b| b.iter().map(|&e| e - 1).collect())
            .collect();
        SetPartition::new(n, shifted)
    }

    /// The discrete partition (all singletons), the bottom of the lattice.
    pub fn discrete(n: usize) -> Self {
        SetPartition {
            n,
            blocks: (0..n).map(|i| vec![i]).collect(),
        }
    }

    /// The one-block partition `1_n`, the top of the lattice.
    pub fn full(n: usize) -> Self {
        SetPartition {
            n,
            blocks: vec![(0..n).collect()],
        }
    }

    /// The interval pairing `{{1,2},{3,4},...}`; requires even `n`.
    pub fn interval_pairing(n: usize) -> Result<Self> {
        if n == 0 || n % 2 != 0 {
            return Err(Error::Size(format!("interval pairing needs even n, got {n}")));
        }
        Ok(SetPartition {
            n,
            blocks: (0..n / 2).map(|k| vec![2 * k, 2 * k + 1]).collect(),
        })
    }

    /// Build from a restricted-growth string: `rgs[i]` is the block index of
    /// element `i`, blocks numbered by first appearance.
    pub fn from_rgs(rgs: &[usize]) -> Result<Self> {
        if rgs.is_empty() {
            return Err(Error::Size("empty restricted growth string".into()));
        }
        let k = rgs.iter().max().unwrap() + 1;
        let mut blocks = vec![Vec::new(); k];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        SetPartition::new(rgs.len(), blocks)
    }

    /// The restricted-growth string of this partition.
    pub fn rgs(&self) -> Vec<usize> {
        let idx = self.block_index();
        // canonical block order is by minimum, which is first-appearance order
        idx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Element-to-block-id lookup (block ids follow canonical order).
    pub fn block_index(&self) -> Vec<usize> {
        let mut idx = vec![0; self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &e in block {
                idx[e] = b;
            }
        }
        idx
    }

    pub fn same_block(&self, a: usize, b: usize) -> bool {
        let idx = self.block_index();
        idx[a] == idx[b]
    }

    /// No `a < b < c < d` with `a, c` in one block and `b, d` in another.
    pub fn is_noncrossing(&self) -> bool {
        let idx = self.block_index();
        // scan left to right keeping a stack of open blocks; an element may
        // only continue the block currently on top
        let mut stack: Vec<usize> = Vec::new();
        let mut remaining: Vec<usize> = self.blocks.iter().map(|b| b.len()).collect();
        for &b in &idx {
            if stack.last() == Some(&b) {
                // continues the top block
            } else if remaining[b] == self.blocks[b].len() {
                stack.push(b);
            } else {
                return false;
            }
            remaining[b] -= 1;
            if remaining[b] == 0 {
                stack.pop();
            }
        }
        true
    }

    /// Every block is a set of consecutive integers.
    pub fn is_interval(&self) -> bool {
        self.blocks
            .iter()
            .all(|b| b.last().unwrap() - b[0] + 1 == b.len())
    }

    /// Member of `BNC(chi)`: the `s_chi`-preimage is non-crossing.
    pub fn is_bnc(&self, chi: &ChiMap) -> Result<bool> {
        Ok(self.preimage_under_s(chi)?.is_noncrossing())
    }

    /// Member of `BI(chi)`: every block is an interval in the prec order,
    /// equivalently the `s_chi`-preimage is an interval partition.
    pub fn is_bi_interval(&self, chi: &ChiMap) -> Result<bool> {
        Ok(self.preimage_under_s(chi)?.is_interval())
    }

    /// `s_chi . pi`: map every element through `s_chi` (rank -> position).
    pub fn image_under_s(&self, chi: &ChiMap) -> Result<SetPartition> {
        self.apply_map(chi, &chi.s_chi())
    }

    /// `s_chi^{-1} . pi`: map every element to its prec rank.
    pub fn preimage_under_s(&self, chi: &ChiMap) -> Result<SetPartition> {
        self.apply_map(chi, &chi.s_chi_rank())
    }

    fn apply_map(&self, chi: &ChiMap, map: &[usize]) -> Result<SetPartition> {
        if chi.len() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: chi.len(),
            });
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&e| map[e]).collect())
            .collect();
        SetPartition::new(self.n, blocks)
    }

    /// Refinement order: every block of `self` lies inside a block of `other`.
    pub fn leq(&self, other: &SetPartition) -> bool {
        if self.n != other.n {
            return false;
        }
        let idx = other.block_index();
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&e| idx[e] == idx[b[0]]))
    }

    /// Smallest common coarsening in the full partition lattice.
    pub fn join(&self, other: &SetPartition) -> Result<SetPartition> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut uf = UnionFind::new(self.n);
        for p in [self, other] {
            for block in &p.blocks {
                for w in block.windows(2) {
                    uf.union(w[0], w[1]);
                }
            }
        }
        uf.into_partition()
    }

    /// Largest common refinement (blockwise intersections).
    pub fn meet(&self, other: &SetPartition) -> Result<SetPartition> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let a = self.block_index();
        let b = other.block_index();
        let mut blocks: std::collections::BTreeMap<(usize, usize), Vec<usize>> =
            std::collections::BTreeMap::new();
        for e in 0..self.n {
            blocks.entry((a[e], b[e])).or_default().push(e);
        }
        SetPartition::new(self.n, blocks.into_values().collect())
    }

    /// Restriction of the partition to a subset, reindexed to `{0..k-1}` by
    /// the subset's increasing order.
    pub fn restrict(&self, subset: &[usize]) -> SetPartition {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &e) in subset.iter().enumerate() {
            pos[e] = i;
        }
        let mut blocks = Vec::new();
        for block in &self.blocks {
            let b: Vec<usize> = block
                .iter()
                .map(|&e| pos[e])
                .filter(|&x| x != usize::MAX)
                .collect();
            if !b.is_empty() {
                blocks.push(b);
            }
        }
        SetPartition::new(subset.len(), blocks).expect("restriction is a valid partition")
    }
}

/// Join with the interval pairing reaching the top, via the adjacency
/// criterion on `s_chi` ranks; agrees with `join(pi, pairing) == 1_n` on even
/// inputs.
pub(crate) fn pairing_join_is_full_impl(pi: &SetPartition, chi: &ChiMap) -> Result<bool> {
    let n = pi.n();
    if n % 2 != 0 {
        return Err(Error::Size(format!("need even length, got {n}")));
    }
    if chi.len() != n {
        return Err(Error::SizeMismatch {
            left: n,
            right: chi.len(),
        });
    }
    if let Some(b) = pi.blocks().iter().find(|b| b.len() % 2 != 0) {
        return Err(Error::InvalidPartition(format!(
            "odd block {:?} present",
            b.iter().map(|e| e + 1).collect::<Vec<_>>()
        )));
    }
    let s = chi.s_chi();
    let idx = pi.block_index();
    if idx[s[0]] != idx[s[n - 1]] {
        return Ok(false);
    }
    for i in 1..n / 2 {
        // 1-based s(2i) ~ s(2i+1)
        if idx[s[2 * i - 1]] != idx[s[2 * i]] {
            return Ok(false);
        }
    }
    Ok(true)
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, e) in block.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", e + 1)?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    fn into_partition(mut self) -> Result<SetPartition> {
        let n = self.parent.len();
        let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> =
            std::collections::BTreeMap::new();
        for e in 0..n {
            let r = self.find(e);
            blocks.entry(r).or_default().push(e);
        }
        SetPartition::new(n, blocks.into_values().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, blocks: &[&[usize]]) -> SetPartition {
        SetPartition::from_blocks_1based(n, blocks).unwrap()
    }

    #[test]
    fn canonical_form() {
        let a = p(4, &[&[3, 1], &[4, 2]]);
        assert_eq!(a.to_string(), "{{1,3},{2,4}}");
    }

    #[test]
    fn invalid_partitions_rejected() {
        assert!(SetPartition::new(3, vec![vec![0, 1]]).is_err()); // misses 2
        assert!(SetPartition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err()); // overlap
        assert!(SetPartition::new(0, vec![]).is_err());
    }

    #[test]
    fn noncrossing_predicate() {
        assert!(!p(4, &[&[1, 3], &[2, 4]]).is_noncrossing()); // the minimal crossing
        assert!(p(4, &[&[1, 4], &[2, 3]]).is_noncrossing()); // nested
        assert!(p(5, &[&[1, 5], &[2, 3], &[4]]).is_noncrossing());
        assert!(!p(6, &[&[1, 4], &[2, 5], &[3, 6]]).is_noncrossing());
        assert!(p(1, &[&[1]]).is_noncrossing());
    }

    #[test]
    fn interval_predicate() {
        assert!(p(3, &[&[1, 2], &[3]]).is_interval());
        assert!(!p(3, &[&[1, 3], &[2]]).is_interval());
    }

    #[test]
    fn bnc_reduces_to_nc_for_all_left() {
        let chi = ChiMap::parse("LLLL").unwrap();
        for pi in [p(4, &[&[1, 3], &[2, 4]]), p(4, &[&[1, 4], &[2, 3]])] {
            assert_eq!(pi.is_bnc(&chi).unwrap(), pi.is_noncrossing());
        }
    }

    #[test]
    fn bnc_example_lrlr() {
        // chi = (L,R,L,R): s = (1,3,4,2) 1-based; {{1,3},{2,4}} pulls back to
        // {{1,2},{3,4}}, which is non-crossing.
        let chi = ChiMap::parse("LRLR").unwrap();
        let pi = p(4, &[&[1, 3], &[2, 4]]);
        assert!(pi.is_bnc(&chi).unwrap());
        assert_eq!(
            pi.preimage_under_s(&chi).unwrap(),
            p(4, &[&[1, 2], &[3, 4]])
        );
    }

    #[test]
    fn join_examples() {
        let a = p(4, &[&[1, 2], &[3, 4]]);
        assert_eq!(a.join(&a).unwrap(), a);
        let b = p(4, &[&[2, 3], &[1], &[4]]);
        assert_eq!(a.join(&b).unwrap(), SetPartition::full(4));
        let d = SetPartition::discrete(4);
        assert_eq!(d.join(&b).unwrap(), b);
    }

    #[test]
    fn pairing_join_examples() {
        let chi = ChiMap::parse("LLLL").unwrap();
        assert!(pairing_join_is_full_impl(&p(4, &[&[1, 4], &[2, 3]]), &chi).unwrap());
        assert!(!pairing_join_is_full_impl(&p(4, &[&[1, 2], &[3, 4]]), &chi).unwrap());
        assert!(pairing_join_is_full_impl(&SetPartition::full(4), &chi).unwrap());
        assert!(pairing_join_is_full_impl(&p(2, &[&[1, 2]]), &ChiMap::parse("LR").unwrap()).unwrap());
        // odd block errors
        assert!(pairing_join_is_full_impl(&p(4, &[&[1], &[2, 3, 4]]), &chi).is_err());
    }

    #[test]
    fn restriction_reindexes() {
        let pi = p(5, &[&[1, 4], &[2, 3], &[5]]);
        let r = pi.restrict(&[0, 2, 3, 4]); // keep 1,3,4,5 (1-based)
        assert_eq!(r.to_string(), "{{1,3},{2},{4}}");
    }
}
