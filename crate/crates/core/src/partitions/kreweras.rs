//! Kreweras complement on the non-crossing lattice.

use crate::error::{Error, Result};
use crate::partitions::SetPartition;

/// Kreweras complement of a non-crossing partition.
///
/// Interleave `1, 1', 2, 2', ..., n, n'`; the complement is the largest
/// non-crossing partition of the primed points whose union with `pi` stays
/// non-crossing. Concretely `i' ~ j'` (i < j) iff the window `{i+1, ..., j}`
/// is a union of blocks of `pi`.
pub fn kreweras(pi: &SetPartition) -> Result<SetPartition> {
    if !pi.is_noncrossing() {
        return Err(Error::NotInLattice { lattice: "NC" });
    }
    let n = pi.n();
    let spans: Vec<(usize, usize)> = pi
        .blocks()
        .iter()
        .map(|b| (b[0], *b.last().unwrap()))
        .collect();
    let contained_window = |lo: usize, hi: usize| -> bool {
        // every block with an element in [lo, hi] lies inside [lo, hi]
        for (bi, block) in pi.blocks().iter().enumerate() {
            let meets = block.iter().any(|&e| (lo..=hi).contains(&e));
            if meets {
                let (bmin, bmax) = spans[bi];
                if bmin < lo || bmax > hi {
                    return false;
                }
            }
        }
        true
    };
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for p in 0..n {
        for q in (p + 1)..n {
            // primes p < q join iff the window {p+1..q} (0-based) closes over pi
            if contained_window(p + 1, q) {
                let rp = find(&mut parent, p);
                let rq = find(&mut parent, q);
                if rp != rq {
                    parent[rp.max(rq)] = rp.min(rq);
                }
            }
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for e in 0..n {
        let r = find(&mut parent, e);
        blocks.entry(r).or_default().push(e);
    }
    SetPartition::new(n, blocks.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::enumerate_noncrossing;

    fn p(n: usize, blocks: &[&[usize]]) -> SetPartition {
        SetPartition::from_blocks_1based(n, blocks).unwrap()
    }

    /// Independent oracle: the unique maximal non-crossing partition of the
    /// primed points keeping the interleaved union non-crossing.
    fn kreweras_brute(pi: &SetPartition) -> SetPartition {
        let n = pi.n();
        let valid: Vec<SetPartition> = enumerate_noncrossing(n)
            .unwrap()
            .into_iter()
            .filter(|sigma| {
                // positions: element k -> 2k, prime k' -> 2k+1 (0-based)
                let mut blocks: Vec<Vec<usize>> =
                    pi.blocks().iter().map(|b| b.iter().map(|&e| 2 * e).collect()).collect();
                blocks.extend(
                    sigma
                        .blocks()
                        .iter()
                        .map(|b| b.iter().map(|&e| 2 * e + 1).collect::<Vec<_>>()),
                );
                SetPartition::new(2 * n, blocks).unwrap().is_noncrossing()
            })
            .collect();
        let max = valid
            .iter()
            .find(|cand| valid.iter().all(|other| other.leq(cand)))
            .expect("maximal complement exists");
        max.clone()
    }

    #[test]
    fn extremes() {
        for n in 1..=6 {
            assert_eq!(
                kreweras(&SetPartition::full(n)).unwrap(),
                SetPartition::discrete(n)
            );
            assert_eq!(
                kreweras(&SetPartition::discrete(n)).unwrap(),
                SetPartition::full(n)
            );
        }
    }

    #[test]
    fn pinned_example() {
        let k = kreweras(&p(4, &[&[1, 2], &[3, 4]])).unwrap();
        assert_eq!(k, p(4, &[&[1], &[2, 4], &[3]]));
    }

    #[test]
    fn crossing_input_rejected() {
        assert!(kreweras(&p(4, &[&[1, 3], &[2, 4]])).is_err());
    }

    #[test]
    fn matches_brute_force_and_counts_blocks() {
        for n in 1..=6 {
            for pi in enumerate_noncrossing(n).unwrap() {
                let k = kreweras(&pi).unwrap();
                assert_eq!(k, kreweras_brute(&pi), "pi={pi}");
                assert_eq!(pi.num_blocks() + k.num_blocks(), n + 1, "pi={pi}");
            }
        }
    }

    #[test]
    fn anti_isomorphism() {
        for n in 1..=5 {
            let all = enumerate_noncrossing(n).unwrap();
            for a in &all {
                for b in &all {
                    if a.leq(b) {
                        let ka = kreweras(a).unwrap();
                        let kb = kreweras(b).unwrap();
                        assert!(kb.leq(&ka), "a={a} b={b}");
                    }
                }
            }
        }
    }
}
