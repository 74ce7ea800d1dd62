//! Mobius functions of the four partition lattices.
//!
//! Values are computed by the defining recursion with memoization. BNC and BI
//! intervals reduce to NC and IN through the `s_chi` preimage, so the memo is
//! keyed on the reduced interval only.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::partitions::{
    enumerate_interval_partitions, enumerate_noncrossing, ChiMap, SetPartition,
};

/// Which lattice an interval lives in.
#[derive(Clone, Debug)]
pub enum LatticeKind {
    Nc,
    Bnc(ChiMap),
    In,
    Bi(ChiMap),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum BaseKind {
    Nc,
    In,
}

type MemoKey = (BaseKind, Vec<usize>, Vec<usize>);

/// Memo table for Mobius values, safe for concurrent use; entries are
/// idempotent (the same interval always maps to the same value).
pub struct MobiusCache {
    memo: Mutex<HashMap<MemoKey, i64>>,
}

impl MobiusCache {
    pub fn global() -> &'static MobiusCache {
        static GLOBAL: OnceLock<MobiusCache> = OnceLock::new();
        GLOBAL.get_or_init(|| MobiusCache {
            memo: Mutex::new(HashMap::new()),
        })
    }

    pub fn mobius(&self, kind: &LatticeKind, pi: &SetPartition, sigma: &SetPartition) -> Result<i64> {
        if pi.n() != sigma.n() {
            return Err(Error::SizeMismatch {
                left: pi.n(),
                right: sigma.n(),
            });
        }
        let (base, lo, hi) = match kind {
            LatticeKind::Nc => {
                require(pi.is_noncrossing() && sigma.is_noncrossing(), "NC")?;
                (BaseKind::Nc, pi.clone(), sigma.clone())
            }
            LatticeKind::Bnc(chi) => {
                require(pi.is_bnc(chi)? && sigma.is_bnc(chi)?, "BNC")?;
                (
                    BaseKind::Nc,
                    pi.preimage_under_s(chi)?,
                    sigma.preimage_under_s(chi)?,
                )
            }
            LatticeKind::In => {
                require(pi.is_interval() && sigma.is_interval(), "IN")?;
                (BaseKind::In, pi.clone(), sigma.clone())
            }
            LatticeKind::Bi(chi) => {
                require(pi.is_bi_interval(chi)? && sigma.is_bi_interval(chi)?, "BI")?;
                (
                    BaseKind::In,
                    pi.preimage_under_s(chi)?,
                    sigma.preimage_under_s(chi)?,
                )
            }
        };
        if !lo.leq(&hi) {
            return Err(Error::NotComparable {
                lower: pi.to_string(),
                upper: sigma.to_string(),
            });
        }
        self.mu_base(base, &lo, &hi)
    }

    fn mu_base(&self, base: BaseKind, lo: &SetPartition, hi: &SetPartition) -> Result<i64> {
        if lo == hi {
            return Ok(1);
        }
        let key = (base, lo.rgs(), hi.rgs());
        if let Some(&v) = self.memo.lock().unwrap().get(&key) {
            return Ok(v);
        }
        let n = lo.n();
        let members = match base {
            BaseKind::Nc => enumerate_noncrossing(n)?,
            BaseKind::In => enumerate_interval_partitions(n)?,
        };
        // mu(lo, hi) = -sum_{lo < tau <= hi} mu(tau, hi)
        let mut total = 0i64;
        for tau in &members {
            if tau != lo && lo.leq(tau) && tau.leq(hi) {
                total += self.mu_base(base, tau, hi)?;
            }
        }
        let v = -total;
        self.memo.lock().unwrap().insert(key, v);
        Ok(v)
    }
}

fn require(ok: bool, lattice: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::NotInLattice { lattice })
    }
}

/// Mobius function of the interval `[pi, sigma]` in the given lattice.
pub fn mobius(kind: &LatticeKind, pi: &SetPartition, sigma: &SetPartition) -> Result<i64> {
    MobiusCache::global().mobius(kind, pi, sigma)
}

/// `mu_NC(pi, 1_n)` for every partition in [`enumerate_noncrossing`] order,
/// cached per `n`. This is the weight vector used by every moment-to-cumulant
/// transform.
pub fn nc_mu_top(n: usize) -> Result<Arc<Vec<i64>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return Ok(hit.clone());
    }
    let list = enumerate_noncrossing(n)?;
    let indices: Vec<Vec<usize>> = list.iter().map(|p| p.block_index()).collect();
    let sizes: Vec<usize> = list.iter().map(|p| p.num_blocks()).collect();
    // tau >= pi implies |tau| < |pi| or tau == pi, so fill coarsest first
    let mut order: Vec<usize> = (0..list.len()).collect();
    order.sort_by_key(|&i| sizes[i]);
    let mut mu = vec![0i64; list.len()];
    let leq = |a: usize, b: usize| -> bool {
        // list[a] <= list[b]: elements in one a-block share a b-block
        let ia = &indices[a];
        let ib = &indices[b];
        let mut rep = vec![usize::MAX; sizes[a]];
        for e in 0..n {
            let ba = ia[e];
            if rep[ba] == usize::MAX {
                rep[ba] = ib[e];
            } else if rep[ba] != ib[e] {
                return false;
            }
        }
        true
    };
    for &i in &order {
        if sizes[i] == 1 {
            mu[i] = 1; // the top element itself
            continue;
        }
        let mut total = 0i64;
        for &j in &order {
            if sizes[j] >= sizes[i] {
                break;
            }
            if leq(i, j) {
                total += mu[j];
            }
        }
        mu[i] = -total;
    }
    let arc = Arc::new(mu);
    Ok(cache.lock().unwrap().entry(n).or_insert(arc).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::catalan_number;

    fn nc(kind: LatticeKind) -> LatticeKind {
        kind
    }

    #[test]
    fn diagonal_is_one() {
        for n in 1..=5 {
            let one = SetPartition::full(n);
            assert_eq!(mobius(&LatticeKind::Nc, &one, &one).unwrap(), 1);
        }
    }

    #[test]
    fn two_chain_is_minus_one() {
        let zero = SetPartition::discrete(2);
        let one = SetPartition::full(2);
        assert_eq!(mobius(&LatticeKind::Nc, &zero, &one).unwrap(), -1);
    }

    #[test]
    fn bottom_to_top_nc_values() {
        // mu_NC(0_n, 1_n) = (-1)^(n-1) Catalan(n-1)
        for n in 1..=6 {
            let expected = if n % 2 == 1 { 1i64 } else { -1i64 } * catalan_number(n - 1) as i64;
            let v = mobius(
                &nc(LatticeKind::Nc),
                &SetPartition::discrete(n),
                &SetPartition::full(n),
            )
            .unwrap();
            assert_eq!(v, expected, "n={n}");
        }
        // the spec's pinned example
        assert_eq!(
            mobius(
                &LatticeKind::Nc,
                &SetPartition::discrete(4),
                &SetPartition::full(4)
            )
            .unwrap(),
            -5
        );
    }

    #[test]
    fn mobius_sum_identity_nc() {
        // sum_{pi <= tau <= sigma} mu(tau, sigma) = [pi = sigma], n <= 5
        for n in 1..=5 {
            let members = enumerate_noncrossing(n).unwrap();
            for pi in &members {
                for sigma in &members {
                    if !pi.leq(sigma) {
                        continue;
                    }
                    let mut total = 0i64;
                    for tau in &members {
                        if pi.leq(tau) && tau.leq(sigma) {
                            total += mobius(&LatticeKind::Nc, tau, sigma).unwrap();
                        }
                    }
                    assert_eq!(total, i64::from(pi == sigma), "n={n} {pi} {sigma}");
                }
            }
        }
    }

    #[test]
    fn bnc_reduces_to_nc() {
        let chi = ChiMap::parse("LRRL").unwrap();
        let members = enumerate_noncrossing(4).unwrap();
        for pi in &members {
            let image = pi.image_under_s(&chi).unwrap();
            let lhs = mobius(
                &LatticeKind::Bnc(chi.clone()),
                &image,
                &SetPartition::full(4),
            )
            .unwrap();
            let rhs = mobius(&LatticeKind::Nc, pi, &SetPartition::full(4)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn interval_lattice_closed_form_to_top() {
        for n in 1..=6 {
            for pi in enumerate_interval_partitions(n).unwrap() {
                let v = mobius(&LatticeKind::In, &pi, &SetPartition::full(n)).unwrap();
                let expected = if pi.num_blocks() % 2 == 1 { 1 } else { -1 };
                assert_eq!(v, expected, "n={n} pi={pi}");
            }
        }
    }

    #[test]
    fn bi_closed_form_to_top() {
        let chi = ChiMap::parse("LRLRL").unwrap();
        for pi in crate::partitions::enumerate_bi(&chi).unwrap() {
            let v = mobius(&LatticeKind::Bi(chi.clone()), &pi, &SetPartition::full(5)).unwrap();
            let expected = if pi.num_blocks() % 2 == 1 { 1 } else { -1 };
            assert_eq!(v, expected);
        }
    }

    #[test]
    fn incomparable_pairs_error() {
        let a = SetPartition::from_blocks_1based(3, &[&[1, 2], &[3]]).unwrap();
        let b = SetPartition::from_blocks_1based(3, &[&[1], &[2, 3]]).unwrap();
        assert!(mobius(&LatticeKind::Nc, &a, &b).is_err());
    }

    #[test]
    fn non_members_error() {
        let crossing = SetPartition::from_blocks_1based(4, &[&[1, 3], &[2, 4]]).unwrap();
        assert!(mobius(&LatticeKind::Nc, &crossing, &SetPartition::full(4)).is_err());
        let non_interval = SetPartition::from_blocks_1based(3, &[&[1, 3], &[2]]).unwrap();
        assert!(mobius(&LatticeKind::In, &non_interval, &SetPartition::full(3)).is_err());
    }

    #[test]
    fn mu_top_vector_matches_recursive_values() {
        for n in 1..=6 {
            let list = enumerate_noncrossing(n).unwrap();
            let mu = nc_mu_top(n).unwrap();
            for (i, pi) in list.iter().enumerate() {
                assert_eq!(
                    mu[i],
                    mobius(&LatticeKind::Nc, pi, &SetPartition::full(n)).unwrap()
                );
            }
        }
    }

    #[test]
    fn mu_top_matches_kreweras_product_formula() {
        // independent route: mu(pi, 1_n) = prod over blocks W of K(pi) of
        // (-1)^(|W|-1) Catalan(|W|-1)
        for n in 1..=7 {
            let list = enumerate_noncrossing(n).unwrap();
            let mu = nc_mu_top(n).unwrap();
            for (i, pi) in list.iter().enumerate() {
                let k = crate::partitions::kreweras(pi).unwrap();
                let mut expected = 1i64;
                for block in k.blocks() {
                    let m = block.len();
                    let sign = if (m - 1) % 2 == 0 { 1 } else { -1 };
                    expected *= sign * catalan_number(m - 1) as i64;
                }
                assert_eq!(mu[i], expected, "n={n} pi={pi}");
            }
        }
    }
}
