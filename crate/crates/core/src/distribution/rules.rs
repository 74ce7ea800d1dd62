//! The named distribution constructions, as lazy moment rules.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};


use crate::cumulants::{
    cumulants_to_moment, CumulantCache, CumulantRule, TransformKind,
};
use crate::distribution::{BiCircularSpec, Flags, MomentRule, MomentTable};
use crate::error::{Error, Result};
use crate::ncpoly::{Alphabet, ArcAlphabet, Letter, Word};
use crate::partitions::{nc_mu_top, nc_table, Side};
use crate::scalar::Scalar;

/// Moments reconstructed from a cumulant rule over the kind's lattice.
pub(crate) struct CumulantMomentRule<S: Scalar> {
    pub(crate) kind: TransformKind,
    pub(crate) rule: Arc<dyn CumulantRule<S>>,
    pub(crate) alphabet: ArcAlphabet,
}

impl<S: Scalar> MomentRule<S> for CumulantMomentRule<S> {
    fn eval(&self, word: &Word) -> Result<S> {
        cumulants_to_moment(self.kind, self.rule.as_ref(), &self.alphabet, word)
    }
}

struct BiCircularRule<S: Scalar> {
    spec: BiCircularSpec<S>,
}

impl<S: Scalar> CumulantRule<S> for BiCircularRule<S> {
    fn eval(&self, word: &Word) -> Result<S> {
        if word.len() != 2 {
            return Ok(S::zero());
        }
        let a = word.letters()[0];
        let b = word.letters()[1];
        if a.starred() == b.starred() {
            return Ok(S::zero());
        }
        let side = |l: Letter| l.side().expect("pair alphabets are sided");
        Ok(self.spec.value(side(a), side(b)))
    }

    fn size_mask(&self) -> u16 {
        1 << 2
    }
}

/// Distribution of a bi-circular pair: the only nonvanishing bi-free
/// cumulants are order two with exactly one starred argument, with values
/// from the covariance matrix.
pub fn bi_circular<S: Scalar>(
    spec: BiCircularSpec<S>,
    degree: usize,
    left: &str,
    right: &str,
) -> Result<MomentTable<S>> {
    let alphabet = Alphabet::pair(left, right)?;
    let rule = Arc::new(BiCircularRule { spec });
    Ok(
        MomentTable::from_bifree_cumulants(rule, alphabet, degree).with_flags(Flags {
            star_symmetric: true,
            ..Flags::default()
        }),
    )
}

struct BiHaarRule;

impl<S: Scalar> MomentRule<S> for BiHaarRule {
    fn eval(&self, word: &Word) -> Result<S> {
        // sides commute and u u* = u* u = 1 on each side, so the word reduces
        // to u_l^a u_r^b with a, b the signed letter counts
        let mut total = 0i64;
        for l in word.letters() {
            total += if l.starred() { -1 } else { 1 };
        }
        Ok(if total == 0 { S::one() } else { S::zero() })
    }
}

/// The bi-Haar unitary pair: `phi(u_l^n u_r^m) = 1` iff `n + m = 0`.
pub fn bi_haar<S: Scalar>(degree: usize, left: &str, right: &str) -> Result<MomentTable<S>> {
    let alphabet = Alphabet::pair(left, right)?;
    Ok(
        MomentTable::from_rule(alphabet, degree, Flags::default(), Arc::new(BiHaarRule))
            .with_flags(Flags {
                tracial: true,
                star_symmetric: true,
                ..Flags::default()
            }),
    )
}

struct LrPairRule<S: Scalar> {
    inner: MomentTable<S>,
}

impl<S: Scalar> MomentRule<S> for LrPairRule<S> {
    fn eval(&self, word: &Word) -> Result<S> {
        // phi(Z_{chi(1)} ... Z_{chi(n)}) = phi(z reordered by s_chi)
        let sides: Vec<Side> = word
            .letters()
            .iter()
            .map(|l| l.side().expect("pair alphabet is sided"))
            .collect();
        let chi = crate::partitions::ChiMap::new(sides)?;
        let s = chi.s_chi();
        let unsided = Word::from_letters(
            s.iter()
                .map(|&p| word.letters()[p])
                .map(|l| Letter::pack(l.symbol(), l.starred(), None)),
        );
        self.inner.phi(&unsided)
    }
}

/// Left-right pair of a tracial single-variable table: the pair distribution
/// whose sided moments are the trace of the `s_chi`-reordered word.
pub fn lr_pair<S: Scalar>(mu_single: &MomentTable<S>, degree: usize) -> Result<MomentTable<S>> {
    if mu_single.alphabet().len() != 2
        || mu_single.alphabet().symbols().any(|(_, side)| side.is_some())
    {
        return Err(Error::WrongAlphabetShape(
            "lr_pair needs two unsided symbols".into(),
        ));
    }
    if !mu_single.flags().tracial {
        return Err(Error::NonTracial {
            word: "<tracial flag not set>".into(),
            rotated: String::new(),
        });
    }
    mu_single.restrict_degree(degree).validate_tracial()?;
    if degree > mu_single.degree() {
        return Err(Error::DegreeOverflow {
            len: degree,
            cap: mu_single.degree(),
        });
    }
    let names: Vec<String> = mu_single
        .alphabet()
        .symbols()
        .map(|(n, _)| n.to_string())
        .collect();
    let alphabet = Alphabet::pair(&names[0], &names[1])?;
    let rule = LrPairRule {
        inner: mu_single.clone(),
    };
    Ok(MomentTable::from_rule(
        alphabet,
        degree,
        Flags::default(),
        Arc::new(rule),
    ))
}

struct JoinCumulantRule<S: Scalar> {
    left: CumulantCache<S>,
    right: CumulantCache<S>,
    offset: usize,
}

impl<S: Scalar> CumulantRule<S> for JoinCumulantRule<S> {
    fn eval(&self, word: &Word) -> Result<S> {
        let mut any_left = false;
        let mut any_right = false;
        for l in word.letters() {
            if l.symbol() < self.offset {
                any_left = true;
            } else {
                any_right = true;
            }
        }
        if any_left && any_right {
            return Ok(S::zero());
        }
        if any_left {
            self.left.eval(word)
        } else {
            let shifted = Word::from_letters(
                word.letters()
                    .iter()
                    .map(|l| Letter::pack(l.symbol() - self.offset, l.starred(), l.side())),
            );
            self.right.eval(&shifted)
        }
    }
}

/// Joint distribution with the two families *-bi-free: each family keeps its
/// own bi-free cumulants and every mixed cumulant vanishes.
pub fn bifree_join<S: Scalar>(
    mu1: &MomentTable<S>,
    mu2: &MomentTable<S>,
    degree: usize,
) -> Result<MomentTable<S>> {
    if degree > mu1.degree() || degree > mu2.degree() {
        return Err(Error::DegreeOverflow {
            len: degree,
            cap: mu1.degree().min(mu2.degree()),
        });
    }
    let (alphabet, offset) = mu1.alphabet().union(mu2.alphabet())?;
    let rule = Arc::new(JoinCumulantRule {
        left: CumulantCache::new(TransformKind::Bifree, mu1.clone()),
        right: CumulantCache::new(TransformKind::Bifree, mu2.clone()),
        offset,
    });
    Ok(MomentTable::from_bifree_cumulants(rule, alphabet, degree))
}

/// Moment sequences of the unitaries available for multiplication tests.
#[derive(Clone, Debug)]
pub enum UnitaryMoments<S: Scalar> {
    /// `phi(u^k) = [k = 0]`.
    Haar,
    /// Symmetric Bernoulli unitary, `u = u*`, `phi(u^k) = [k even]`.
    Bernoulli,
    /// Scalar phase `u = z`, `|z| = 1`: `phi(u^k) = z^k`.
    Phase(S),
}

impl<S: Scalar> UnitaryMoments<S> {
    fn moment(&self, k: i64) -> S {
        match self {
            UnitaryMoments::Haar => {
                if k == 0 {
                    S::one()
                } else {
                    S::zero()
                }
            }
            UnitaryMoments::Bernoulli => {
                if k % 2 == 0 {
                    S::one()
                } else {
                    S::zero()
                }
            }
            UnitaryMoments::Phase(z) => {
                let base = if k >= 0 { z.clone() } else { z.conj() };
                let mut acc = S::one();
                for _ in 0..k.unsigned_abs() {
                    acc = acc * base.clone();
                }
                acc
            }
        }
    }
}

enum FpLetter {
    U { starred: bool },
    Inner(Letter),
}

struct FreeProductRule<S: Scalar> {
    inner: MomentTable<S>,
    unitary: UnitaryMoments<S>,
    kappa_memo: RwLock<HashMap<Vec<bool>, S>>,
}

impl<S: Scalar> FreeProductRule<S> {
    /// Free cumulant of `(u^{e_1}, ..., u^{e_m})` for the unitary, computed
    /// from its moment sequence by Mobius inversion over NC(m).
    fn unitary_kappa(&self, stars: &[bool]) -> Result<S> {
        if let Some(hit) = self.kappa_memo.read().unwrap().get(stars) {
            return Ok(hit.clone());
        }
        let m = stars.len();
        let table = nc_table(m)?;
        let mu = nc_mu_top(m)?;
        let mut total = S::zero();
        for i in 0..table.len() {
            let mut prod = S::one();
            let mut dead = false;
            for (block, _) in table.blocks_of(i) {
                let mut exponent = 0i64;
                for &p in block {
                    exponent += if stars[p as usize] { -1 } else { 1 };
                }
                let v = self.unitary.moment(exponent);
                if v.is_zero() {
                    dead = true;
                    break;
                }
                prod = prod * v;
            }
            if dead || mu[i] == 0 {
                continue;
            }
            total = total + prod * S::from_int(mu[i]);
        }
        self.kappa_memo
            .write()
            .unwrap()
            .insert(stars.to_vec(), total.clone());
        Ok(total)
    }

    fn expand(&self, word: &Word) -> Vec<FpLetter> {
        let mut out = Vec::with_capacity(2 * word.len());
        for l in word.letters() {
            let inner_letter = Letter::pack(l.symbol(), l.starred(), None);
            if l.starred() {
                // (u z)* = z* u*
                out.push(FpLetter::Inner(inner_letter));
                out.push(FpLetter::U { starred: true });
            } else {
                out.push(FpLetter::U { starred: false });
                out.push(FpLetter::Inner(inner_letter));
            }
        }
        out
    }
}

impl<S: Scalar> MomentRule<S> for FreeProductRule<S> {
    fn eval(&self, word: &Word) -> Result<S> {
        let expanded = self.expand(word);
        let u_positions: Vec<usize> = expanded
            .iter()
            .enumerate()
            .filter_map(|(i, l)| matches!(l, FpLetter::U { .. }).then_some(i))
            .collect();
        let inner_positions: Vec<usize> = expanded
            .iter()
            .enumerate()
            .filter_map(|(i, l)| matches!(l, FpLetter::Inner(_)).then_some(i))
            .collect();
        let star_at = |i: usize| match expanded[i] {
            FpLetter::U { starred } => starred,
            FpLetter::Inner(_) => unreachable!(),
        };
        let inner_at = |i: usize| match expanded[i] {
            FpLetter::Inner(l) => l,
            FpLetter::U { .. } => unreachable!(),
        };
        let m = u_positions.len();
        if m == 0 {
            let w = Word::from_letters(inner_positions.iter().map(|&i| inner_at(i)));
            return self.inner.phi(&w);
        }
        // phi(w) = sum over NC partitions of the u positions of
        //   kappa_u(pi) * prod over the inner gap segments cut by pi
        let table = nc_table(m)?;
        let mut total = S::zero();
        for i in 0..table.len() {
            let blocks: Vec<&[u8]> = table.blocks_of(i).map(|(b, _)| b).collect();
            let mut kappa = S::one();
            let mut dead = false;
            for block in &blocks {
                let stars: Vec<bool> = block.iter().map(|&r| star_at(u_positions[r as usize])).collect();
                let v = self.unitary_kappa(&stars)?;
                if v.is_zero() {
                    dead = true;
                    break;
                }
                kappa = kappa * v;
            }
            if dead {
                continue;
            }
            // the inner positions that may join in a compatible partition are
            // exactly those in the same face of the planar diagram of pi: for
            // every block of pi they sit in the same gap between consecutive
            // block elements, or both outside its span
            let abs_blocks: Vec<Vec<usize>> = blocks
                .iter()
                .map(|b| b.iter().map(|&r| u_positions[r as usize]).collect())
                .collect();
            let signature = |p: usize| -> Vec<usize> {
                abs_blocks
                    .iter()
                    .map(|block| {
                        if p < block[0] || p > *block.last().unwrap() {
                            0
                        } else {
                            // p lies strictly between two consecutive elements
                            1 + block.iter().position(|&e| e > p).unwrap()
                        }
                    })
                    .collect()
            };
            let mut faces: Vec<(Vec<usize>, Vec<Letter>)> = Vec::new();
            for &p in &inner_positions {
                let sig = signature(p);
                match faces.iter_mut().find(|(s, _)| *s == sig) {
                    Some((_, letters)) => letters.push(inner_at(p)),
                    None => faces.push((sig, vec![inner_at(p)])),
                }
            }
            let mut prod = kappa;
            let mut dead = false;
            for (_, letters) in faces {
                let v = self.inner.phi(&Word::from_letters(letters))?;
                if v.is_zero() {
                    dead = true;
                    break;
                }
                prod = prod * v;
            }
            if dead {
                continue;
            }
            total = total + prod;
        }
        Ok(total)
    }
}

/// Distribution of `(u x, u y)` for `u` a unitary *-free from `{x, y}`.
///
/// The output alphabet reuses the input symbol names prefixed with `u`.
pub fn multiply_free_unitary<S: Scalar>(
    mu_xy: &MomentTable<S>,
    unitary: UnitaryMoments<S>,
    degree: usize,
) -> Result<MomentTable<S>> {
    if mu_xy.alphabet().len() != 2 || mu_xy.alphabet().symbols().any(|(_, s)| s.is_some()) {
        return Err(Error::WrongAlphabetShape(
            "free unitary multiplication needs two unsided symbols".into(),
        ));
    }
    if !mu_xy.flags().tracial {
        return Err(Error::NonTracial {
            word: "<tracial flag not set>".into(),
            rotated: String::new(),
        });
    }
    if degree > mu_xy.degree() {
        return Err(Error::DegreeOverflow {
            len: degree,
            cap: mu_xy.degree(),
        });
    }
    let names: Vec<String> = mu_xy
        .alphabet()
        .symbols()
        .map(|(n, _)| format!("u{n}"))
        .collect();
    let alphabet = Alphabet::unsided(&[&names[0], &names[1]])?;
    let rule = FreeProductRule {
        inner: mu_xy.clone(),
        unitary,
        kappa_memo: RwLock::new(HashMap::new()),
    };
    Ok(
        MomentTable::from_rule(alphabet, degree, Flags::default(), Arc::new(rule)).with_flags(
            Flags {
                tracial: true,
                ..Flags::default()
            },
        ),
    )
}

/// `(u x, u y)` for a Haar unitary `u` *-free from `{x, y}`.
pub fn multiply_free_haar<S: Scalar>(
    mu_xy: &MomentTable<S>,
    degree: usize,
) -> Result<MomentTable<S>> {
    multiply_free_unitary(mu_xy, UnitaryMoments::Haar, degree)
}

struct CompressRule<S: Scalar> {
    inner: MomentTable<S>,
    expansions: Vec<Word>,
}

impl<S: Scalar> MomentRule<S> for CompressRule<S> {
    fn eval(&self, word: &Word) -> Result<S> {
        let mut expanded = Word::empty();
        for l in word.letters() {
            let e = &self.expansions[l.symbol()];
            let e = if l.starred() { e.star() } else { e.clone() };
            expanded = expanded.concat(&e);
        }
        self.inner.phi(&expanded)
    }
}

/// Distribution of derived variables: each new symbol expands to a fixed
/// word of the base alphabet (for example `a = x x*`). Starred letters
/// expand to the starred word.
pub fn compress<S: Scalar>(
    mu: &MomentTable<S>,
    defs: &[(&str, Option<Side>, Word)],
    degree: usize,
) -> Result<MomentTable<S>> {
    let alphabet = Alphabet::new(
        defs.iter()
            .map(|(name, side, _)| (name.to_string(), *side))
            .collect(),
    )?;
    let max_len = defs.iter().map(|(_, _, w)| w.len()).max().unwrap_or(1);
    if degree * max_len > mu.degree() {
        return Err(Error::DegreeOverflow {
            len: degree * max_len,
            cap: mu.degree(),
        });
    }
    let rule = CompressRule {
        inner: mu.clone(),
        expansions: defs.iter().map(|(_, _, w)| w.clone()).collect(),
    };
    Ok(MomentTable::from_rule(
        alphabet,
        degree,
        Flags::default(),
        Arc::new(rule),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulants::{moments_to_bifree, moments_to_free};
    use crate::partitions::{catalan_number, enumerate_bnc};
    use crate::scalar::GaussianRational;

    type Q = GaussianRational;

    fn q(n: i64) -> Q {
        Q::from_int(n)
    }

    /// Independent summation oracle: walk BNC(chi_w) as explicit partitions
    /// and multiply cumulant-rule values over blocks.
    fn bnc_sum_oracle(rule: &dyn CumulantRule<Q>, alphabet: &Alphabet, w: &Word) -> Q {
        let chi = w.chi(alphabet).unwrap();
        let mut total = q(0);
        for pi in enumerate_bnc(&chi).unwrap() {
            let mut prod = q(1);
            for block in pi.blocks() {
                let positions: Vec<u8> = block.iter().map(|&e| e as u8).collect();
                prod = prod * rule.eval(&w.restrict(&positions)).unwrap();
            }
            total = total + prod;
        }
        total
    }

    struct SingleKappa {
        word: Word,
        value: Q,
    }

    impl CumulantRule<Q> for SingleKappa {
        fn eval(&self, word: &Word) -> crate::error::Result<Q> {
            Ok(if *word == self.word {
                self.value.clone()
            } else {
                Q::from_int(0)
            })
        }
    }

    #[test]
    fn single_first_order_cumulant_gives_constant_moments() {
        // kappa_l(x) = 1, everything else zero: phi(x^n) = 1
        let a = Alphabet::pair("x", "y").unwrap();
        let rule = Arc::new(SingleKappa {
            word: a.parse_word("x").unwrap(),
            value: q(1),
        });
        let mu = MomentTable::from_bifree_cumulants(rule.clone(), a.clone(), 6);
        for n in 1..=6 {
            let w = Word::from_letters(std::iter::repeat(a.letter("x", false).unwrap()).take(n));
            assert_eq!(mu.phi(&w).unwrap(), q(1), "n={n}");
            assert_eq!(bnc_sum_oracle(rule.as_ref(), &a, &w), q(1));
        }
        // any word touching y or x* vanishes
        assert_eq!(mu.phi(&a.parse_word("x y").unwrap()).unwrap(), q(0));
    }

    #[test]
    fn zero_cumulants_give_zero_moments() {
        let a = Alphabet::pair("x", "y").unwrap();
        let rule = Arc::new(SingleKappa {
            word: a.parse_word("x").unwrap(),
            value: q(0),
        });
        let mu = MomentTable::from_bifree_cumulants(rule, a.clone(), 4);
        for w in mu.words_up_to(4) {
            assert_eq!(mu.phi(&w).unwrap(), q(0));
        }
    }

    #[test]
    fn semicircular_moments_are_catalan() {
        // single kappa_(l,l)(x,x) = 1: phi(x^{2k}) = Catalan(k)
        let a = Alphabet::pair("x", "y").unwrap();
        let rule = Arc::new(SingleKappa {
            word: a.parse_word("x x").unwrap(),
            value: q(1),
        });
        let mu = MomentTable::from_bifree_cumulants(rule.clone(), a.clone(), 8);
        for k in 1..=4usize {
            let w = Word::from_letters(std::iter::repeat(a.letter("x", false).unwrap()).take(2 * k));
            assert_eq!(mu.phi(&w).unwrap(), q(catalan_number(k) as i64), "k={k}");
            assert_eq!(bnc_sum_oracle(rule.as_ref(), &a, &w), q(catalan_number(k) as i64));
            let odd =
                Word::from_letters(std::iter::repeat(a.letter("x", false).unwrap()).take(2 * k - 1));
            assert_eq!(mu.phi(&odd).unwrap(), q(0));
        }
    }

    #[test]
    fn bi_circular_examples() {
        let spec = BiCircularSpec::new(q(1), q(0), q(0), q(1)).unwrap();
        let mu = bi_circular(spec, 4, "c_l", "c_r").unwrap();
        let a = mu.alphabet();
        assert_eq!(mu.phi(&a.parse_word("c_l c_l*").unwrap()).unwrap(), q(1));
        assert_eq!(mu.phi(&a.parse_word("c_l").unwrap()).unwrap(), q(0));
        assert_eq!(mu.phi(&a.parse_word("c_l c_l").unwrap()).unwrap(), q(0));
        // two non-crossing alternating pairings contribute
        assert_eq!(
            mu.phi(&a.parse_word("c_l c_l* c_l c_l*").unwrap()).unwrap(),
            q(2)
        );
        // star symmetry holds on a small cap
        mu.restrict_degree(4).validate_star_symmetric().unwrap();
    }

    #[test]
    fn bi_circular_rejects_bad_covariance() {
        assert!(BiCircularSpec::new(q(1), q(1), q(0), q(1)).is_err()); // not Hermitian
        assert!(BiCircularSpec::new(q(-1), q(0), q(0), q(1)).is_err()); // negative diagonal
        assert!(BiCircularSpec::new(q(1), q(2), q(2), q(1)).is_err()); // det < 0
        assert!(BiCircularSpec::<Q>::new(q(1), Q::i(), Q::i().conj(), q(2)).is_ok());
    }

    #[test]
    fn bi_haar_examples() {
        let mu = bi_haar::<Q>(8, "u_l", "u_r").unwrap();
        let a = mu.alphabet();
        assert_eq!(mu.phi(&a.parse_word("u_l u_r").unwrap()).unwrap(), q(0));
        assert_eq!(mu.phi(&a.parse_word("u_l u_r*").unwrap()).unwrap(), q(1));
        assert_eq!(mu.phi(&a.parse_word("u_l u_l*").unwrap()).unwrap(), q(1));
        assert_eq!(
            mu.phi(&a.parse_word("u_l u_l u_r* u_r*").unwrap()).unwrap(),
            q(1)
        );
        mu.restrict_degree(5).validate_tracial().unwrap();
        mu.restrict_degree(5).validate_star_symmetric().unwrap();
        // bi-Haar kappa on the minimal mixed pattern
        assert_eq!(
            moments_to_bifree(&mu, &a.parse_word("u_l u_r*").unwrap()).unwrap(),
            q(1)
        );
    }

    fn tracial_single() -> MomentTable<Q> {
        // sparse tracial table over unsided {x, y}
        let a = Alphabet::unsided(&["x", "y"]).unwrap();
        let mut m = HashMap::new();
        m.insert(a.parse_word("x").unwrap(), q(1));
        m.insert(a.parse_word("y").unwrap(), q(2));
        m.insert(a.parse_word("x y").unwrap(), q(5));
        m.insert(a.parse_word("y x").unwrap(), q(5));
        m.insert(a.parse_word("x x").unwrap(), q(3));
        MomentTable::from_explicit(
            a,
            2,
            Flags {
                tracial: true,
                sparse: true,
                ..Flags::default()
            },
            m,
        )
        .unwrap()
    }

    #[test]
    fn lr_pair_reordering() {
        let single = tracial_single();
        let pair = lr_pair(&single, 2).unwrap();
        let a = pair.alphabet();
        let sa = single.alphabet();
        // all-left words unchanged
        assert_eq!(pair.phi(&a.parse_word("x x").unwrap()).unwrap(), q(3));
        // chi = (L,R): s is the identity
        assert_eq!(pair.phi(&a.parse_word("x y").unwrap()).unwrap(), q(5));
        // chi = (R,L): phi_pair(y x) = phi_single(x y)
        assert_eq!(
            pair.phi(&a.parse_word("y x").unwrap()).unwrap(),
            single.phi(&sa.parse_word("x y").unwrap()).unwrap()
        );
    }

    #[test]
    fn lr_pair_rejects_nontracial() {
        let a = Alphabet::unsided(&["x", "y"]).unwrap();
        let mut m = HashMap::new();
        m.insert(a.parse_word("x y").unwrap(), q(5));
        // y x missing (= 0): traciality broken
        let table = MomentTable::from_explicit_sparse(a, 2, m).unwrap();
        assert!(lr_pair(&table, 2).is_err());
        let mut flagged = tracial_single();
        flagged = flagged.with_flags(Flags::default());
        assert!(lr_pair(&flagged, 2).is_err());
    }

    #[test]
    fn join_preserves_marginals_and_factorizes() {
        let s1 = BiCircularSpec::new(q(1), q(0), q(0), q(1)).unwrap();
        let mu1 = bi_circular(s1, 4, "x1", "y1").unwrap();
        let a2 = Alphabet::pair("x2", "y2").unwrap();
        let rule = Arc::new(SingleKappa {
            word: a2.parse_word("x2").unwrap(),
            value: q(2),
        });
        let mu2 = MomentTable::from_bifree_cumulants(rule, a2.clone(), 4);
        let joint = bifree_join(&mu1, &mu2, 4).unwrap();
        let ja = joint.alphabet();
        // marginal preservation
        for w in mu1.words_up_to(4) {
            let embedded = ja.parse_word(&mu1.alphabet().format_word(&w)).unwrap();
            assert_eq!(joint.phi(&embedded).unwrap(), mu1.phi(&w).unwrap());
        }
        // first mixed moment factorizes
        for (aw, bw) in [("x1", "x2"), ("y1", "x2"), ("x1*", "x2")] {
            let w = ja.parse_word(&format!("{aw} {bw}")).unwrap();
            let pa = mu1.phi(&mu1.alphabet().parse_word(aw).unwrap()).unwrap();
            let pb = mu2.phi(&a2.parse_word(bw).unwrap()).unwrap();
            assert_eq!(joint.phi(&w).unwrap(), pa * pb);
        }
        // mixed bi-free cumulants vanish on re-extraction
        for w in joint.words_up_to(3) {
            let mixed = w.letters().iter().any(|l| l.symbol() < 2)
                && w.letters().iter().any(|l| l.symbol() >= 2);
            if mixed {
                assert_eq!(moments_to_bifree(&joint, &w).unwrap(), q(0), "w={w:?}");
            }
        }
        // alphabet collision
        assert!(bifree_join(&mu1, &mu1, 4).is_err());
    }

    #[test]
    fn haar_product_examples() {
        let single = tracial_single();
        let out = multiply_free_haar(&single, 2).unwrap();
        let oa = out.alphabet();
        let sa = single.alphabet();
        // phi((ux)(ux)*) = phi(x x*)
        assert_eq!(
            out.phi(&oa.parse_word("ux ux*").unwrap()).unwrap(),
            single.phi(&sa.parse_word("x x*").unwrap()).unwrap()
        );
        // phi(ux) = 0
        assert_eq!(out.phi(&oa.parse_word("ux").unwrap()).unwrap(), q(0));
    }

    #[test]
    fn haar_times_haar_is_haar() {
        // x a Haar unitary free from u: (ux) is again Haar, so phi((ux)^n) = 0
        let a = Alphabet::unsided(&["x", "y"]).unwrap();
        let mut m = HashMap::new();
        for n in 1..=6usize {
            for w in a.words_of_length(n) {
                // treat x and y as the same Haar unitary: reduce by exponent
                let mut exp = 0i64;
                for l in w.letters() {
                    exp += if l.starred() { -1 } else { 1 };
                }
                if exp == 0 {
                    m.insert(w, q(1));
                }
            }
        }
        let haar = MomentTable::from_explicit(
            a.clone(),
            6,
            Flags {
                tracial: true,
                sparse: true,
                ..Flags::default()
            },
            m,
        )
        .unwrap();
        let out = multiply_free_haar(&haar, 6).unwrap();
        let oa = out.alphabet();
        for n in 1..=3usize {
            let w = Word::from_letters(std::iter::repeat(oa.letter("ux", false).unwrap()).take(n));
            assert_eq!(out.phi(&w).unwrap(), q(0), "n={n}");
            let ws = Word::from_letters(std::iter::repeat(oa.letter("ux", true).unwrap()).take(n));
            assert_eq!(out.phi(&ws).unwrap(), q(0), "n={n} starred");
        }
        // and (ux)(ux)* words keep moment 1
        assert_eq!(out.phi(&oa.parse_word("ux ux*").unwrap()).unwrap(), q(1));
        out.restrict_degree(4).validate_tracial().unwrap();
    }

    #[test]
    fn haar_kappa_closed_form() {
        // kappa_{2n}(u, u*, ..., u, u*) = (-1)^(n-1) Catalan(n-1)
        let rule = FreeProductRule::<Q> {
            inner: tracial_single(),
            unitary: UnitaryMoments::Haar,
            kappa_memo: RwLock::new(HashMap::new()),
        };
        for n in 1..=3usize {
            let mut stars = Vec::new();
            for _ in 0..n {
                stars.push(false);
                stars.push(true);
            }
            let expected = q(if (n - 1) % 2 == 0 { 1 } else { -1 })
                * q(catalan_number(n - 1) as i64);
            assert_eq!(rule.unitary_kappa(&stars).unwrap(), expected, "n={n}");
            // starred-first variant has the same value
            let flipped: Vec<bool> = stars.iter().map(|b| !b).collect();
            assert_eq!(rule.unitary_kappa(&flipped).unwrap(), expected);
        }
        // non-alternating patterns vanish
        assert_eq!(rule.unitary_kappa(&[false, false]).unwrap(), q(0));
        assert_eq!(rule.unitary_kappa(&[false, true, true, false]).unwrap(), q(0));
    }

    #[test]
    fn free_cumulant_route_matches_for_unsided() {
        // moments_to_free of a semicircular-style table recovers the defining
        // cumulants
        let a = Alphabet::unsided(&["s", "t"]).unwrap();
        let rule = Arc::new(SingleKappa {
            word: a.parse_word("s s").unwrap(),
            value: q(1),
        });
        let mu = MomentTable::from_free_cumulants(rule, a.clone(), 6);
        assert_eq!(
            moments_to_free(&mu, &a.parse_word("s s").unwrap()).unwrap(),
            q(1)
        );
        assert_eq!(
            moments_to_free(&mu, &a.parse_word("s s s s").unwrap()).unwrap(),
            q(0)
        );
    }

    #[test]
    fn compress_expands_words() {
        let single = tracial_single();
        let sa = single.alphabet();
        let defs = [(
            "a",
            Some(Side::Left),
            sa.parse_word("x x").unwrap(),
        )];
        let t = compress(&single, &defs, 1).unwrap();
        let ta = t.alphabet();
        assert_eq!(t.phi(&ta.parse_word("a").unwrap()).unwrap(), q(3));
        // starred letters expand to the starred word
        assert_eq!(
            t.phi(&ta.parse_word("a*").unwrap()).unwrap(),
            single.phi(&sa.parse_word("x* x*").unwrap()).unwrap()
        );
        // cap is enforced through the expansion length
        assert!(compress(&single, &defs, 2).is_err());
    }
}
