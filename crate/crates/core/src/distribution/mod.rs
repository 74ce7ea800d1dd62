//! Truncated *-distributions: moment tables, the named constructions, and
//! the distribution file format.
//!
//! A [`MomentTable`] is a unital linear functional on words up to a degree
//! cap. Tables are either explicit maps (files, hand-built counterexamples)
//! or lazy rules with a memo (cumulant-specified tables, pair constructions,
//! free products); both are immutable after construction and cheap to clone.

mod file;
mod rules;

pub use file::{load_distribution, save_distribution, DistributionFile};
pub use rules::{
    bi_circular, bi_haar, bifree_join, compress, lr_pair, multiply_free_haar,
    multiply_free_unitary, UnitaryMoments,
};

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};


use crate::cumulants::{CumulantRule, TransformKind};
use crate::error::{Error, Result};
use crate::ncpoly::{Alphabet, ArcAlphabet, NcPolynomial, Word};
use crate::scalar::Scalar;

/// Validated properties of a table. `tracial` and `star_symmetric` are
/// opt-in and checked, never assumed; `sparse` turns missing explicit
/// entries into zeros.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    pub tracial: bool,
    pub star_symmetric: bool,
    pub sparse: bool,
}

/// A lazily evaluated moment assignment.
pub trait MomentRule<S: Scalar>: Send + Sync {
    fn eval(&self, word: &Word) -> Result<S>;
}

#[derive(Clone)]
enum Source<S: Scalar> {
    Explicit(Arc<HashMap<Word, S>>),
    Lazy {
        rule: Arc<dyn MomentRule<S>>,
        memo: Arc<RwLock<HashMap<Word, S>>>,
    },
}

/// A *-distribution given by its moments up to a degree cap.
#[derive(Clone)]
pub struct MomentTable<S: Scalar> {
    alphabet: ArcAlphabet,
    degree: usize,
    flags: Flags,
    source: Source<S>,
    /// Set when the table was built from a cumulant rule; carries the rule so
    /// the product-pair oracle can read the defining cumulants directly.
    cumulant_backing: Option<(TransformKind, Arc<dyn CumulantRule<S>>)>,
}

/// Default degree cap for constructed tables.
pub const DEFAULT_DEGREE: usize = 8;

impl<S: Scalar> MomentTable<S> {
    /// Explicit table that must be total: every word up to the cap present.
    pub fn from_explicit(
        alphabet: ArcAlphabet,
        degree: usize,
        flags: Flags,
        moments: HashMap<Word, S>,
    ) -> Result<Self> {
        if !flags.sparse {
            for n in 1..=degree {
                for w in alphabet.words_of_length(n) {
                    if !moments.contains_key(&w) {
                        return Err(Error::MissingMoment(alphabet.format_word(&w)));
                    }
                }
            }
        }
        for w in moments.keys() {
            if w.is_empty() || w.len() > degree {
                return Err(Error::DegreeOverflow {
                    len: w.len(),
                    cap: degree,
                });
            }
        }
        let table = MomentTable {
            alphabet,
            degree,
            flags,
            source: Source::Explicit(Arc::new(moments)),
            cumulant_backing: None,
        };
        if flags.tracial {
            table.validate_tracial()?;
        }
        if flags.star_symmetric {
            table.validate_star_symmetric()?;
        }
        Ok(table)
    }

    /// Explicit sparse table: anything absent is zero.
    pub fn from_explicit_sparse(
        alphabet: ArcAlphabet,
        degree: usize,
        moments: HashMap<Word, S>,
    ) -> Result<Self> {
        MomentTable::from_explicit(
            alphabet,
            degree,
            Flags {
                sparse: true,
                ..Flags::default()
            },
            moments,
        )
    }

    pub fn from_rule(
        alphabet: ArcAlphabet,
        degree: usize,
        flags: Flags,
        rule: Arc<dyn MomentRule<S>>,
    ) -> Self {
        MomentTable {
            alphabet,
            degree,
            flags,
            source: Source::Lazy {
                rule,
                memo: Arc::new(RwLock::new(HashMap::new())),
            },
            cumulant_backing: None,
        }
    }

    /// Table whose moments are reconstructed from bi-free cumulants:
    /// `phi(w) = sum over BNC(chi_w) of the multiplicative extension`.
    pub fn from_bifree_cumulants(
        rule: Arc<dyn CumulantRule<S>>,
        alphabet: ArcAlphabet,
        degree: usize,
    ) -> Self {
        Self::from_cumulants(TransformKind::Bifree, rule, alphabet, degree)
    }

    /// Table reconstructed from bi-Boolean cumulants over `BI(chi_w)`.
    pub fn from_biboolean_cumulants(
        rule: Arc<dyn CumulantRule<S>>,
        alphabet: ArcAlphabet,
        degree: usize,
    ) -> Self {
        Self::from_cumulants(TransformKind::Biboolean, rule, alphabet, degree)
    }

    /// Table reconstructed from free cumulants over `NC(n)` (sides ignored).
    pub fn from_free_cumulants(
        rule: Arc<dyn CumulantRule<S>>,
        alphabet: ArcAlphabet,
        degree: usize,
    ) -> Self {
        Self::from_cumulants(TransformKind::Free, rule, alphabet, degree)
    }

    pub fn from_cumulants(
        kind: TransformKind,
        rule: Arc<dyn CumulantRule<S>>,
        alphabet: ArcAlphabet,
        degree: usize,
    ) -> Self {
        let moment_rule = rules::CumulantMomentRule {
            kind,
            rule: rule.clone(),
            alphabet: alphabet.clone(),
        };
        let mut table = MomentTable::from_rule(alphabet, degree, Flags::default(), Arc::new(moment_rule));
        table.cumulant_backing = Some((kind, rule));
        table
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn alphabet_arc(&self) -> ArcAlphabet {
        self.alphabet.clone()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub(crate) fn with_flags(mut self, flags: Flags) -> Self {
        self.flags = flags;
        self
    }

    pub fn cumulant_backing(&self) -> Option<(TransformKind, Arc<dyn CumulantRule<S>>)> {
        self.cumulant_backing.clone()
    }

    /// The moment of a word. The empty word always has moment 1.
    pub fn phi(&self, w: &Word) -> Result<S> {
        if w.is_empty() {
            return Ok(S::one());
        }
        if w.len() > self.degree {
            return Err(Error::DegreeOverflow {
                len: w.len(),
                cap: self.degree,
            });
        }
        match &self.source {
            Source::Explicit(map) => match map.get(w) {
                Some(v) => Ok(v.clone()),
                None if self.flags.sparse => Ok(S::zero()),
                None => Err(Error::MissingMoment(self.alphabet.format_word(w))),
            },
            Source::Lazy { rule, memo } => {
                if let Some(hit) = memo.read().unwrap().get(w) {
                    return Ok(hit.clone());
                }
                let v = rule.eval(w)?;
                memo.write().unwrap().insert(w.clone(), v.clone());
                Ok(v)
            }
        }
    }

    /// Linear extension of `phi` to polynomials.
    pub fn expect(&self, p: &NcPolynomial<S>) -> Result<S> {
        p.expect(|w| self.phi(w))
    }

    /// `p - phi(p) 1`.
    pub fn center(&self, p: &NcPolynomial<S>) -> Result<NcPolynomial<S>> {
        crate::ncpoly::center(p, |w| self.phi(w))
    }

    /// All words of lengths `1..=degree` in the deterministic order.
    pub fn words_up_to(&self, degree: usize) -> impl Iterator<Item = Word> + '_ {
        let cap = degree.min(self.degree);
        (1..=cap).flat_map(move |n| self.alphabet.words_of_length(n))
    }

    /// Evaluate every word up to the cap into an explicit table. Zero values
    /// are dropped and the result is marked sparse.
    pub fn materialize(&self) -> Result<MomentTable<S>> {
        let mut map = HashMap::new();
        for w in self.words_up_to(self.degree) {
            let v = self.phi(&w)?;
            if !v.is_zero() {
                map.insert(w, v);
            }
        }
        Ok(MomentTable {
            alphabet: self.alphabet.clone(),
            degree: self.degree,
            flags: Flags {
                sparse: true,
                ..self.flags
            },
            source: Source::Explicit(Arc::new(map)),
            cumulant_backing: self.cumulant_backing.clone(),
        })
    }

    /// Same table with a lower cap.
    pub fn restrict_degree(&self, degree: usize) -> MomentTable<S> {
        let mut t = self.clone();
        t.degree = self.degree.min(degree);
        t
    }

    /// First word (deterministic order) where the two tables disagree, up to
    /// the given degree. Alphabets must agree symbol-for-symbol.
    pub fn first_disagreement(&self, other: &MomentTable<S>, degree: usize) -> Result<Option<Word>> {
        if self.alphabet.as_ref() != other.alphabet.as_ref() {
            return Err(Error::WrongAlphabetShape(
                "tables have different alphabets".into(),
            ));
        }
        let cap = degree.min(self.degree).min(other.degree);
        for w in self.words_up_to(cap) {
            if self.phi(&w)? != other.phi(&w)? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }

    /// Check `phi(w) = phi(rotated w)` for every word up to the cap.
    pub fn validate_tracial(&self) -> Result<()> {
        for w in self.words_up_to(self.degree) {
            let r = w.rotate();
            if self.phi(&w)? != self.phi(&r)? {
                return Err(Error::NonTracial {
                    word: self.alphabet.format_word(&w),
                    rotated: self.alphabet.format_word(&r),
                });
            }
        }
        Ok(())
    }

    /// Check `phi(w*) = conj(phi(w))` for every word up to the cap.
    pub fn validate_star_symmetric(&self) -> Result<()> {
        for w in self.words_up_to(self.degree) {
            if self.phi(&w.star())? != self.phi(&w)?.conj() {
                return Err(Error::NotStarSymmetric(self.alphabet.format_word(&w)));
            }
        }
        Ok(())
    }

    /// The pair shape check used by the diagonal detectors: exactly one left
    /// and one right symbol. Returns (left symbol index, right symbol index).
    pub fn pair_symbols(&self) -> Result<(usize, usize)> {
        let mut left = None;
        let mut right = None;
        for (i, (_, side)) in self.alphabet.symbols().enumerate() {
            match side {
                Some(crate::partitions::Side::Left) if left.is_none() => left = Some(i),
                Some(crate::partitions::Side::Right) if right.is_none() => right = Some(i),
                _ => {
                    return Err(Error::WrongAlphabetShape(format!(
                        "expected one left and one right symbol, alphabet has {}",
                        self.alphabet.len()
                    )))
                }
            }
        }
        match (left, right) {
            (Some(l), Some(r)) => Ok((l, r)),
            _ => Err(Error::WrongAlphabetShape(
                "alphabet is missing a left or right symbol".into(),
            )),
        }
    }
}

/// Kinds of formal series attached to a distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    Moment,
    Eta,
    RTransform,
}

/// A formal power series with vanishing constant coefficient, keyed by word.
#[derive(Clone, Debug)]
pub struct SeriesTable<S: Scalar> {
    pub kind: SeriesKind,
    pub coeffs: BTreeMap<Word, S>,
}

impl<S: Scalar> SeriesTable<S> {
    pub fn new(kind: SeriesKind) -> Self {
        SeriesTable {
            kind,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, w: Word, v: S) {
        assert!(!w.is_empty(), "series have no constant coefficient");
        if !v.is_zero() {
            self.coeffs.insert(w, v);
        }
    }

    pub fn coeff(&self, w: &Word) -> S {
        self.coeffs.get(w).cloned().unwrap_or_else(S::zero)
    }
}

/// The covariance data of a bi-circular pair: a 2x2 Hermitian matrix with
/// nonnegative diagonal and nonnegative determinant.
#[derive(Clone, Debug)]
pub struct BiCircularSpec<S: Scalar> {
    c_ll: S,
    c_lr: S,
    c_rl: S,
    c_rr: S,
}

impl<S: Scalar> BiCircularSpec<S> {
    pub fn new(c_ll: S, c_lr: S, c_rl: S, c_rr: S) -> Result<Self> {
        if c_rl != c_lr.conj() {
            return Err(Error::InvalidCovariance(
                "matrix is not Hermitian: c_rl != conj(c_lr)".into(),
            ));
        }
        if !c_ll.is_nonneg_real() || !c_rr.is_nonneg_real() {
            return Err(Error::InvalidCovariance(
                "diagonal entries must be nonnegative reals".into(),
            ));
        }
        let det = c_ll.clone() * c_rr.clone() - c_lr.clone() * c_lr.conj();
        if !det.is_nonneg_real() {
            return Err(Error::InvalidCovariance(
                "determinant is negative: matrix is not positive semidefinite".into(),
            ));
        }
        Ok(BiCircularSpec { c_ll, c_lr, c_rl, c_rr })
    }

    pub fn identity() -> Self {
        BiCircularSpec {
            c_ll: S::one(),
            c_lr: S::zero(),
            c_rl: S::zero(),
            c_rr: S::one(),
        }
    }

    pub fn value(&self, first: crate::partitions::Side, second: crate::partitions::Side) -> S {
        use crate::partitions::Side::*;
        match (first, second) {
            (Left, Left) => self.c_ll.clone(),
            (Left, Right) => self.c_lr.clone(),
            (Right, Left) => self.c_rl.clone(),
            (Right, Right) => self.c_rr.clone(),
        }
    }
}
