//! The four moment-cumulant transforms and independence tests.
//!
//! Free cumulants invert moments over `NC(n)`, Boolean cumulants over
//! `IN(n)`; the two-faced versions use `BNC(chi)` and `BI(chi)` with the word
//! side map as chi. Blocks are always read in increasing natural index order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::RwLock;


use crate::distribution::MomentTable;
use crate::error::{Error, Result};
use crate::ncpoly::{Alphabet, ArcAlphabet, Word};
use crate::partitions::{
    bi_table, bnc_table, in_table, nc_mu_top, nc_table, PartitionTable, SetPartition, ALL_SIZES,
};
use crate::scalar::Scalar;

/// Which transform a table or request refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransformKind {
    Free,
    Boolean,
    Bifree,
    Biboolean,
}

impl TransformKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(TransformKind::Free),
            "boolean" => Ok(TransformKind::Boolean),
            "bifree" => Ok(TransformKind::Bifree),
            "biboolean" => Ok(TransformKind::Biboolean),
            other => Err(Error::Parse {
                at: format!("kind `{other}`"),
                msg: "expected free|boolean|bifree|biboolean".into(),
            }),
        }
    }

    pub fn is_two_faced(self) -> bool {
        matches!(self, TransformKind::Bifree | TransformKind::Biboolean)
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TransformKind::Free => "free",
            TransformKind::Boolean => "boolean",
            TransformKind::Bifree => "bifree",
            TransformKind::Biboolean => "biboolean",
        };
        write!(f, "{s}")
    }
}

/// A rule producing cumulant values per word. The size mask restricts which
/// block sizes can carry nonzero values (bit `s` set admits size `s`), which
/// lets moment reconstruction skip partitions that cannot contribute.
pub trait CumulantRule<S: Scalar>: Send + Sync {
    fn eval(&self, word: &Word) -> Result<S>;

    fn size_mask(&self) -> u16 {
        ALL_SIZES
    }
}

/// The partition family and weights used by one transform at one word.
fn lattice_for<'a>(
    kind: TransformKind,
    w: &Word,
    alphabet: &Alphabet,
) -> Result<(std::sync::Arc<PartitionTable>, LatticeWeights)> {
    let n = w.len();
    match kind {
        TransformKind::Free => Ok((nc_table(n)?, LatticeWeights::NcMu(nc_mu_top(n)?))),
        TransformKind::Boolean => Ok((in_table(n)?, LatticeWeights::AlternatingSign)),
        TransformKind::Bifree => {
            let chi = w.chi(alphabet)?;
            Ok((bnc_table(&chi, ALL_SIZES)?, LatticeWeights::NcMu(nc_mu_top(n)?)))
        }
        TransformKind::Biboolean => {
            let chi = w.chi(alphabet)?;
            Ok((bi_table(&chi, ALL_SIZES)?, LatticeWeights::AlternatingSign))
        }
    }
}

enum LatticeWeights {
    /// `mu(pi, 1_n)` aligned with the table index (NC enumeration order).
    NcMu(std::sync::Arc<Vec<i64>>),
    /// `(-1)^(|pi|-1)`, the interval-lattice Mobius value to the top.
    AlternatingSign,
}

impl LatticeWeights {
    fn weight(&self, index: usize, num_blocks: usize) -> i64 {
        match self {
            LatticeWeights::NcMu(mu) => mu[index],
            LatticeWeights::AlternatingSign => {
                if (num_blocks - 1) % 2 == 0 {
                    1
                } else {
                    -1
                }
            }
        }
    }
}

/// Shared summation core: `sum_i weight_i * prod_{blocks} value(w|_block)`,
/// with a per-word memo on block bitmasks.
fn lattice_sum<S: Scalar>(
    w: &Word,
    table: &PartitionTable,
    weights: Option<&LatticeWeights>,
    mut value: impl FnMut(&Word) -> Result<S>,
) -> Result<S> {
    let n = w.len();
    let mut cache: Vec<Option<S>> = vec![None; 1 << n.min(12)];
    let use_cache = n <= 12;
    let mut total = S::zero();
    for i in 0..table.len() {
        let mut prod = S::one();
        let mut dead = false;
        for (block, mask) in table.blocks_of(i) {
            let v = if use_cache {
                if let Some(v) = &cache[mask as usize] {
                    v.clone()
                } else {
                    let v = value(&w.restrict(block))?;
                    cache[mask as usize] = Some(v.clone());
                    v
                }
            } else {
                value(&w.restrict(block))?
            };
            if v.is_zero() {
                dead = true;
                break;
            }
            prod = prod * v;
        }
        if dead {
            continue;
        }
        if let Some(weights) = weights {
            let wgt = weights.weight(i, table.num_blocks_of(i));
            if wgt == 0 {
                continue;
            }
            prod = prod * S::from_int(wgt);
        }
        total = total + prod;
    }
    Ok(total)
}

fn moment_to_cumulant<S: Scalar>(kind: TransformKind, mu: &MomentTable<S>, w: &Word) -> Result<S> {
    if w.is_empty() {
        return Ok(S::one());
    }
    if w.len() == 1 {
        return mu.phi(w);
    }
    let (table, weights) = lattice_for(kind, w, mu.alphabet())?;
    lattice_sum(w, &table, Some(&weights), |sub| mu.phi(sub))
}

/// Bi-free cumulant of `w`: Mobius inversion over `BNC(chi_w)`.
pub fn moments_to_bifree<S: Scalar>(mu: &MomentTable<S>, w: &Word) -> Result<S> {
    moment_to_cumulant(TransformKind::Bifree, mu, w)
}

/// Bi-Boolean cumulant of `w`: inversion over `BI(chi_w)` with the
/// alternating-sign weights.
pub fn moments_to_biboolean<S: Scalar>(mu: &MomentTable<S>, w: &Word) -> Result<S> {
    moment_to_cumulant(TransformKind::Biboolean, mu, w)
}

/// Free cumulant (sides ignored): inversion over `NC(n)`.
pub fn moments_to_free<S: Scalar>(mu: &MomentTable<S>, w: &Word) -> Result<S> {
    moment_to_cumulant(TransformKind::Free, mu, w)
}

/// Boolean cumulant (sides ignored): inversion over `IN(n)`.
pub fn moments_to_boolean<S: Scalar>(mu: &MomentTable<S>, w: &Word) -> Result<S> {
    moment_to_cumulant(TransformKind::Boolean, mu, w)
}

/// Product of a word functional over the blocks of a partition, each block
/// read in increasing natural index order. The partition must belong to the
/// kind's lattice at `chi_w`.
pub fn multiplicative_eval<S: Scalar>(
    kind: TransformKind,
    pi: &SetPartition,
    w: &Word,
    alphabet: &Alphabet,
    mut value: impl FnMut(&Word) -> Result<S>,
) -> Result<S> {
    if pi.n() != w.len() {
        return Err(Error::SizeMismatch {
            left: pi.n(),
            right: w.len(),
        });
    }
    let member = match kind {
        TransformKind::Free => pi.is_noncrossing(),
        TransformKind::Boolean => pi.is_interval(),
        TransformKind::Bifree => pi.is_bnc(&w.chi(alphabet)?)?,
        TransformKind::Biboolean => pi.is_bi_interval(&w.chi(alphabet)?)?,
    };
    if !member {
        return Err(Error::NotInLattice {
            lattice: match kind {
                TransformKind::Free => "NC",
                TransformKind::Boolean => "IN",
                TransformKind::Bifree => "BNC",
                TransformKind::Biboolean => "BI",
            },
        });
    }
    let mut prod = S::one();
    for block in pi.blocks() {
        let positions: Vec<u8> = block.iter().map(|&e| e as u8).collect();
        let v = value(&w.restrict(&positions))?;
        if v.is_zero() {
            return Ok(S::zero());
        }
        prod = prod * v;
    }
    Ok(prod)
}

/// Memoizing cumulant evaluator over a fixed moment table.
pub struct CumulantCache<S: Scalar> {
    kind: TransformKind,
    mu: MomentTable<S>,
    memo: RwLock<HashMap<Word, S>>,
}

impl<S: Scalar> CumulantCache<S> {
    pub fn new(kind: TransformKind, mu: MomentTable<S>) -> Self {
        CumulantCache {
            kind,
            mu,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn eval(&self, w: &Word) -> Result<S> {
        if let Some(hit) = self.memo.read().unwrap().get(w) {
            return Ok(hit.clone());
        }
        let v = moment_to_cumulant(self.kind, &self.mu, w)?;
        self.memo.write().unwrap().insert(w.clone(), v.clone());
        Ok(v)
    }
}

impl<S: Scalar> CumulantRule<S> for CumulantCache<S> {
    fn eval(&self, word: &Word) -> Result<S> {
        CumulantCache::eval(self, word)
    }
}

/// Materialized cumulant table: every word up to the cap, any of the four
/// kinds.
#[derive(Clone)]
pub struct CumulantTable<S: Scalar> {
    kind: TransformKind,
    alphabet: ArcAlphabet,
    degree: usize,
    entries: BTreeMap<Word, S>,
}

impl<S: Scalar> CumulantTable<S> {
    pub fn from_moments(kind: TransformKind, mu: &MomentTable<S>, degree: usize) -> Result<Self> {
        if degree > mu.degree() {
            return Err(Error::DegreeOverflow {
                len: degree,
                cap: mu.degree(),
            });
        }
        let mut entries = BTreeMap::new();
        for n in 1..=degree {
            for w in mu.alphabet().words_of_length(n) {
                let v = moment_to_cumulant(kind, mu, &w)?;
                entries.insert(w, v);
            }
        }
        Ok(CumulantTable {
            kind,
            alphabet: mu.alphabet_arc(),
            degree,
            entries,
        })
    }

    pub fn from_entries(
        kind: TransformKind,
        alphabet: ArcAlphabet,
        degree: usize,
        entries: BTreeMap<Word, S>,
    ) -> Self {
        let entries = entries.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        CumulantTable {
            kind,
            alphabet,
            degree,
            entries,
        }
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn alphabet_arc(&self) -> ArcAlphabet {
        self.alphabet.clone()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Word, &S)> {
        self.entries.iter()
    }

    /// Value lookup; zero entries are simply absent, words beyond the cap are
    /// an error.
    pub fn get(&self, w: &Word) -> Result<S> {
        if w.len() > self.degree {
            return Err(Error::MissingCumulant(self.alphabet.format_word(w)));
        }
        Ok(self.entries.get(w).cloned().unwrap_or_else(S::zero))
    }
}

impl<S: Scalar> CumulantRule<S> for CumulantTable<S> {
    fn eval(&self, word: &Word) -> Result<S> {
        self.get(word)
    }
}

/// Assignment of alphabet symbols to families for independence tests.
#[derive(Clone, Debug)]
pub struct Grouping {
    family_of_symbol: Vec<usize>,
}

impl Grouping {
    /// Build from family lists of symbol names; every symbol of the alphabet
    /// must be covered.
    pub fn new(alphabet: &Alphabet, families: &[Vec<String>]) -> Result<Self> {
        let mut family_of_symbol = vec![usize::MAX; alphabet.len()];
        for (f, names) in families.iter().enumerate() {
            for name in names {
                let idx = alphabet.symbol_index(name)?;
                family_of_symbol[idx] = f;
            }
        }
        for (i, &f) in family_of_symbol.iter().enumerate() {
            if f == usize::MAX {
                return Err(Error::UncoveredSymbol(alphabet.symbol_name(i).to_string()));
            }
        }
        Ok(Grouping { family_of_symbol })
    }

    pub fn family(&self, symbol: usize) -> usize {
        self.family_of_symbol[symbol]
    }

    pub fn is_mixed(&self, w: &Word) -> bool {
        let mut first = None;
        for l in w.letters() {
            let f = self.family(l.symbol());
            match first {
                None => first = Some(f),
                Some(g) if g != f => return true,
                _ => {}
            }
        }
        false
    }
}

/// Outcome of a vanishing check, with the first offending word when it fails.
#[derive(Clone, Debug)]
pub struct Verdict<S> {
    pub pass: bool,
    pub witness: Option<(Word, S)>,
}

impl<S> Verdict<S> {
    pub fn pass() -> Self {
        Verdict {
            pass: true,
            witness: None,
        }
    }

    pub fn fail(word: Word, value: S) -> Self {
        Verdict {
            pass: false,
            witness: Some((word, value)),
        }
    }
}

fn independence_test<S: Scalar>(
    kind: TransformKind,
    mu: &MomentTable<S>,
    grouping: &Grouping,
    degree: usize,
) -> Result<Verdict<S>> {
    let degree = degree.min(mu.degree());
    for n in 2..=degree {
        for w in mu.alphabet().words_of_length(n) {
            if !grouping.is_mixed(&w) {
                continue;
            }
            let v = moment_to_cumulant(kind, mu, &w)?;
            if !v.is_zero() {
                return Ok(Verdict::fail(w, v));
            }
        }
    }
    Ok(Verdict::pass())
}

/// PASS iff every mixed-family bi-free cumulant up to the degree vanishes.
pub fn test_bifree_independence<S: Scalar>(
    mu: &MomentTable<S>,
    grouping: &Grouping,
    degree: usize,
) -> Result<Verdict<S>> {
    independence_test(TransformKind::Bifree, mu, grouping, degree)
}

/// PASS iff every mixed-family bi-Boolean cumulant up to the degree vanishes.
pub fn test_biboolean_independence<S: Scalar>(
    mu: &MomentTable<S>,
    grouping: &Grouping,
    degree: usize,
) -> Result<Verdict<S>> {
    independence_test(TransformKind::Biboolean, mu, grouping, degree)
}

/// Moment reconstruction: `phi(w) = sum over the kind's lattice of the
/// multiplicative cumulant extension`. This is the inverse direction of the
/// transforms above and the engine behind every cumulant-specified table.
pub fn cumulants_to_moment<S: Scalar>(
    kind: TransformKind,
    rule: &dyn CumulantRule<S>,
    alphabet: &Alphabet,
    w: &Word,
) -> Result<S> {
    if w.is_empty() {
        return Ok(S::one());
    }
    let n = w.len();
    let table = match kind {
        TransformKind::Free => crate::partitions::nc_table_with_sizes(n, rule.size_mask())?,
        TransformKind::Boolean => in_table(n)?,
        TransformKind::Bifree => bnc_table(&w.chi(alphabet)?, rule.size_mask())?,
        TransformKind::Biboolean => bi_table(&w.chi(alphabet)?, rule.size_mask())?,
    };
    lattice_sum(w, &table, None, |sub| rule.eval(sub))
}
