//! Words over a declared *-alphabet and their formal linear combinations.
//!
//! An alphabet fixes the symbols and their sides up front; letters are a
//! symbol plus a star flag; words multiply by concatenation and carry the
//! anti-multiplicative involution `(w1...wn)* = wn*...w1*`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::partitions::{ChiMap, Side};
use crate::scalar::Scalar;

/// One letter: a symbol index into an [`Alphabet`] plus a star flag, with the
/// symbol's side packed in for side lookups without the alphabet at hand.
///
/// Packing: bits 0-4 symbol, bit 5 star, bits 6-7 side (0 left, 1 right,
/// 2 unsided).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(u8);

impl Letter {
    pub(crate) fn pack(symbol: usize, starred: bool, side: Option<Side>) -> Letter {
        debug_assert!(symbol < 32);
        let side_bits = match side {
            Some(Side::Left) => 0,
            Some(Side::Right) => 1,
            None => 2,
        };
        Letter((symbol as u8) | (u8::from(starred) << 5) | (side_bits << 6))
    }

    pub fn symbol(self) -> usize {
        (self.0 & 0x1f) as usize
    }

    pub fn starred(self) -> bool {
        self.0 & 0x20 != 0
    }

    pub fn side(self) -> Option<Side> {
        match self.0 >> 6 {
            0 => Some(Side::Left),
            1 => Some(Side::Right),
            _ => None,
        }
    }

    pub fn star(self) -> Letter {
        Letter(self.0 ^ 0x20)
    }

    fn order_key(self) -> (usize, bool) {
        (self.symbol(), self.starred())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "#{}{}",
            self.symbol(),
            if self.starred() { "*" } else { "" }
        )
    }
}

/// A finite word; the empty word is the algebra unit.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: SmallVec<[Letter; 16]>,
}

impl Word {
    pub fn empty() -> Word {
        Word::default()
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Word {
        Word {
            letters: letters.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    /// Involution: reverse the word and star every letter.
    pub fn star(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.star()).collect(),
        }
    }

    /// Left rotation by one position (used by traciality checks).
    pub fn rotate(&self) -> Word {
        if self.letters.len() < 2 {
            return self.clone();
        }
        let mut letters = SmallVec::with_capacity(self.letters.len());
        letters.extend_from_slice(&self.letters[1..]);
        letters.push(self.letters[0]);
        Word { letters }
    }

    /// The side map of the word; errors on unsided letters.
    pub fn chi(&self, alphabet: &Alphabet) -> Result<ChiMap> {
        let sides = self
            .letters
            .iter()
            .map(|l| {
                l.side()
                    .ok_or_else(|| Error::UnsidedLetter(alphabet.format_letter(*l)))
            })
            .collect::<Result<Vec<_>>>()?;
        ChiMap::new(sides)
    }

    /// Subword at the given positions, kept in the given order.
    pub fn restrict(&self, positions: &[u8]) -> Word {
        Word {
            letters: positions
                .iter()
                .map(|&p| self.letters[p as usize])
                .collect(),
        }
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // length first, then lexicographic: the deterministic word order used
        // for witnesses and reports
        self.len()
            .cmp(&other.len())
            .then_with(|| {
                self.letters
                    .iter()
                    .map(|l| l.order_key())
                    .cmp(other.letters.iter().map(|l| l.order_key()))
            })
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word{:?}", self.letters)
    }
}

/// A declared *-alphabet: symbol names with fixed sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<(String, Option<Side>)>,
}

pub type ArcAlphabet = Arc<Alphabet>;

impl Alphabet {
    pub fn new(symbols: Vec<(String, Option<Side>)>) -> Result<Arc<Alphabet>> {
        if symbols.is_empty() || symbols.len() > 32 {
            return Err(Error::Size(format!(
                "alphabet must declare 1..=32 symbols, got {}",
                symbols.len()
            )));
        }
        for (i, (name, _)) in symbols.iter().enumerate() {
            if name.is_empty() || name.contains('*') || name.contains(char::is_whitespace) {
                return Err(Error::Parse {
                    at: format!("symbol `{name}`"),
                    msg: "symbol names must be nonempty without `*` or spaces".into(),
                });
            }
            if symbols[..i].iter().any(|(other, _)| other == name) {
                return Err(Error::AlphabetCollision(name.clone()));
            }
        }
        Ok(Arc::new(Alphabet { symbols }))
    }

    /// Two-symbol sided alphabet: `left` on the left face, `right` on the
    /// right face.
    pub fn pair(left: &str, right: &str) -> Result<Arc<Alphabet>> {
        Alphabet::new(vec![
            (left.to_string(), Some(Side::Left)),
            (right.to_string(), Some(Side::Right)),
        ])
    }

    /// Unsided symbols, as used by the single-variable (trace) setting.
    pub fn unsided(names: &[&str]) -> Result<Arc<Alphabet>> {
        Alphabet::new(names.iter().map(|n| (n.to_string(), None)).collect())
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&str, Option<Side>)> {
        self.symbols.iter().map(|(n, s)| (n.as_str(), *s))
    }

    pub fn symbol_name(&self, index: usize) -> &str {
        &self.symbols[index].0
    }

    pub fn symbol_side(&self, index: usize) -> Option<Side> {
        self.symbols[index].1
    }

    pub fn symbol_index(&self, name: &str) -> Result<usize> {
        self.symbols
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn letter(&self, name: &str, starred: bool) -> Result<Letter> {
        let idx = self.symbol_index(name)?;
        Ok(Letter::pack(idx, starred, self.symbols[idx].1))
    }

    pub fn letter_by_index(&self, index: usize, starred: bool) -> Letter {
        Letter::pack(index, starred, self.symbols[index].1)
    }

    /// All letters in deterministic order: symbols in declaration order,
    /// unstarred before starred.
    pub fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::with_capacity(2 * self.symbols.len());
        for i in 0..self.symbols.len() {
            out.push(self.letter_by_index(i, false));
            out.push(self.letter_by_index(i, true));
        }
        out
    }

    /// Parse a space-separated word like `"x x* y"`; empty input is the unit.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut letters = SmallVec::new();
        for token in text.split_whitespace() {
            let (name, starred) = match token.strip_suffix('*') {
                Some(base) => (base, true),
                None => (token, false),
            };
            letters.push(self.letter(name, starred)?);
        }
        Ok(Word { letters })
    }

    pub fn format_letter(&self, letter: Letter) -> String {
        let mut s = self.symbols[letter.symbol()].0.clone();
        if letter.starred() {
            s.push('*');
        }
        s
    }

    pub fn format_word(&self, word: &Word) -> String {
        if word.is_empty() {
            return "1".to_string();
        }
        word.letters()
            .iter()
            .map(|&l| self.format_letter(l))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Disjoint union; errors on any shared symbol name. Returns the merged
    /// alphabet and the index offset applied to `other`'s symbols.
    pub fn union(&self, other: &Alphabet) -> Result<(Arc<Alphabet>, usize)> {
        let offset = self.symbols.len();
        let mut symbols = self.symbols.clone();
        for (name, side) in &other.symbols {
            if self.symbols.iter().any(|(n, _)| n == name) {
                return Err(Error::AlphabetCollision(name.clone()));
            }
            symbols.push((name.clone(), *side));
        }
        Ok((Alphabet::new(symbols)?, offset))
    }

    /// Re-index a word of `other` into this union alphabet.
    pub fn embed(&self, word: &Word, offset: usize) -> Word {
        Word {
            letters: word
                .letters()
                .iter()
                .map(|l| Letter::pack(l.symbol() + offset, l.starred(), l.side()))
                .collect(),
        }
    }

    /// All words of the given length, in lexicographic letter order.
    pub fn words_of_length(&self, len: usize) -> Vec<Word> {
        let letters = self.letters();
        let mut out = Vec::with_capacity(letters.len().pow(len as u32));
        let mut stack: Vec<Letter> = Vec::with_capacity(len);
        fn rec(letters: &[Letter], len: usize, stack: &mut Vec<Letter>, out: &mut Vec<Word>) {
            if stack.len() == len {
                out.push(Word::from_letters(stack.iter().copied()));
                return;
            }
            for &l in letters {
                stack.push(l);
                rec(letters, len, stack, out);
                stack.pop();
            }
        }
        rec(&letters, len, &mut stack, &mut out);
        out
    }
}

/// Formal linear combination of words with scalar coefficients; zero
/// coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct NcPolynomial<S: Scalar> {
    terms: BTreeMap<Word, S>,
}

impl<S: Scalar> NcPolynomial<S> {
    pub fn zero() -> Self {
        NcPolynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        NcPolynomial::monomial(Word::empty(), S::one())
    }

    pub fn scalar(c: S) -> Self {
        NcPolynomial::monomial(Word::empty(), c)
    }

    pub fn from_word(w: Word) -> Self {
        NcPolynomial::monomial(w, S::one())
    }

    pub fn monomial(w: Word, c: S) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        NcPolynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &S)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    pub fn coeff(&self, w: &Word) -> S {
        self.terms.get(w).cloned().unwrap_or_else(S::zero)
    }

    fn add_term(&mut self, w: Word, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        NcPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = NcPolynomial::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                out.add_term(w1.concat(w2), c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return NcPolynomial::zero();
        }
        NcPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(w, x)| (w.clone(), x.clone() * c.clone()))
                .collect(),
        }
    }

    /// Involution: star every word, conjugate every coefficient.
    pub fn star(&self) -> Self {
        NcPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.star(), c.conj()))
                .collect(),
        }
    }

    /// Linear extension of a word functional.
    pub fn expect(&self, mut phi: impl FnMut(&Word) -> Result<S>) -> Result<S> {
        let mut total = S::zero();
        for (w, c) in &self.terms {
            total = total + phi(w)? * c.clone();
        }
        Ok(total)
    }
}

/// `p - phi(p) 1`: the centering used by the P-set machinery.
pub fn center<S: Scalar>(
    p: &NcPolynomial<S>,
    phi: impl FnMut(&Word) -> Result<S>,
) -> Result<NcPolynomial<S>> {
    let mean = p.expect(phi)?;
    Ok(p.sub(&NcPolynomial::scalar(mean)))
}

impl<S: Scalar> fmt::Debug for NcPolynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c:?})*{w:?}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational;
    use proptest::prelude::*;

    type Poly = NcPolynomial<GaussianRational>;

    fn ab() -> Arc<Alphabet> {
        Alphabet::pair("x", "y").unwrap()
    }

    #[test]
    fn star_reverses_and_stars() {
        let a = ab();
        let w = a.parse_word("x y").unwrap();
        assert_eq!(a.format_word(&w.star()), "y* x*");
        assert_eq!(a.format_word(&Word::empty().star()), "1");
        let w = a.parse_word("x x* y").unwrap();
        assert_eq!(a.format_word(&w.star()), "y* x x*");
        assert_eq!(w.star().star(), w);
    }

    #[test]
    fn word_order_is_length_then_lex() {
        let a = ab();
        let mut words = vec![
            a.parse_word("y").unwrap(),
            a.parse_word("x x").unwrap(),
            a.parse_word("x*").unwrap(),
            a.parse_word("x").unwrap(),
        ];
        words.sort();
        let shown: Vec<String> = words.iter().map(|w| a.format_word(w)).collect();
        assert_eq!(shown, vec!["x", "x*", "y", "x x"]);
    }

    #[test]
    fn chi_of_word() {
        let a = ab();
        let w = a.parse_word("x y x*").unwrap();
        assert_eq!(w.chi(&a).unwrap().to_string(), "LRL");
        let u = Alphabet::unsided(&["z"]).unwrap();
        assert!(u.parse_word("z").unwrap().chi(&u).is_err());
    }

    #[test]
    fn alphabet_validation() {
        assert!(Alphabet::new(vec![]).is_err());
        assert!(Alphabet::new(vec![
            ("x".into(), None),
            ("x".into(), Some(Side::Left))
        ])
        .is_err());
        assert!(Alphabet::new(vec![("a b".into(), None)]).is_err());
        assert!(Alphabet::new(vec![("a*".into(), None)]).is_err());
        let a = ab();
        assert!(a.parse_word("x z").is_err());
    }

    #[test]
    fn union_embeds_disjointly() {
        let a = Alphabet::pair("x1", "y1").unwrap();
        let b = Alphabet::pair("x2", "y2").unwrap();
        let (u, off) = a.union(&b).unwrap();
        assert_eq!(off, 2);
        let w = b.parse_word("x2 y2*").unwrap();
        assert_eq!(u.format_word(&u.embed(&w, off)), "x2 y2*");
        assert!(a.union(&a).is_err());
    }

    fn small_poly() -> impl Strategy<Value = Poly> {
        let letter_strat = (0usize..2, any::<bool>());
        let word_strat = proptest::collection::vec(letter_strat, 0..4).prop_map(|ls| {
            let a = ab();
            Word::from_letters(ls.into_iter().map(|(i, s)| a.letter_by_index(i, s)))
        });
        proptest::collection::vec((word_strat, -3i64..=3), 0..4).prop_map(|terms| {
            let mut p = Poly::zero();
            for (w, c) in terms {
                p = p.add(&Poly::monomial(w, GaussianRational::from_int(c)));
            }
            p
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(p in small_poly(), q in small_poly(), r in small_poly()) {
            prop_assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
            prop_assert_eq!(p.mul(&q.add(&r)), p.mul(&q).add(&p.mul(&r)));
            prop_assert_eq!(p.add(&q), q.add(&p));
        }

        #[test]
        fn involution_is_antimultiplicative(p in small_poly(), q in small_poly()) {
            prop_assert_eq!(p.mul(&q).star(), q.star().mul(&p.star()));
            prop_assert_eq!(p.star().star(), p);
        }

        #[test]
        fn degree_additive_on_words(
            ls1 in proptest::collection::vec((0usize..2, any::<bool>()), 0..5),
            ls2 in proptest::collection::vec((0usize..2, any::<bool>()), 0..5),
        ) {
            let a = ab();
            let w1 = Word::from_letters(ls1.into_iter().map(|(i, s)| a.letter_by_index(i, s)));
            let w2 = Word::from_letters(ls2.into_iter().map(|(i, s)| a.letter_by_index(i, s)));
            prop_assert_eq!(w1.concat(&w2).len(), w1.len() + w2.len());
        }
    }

    #[test]
    fn centering_kills_expectation() {
        // phi(x) = 2, phi of everything else = 0
        let a = ab();
        let xw = a.parse_word("x").unwrap();
        let phi = |w: &Word| -> crate::error::Result<GaussianRational> {
            if w.is_empty() {
                Ok(GaussianRational::from_int(1))
            } else if *w == a.parse_word("x").unwrap() {
                Ok(GaussianRational::from_int(2))
            } else {
                Ok(GaussianRational::from_int(0))
            }
        };
        let p = Poly::from_word(xw);
        let centered = center(&p, phi).unwrap();
        assert_eq!(centered.expect(phi).unwrap(), GaussianRational::from_int(0));
        // centering the unit gives zero
        let unit = Poly::one();
        assert!(center(&unit, phi).unwrap().is_zero());
    }
}
