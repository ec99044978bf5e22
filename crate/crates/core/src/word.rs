//! Words, normal-form monomials `s_J s_K*` and noncommutative polynomials in
//! the Cuntz generators.
//!
//! Every nonzero product of generators and their adjoints reduces to a
//! single monomial `s_J s_K*` using only `s_i* s_j = δ_ij I`. The
//! completeness relation `Σ s_i s_i* = I` is never applied as a rewrite, so
//! the pair `(J, K)` is the normal form.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Coefficient;

/// Number of generators of a Cuntz algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rank {
    Finite(usize),
    Infinite,
}

impl Rank {
    pub fn contains(self, letter: usize) -> bool {
        match self {
            Rank::Finite(n) => (1..=n).contains(&letter),
            Rank::Infinite => letter >= 1,
        }
    }

    pub fn check(self, word: &MultiIndex) -> Result<()> {
        match word.letters().iter().find(|&&l| !self.contains(l)) {
            None => Ok(()),
            Some(&index) => Err(Error::LetterOutOfRange {
                index,
                n: match self {
                    Rank::Finite(n) => n,
                    Rank::Infinite => usize::MAX,
                },
            }),
        }
    }

    pub fn check_monomial(self, m: &Monomial) -> Result<()> {
        self.check(&m.left)?;
        self.check(&m.right)
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Finite(n) => write!(f, "{n}"),
            Rank::Infinite => write!(f, "inf"),
        }
    }
}

/// A finite word over generator indices (1-based). The empty word stands
/// for `s_∅ = I`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(letters: Vec<usize>) -> Self {
        MultiIndex(letters)
    }

    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn single(letter: usize) -> Self {
        MultiIndex(vec![letter])
    }

    /// `letter^r`.
    pub fn power(letter: usize, r: usize) -> Self {
        MultiIndex(vec![letter; r])
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &MultiIndex) -> MultiIndex {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        MultiIndex(v)
    }

    /// The remainder of `self` after removing `prefix`, if it is one.
    pub fn strip_prefix(&self, prefix: &MultiIndex) -> Option<MultiIndex> {
        self.0
            .strip_prefix(prefix.0.as_slice())
            .map(|rest| MultiIndex(rest.to_vec()))
    }

    /// Every word over `{1..n}` of length exactly `len`, in lexicographic order.
    pub fn all_of_length(n: usize, len: usize) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::empty()];
        for _ in 0..len {
            out = out
                .iter()
                .flat_map(|w| {
                    (1..=n).map(move |l| {
                        let mut v = w.0.clone();
                        v.push(l);
                        MultiIndex(v)
                    })
                })
                .collect();
        }
        out
    }

    /// Every word over `{1..n}` of length at most `max_len`.
    pub fn all_up_to(n: usize, max_len: usize) -> Vec<MultiIndex> {
        (0..=max_len)
            .flat_map(|l| MultiIndex::all_of_length(n, l))
            .collect()
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        MultiIndex(v)
    }
}

impl<const N: usize> From<[usize; N]> for MultiIndex {
    fn from(v: [usize; N]) -> Self {
        MultiIndex(v.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// The monomial `s_left s_right*`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial {
    pub left: MultiIndex,
    pub right: MultiIndex,
}

impl Monomial {
    pub fn new(left: impl Into<MultiIndex>, right: impl Into<MultiIndex>) -> Self {
        Monomial {
            left: left.into(),
            right: right.into(),
        }
    }

    pub fn identity() -> Self {
        Monomial::default()
    }

    /// `s_J`.
    pub fn word(left: impl Into<MultiIndex>) -> Self {
        Monomial::new(left, MultiIndex::empty())
    }

    /// `s_i`.
    pub fn generator(i: usize) -> Self {
        Monomial::word(MultiIndex::single(i))
    }

    /// `s_i*`.
    pub fn generator_adjoint(i: usize) -> Self {
        Monomial::new(MultiIndex::empty(), MultiIndex::single(i))
    }

    pub fn is_identity(&self) -> bool {
        self.left.is_empty() && self.right.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.left.len() + self.right.len()
    }

    pub fn adjoint(&self) -> Monomial {
        Monomial {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    /// Normal form of `(s_Ja s_Ka*)(s_Jb s_Kb*)`, or `None` when it vanishes.
    pub fn mul(&self, other: &Monomial) -> Option<Monomial> {
        if let Some(tail) = other.left.strip_prefix(&self.right) {
            Some(Monomial {
                left: self.left.concat(&tail),
                right: other.right.clone(),
            })
        } else {
            self.right.strip_prefix(&other.left).map(|tail| Monomial {
                left: self.left.clone(),
                right: other.right.concat(&tail),
            })
        }
    }

    /// Applies `f` to every letter of both halves.
    pub fn relabel(&self, f: impl Fn(usize) -> usize) -> Monomial {
        let map = |w: &MultiIndex| MultiIndex(w.0.iter().map(|&l| f(l)).collect());
        Monomial {
            left: map(&self.left),
            right: map(&self.right),
        }
    }
}

/// [`Monomial::mul`] with the usage check that both factors live in `O_n`.
pub fn multiply_monomials(rank: Rank, a: &Monomial, b: &Monomial) -> Result<Option<Monomial>> {
    rank.check_monomial(a)?;
    rank.check_monomial(b)?;
    Ok(a.mul(b))
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for l in self.left.letters() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "s{l}")?;
        }
        // (s_K)* = s_{k_r}* ... s_{k_1}*
        for l in self.right.letters().iter().rev() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "s{l}*")?;
        }
        Ok(())
    }
}

/// Parses a whitespace separated product such as `s1 s2 s1*` or `I`.
///
/// The product is reduced with the Cuntz relations, so the result may be
/// zero (`Ok(None)`), e.g. for `s1* s2`.
pub fn parse_product(text: &str) -> Result<Option<Monomial>> {
    let mut acc = Some(Monomial::identity());
    let mut any = false;
    for token in text.split_whitespace() {
        any = true;
        let factor = parse_token(token)?;
        acc = match (acc, factor) {
            (Some(a), Some(b)) => a.mul(&b),
            _ => None,
        };
    }
    if !any {
        return Err(Error::Parse("empty word".into()));
    }
    Ok(acc)
}

fn parse_token(token: &str) -> Result<Option<Monomial>> {
    if token == "I" {
        return Ok(Some(Monomial::identity()));
    }
    if token == "0" {
        return Ok(None);
    }
    let (body, star) = match token.strip_suffix('*') {
        Some(b) => (b, true),
        None => (token, false),
    };
    let digits = body
        .strip_prefix('s')
        .ok_or_else(|| Error::Parse(format!("bad token {token:?}")))?;
    let i: usize = digits
        .parse()
        .map_err(|_| Error::Parse(format!("bad generator index in {token:?}")))?;
    if i == 0 {
        return Err(Error::Parse("generator indices are 1-based".into()));
    }
    Ok(Some(if star {
        Monomial::generator_adjoint(i)
    } else {
        Monomial::generator(i)
    }))
}

impl FromStr for Monomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_product(s)?.ok_or_else(|| Error::Parse(format!("{s:?} reduces to zero")))
    }
}

/// A finite linear combination of normal-form monomials.
#[derive(Clone, Debug, PartialEq)]
pub struct NcPolynomial<C> {
    rank: Rank,
    terms: BTreeMap<Monomial, C>,
    prune: f64,
}

impl<C: Coefficient> NcPolynomial<C> {
    pub fn zero(rank: Rank) -> Self {
        NcPolynomial {
            rank,
            terms: BTreeMap::new(),
            prune: C::default_prune(),
        }
    }

    pub fn one(rank: Rank) -> Self {
        Self::from_monomial(rank, Monomial::identity(), C::one()).expect("unit is valid")
    }

    pub fn from_monomial(rank: Rank, m: Monomial, c: C) -> Result<Self> {
        rank.check_monomial(&m)?;
        let mut p = Self::zero(rank);
        p.add_term(m, c);
        Ok(p)
    }

    pub fn from_terms(rank: Rank, terms: impl IntoIterator<Item = (Monomial, C)>) -> Result<Self> {
        let mut p = Self::zero(rank);
        for (m, c) in terms {
            rank.check_monomial(&m)?;
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Replaces the prune threshold and re-prunes.
    pub fn with_prune(mut self, prune: f64) -> Self {
        self.prune = prune;
        let keep = self.prune;
        self.terms
            .retain(|_, c| c.magnitude() > keep || (keep == 0.0 && !c.is_zero()));
        self
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    pub fn prune_threshold(&self) -> f64 {
        self.prune
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    fn negligible(&self, c: &C) -> bool {
        if self.prune == 0.0 {
            c.is_zero()
        } else {
            c.magnitude() <= self.prune
        }
    }

    /// Accumulates `c · m` without range checks.
    pub(crate) fn add_term(&mut self, m: Monomial, c: C) {
        let sum = match self.terms.remove(&m) {
            Some(old) => old + c,
            None => c,
        };
        if !self.negligible(&sum) {
            self.terms.insert(m, sum);
        }
    }

    fn same_rank(&self, other: &Self) -> Result<()> {
        if self.rank == other.rank {
            Ok(())
        } else {
            Err(Error::AmbientMismatch {
                left: self.rank.to_string(),
                right: other.rank.to_string(),
            })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_rank(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.scale(&-C::one()))
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.rank).with_prune(self.prune);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a.clone() * c.clone());
        }
        out
    }

    /// Bilinear extension of [`Monomial::mul`].
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_rank(other)?;
        let mut out = Self::zero(self.rank).with_prune(self.prune);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some(m) = ma.mul(mb) {
                    out.add_term(m, ca.clone() * cb.clone());
                }
            }
        }
        Ok(out)
    }

    /// `p*`: monomials reversed, coefficients conjugated.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.rank).with_prune(self.prune);
        for (m, c) in &self.terms {
            out.add_term(m.adjoint(), c.conj());
        }
        out
    }

    /// Rebuilds the polynomial over `rank` by mapping each monomial to a
    /// polynomial and summing.
    pub fn flat_map_monomials<F>(&self, rank: Rank, mut f: F) -> Result<Self>
    where
        F: FnMut(&Monomial) -> Result<Vec<(Monomial, C)>>,
    {
        let mut out = Self::zero(rank).with_prune(self.prune);
        for (m, c) in &self.terms {
            for (image, w) in f(m)? {
                rank.check_monomial(&image)?;
                out.add_term(image, c.clone() * w);
            }
        }
        Ok(out)
    }

    /// Largest coefficient modulus.
    pub fn max_coefficient(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.magnitude())
            .fold(0.0, f64::max)
    }
}

/// True iff every coefficient of `p - q` has modulus at most `tol`.
pub fn polynomials_equal<C: Coefficient>(
    p: &NcPolynomial<C>,
    q: &NcPolynomial<C>,
    tol: f64,
) -> bool {
    let mut diff: BTreeMap<&Monomial, C> = BTreeMap::new();
    for (m, c) in p.terms() {
        diff.insert(m, c.clone());
    }
    for (m, c) in q.terms() {
        let e = diff.entry(m).or_insert_with(C::zero);
        *e = e.clone() - c.clone();
    }
    diff.values().all(|c| c.magnitude() <= tol)
}

impl<C: Coefficient> fmt::Display for NcPolynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c:?})·{m}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    type Poly = NcPolynomial<Complex64>;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn prefix_rule_examples() {
        let s1 = Monomial::generator(1);
        let s1s = Monomial::generator_adjoint(1);
        let s2 = Monomial::generator(2);
        assert_eq!(s1.mul(&s1s), Some(Monomial::new([1], [1])));
        assert_eq!(s1s.mul(&s1), Some(Monomial::identity()));
        assert_eq!(s1s.mul(&s2), None);
    }

    #[test]
    fn mismatched_rank_is_a_usage_error() {
        let s3 = Monomial::generator(3);
        assert!(multiply_monomials(Rank::Finite(2), &s3, &Monomial::identity()).is_err());
        let p = Poly::one(Rank::Finite(2));
        let q = Poly::one(Rank::Finite(3));
        assert!(matches!(
            p.checked_mul(&q),
            Err(Error::AmbientMismatch { .. })
        ));
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(Monomial::word([2, 1]).adjoint(), Monomial::new([], [2, 1]));
        let z = c(0.4, -1.3);
        let p = Poly::from_monomial(Rank::Finite(2), Monomial::identity(), z).unwrap();
        assert_eq!(p.adjoint().coefficient(&Monomial::identity()), z.conj());
    }

    #[test]
    fn unit_and_zero_products() {
        let r = Rank::Finite(2);
        let p = Poly::from_terms(
            r,
            [
                (Monomial::generator(1), c(1.0, 0.0)),
                (Monomial::word([2, 1]), c(0.0, 2.0)),
            ],
        )
        .unwrap();
        assert_eq!(p.checked_mul(&Poly::one(r)).unwrap(), p);
        assert!(p.checked_mul(&Poly::zero(r)).unwrap().is_zero());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(
            parse_product("s1 s2 s1*").unwrap(),
            Some(Monomial::new([1, 2], [1]))
        );
        assert_eq!(parse_product("s1* s2").unwrap(), None);
        assert_eq!(parse_product("I").unwrap(), Some(Monomial::identity()));
        assert_eq!(
            parse_product("s2* s2 s1").unwrap(),
            Some(Monomial::generator(1))
        );
        let m = Monomial::new([1, 2], [3, 1]);
        assert_eq!(m.to_string(), "s1 s2 s1* s3*");
        assert_eq!(m.to_string().parse::<Monomial>().unwrap(), m);
        assert!(parse_product("x1").is_err());
        assert!(parse_product("s0").is_err());
        assert!(parse_product("").is_err());
    }

    #[test]
    fn associativity_exhaustive_n2() {
        let words = MultiIndex::all_up_to(2, 2);
        let monos: Vec<Monomial> = words
            .iter()
            .flat_map(|l| {
                words
                    .iter()
                    .map(move |r| Monomial::new(l.clone(), r.clone()))
            })
            .filter(|m| m.degree() <= 4)
            .collect();
        for a in &monos {
            for b in &monos {
                let ab = a.mul(b);
                for cc in &monos {
                    let left = ab.as_ref().and_then(|x| x.mul(cc));
                    let right = b.mul(cc).and_then(|bc| a.mul(&bc));
                    assert_eq!(left, right, "{a} | {b} | {cc}");
                }
            }
        }
    }

    #[test]
    fn adjoint_reverses_products() {
        let words = MultiIndex::all_up_to(2, 3);
        for l in &words {
            for r in words.iter().take(7) {
                let a = Monomial::new(l.clone(), r.clone());
                let b = Monomial::new(r.clone(), l.clone()); // arbitrary second factor
                let lhs = a.mul(&b).map(|m| m.adjoint());
                let rhs = b.adjoint().mul(&a.adjoint());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn cuntz_relations() {
        for n in 2..=4 {
            for i in 1..=n {
                for j in 1..=n {
                    let p = Monomial::generator_adjoint(i).mul(&Monomial::generator(j));
                    assert_eq!(p, (i == j).then(Monomial::identity));
                }
            }
            let r = Rank::Finite(n);
            let completeness =
                Poly::from_terms(r, (1..=n).map(|i| (Monomial::new([i], [i]), c(1.0, 0.0))))
                    .unwrap();
            for w in MultiIndex::all_up_to(n, 3)
                .into_iter()
                .filter(|w| !w.is_empty())
            {
                let sj = Poly::from_monomial(r, Monomial::word(w), c(1.0, 0.0)).unwrap();
                let lhs = completeness.checked_mul(&sj).unwrap();
                assert!(polynomials_equal(&lhs, &sj, 0.0));
            }
        }
    }

    #[test]
    fn prune_drops_small_terms() {
        let r = Rank::Finite(2);
        let p = Poly::from_monomial(r, Monomial::generator(1), c(1.0, 0.0)).unwrap();
        let q = Poly::from_monomial(r, Monomial::generator(1), c(1.0 + 1e-16, 0.0)).unwrap();
        assert!(p.checked_sub(&q).unwrap().is_zero());
        assert!(polynomials_equal(&p, &q, 1e-12));
        let s21 = Poly::from_monomial(r, Monomial::word([2, 1]), c(1.0, 0.0)).unwrap();
        assert!(!polynomials_equal(&p, &s21, 1e-9));
    }
}
