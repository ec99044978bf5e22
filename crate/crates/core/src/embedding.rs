//! Geometric progression embeddings `O_m -> O_n` and related maps.
//!
//! The generator `t_{(n-1)r+i}` (`1 <= i <= n-1`) is sent to the word
//! `s_n^r s_i`; in finite order `k` the last generator `t_m` is sent to
//! `s_n^k`, `m = (n-1)k + 1`. The images form a prefix code, which is what
//! makes [`GpEmbedding::factorize`] a single left-to-right scan.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::scalar::Coefficient;
use crate::word::{Monomial, MultiIndex, NcPolynomial, Rank};

/// Order of a geometric progression embedding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "{k}"),
            Order::Infinite => write!(f, "infinite"),
        }
    }
}

/// Returns `k` with `m = (n-1)k + 1`, the order of the unique GP embedding
/// `O_m -> O_n`.
pub fn validate_embedding(n: usize, m: usize) -> Result<usize> {
    if n < 2 || m < 2 {
        return Err(Error::Usage(format!(
            "need n >= 2 and m >= 2, got n={n}, m={m}"
        )));
    }
    if !(m - 1).is_multiple_of(n - 1) {
        return Err(Error::NoEmbedding { n, m });
    }
    Ok((m - 1) / (n - 1))
}

/// `s_J = t_Ĵ s_n^a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factorization {
    pub hat: MultiIndex,
    pub tail: usize,
}

/// The geometric progression embedding of `O_m` into `O_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GpEmbedding {
    n: usize,
    order: Order,
}

impl GpEmbedding {
    pub fn new(n: usize, order: Order) -> Result<Self> {
        if n < 2 {
            return Err(Error::Usage(format!(
                "ambient algebra needs n >= 2, got {n}"
            )));
        }
        if order == Order::Finite(0) {
            return Err(Error::Usage("order must be at least 1".into()));
        }
        Ok(GpEmbedding { n, order })
    }

    pub fn finite(n: usize, k: usize) -> Result<Self> {
        Self::new(n, Order::Finite(k))
    }

    pub fn infinite(n: usize) -> Result<Self> {
        Self::new(n, Order::Infinite)
    }

    pub fn from_source_size(n: usize, m: usize) -> Result<Self> {
        Self::finite(n, validate_embedding(n, m)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn k(&self) -> Option<usize> {
        match self.order {
            Order::Finite(k) => Some(k),
            Order::Infinite => None,
        }
    }

    /// Source size `m`, `None` for infinite order.
    pub fn m(&self) -> Option<usize> {
        self.k().map(|k| (self.n - 1) * k + 1)
    }

    pub fn source_rank(&self) -> Rank {
        match self.m() {
            Some(m) => Rank::Finite(m),
            None => Rank::Infinite,
        }
    }

    pub fn target_rank(&self) -> Rank {
        Rank::Finite(self.n)
    }

    /// The word `f(t_j)`.
    pub fn generator_image(&self, j: usize) -> Result<MultiIndex> {
        let n = self.n;
        if j == 0 {
            return Err(self.out_of_range(j));
        }
        if let Some(m) = self.m() {
            if j > m {
                return Err(self.out_of_range(j));
            }
            if j == m {
                return Ok(MultiIndex::power(n, self.k().unwrap_or(0)));
            }
        }
        let r = (j - 1) / (n - 1);
        let i = (j - 1) % (n - 1) + 1;
        let mut w = vec![n; r];
        w.push(i);
        Ok(MultiIndex::new(w))
    }

    fn out_of_range(&self, j: usize) -> Error {
        Error::GeneratorOutOfRange {
            index: j,
            m: self.source_rank().to_string(),
        }
    }

    /// `f(t_J)` as a word over `{1..n}`.
    pub fn expand_word(&self, hat: &MultiIndex) -> Result<MultiIndex> {
        let mut w = Vec::new();
        for &j in hat.letters() {
            w.extend(self.generator_image(j)?.into_letters());
        }
        Ok(MultiIndex::new(w))
    }

    /// The unique `(Ĵ, a)` with `s_J = t_Ĵ s_n^a`; `a < k` in finite order.
    pub fn factorize(&self, word: &MultiIndex) -> Result<Factorization> {
        let n = self.n;
        Rank::Finite(n).check(word)?;
        let mut hat = Vec::new();
        let mut run = 0usize;
        for &letter in word.letters() {
            if letter == n {
                run += 1;
                continue;
            }
            match self.order {
                Order::Finite(k) => {
                    let m = (n - 1) * k + 1;
                    hat.extend(std::iter::repeat_n(m, run / k));
                    hat.push((n - 1) * (run % k) + letter);
                }
                Order::Infinite => hat.push((n - 1) * run + letter),
            }
            run = 0;
        }
        let tail = match self.order {
            Order::Finite(k) => {
                let m = (n - 1) * k + 1;
                hat.extend(std::iter::repeat_n(m, run / k));
                run % k
            }
            Order::Infinite => run,
        };
        Ok(Factorization {
            hat: MultiIndex::new(hat),
            tail,
        })
    }

    /// `f(t_Ĵ) s_n^a`.
    pub fn reassemble(&self, fact: &Factorization) -> Result<MultiIndex> {
        Ok(self
            .expand_word(&fact.hat)?
            .concat(&MultiIndex::power(self.n, fact.tail)))
    }

    /// Homomorphic extension of the generator images to polynomials over `O_m`.
    pub fn expand_poly<C: Coefficient>(&self, p: &NcPolynomial<C>) -> Result<NcPolynomial<C>> {
        if p.rank() != self.source_rank() {
            return Err(Error::AmbientMismatch {
                left: p.rank().to_string(),
                right: self.source_rank().to_string(),
            });
        }
        p.flat_map_monomials(self.target_rank(), |m| {
            Ok(vec![(
                Monomial::new(self.expand_word(&m.left)?, self.expand_word(&m.right)?),
                C::one(),
            )])
        })
    }

    /// `t(z) = Σ z_j t_j` as an element of the source algebra.
    pub fn linear_combination<C: Coefficient>(&self, z: &[C]) -> Result<NcPolynomial<C>> {
        if let Some(m) = self.m() {
            if z.len() != m {
                return Err(Error::InvalidParameter(format!(
                    "expected {m} coefficients, got {}",
                    z.len()
                )));
            }
        }
        NcPolynomial::from_terms(
            self.source_rank(),
            z.iter()
                .enumerate()
                .map(|(j, c)| (Monomial::generator(j + 1), c.clone())),
        )
    }
}

/// Index of `J ∈ {1..n}^m` in the lexicographic coding `i = Σ (j_r - 1) n^(m-r) + 1`.
pub fn subcuntz_index(n: usize, m: usize, word: &MultiIndex) -> Result<usize> {
    if word.len() != m {
        return Err(Error::Usage(format!(
            "word {word} has length {}, expected {m}",
            word.len()
        )));
    }
    Rank::Finite(n).check(word)?;
    Ok(word.letters().iter().fold(0, |acc, &j| acc * n + (j - 1)) + 1)
}

/// Inverse of [`subcuntz_index`].
pub fn subcuntz_word(n: usize, m: usize, index: usize) -> Result<MultiIndex> {
    let total = n
        .checked_pow(m as u32)
        .ok_or_else(|| Error::Usage("n^m overflows".into()))?;
    if index == 0 || index > total {
        return Err(Error::Usage(format!("index {index} outside 1..={total}")));
    }
    let mut rest = index - 1;
    let mut letters = vec![0; m];
    for slot in letters.iter_mut().rev() {
        *slot = rest % n + 1;
        rest /= n;
    }
    Ok(MultiIndex::new(letters))
}

/// The flip `α(s_i) = s_{n-i+1}`.
pub fn flip_monomial(n: usize, m: &Monomial) -> Monomial {
    m.relabel(|i| n + 1 - i)
}

pub fn flip_automorphism<C: Coefficient>(n: usize, p: &NcPolynomial<C>) -> Result<NcPolynomial<C>> {
    if p.rank() != Rank::Finite(n) {
        return Err(Error::AmbientMismatch {
            left: p.rank().to_string(),
            right: n.to_string(),
        });
    }
    p.flat_map_monomials(p.rank(), |m| Ok(vec![(flip_monomial(n, m), C::one())]))
}

/// Images of `f' = α ∘ f ∘ β` where `f` is the order-2 GP embedding of
/// `O_{2n-1}` and `β(t_j) = t_{2n-j}`.
pub fn flipped_gp_images(n: usize) -> Result<Vec<MultiIndex>> {
    let f = GpEmbedding::finite(n, 2)?;
    (1..=2 * n - 1)
        .map(|j| {
            let w = f.generator_image(2 * n - j)?;
            Ok(MultiIndex::new(
                w.letters().iter().map(|&i| n + 1 - i).collect(),
            ))
        })
        .collect()
}

fn word_images<C: Coefficient>(
    g: &SquareMatrix<C>,
    word: &MultiIndex,
    conj: bool,
) -> Vec<(MultiIndex, C)> {
    let n = g.dim();
    let mut acc = vec![(Vec::new(), C::one())];
    for &letter in word.letters() {
        let mut next = Vec::with_capacity(acc.len() * n);
        for (w, c) in &acc {
            for l in 1..=n {
                let e = g.get(l - 1, letter - 1);
                let e = if conj { e.conj() } else { e.clone() };
                if e.is_zero() {
                    continue;
                }
                let mut w2 = w.clone();
                w2.push(l);
                next.push((w2, c.clone() * e));
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|(w, c)| (MultiIndex::new(w), c))
        .collect()
}

/// `α_g(s_J s_K*)` expanded in normal form, `α_g(s_i) = Σ_j g_ji s_j`.
pub fn gauge_monomial<C: Coefficient>(g: &SquareMatrix<C>, m: &Monomial) -> Vec<(Monomial, C)> {
    let left = word_images(g, &m.left, false);
    let right = word_images(g, &m.right, true);
    let mut out = Vec::with_capacity(left.len() * right.len());
    for (l, a) in &left {
        for (r, b) in &right {
            out.push((Monomial::new(l.clone(), r.clone()), a.clone() * b.clone()));
        }
    }
    out
}

/// The gauge automorphism `α_g` on polynomials. `g` must be `n × n` unitary
/// within `tol`.
pub fn gauge_automorphism<C: Coefficient>(
    g: &SquareMatrix<C>,
    p: &NcPolynomial<C>,
    tol: f64,
) -> Result<NcPolynomial<C>> {
    g.ensure_unitary(tol)?;
    if p.rank() != Rank::Finite(g.dim()) {
        return Err(Error::AmbientMismatch {
            left: p.rank().to_string(),
            right: g.dim().to_string(),
        });
    }
    p.flat_map_monomials(p.rank(), |m| Ok(gauge_monomial(g, m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn validate_examples() {
        assert_eq!(validate_embedding(2, 3).unwrap(), 2);
        assert_eq!(validate_embedding(2, 2).unwrap(), 1);
        assert!(matches!(
            validate_embedding(3, 4),
            Err(Error::NoEmbedding { .. })
        ));
        assert!(validate_embedding(1, 4).is_err());
    }

    #[test]
    fn image_examples() {
        let f = GpEmbedding::finite(2, 2).unwrap();
        let im: Vec<_> = (1..=3).map(|j| f.generator_image(j).unwrap()).collect();
        assert_eq!(
            im,
            vec![
                MultiIndex::from([1]),
                MultiIndex::from([2, 1]),
                MultiIndex::from([2, 2])
            ]
        );
        assert!(f.generator_image(4).is_err());
        assert!(f.generator_image(0).is_err());

        let g = GpEmbedding::infinite(2).unwrap();
        for r in 0..6 {
            let mut w = vec![2; r];
            w.push(1);
            assert_eq!(g.generator_image(r + 1).unwrap(), MultiIndex::new(w));
        }

        let h = GpEmbedding::finite(3, 2).unwrap();
        assert_eq!(h.m(), Some(5));
        assert_eq!(h.generator_image(5).unwrap(), MultiIndex::from([3, 3]));
        assert_eq!(h.generator_image(4).unwrap(), MultiIndex::from([3, 2]));
    }

    #[test]
    fn factorize_examples() {
        let f = GpEmbedding::finite(2, 2).unwrap();
        let fact = f.factorize(&MultiIndex::from([2, 1])).unwrap();
        assert_eq!(
            fact,
            Factorization {
                hat: MultiIndex::from([2]),
                tail: 0
            }
        );

        let word = MultiIndex::from([2, 2, 2]);
        let fact = f.factorize(&word).unwrap();
        assert_eq!(
            fact,
            Factorization {
                hat: MultiIndex::from([3]),
                tail: 1
            }
        );
        assert_eq!(f.reassemble(&fact).unwrap(), word);

        let empty = f.factorize(&MultiIndex::empty()).unwrap();
        assert_eq!(
            empty,
            Factorization {
                hat: MultiIndex::empty(),
                tail: 0
            }
        );

        assert!(f.factorize(&MultiIndex::from([3])).is_err());
    }

    #[test]
    fn middle_runs_emit_last_generator_first() {
        // s_2^5 s_1 with k = 2: 5 = 2·2 + 1, so t_3 t_3 t_2.
        let f = GpEmbedding::finite(2, 2).unwrap();
        let fact = f.factorize(&MultiIndex::from([2, 2, 2, 2, 2, 1])).unwrap();
        assert_eq!(fact.hat, MultiIndex::from([3, 3, 2]));
        assert_eq!(fact.tail, 0);
        let g = GpEmbedding::infinite(2).unwrap();
        let fact = g
            .factorize(&MultiIndex::from([2, 2, 2, 2, 2, 1, 2, 2]))
            .unwrap();
        assert_eq!(fact.hat, MultiIndex::from([6]));
        assert_eq!(fact.tail, 2);
    }

    #[test]
    fn factorization_sound_exhaustive() {
        for n in [2, 3] {
            let words = MultiIndex::all_up_to(n, if n == 2 { 8 } else { 6 });
            for order in [
                Order::Finite(1),
                Order::Finite(2),
                Order::Finite(3),
                Order::Infinite,
            ] {
                let f = GpEmbedding::new(n, order).unwrap();
                for w in &words {
                    let fact = f.factorize(w).unwrap();
                    if let Some(k) = f.k() {
                        assert!(fact.tail < k);
                    }
                    assert_eq!(&f.reassemble(&fact).unwrap(), w);
                }
            }
        }
    }

    #[test]
    fn images_are_isometries_with_orthogonal_ranges() {
        for (n, k) in [(2, 2), (2, 3), (3, 2), (4, 3)] {
            let f = GpEmbedding::finite(n, k).unwrap();
            let m = f.m().unwrap();
            for a in 1..=m {
                for b in 1..=m {
                    let ta = Monomial::word(f.generator_image(a).unwrap());
                    let tb = Monomial::word(f.generator_image(b).unwrap());
                    assert_eq!(ta.adjoint().mul(&tb), (a == b).then(Monomial::identity));
                }
            }
        }
    }

    #[test]
    fn expand_t_of_z() {
        let f = GpEmbedding::finite(2, 2).unwrap();
        let z = [
            Complex64::new(0.1, 0.2),
            Complex64::new(0.3, 0.0),
            Complex64::new(0.0, -0.4),
        ];
        let t = f.expand_poly(&f.linear_combination(&z).unwrap()).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.coefficient(&Monomial::word([1])), z[0]);
        assert_eq!(t.coefficient(&Monomial::word([2, 1])), z[1]);
        assert_eq!(t.coefficient(&Monomial::word([2, 2])), z[2]);

        let one = NcPolynomial::<Complex64>::one(Rank::Finite(3));
        assert_eq!(
            f.expand_poly(&one).unwrap(),
            NcPolynomial::one(Rank::Finite(2))
        );
        assert!(f
            .expand_poly(&NcPolynomial::<Complex64>::one(Rank::Finite(4)))
            .is_err());
    }

    #[test]
    fn subcuntz_coding() {
        let words: Vec<_> = (1..=4).map(|i| subcuntz_word(2, 2, i).unwrap()).collect();
        assert_eq!(
            words,
            vec![
                MultiIndex::from([1, 1]),
                MultiIndex::from([1, 2]),
                MultiIndex::from([2, 1]),
                MultiIndex::from([2, 2])
            ]
        );
        assert_eq!(subcuntz_index(2, 1, &MultiIndex::from([1])).unwrap(), 1);
        assert_eq!(subcuntz_index(2, 1, &MultiIndex::from([2])).unwrap(), 2);
        for n in 2..=4 {
            for m in 1..=3 {
                for w in MultiIndex::all_of_length(n, m) {
                    let i = subcuntz_index(n, m, &w).unwrap();
                    assert_eq!(subcuntz_word(n, m, i).unwrap(), w);
                }
            }
        }
        assert!(subcuntz_index(2, 2, &MultiIndex::from([1])).is_err());
        assert!(subcuntz_word(2, 2, 5).is_err());
    }

    #[test]
    fn flipped_images() {
        for n in 2..=5 {
            let got = flipped_gp_images(n).unwrap();
            let mut want = vec![MultiIndex::from([1, 1])];
            want.extend((2..=n).map(|i| MultiIndex::from([1, i])));
            want.extend((2..=n).map(MultiIndex::single));
            assert_eq!(got, want);
        }
        let r = Rank::Finite(2);
        let s1 = NcPolynomial::from_monomial(r, Monomial::generator(1), Complex64::new(1.0, 0.0))
            .unwrap();
        let s2 = NcPolynomial::from_monomial(r, Monomial::generator(2), Complex64::new(1.0, 0.0))
            .unwrap();
        assert_eq!(flip_automorphism(2, &s1).unwrap(), s2);
    }

    #[test]
    fn gauge_diagonal_phase() {
        let theta: f64 = 0.7;
        let ph = Complex64::from_polar(1.0, theta);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let g = SquareMatrix::from_rows(vec![vec![ph, zero], vec![zero, one]]).unwrap();
        let r = Rank::Finite(2);
        let s1 = NcPolynomial::from_monomial(r, Monomial::generator(1), one).unwrap();
        let image = gauge_automorphism(&g, &s1, 1e-9).unwrap();
        assert_eq!(image.len(), 1);
        assert!((image.coefficient(&Monomial::generator(1)) - ph).norm() < 1e-15);
        let s2 = NcPolynomial::from_monomial(r, Monomial::generator(2), one).unwrap();
        assert_eq!(gauge_automorphism(&g, &s2, 1e-9).unwrap(), s2);

        let bad = SquareMatrix::from_rows(vec![vec![one, one], vec![zero, one]]).unwrap();
        assert!(matches!(
            gauge_automorphism(&bad, &s1, 1e-9),
            Err(Error::NonUnitary { .. })
        ));
    }
}
