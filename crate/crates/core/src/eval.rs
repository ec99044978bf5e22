//! Closed-form evaluation of GP states.
//!
//! A monomial `s_J s_K*` is split as `t_Ĵ s_n^a (t_K̂ s_n^b)*`, so that
//! `ω(s_J s_K*) = conj(z_Ĵ) z_K̂ Θ_{a,b}` with `Θ_{a,b} = ω(s_n^a (s_n^b)*)`.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::embedding::{flip_monomial, gauge_automorphism, GpEmbedding};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, numerical_rank};
use crate::matrix::SquareMatrix;
use crate::params::{
    flipped_as_gp, gauge_transform_param, region_of, CuntzParam, FiniteGpParam, GpState, L2GpParam,
    Region,
};
use crate::scalar::Real;
use crate::word::{Monomial, MultiIndex, NcPolynomial, Rank};

/// Relative singular-value cut used for the correlation dimension.
pub const RANK_THRESHOLD: f64 = 1e-9;

/// `Z_c = Σ_{r=1}^{(n-1)(k-c)} conj(z_{(n-1)c+r}) z_r`, `Z_k = 0`.
pub fn z_partial_sum<T: Real>(p: &FiniteGpParam<T>, c: usize) -> Result<Complex<T>> {
    let (n, k) = (p.n(), p.k());
    if c > k {
        return Err(Error::Usage(format!(
            "Z_c needs 0 <= c <= k = {k}, got {c}"
        )));
    }
    let z = p.z();
    Ok((1..=(n - 1) * (k - c)).fold(Complex::zero(), |acc, r| {
        acc + z[(n - 1) * c + r - 1].conj() * z[r - 1]
    }))
}

/// `Θ_{a,b} = ω(s_n^a (s_n^b)*)` for `a, b < k` and `v_a = ω(s_n^a)` for `a <= k`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable<T> {
    pub n: usize,
    pub k: usize,
    pub theta: Vec<Vec<Complex<T>>>,
    pub v: Vec<Complex<T>>,
}

impl<T: Real> MomentTable<T> {
    pub fn theta(&self, a: usize, b: usize) -> Complex<T> {
        self.theta[a][b]
    }

    /// Ascending eigenvalues of `Θ`.
    pub fn spectrum(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.theta)
    }

    pub fn rank(&self) -> usize {
        numerical_rank(&self.theta, RANK_THRESHOLD)
    }
}

pub fn moment_table<T: Real>(p: &FiniteGpParam<T>) -> Result<MomentTable<T>> {
    let (n, k) = (p.n(), p.k());
    let zm = p.last();
    if k == 1 {
        return Ok(MomentTable {
            n,
            k,
            theta: vec![vec![Complex::one()]],
            v: vec![Complex::one(), zm.conj()],
        });
    }
    if p.region()? == Region::Boundary {
        return Err(Error::Boundary);
    }
    let zs: Vec<Complex<T>> = (0..=k)
        .map(|c| z_partial_sum(p, c))
        .collect::<Result<_>>()?;
    let denom = T::one() - zm.norm_sqr();
    let v: Vec<Complex<T>> = (0..=k)
        .map(|a| ((zm * zs[k - a]).conj() + zs[a]) / denom)
        .collect();
    let z = p.z();
    let mut theta = vec![vec![Complex::zero(); k]; k];
    for a in 0..k {
        for b in a..k {
            let head: Complex<T> = (1..=(n - 1) * (k - b)).fold(Complex::zero(), |acc, j| {
                acc + z[(n - 1) * a + j - 1].conj() * z[(n - 1) * b + j - 1]
            });
            let anchor = (zs[b - a].conj() * zm.norm_sqr() + zm * zs[k - b + a]) / denom;
            theta[a][b] = head + anchor;
            theta[b][a] = theta[a][b].conj();
        }
    }
    Ok(MomentTable { n, k, theta, v })
}

enum Kind<T> {
    Cuntz(Vec<Complex<T>>),
    Finite {
        z: Vec<Complex<T>>,
        embedding: GpEmbedding,
        table: MomentTable<T>,
    },
    Infinite {
        z: L2GpParam<T>,
        embedding: GpEmbedding,
    },
}

/// Evaluator for one state, with its moment table computed once.
pub struct StateEvaluator<T> {
    n: usize,
    tol: T,
    kind: Kind<T>,
}

impl<T: Real> StateEvaluator<T> {
    /// `tol` is the absolute accuracy requested from truncated sums.
    pub fn new(state: &GpState<T>, tol: T) -> Result<Self> {
        let kind = match state.clone().simplify() {
            GpState::Cuntz(y) => Kind::Cuntz(y.y().to_vec()),
            GpState::Finite(p) => Kind::Finite {
                table: moment_table(&p)?,
                embedding: p.embedding(),
                z: p.z().to_vec(),
            },
            GpState::Infinite(p) => Kind::Infinite {
                embedding: GpEmbedding::infinite(p.n())?,
                z: p,
            },
        };
        Ok(StateEvaluator {
            n: state.n(),
            tol,
            kind,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn monomial(&self, m: &Monomial) -> Result<Complex<T>> {
        Rank::Finite(self.n).check_monomial(m)?;
        match &self.kind {
            Kind::Cuntz(y) => {
                Ok(word_coefficient(y, &m.left).conj() * word_coefficient(y, &m.right))
            }
            Kind::Finite {
                z,
                embedding,
                table,
            } => {
                let j = embedding.factorize(&m.left)?;
                let k = embedding.factorize(&m.right)?;
                let coef = word_coefficient(z, &j.hat).conj() * word_coefficient(z, &k.hat);
                Ok(coef * table.theta(j.tail, k.tail))
            }
            Kind::Infinite { z, embedding } => {
                let j = embedding.factorize(&m.left)?;
                let k = embedding.factorize(&m.right)?;
                let (cj, ck) = match (l2_coefficient(z, &j.hat), l2_coefficient(z, &k.hat)) {
                    (Some(a), Some(b)) => (a, b),
                    _ => {
                        // Some coordinate lies past an explicit prefix; |ω| <= sup of the unknown ones.
                        let bound = z.sup_beyond(z.known_len().unwrap_or(0));
                        if bound <= self.tol {
                            return Ok(Complex::zero());
                        }
                        return Err(Error::TailBoundTooLoose {
                            requested: self.tol.as_f64(),
                            achievable: bound.as_f64(),
                        });
                    }
                };
                let coef = cj.conj() * ck;
                if j.tail == 0 && k.tail == 0 {
                    return Ok(coef);
                }
                let budget = self.tol / (coef.norm() + T::one());
                let (theta, _) =
                    z.shifted_inner((self.n - 1) * j.tail, (self.n - 1) * k.tail, budget)?;
                Ok(coef * theta)
            }
        }
    }

    pub fn poly(&self, q: &NcPolynomial<Complex<T>>) -> Result<Complex<T>> {
        if q.rank() != Rank::Finite(self.n) {
            return Err(Error::AmbientMismatch {
                left: q.rank().to_string(),
                right: self.n.to_string(),
            });
        }
        q.terms().try_fold(Complex::zero(), |acc, (m, c)| {
            Ok(acc + *c * self.monomial(m)?)
        })
    }

    /// `[ω(s_{J_i} s_{J_j}*)]`.
    pub fn moment_matrix(&self, words: &[MultiIndex]) -> Result<Vec<Vec<Complex<T>>>> {
        words
            .iter()
            .map(|a| {
                words
                    .iter()
                    .map(|b| self.monomial(&Monomial::new(a.clone(), b.clone())))
                    .collect()
            })
            .collect()
    }
}

/// `z_J = z_{j_1} ... z_{j_r}`, `z_∅ = 1`.
fn word_coefficient<T: Real>(z: &[Complex<T>], w: &MultiIndex) -> Complex<T> {
    w.letters()
        .iter()
        .fold(Complex::one(), |acc, &j| acc * z[j - 1])
}

fn l2_coefficient<T: Real>(z: &L2GpParam<T>, w: &MultiIndex) -> Option<Complex<T>> {
    w.letters()
        .iter()
        .try_fold(Complex::one(), |acc, &j| Some(acc * z.coord_checked(j)?))
}

pub fn evaluate_monomial<T: Real>(state: &GpState<T>, m: &Monomial, tol: T) -> Result<Complex<T>> {
    StateEvaluator::new(state, tol)?.monomial(m)
}

pub fn evaluate_poly<T: Real>(
    state: &GpState<T>,
    q: &NcPolynomial<Complex<T>>,
    tol: T,
) -> Result<Complex<T>> {
    StateEvaluator::new(state, tol)?.poly(q)
}

pub fn moment_matrix<T: Real>(
    state: &GpState<T>,
    words: &[MultiIndex],
    tol: T,
) -> Result<Vec<Vec<Complex<T>>>> {
    StateEvaluator::new(state, tol)?.moment_matrix(words)
}

/// `dim K(ω)`: the numerical rank of `Θ`.
pub fn correlation_dimension<T: Real>(p: &FiniteGpParam<T>) -> Result<usize> {
    Ok(moment_table(p)?.rank())
}

/// `|ω_z(α_{g^{-1}}(M)) - ω_{g̃z}(M)|` for `g ∈ U(n-1)`.
pub fn covariance_check<T: Real>(
    state: &GpState<T>,
    g: &SquareMatrix<Complex<T>>,
    m: &Monomial,
    tol: T,
) -> Result<T> {
    let n = state.n();
    let moved = gauge_transform_param(g, state)?;
    let inverse = g.unitary_inverse().block_embed();
    let poly = NcPolynomial::from_monomial(Rank::Finite(n), m.clone(), Complex::one())?;
    let pulled = gauge_automorphism(&inverse, &poly, T::tolerances().unitary.as_f64())?;
    let lhs = evaluate_poly(state, &pulled, tol)?;
    let rhs = evaluate_monomial(&moved, m, tol)?;
    Ok((lhs - rhs).norm())
}

/// `Σ_j w_j ω_{y_j}(M)` over Cuntz components.
pub fn evaluate_mixture<T: Real>(
    components: &[CuntzParam<T>],
    weights: &[T],
    m: &Monomial,
) -> Result<Complex<T>> {
    if components.len() != weights.len() || components.is_empty() {
        return Err(Error::Usage(
            "one weight per mixture component required".into(),
        ));
    }
    components
        .iter()
        .zip(weights)
        .try_fold(Complex::zero(), |acc, (y, &w)| {
            let v = evaluate_monomial(&GpState::Cuntz(y.clone()), m, T::zero())?;
            Ok(acc + v * w)
        })
}

/// The flipped-embedding state by `z ∈ C^{2n-1}` at `M`.
pub fn evaluate_flipped<T: Real>(
    n: usize,
    z: &[Complex<T>],
    m: &Monomial,
    tol: T,
) -> Result<Complex<T>> {
    let p = flipped_as_gp(n, z)?;
    region_of(p.last())?;
    evaluate_monomial(&GpState::Finite(p), &flip_monomial(n, m), tol)
}

#[cfg(test)]
mod tests;
