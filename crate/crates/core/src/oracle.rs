//! Independent recomputation of moments and state identities.
//!
//! `v_a` comes from solving `v_a = Z_a + conj(z_m v_{k-a})` as a real
//! linear system and `Θ_{a,b}` from unrolling
//! `Θ_{a,b} = Σ_{i<n} conj(z_{(n-1)a+i}) z_{(n-1)b+i} + Θ_{a+1,b+1}` down to
//! `Θ_{c,k} = z_m v_c`. Only `Z_c` is shared with [`crate::eval`].

use std::cell::RefCell;
use std::collections::HashMap;

use num_complex::Complex;
use num_traits::Zero;

use crate::embedding::GpEmbedding;
use crate::error::{Error, Result};
use crate::eval::{z_partial_sum, MomentTable, StateEvaluator};
use crate::linalg::solve_real;
use crate::params::{FiniteGpParam, GpState, L2Family, L2GpParam, Region};
use crate::scalar::{Coefficient, Real};
use crate::word::{polynomials_equal, Monomial, MultiIndex, NcPolynomial, Rank};

/// `v_a = ω(s_n^a)`, `a = 0..=k`.
pub fn moments_by_linear_system<T: Real>(p: &FiniteGpParam<T>) -> Result<Vec<Complex<T>>> {
    if p.region()? == Region::Boundary {
        return Err(Error::Boundary);
    }
    let k = p.k();
    let d = k + 1;
    let (zr, zi) = (p.last().re, p.last().im);
    // unknowns: x_0..x_k (real parts), y_0..y_k (imaginary parts)
    let mut a = vec![vec![T::zero(); 2 * d]; 2 * d];
    let mut rhs = vec![T::zero(); 2 * d];
    for row in 0..d {
        let z = z_partial_sum(p, row)?;
        let col = k - row;
        // conj(z_m v) = (zr x - zi y) - i (zr y + zi x) for v = x + i y
        a[row][row] += T::one();
        a[row][col] -= zr;
        a[row][d + col] += zi;
        rhs[row] = z.re;
        a[d + row][d + row] += T::one();
        a[d + row][col] += zi;
        a[d + row][d + col] += zr;
        rhs[d + row] = z.im;
    }
    let x = solve_real(a, rhs)?;
    Ok((0..d).map(|i| Complex::new(x[i], x[d + i])).collect())
}

/// `Θ_{a,b}` for `0 <= a <= b <= k-1`, given the moments `v`.
pub fn theta_by_recursion<T: Real>(
    p: &FiniteGpParam<T>,
    v: &[Complex<T>],
    a: usize,
    b: usize,
) -> Result<Complex<T>> {
    let (n, k) = (p.n(), p.k());
    if a > b || b >= k || v.len() != k + 1 {
        return Err(Error::Usage(format!(
            "theta recursion needs a <= b < k = {k}, got ({a}, {b})"
        )));
    }
    let z = p.z();
    let mut acc: Complex<T> = Complex::zero();
    let (mut x, mut y) = (a, b);
    while y < k {
        for i in 1..n {
            acc += z[(n - 1) * x + i - 1].conj() * z[(n - 1) * y + i - 1];
        }
        x += 1;
        y += 1;
    }
    Ok(acc + p.last() * v[x])
}

/// The full moment table from the oracle path.
pub fn oracle_table<T: Real>(p: &FiniteGpParam<T>) -> Result<MomentTable<T>> {
    let k = p.k();
    let v = moments_by_linear_system(p)?;
    let mut theta = vec![vec![Complex::zero(); k]; k];
    for a in 0..k {
        for b in a..k {
            theta[a][b] = theta_by_recursion(p, &v, a, b)?;
            theta[b][a] = theta[a][b].conj();
        }
    }
    Ok(MomentTable {
        n: p.n(),
        k,
        theta,
        v,
    })
}

const BRUTE_FORCE_TERMS: usize = 1 << 16;

type SumCache<T> = HashMap<(usize, usize), (Complex<T>, T)>;

enum OracleKind<T> {
    Table {
        z: Vec<Complex<T>>,
        embedding: GpEmbedding,
        table: MomentTable<T>,
    },
    Product(Vec<Complex<T>>),
    Sum {
        z: L2GpParam<T>,
        embedding: GpEmbedding,
        cache: RefCell<SumCache<T>>,
    },
}

/// Second evaluation path: the oracle moment table for finite orders and
/// geometric sequences (whose seed is a finite parameter defining the same
/// state), direct summation for the other ℓ² families, and the product
/// formula for boundary Cuntz states.
pub struct OracleEvaluator<T> {
    n: usize,
    kind: OracleKind<T>,
}

impl<T: Real> OracleEvaluator<T> {
    pub fn new(state: &GpState<T>) -> Result<Self> {
        let n = state.n();
        let table_of = |p: FiniteGpParam<T>| -> Result<OracleKind<T>> {
            Ok(OracleKind::Table {
                table: oracle_table(&p)?,
                embedding: p.embedding(),
                z: p.z().to_vec(),
            })
        };
        let kind = match state.clone().simplify() {
            GpState::Cuntz(y) => match y.region()? {
                Region::Boundary => OracleKind::Product(y.y().to_vec()),
                Region::Interior => table_of(y.to_finite())?,
            },
            GpState::Finite(p) => table_of(p)?,
            GpState::Infinite(z) => match z.family() {
                L2Family::Geometric { seed } => {
                    let k = (seed.len() - 1) / (n - 1);
                    table_of(FiniteGpParam::new(n, k, seed.clone())?)?
                }
                _ => OracleKind::Sum {
                    embedding: GpEmbedding::infinite(n)?,
                    z,
                    cache: RefCell::new(HashMap::new()),
                },
            },
        };
        Ok(OracleEvaluator { n, kind })
    }

    /// The value and an upper bound on its truncation error.
    pub fn monomial(&self, m: &Monomial) -> Result<(Complex<T>, T)> {
        Rank::Finite(self.n).check_monomial(m)?;
        let word = |z: &dyn Fn(usize) -> Option<Complex<T>>, w: &MultiIndex| {
            w.letters()
                .iter()
                .try_fold(Complex::<T>::new(T::one(), T::zero()), |acc, &j| {
                    Some(acc * z(j)?)
                })
        };
        match &self.kind {
            OracleKind::Product(y) => {
                let f = |j: usize| Some(y[j - 1]);
                let v =
                    word(&f, &m.left).expect("known").conj() * word(&f, &m.right).expect("known");
                Ok((v, T::zero()))
            }
            OracleKind::Table {
                z,
                embedding,
                table,
            } => {
                let (j, k) = (
                    embedding.factorize(&m.left)?,
                    embedding.factorize(&m.right)?,
                );
                let f = |i: usize| Some(z[i - 1]);
                let coef =
                    word(&f, &j.hat).expect("known").conj() * word(&f, &k.hat).expect("known");
                Ok((coef * table.theta(j.tail, k.tail), T::zero()))
            }
            OracleKind::Sum {
                z,
                embedding,
                cache,
            } => {
                let (j, k) = (
                    embedding.factorize(&m.left)?,
                    embedding.factorize(&m.right)?,
                );
                let f = |i: usize| z.coord_checked(i);
                let (Some(cj), Some(ck)) = (word(&f, &j.hat), word(&f, &k.hat)) else {
                    return Ok((Complex::zero(), z.sup_beyond(z.known_len().unwrap_or(0))));
                };
                let key = ((self.n - 1) * j.tail, (self.n - 1) * k.tail);
                let (theta, err) = *cache
                    .borrow_mut()
                    .entry(key)
                    .or_insert_with(|| direct_sum(z, key.0, key.1));
                let coef = cj.conj() * ck;
                Ok((coef * theta, coef.norm() * err))
            }
        }
    }
}

/// `Σ_j conj(z_{a+j}) z_{b+j}` by direct summation. The zeta tail is
/// enclosed by integrals of the monotone summand, other tails by
/// Cauchy-Schwarz.
fn direct_sum<T: Real>(z: &L2GpParam<T>, a: usize, b: usize) -> (Complex<T>, T) {
    let terms = z
        .known_len()
        .map_or(BRUTE_FORCE_TERMS, |p| p.saturating_sub(a.max(b)));
    let mut acc = Complex::zero();
    for i in (1..=terms).rev() {
        acc += z.coord(a + i).conj() * z.coord(b + i);
    }
    if let L2Family::Zeta { x, .. } = z.family() {
        let x = *x;
        let scale = z.coord(1).norm_sqr();
        let (lo, hi) = (T::lit(a.min(b) as f64), T::lit(a.max(b) as f64));
        let big_n = T::lit(terms as f64);
        let power = T::one() - x;
        let upper = (lo + big_n).powf(power) / (x - T::one());
        let lower = (hi + big_n + T::one()).powf(power) / (x - T::one());
        let mid = scale * (upper + lower) / T::lit(2.0);
        let half = scale * (upper - lower) / T::lit(2.0);
        return (acc + Complex::new(mid, T::zero()), half);
    }
    (
        acc,
        (z.tail_norm_sq(a + terms) * z.tail_norm_sq(b + terms)).sqrt(),
    )
}

/// Largest entrywise difference between two moment tables.
pub fn table_discrepancy<T: Real>(x: &MomentTable<T>, y: &MomentTable<T>) -> T {
    let mut worst = T::zero();
    for (a, b) in x.v.iter().zip(&y.v) {
        worst = worst.max((*a - *b).norm());
    }
    for (ra, rb) in x.theta.iter().zip(&y.theta) {
        for (a, b) in ra.iter().zip(rb) {
            worst = worst.max((*a - *b).norm());
        }
    }
    worst
}

/// All `s_J s_K*` with `|J| + |K| <= max_len`.
pub fn monomials_up_to(n: usize, max_len: usize) -> Vec<Monomial> {
    let words = MultiIndex::all_up_to(n, max_len);
    let mut out = Vec::new();
    for a in &words {
        for b in &words {
            if a.len() + b.len() <= max_len {
                out.push(Monomial::new(a.clone(), b.clone()));
            }
        }
    }
    out
}

/// Whether two states agree on every `s_J s_K*` with `|J| + |K| <= max_len`,
/// with the worst residual and the monomial attaining it.
pub fn states_agree<T: Real>(
    p: &GpState<T>,
    q: &GpState<T>,
    max_len: usize,
    tol: T,
) -> Result<(bool, T, Monomial)> {
    if p.n() != q.n() {
        return Err(Error::Usage(format!(
            "states live on O_{} and O_{}",
            p.n(),
            q.n()
        )));
    }
    let precision = tol / T::lit(10.0);
    let a = StateEvaluator::new(p, precision)?;
    let b = StateEvaluator::new(q, precision)?;
    let mut worst = T::zero();
    let mut witness = Monomial::identity();
    for m in monomials_up_to(p.n(), max_len) {
        let r = (a.monomial(&m)? - b.monomial(&m)?).norm();
        if r > worst {
            worst = r;
            witness = m;
        }
    }
    Ok((worst <= tol, worst, witness))
}

fn check_isometry_family(images: &[Monomial]) -> Result<()> {
    for (i, a) in images.iter().enumerate() {
        for (j, b) in images.iter().enumerate() {
            let prod = a.adjoint().mul(b);
            let ok = if i == j {
                prod.as_ref().is_some_and(Monomial::is_identity)
            } else {
                prod.is_none()
            };
            if !ok {
                return Err(Error::NotIsometryFamily(format!(
                    "({a})* ({b}) is not {}",
                    if i == j { "I" } else { "0" }
                )));
            }
        }
    }
    Ok(())
}

/// `Σ z_j f_j = Σ y_j g_j` in `O_n`, for isometry families `f` and `g`.
pub fn verify_embedding_identity<C: Coefficient>(
    n: usize,
    f_images: &[Monomial],
    z: &[C],
    g_images: &[Monomial],
    y: &[C],
    tol: f64,
) -> Result<bool> {
    check_isometry_family(f_images)?;
    check_isometry_family(g_images)?;
    if f_images.len() != z.len() || g_images.len() != y.len() {
        return Err(Error::Usage("one coefficient per image required".into()));
    }
    let combo = |images: &[Monomial], c: &[C]| {
        NcPolynomial::from_terms(
            Rank::Finite(n),
            images.iter().cloned().zip(c.iter().cloned()),
        )
    };
    Ok(polynomials_equal(
        &combo(f_images, z)?,
        &combo(g_images, y)?,
        tol,
    ))
}
