//! Parameter spaces of GP states, classification and parameter-level maps.

mod canonical;
mod l2;
mod tensor;

pub use canonical::{
    canonicalize, compare_invariants, compare_l2, equivalent, equivalent_by_product_order,
    equivalent_flipped, tilde_of_cuntz, tilde_of_finite, CanonicalInvariant, Equivalence,
};
pub use l2::{make_zeta_param, L2Family, L2GpParam};
pub use tensor::{are_conjugate, is_nonperiodic, tensor_product};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::embedding::GpEmbedding;
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::scalar::{vec_norm, Real};

/// Where `|z_m|` sits relative to the unit circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Interior,
    Boundary,
}

/// `1 - |z|` sorted into interior / boundary, refusing the band in between.
pub fn region_of<T: Real>(last: Complex<T>) -> Result<Region> {
    let tol = T::tolerances();
    let distance = T::one() - last.norm();
    if distance < tol.boundary {
        Ok(Region::Boundary)
    } else if distance < tol.closed_form {
        Err(Error::NearBoundary {
            distance: distance.as_f64(),
        })
    } else {
        Ok(Region::Interior)
    }
}

fn check_unit<T: Real>(v: &[Complex<T>], what: &str) -> Result<()> {
    let norm = vec_norm(v);
    if !norm.is_finite() || (norm - T::one()).abs() > T::tolerances().norm {
        return Err(Error::InvalidParameter(format!(
            "{what} has norm {norm}, expected 1"
        )));
    }
    Ok(())
}

fn normalize<T: Real>(mut v: Vec<Complex<T>>) -> Result<Vec<Complex<T>>> {
    let norm = vec_norm(&v);
    if norm <= T::zero() || !norm.is_finite() {
        return Err(Error::InvalidParameter(
            "cannot normalize a zero vector".into(),
        ));
    }
    for x in &mut v {
        *x /= norm;
    }
    Ok(v)
}

/// Unit vector `z ∈ C^m`, `m = (n-1)k + 1`, of a finite-order GP state.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGpParam<T> {
    n: usize,
    k: usize,
    z: Vec<Complex<T>>,
}

impl<T: Real> FiniteGpParam<T> {
    pub fn new(n: usize, k: usize, z: Vec<Complex<T>>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "n = {n} must be at least 2"
            )));
        }
        if k < 1 {
            return Err(Error::InvalidParameter("order k must be at least 1".into()));
        }
        let m = (n - 1) * k + 1;
        if z.len() != m {
            return Err(Error::InvalidParameter(format!(
                "expected {m} coordinates for n = {n}, k = {k}, got {}",
                z.len()
            )));
        }
        check_unit(&z, "z")?;
        Ok(FiniteGpParam { n, k, z })
    }

    /// Rescales `z` to unit norm first.
    pub fn normalized(n: usize, k: usize, z: Vec<Complex<T>>) -> Result<Self> {
        Self::new(n, k, normalize(z)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.z.len()
    }

    pub fn z(&self) -> &[Complex<T>] {
        &self.z
    }

    /// `z_j`, 1-based.
    pub fn coord(&self, j: usize) -> Complex<T> {
        self.z[j - 1]
    }

    pub fn last(&self) -> Complex<T> {
        self.z[self.z.len() - 1]
    }

    pub fn region(&self) -> Result<Region> {
        region_of(self.last())
    }

    pub fn embedding(&self) -> GpEmbedding {
        GpEmbedding::finite(self.n, self.k).expect("validated at construction")
    }

    pub fn as_cuntz(&self) -> Option<CuntzParam<T>> {
        (self.k == 1).then(|| CuntzParam {
            n: self.n,
            y: self.z.clone(),
        })
    }
}

/// Unit vector `y ∈ C^n` of a Cuntz state.
#[derive(Clone, Debug, PartialEq)]
pub struct CuntzParam<T> {
    n: usize,
    y: Vec<Complex<T>>,
}

impl<T: Real> CuntzParam<T> {
    pub fn new(n: usize, y: Vec<Complex<T>>) -> Result<Self> {
        if n < 2 || y.len() != n {
            return Err(Error::InvalidParameter(format!(
                "Cuntz parameter needs n >= 2 coordinates, got n = {n}, len = {}",
                y.len()
            )));
        }
        check_unit(&y, "y")?;
        Ok(CuntzParam { n, y })
    }

    pub fn normalized(n: usize, y: Vec<Complex<T>>) -> Result<Self> {
        Self::new(n, normalize(y)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn y(&self) -> &[Complex<T>] {
        &self.y
    }

    pub fn last(&self) -> Complex<T> {
        self.y[self.n - 1]
    }

    pub fn region(&self) -> Result<Region> {
        region_of(self.last())
    }

    /// The same state seen as a GP state of order 1.
    pub fn to_finite(&self) -> FiniteGpParam<T> {
        FiniteGpParam {
            n: self.n,
            k: 1,
            z: self.y.clone(),
        }
    }
}

/// Any parameter the library can evaluate.
#[derive(Clone, Debug, PartialEq)]
pub enum GpState<T> {
    Finite(FiniteGpParam<T>),
    Infinite(L2GpParam<T>),
    Cuntz(CuntzParam<T>),
}

impl<T: Real> GpState<T> {
    pub fn n(&self) -> usize {
        match self {
            GpState::Finite(p) => p.n(),
            GpState::Infinite(p) => p.n(),
            GpState::Cuntz(p) => p.n(),
        }
    }

    /// Order-1 finite parameters become Cuntz parameters.
    pub fn simplify(self) -> Self {
        match self {
            GpState::Finite(p) if p.k() == 1 => GpState::Cuntz(p.as_cuntz().expect("k = 1")),
            other => other,
        }
    }
}

impl<T> From<FiniteGpParam<T>> for GpState<T> {
    fn from(p: FiniteGpParam<T>) -> Self {
        GpState::Finite(p)
    }
}

impl<T> From<L2GpParam<T>> for GpState<T> {
    fn from(p: L2GpParam<T>) -> Self {
        GpState::Infinite(p)
    }
}

impl<T> From<CuntzParam<T>> for GpState<T> {
    fn from(p: CuntzParam<T>) -> Self {
        GpState::Cuntz(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    UniquePure,
    BoundaryMixture,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification<T> {
    pub verdict: Verdict,
    /// Pure Cuntz components; empty unless `BoundaryMixture`.
    pub components: Vec<CuntzParam<T>>,
}

pub fn classify<T: Real>(state: &GpState<T>) -> Result<Classification<T>> {
    let unique = Classification {
        verdict: Verdict::UniquePure,
        components: Vec::new(),
    };
    match state {
        GpState::Infinite(_) | GpState::Cuntz(_) => Ok(unique),
        GpState::Finite(p) if p.k() == 1 => Ok(unique),
        GpState::Finite(p) => match p.region()? {
            Region::Interior => Ok(unique),
            Region::Boundary => Ok(Classification {
                verdict: Verdict::BoundaryMixture,
                components: decompose_mixture(p)?,
            }),
        },
    }
}

/// The `k` Cuntz states `(0, ..., 0, e^{2πij/k} q)`, `q^k = z_m`, whose
/// convex combinations are the GP states at the boundary.
pub fn decompose_mixture<T: Real>(p: &FiniteGpParam<T>) -> Result<Vec<CuntzParam<T>>> {
    if region_of(p.last())? != Region::Boundary {
        return Err(Error::NotBoundary);
    }
    let n = p.n();
    let k = p.k();
    let kf = T::lit(k as f64);
    let base = p.last().arg() / kf;
    let two_pi = T::lit(2.0) * T::PI();
    Ok((0..k)
        .map(|j| {
            let mut y = vec![Complex::zero(); n];
            y[n - 1] = Complex::from_polar(T::one(), base + two_pi * T::lit(j as f64) / kf);
            CuntzParam { n, y }
        })
        .collect())
}

/// `ψ_{l,k}(z)`: the parameter of order `target_k` defining the same state.
pub fn lift_order<T: Real>(p: &FiniteGpParam<T>, target_k: usize) -> Result<FiniteGpParam<T>> {
    if target_k == 0 || !target_k.is_multiple_of(p.k()) {
        return Err(Error::NotDivisor {
            source_order: p.k(),
            target: target_k,
        });
    }
    let q = target_k / p.k();
    let block = p.m() - 1;
    let zm = p.last();
    let mut out = Vec::with_capacity(block * q + 1);
    let mut power = Complex::one();
    for _ in 0..q {
        out.extend(p.z()[..block].iter().map(|&zi| power * zi));
        power *= zm;
    }
    out.push(power);
    Ok(FiniteGpParam {
        n: p.n(),
        k: target_k,
        z: out,
    })
}

/// Apply `g ∈ U(n-1)` blockwise to consecutive `(n-1)`-blocks of `v`,
/// leaving any trailing partial block alone.
pub(crate) fn apply_blocks<T: Real>(
    g: &SquareMatrix<Complex<T>>,
    v: &[Complex<T>],
) -> Vec<Complex<T>> {
    let d = g.dim();
    let mut out = v.to_vec();
    for (chunk_out, chunk_in) in out.chunks_mut(d).zip(v.chunks(d)) {
        if chunk_in.len() < d {
            break;
        }
        for (i, o) in chunk_out.iter_mut().enumerate() {
            let mut acc = Complex::zero();
            for (j, &x) in chunk_in.iter().enumerate() {
                acc += *g.get(i, j) * x;
            }
            *o = acc;
        }
    }
    out
}

fn fix_last<T: Real>(g: &SquareMatrix<Complex<T>>, v: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut out = apply_blocks(g, &v[..v.len() - 1]);
    out.push(v[v.len() - 1]);
    out
}

/// The parameter `g̃ z` with `g̃` block diagonal on `(n-1)`-blocks and
/// fixing the last finite coordinate.
pub fn gauge_transform_param<T: Real>(
    g: &SquareMatrix<Complex<T>>,
    state: &GpState<T>,
) -> Result<GpState<T>> {
    g.ensure_unitary(T::tolerances().unitary.as_f64())?;
    let n = state.n();
    if g.dim() != n - 1 {
        return Err(Error::Usage(format!(
            "gauge matrix must be {}x{}, got {}x{}",
            n - 1,
            n - 1,
            g.dim(),
            g.dim()
        )));
    }
    Ok(match state {
        GpState::Finite(p) => GpState::Finite(FiniteGpParam {
            n,
            k: p.k(),
            z: fix_last(g, p.z()),
        }),
        GpState::Cuntz(p) => GpState::Cuntz(CuntzParam {
            n,
            y: fix_last(g, p.y()),
        }),
        GpState::Infinite(p) => GpState::Infinite(p.gauge(g)),
    })
}

/// `(z_{2n-1}, ..., z_1)`; the flipped-embedding state by `z` is the GP
/// state by this vector composed with the flip.
pub fn reverse_param<T: Real>(n: usize, z: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    if n < 2 || z.len() != 2 * n - 1 {
        return Err(Error::InvalidParameter(format!(
            "flipped parameter needs 2n-1 = {} coordinates, got {}",
            2 * n - 1,
            z.len()
        )));
    }
    Ok(z.iter().rev().copied().collect())
}

/// The GP parameter of order 2 underlying the flipped-embedding state by `z`.
pub fn flipped_as_gp<T: Real>(n: usize, z: &[Complex<T>]) -> Result<FiniteGpParam<T>> {
    FiniteGpParam::new(n, 2, reverse_param(n, z)?)
}

/// Classification of the flipped-embedding state; unique iff `|z_1| < 1`.
pub fn classify_flipped<T: Real>(n: usize, z: &[Complex<T>]) -> Result<Classification<T>> {
    classify(&GpState::Finite(flipped_as_gp(n, z)?))
}

/// `ŷ` of order `k`: `(y_1, .., y_{n-1}, y_n y_1, .., y_n^k)`.
pub fn hat_of_cuntz<T: Real>(y: &CuntzParam<T>, k: usize) -> Result<FiniteGpParam<T>> {
    lift_order(&y.to_finite(), k)
}
