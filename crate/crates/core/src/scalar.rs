//! Scalar abstractions.
//!
//! Numeric code (parameters, evaluation, oracle) is generic over a real
//! floating type [`Real`] (`f32` or `f64`) and works with `Complex<T>`.
//! The word engine is generic over a polynomial [`Coefficient`], which also
//! admits exact Gaussian rationals.

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, One, Signed, ToPrimitive, Zero};

/// Tolerance bundle used throughout the numeric layers.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Tolerances<T> {
    /// Coefficients with magnitude below this are dropped after arithmetic.
    pub prune: T,
    /// Unit norm of finite parameter vectors.
    pub norm: T,
    /// `|z_m| >= 1 - boundary` counts as the boundary.
    pub boundary: T,
    /// `1 - |z_m| < closed_form` refuses the `1/(1-|z_m|^2)` closed form.
    pub closed_form: T,
    /// `g* g = I` check for user supplied gauge matrices.
    pub unitary: T,
    /// Bracketing of `1` by prefix norm plus declared tail bound.
    pub l2_bracket: T,
}

/// Real floating scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Signed
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    fn tolerances() -> Tolerances<Self>;

    /// Literal conversion from `f64`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite real")
    }
}

impl Real for f64 {
    fn tolerances() -> Tolerances<f64> {
        Tolerances {
            prune: 1e-14,
            norm: 1e-12,
            boundary: 1e-9,
            closed_form: 1e-8,
            unitary: 1e-9,
            l2_bracket: 1e-9,
        }
    }
}

impl Real for f32 {
    fn tolerances() -> Tolerances<f32> {
        Tolerances {
            prune: 1e-6,
            norm: 1e-5,
            boundary: 1e-4,
            closed_form: 1e-3,
            unitary: 1e-4,
            l2_bracket: 1e-4,
        }
    }
}

/// Coefficient ring of noncommutative polynomials.
pub trait Coefficient:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn conj(&self) -> Self;

    /// Modulus as `f64`, used only for tolerance decisions.
    fn magnitude(&self) -> f64;

    /// Default prune threshold; zero for exact coefficients.
    fn default_prune() -> f64;
}

impl<T: Real> Coefficient for Complex<T> {
    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn magnitude(&self) -> f64 {
        self.norm().as_f64()
    }

    fn default_prune() -> f64 {
        T::tolerances().prune.as_f64()
    }
}

impl Coefficient for Complex<BigRational> {
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    fn magnitude(&self) -> f64 {
        let sq = &self.re * &self.re + &self.im * &self.im;
        sq.to_f64().unwrap_or(f64::INFINITY).sqrt()
    }

    fn default_prune() -> f64 {
        0.0
    }
}

/// `z^p` for a non-negative integer exponent.
pub fn cpow<T: Real>(z: Complex<T>, p: usize) -> Complex<T> {
    let mut acc = Complex::one();
    let mut base = z;
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

/// Euclidean norm of a complex vector.
pub fn vec_norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, x| acc + x.norm_sqr()).sqrt()
}

/// Largest coordinatewise modulus of `a - b`; missing entries count as zero.
pub fn max_abs_diff<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or_else(Complex::zero);
            let y = b.get(i).copied().unwrap_or_else(Complex::zero);
            (x - y).norm()
        })
        .fold(T::zero(), T::max)
}

pub(crate) fn to_c64<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.as_f64(), z.im.as_f64())
}
