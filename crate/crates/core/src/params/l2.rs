use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::scalar::Real;
use crate::special::{riemann_zeta, shifted_zeta_sum};

use super::{apply_blocks, region_of, Region};

/// How the coordinates of an ℓ² parameter are known.
#[derive(Clone, Debug, PartialEq)]
pub enum L2Family<T> {
    /// `z_1..z_N` given, the rest only through `Σ_{j>N} |z_j|² <= tail_norm_sq_bound`.
    Explicit {
        prefix: Vec<Complex<T>>,
        tail_norm_sq_bound: T,
    },
    /// Seed `y = (w_1, .., w_b, ρ)`: `z_{br+i} = ρ^r w_i`.
    Geometric { seed: Vec<Complex<T>> },
    /// `z_j = c (ζ(x) j^x)^(-1/2)`, ambient `n = 2`.
    Zeta { x: T, phase: Complex<T>, zeta: T },
}

/// Unit vector of `ℓ²(N)` parameterizing an infinite-order GP state.
#[derive(Clone, Debug, PartialEq)]
pub struct L2GpParam<T> {
    n: usize,
    family: L2Family<T>,
}

const ZETA_MIN_EXCESS: f64 = 1e-6;

/// `κ_x` with unit phase.
pub fn make_zeta_param<T: Real>(x: T) -> Result<L2GpParam<T>> {
    L2GpParam::zeta(x, Complex::new(T::one(), T::zero()))
}

impl<T: Real> L2GpParam<T> {
    pub fn explicit(n: usize, prefix: Vec<Complex<T>>, tail_norm_sq_bound: T) -> Result<Self> {
        check_n(n)?;
        let tol = T::tolerances().l2_bracket;
        if !tail_norm_sq_bound.is_finite() || tail_norm_sq_bound < T::zero() {
            return Err(Error::InvalidParameter(
                "tail bound must be a finite non-negative real".into(),
            ));
        }
        let head: T = prefix.iter().fold(T::zero(), |a, z| a + z.norm_sqr());
        if head > T::one() + tol || head + tail_norm_sq_bound < T::one() - tol {
            return Err(Error::InvalidParameter(format!(
                "prefix norm² {head} and tail bound {tail_norm_sq_bound} do not bracket 1"
            )));
        }
        Ok(L2GpParam {
            n,
            family: L2Family::Explicit {
                prefix,
                tail_norm_sq_bound,
            },
        })
    }

    pub fn geometric(n: usize, seed: Vec<Complex<T>>) -> Result<Self> {
        check_n(n)?;
        if seed.len() < 2 || !(seed.len() - 1).is_multiple_of(n - 1) {
            return Err(Error::InvalidParameter(format!(
                "geometric seed length {} must be a positive multiple of n-1 = {} plus one",
                seed.len(),
                n - 1
            )));
        }
        let ratio = seed[seed.len() - 1];
        if region_of(ratio)? == Region::Boundary {
            return Err(Error::Boundary);
        }
        let block: T = seed[..seed.len() - 1]
            .iter()
            .fold(T::zero(), |a, z| a + z.norm_sqr());
        let norm_sq = block / (T::one() - ratio.norm_sqr());
        if (norm_sq - T::one()).abs() > T::tolerances().norm {
            return Err(Error::InvalidParameter(format!(
                "geometric sequence has norm² {norm_sq}, expected 1"
            )));
        }
        Ok(L2GpParam {
            n,
            family: L2Family::Geometric { seed },
        })
    }

    pub fn zeta(x: T, phase: Complex<T>) -> Result<Self> {
        if x.is_nan() || x <= T::one() + T::lit(ZETA_MIN_EXCESS) {
            return Err(Error::InvalidParameter(format!(
                "zeta exponent {x} must exceed 1 + 1e-6"
            )));
        }
        if (phase.norm() - T::one()).abs() > T::tolerances().norm {
            return Err(Error::InvalidParameter(
                "zeta phase must be unimodular".into(),
            ));
        }
        Ok(L2GpParam {
            n: 2,
            family: L2Family::Zeta {
                x,
                phase,
                zeta: riemann_zeta(x),
            },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> &L2Family<T> {
        &self.family
    }

    /// Closed-form families know every coordinate.
    pub fn is_exact(&self) -> bool {
        !matches!(self.family, L2Family::Explicit { .. })
    }

    /// Number of known coordinates, `None` when all are known.
    pub fn known_len(&self) -> Option<usize> {
        match &self.family {
            L2Family::Explicit { prefix, .. } => Some(prefix.len()),
            _ => None,
        }
    }

    /// `z_j`, 1-based; `None` past an explicit prefix.
    pub fn coord_checked(&self, j: usize) -> Option<Complex<T>> {
        debug_assert!(j >= 1);
        match &self.family {
            L2Family::Explicit { prefix, .. } => prefix.get(j - 1).copied(),
            L2Family::Geometric { seed } => {
                let b = seed.len() - 1;
                let (r, i) = ((j - 1) / b, (j - 1) % b);
                Some(seed[i] * seed[b].powu(r as u32))
            }
            L2Family::Zeta { x, phase, zeta } => {
                let jf = T::lit(j as f64);
                Some(*phase * (*zeta * jf.powf(*x)).sqrt().recip())
            }
        }
    }

    /// `z_j`, with unknown coordinates read as zero.
    pub fn coord(&self, j: usize) -> Complex<T> {
        self.coord_checked(j).unwrap_or_else(Complex::zero)
    }

    pub fn prefix(&self, len: usize) -> Vec<Complex<T>> {
        (1..=len).map(|j| self.coord(j)).collect()
    }

    /// Upper bound on `Σ_{j>N} |z_j|²`.
    pub fn tail_norm_sq(&self, big_n: usize) -> T {
        match &self.family {
            L2Family::Explicit {
                prefix,
                tail_norm_sq_bound,
            } => {
                let rest: T = prefix
                    .iter()
                    .skip(big_n)
                    .fold(T::zero(), |a, z| a + z.norm_sqr());
                rest + *tail_norm_sq_bound
            }
            L2Family::Geometric { seed } => {
                let b = seed.len() - 1;
                let rho2 = seed[b].norm_sqr();
                let (r0, s) = (big_n / b, big_n % b);
                let block: T = seed[..b].iter().fold(T::zero(), |a, z| a + z.norm_sqr());
                let partial: T = seed[s..b].iter().fold(T::zero(), |a, z| a + z.norm_sqr());
                let scale = rho2.powi(r0 as i32);
                scale * (partial + rho2 * block / (T::one() - rho2))
            }
            L2Family::Zeta { x, phase, zeta } => {
                if big_n == 0 {
                    return phase.norm_sqr();
                }
                let bound = T::lit(big_n as f64).powf(T::one() - *x) / ((*x - T::one()) * *zeta);
                phase.norm_sqr() * bound.min(T::one())
            }
        }
    }

    /// Upper bound on `sup_{j>N} |z_j|`.
    pub fn sup_beyond(&self, big_n: usize) -> T {
        match &self.family {
            L2Family::Explicit {
                prefix,
                tail_norm_sq_bound,
            } => prefix
                .iter()
                .skip(big_n)
                .map(|z| z.norm())
                .fold(tail_norm_sq_bound.sqrt(), T::max),
            L2Family::Geometric { seed } => {
                let b = seed.len() - 1;
                let wmax = seed[..b].iter().map(|z| z.norm()).fold(T::zero(), T::max);
                wmax * seed[b].norm().powi((big_n / b) as i32)
            }
            L2Family::Zeta { .. } => self.coord(big_n + 1).norm(),
        }
    }

    /// `Σ_{j>=1} conj(z_{a+j}) z_{b+j}` and a bound on its error, which must
    /// not exceed `tol`.
    pub fn shifted_inner(&self, a: usize, b: usize, tol: T) -> Result<(Complex<T>, T)> {
        match &self.family {
            L2Family::Explicit { prefix, .. } => {
                let len = prefix.len().saturating_sub(a.max(b));
                let mut acc = Complex::zero();
                for j in 1..=len {
                    acc += prefix[a + j - 1].conj() * prefix[b + j - 1];
                }
                let err = (self.tail_norm_sq(a + len) * self.tail_norm_sq(b + len)).sqrt();
                if err > tol {
                    return Err(Error::TailBoundTooLoose {
                        requested: tol.as_f64(),
                        achievable: err.as_f64(),
                    });
                }
                Ok((acc, err))
            }
            L2Family::Geometric { seed } => {
                // One period of the shifted sequences, then the ratio |ρ|².
                let period = seed.len() - 1;
                let rho2 = seed[period].norm_sqr();
                let mut acc = Complex::zero();
                for j in 1..=period {
                    acc += self.coord(a + j).conj() * self.coord(b + j);
                }
                Ok((acc / (T::one() - rho2), T::zero()))
            }
            L2Family::Zeta { x, phase, zeta } => {
                let scale = phase.norm_sqr() / *zeta;
                let (s, err) = shifted_zeta_sum(*x, a, b, tol / scale).ok_or_else(|| {
                    Error::TailBoundTooLoose {
                        requested: tol.as_f64(),
                        achievable: f64::NAN,
                    }
                })?;
                Ok((Complex::new(s * scale, T::zero()), err * scale))
            }
        }
    }

    /// `g̃ z` for `g ∈ U(n-1)` acting on consecutive `(n-1)`-blocks.
    pub(crate) fn gauge(&self, g: &SquareMatrix<Complex<T>>) -> L2GpParam<T> {
        let d = self.n - 1;
        let family = match &self.family {
            L2Family::Explicit {
                prefix,
                tail_norm_sq_bound,
            } => {
                let keep = prefix.len() / d * d;
                let dropped: T = prefix[keep..]
                    .iter()
                    .fold(T::zero(), |a, z| a + z.norm_sqr());
                L2Family::Explicit {
                    prefix: apply_blocks(g, &prefix[..keep]),
                    tail_norm_sq_bound: *tail_norm_sq_bound + dropped,
                }
            }
            L2Family::Geometric { seed } => {
                let b = seed.len() - 1;
                let mut out = apply_blocks(g, &seed[..b]);
                out.push(seed[b]);
                L2Family::Geometric { seed: out }
            }
            L2Family::Zeta { x, phase, zeta } => L2Family::Zeta {
                x: *x,
                phase: *g.get(0, 0) * *phase,
                zeta: *zeta,
            },
        };
        L2GpParam { n: self.n, family }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "n = {n} must be at least 2"
        )));
    }
    Ok(())
}
