use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{max_abs_diff, Real};

use super::l2::{L2Family, L2GpParam};
use super::{flipped_as_gp, lift_order, region_of, CuntzParam, FiniteGpParam, GpState, Region};

/// Complete invariant of a pure GP state up to unitary equivalence.
#[derive(Clone, Debug, PartialEq)]
pub enum CanonicalInvariant<T> {
    Interior(L2GpParam<T>),
    /// The Cuntz state by `(0, ..., 0, c)`, `|c| = 1`.
    Boundary {
        n: usize,
        c: Complex<T>,
    },
}

impl<T: Real> CanonicalInvariant<T> {
    pub fn n(&self) -> usize {
        match self {
            CanonicalInvariant::Interior(p) => p.n(),
            CanonicalInvariant::Boundary { n, .. } => *n,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Equivalence {
    ExactEquivalent,
    EquivalentWithinTol,
    Distinct,
}

impl Equivalence {
    pub fn is_equivalent(self) -> bool {
        !matches!(self, Equivalence::Distinct)
    }
}

/// `ỹ_{(n-1)r+i} = y_n^r y_i`.
pub fn tilde_of_cuntz<T: Real>(y: &CuntzParam<T>) -> Result<L2GpParam<T>> {
    tilde_of_finite(&y.to_finite())
}

/// `ỹ_{(m-1)r+i} = y_m^r y_i`, `i <= m-1`.
pub fn tilde_of_finite<T: Real>(y: &FiniteGpParam<T>) -> Result<L2GpParam<T>> {
    if y.region()? == Region::Boundary {
        return Err(Error::Boundary);
    }
    L2GpParam::geometric(y.n(), y.z().to_vec())
}

pub fn canonicalize<T: Real>(state: &GpState<T>) -> Result<CanonicalInvariant<T>> {
    match state.clone().simplify() {
        GpState::Infinite(p) => Ok(CanonicalInvariant::Interior(p)),
        GpState::Cuntz(y) => match y.region()? {
            Region::Boundary => Ok(CanonicalInvariant::Boundary {
                n: y.n(),
                c: y.last() / y.last().norm(),
            }),
            Region::Interior => Ok(CanonicalInvariant::Interior(tilde_of_cuntz(&y)?)),
        },
        GpState::Finite(p) => match p.region()? {
            Region::Boundary => Err(Error::MixtureHasNoInvariant),
            Region::Interior => Ok(CanonicalInvariant::Interior(tilde_of_finite(&p)?)),
        },
    }
}

fn same_n(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Usage(format!(
            "parameters live on different algebras: n = {a} vs n = {b}"
        )));
    }
    Ok(())
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn finite_verdict<T: Real>(a: &FiniteGpParam<T>, b: &FiniteGpParam<T>, tol: T) -> Equivalence {
    if max_abs_diff(a.z(), b.z()) <= tol {
        Equivalence::ExactEquivalent
    } else {
        Equivalence::Distinct
    }
}

/// Both parameters lifted to the least common order, compared coordinatewise.
fn compare_finite_lcm<T: Real>(
    a: &FiniteGpParam<T>,
    b: &FiniteGpParam<T>,
    tol: T,
) -> Result<Equivalence> {
    let common = a.k() / gcd(a.k(), b.k()) * b.k();
    Ok(finite_verdict(
        &lift_order(a, common)?,
        &lift_order(b, common)?,
        tol,
    ))
}

/// The same decision via the product order `p = (m-1)(l-1) + 1`.
pub fn equivalent_by_product_order<T: Real>(
    a: &FiniteGpParam<T>,
    b: &FiniteGpParam<T>,
    tol: T,
) -> Result<Equivalence> {
    same_n(a.n(), b.n())?;
    for p in [a, b] {
        if p.k() > 1 && p.region()? == Region::Boundary {
            return Err(Error::MixtureHasNoInvariant);
        }
    }
    let la = lift_order(a, a.k() * (b.m() - 1))?;
    let lb = lift_order(b, b.k() * (a.m() - 1))?;
    debug_assert_eq!(la.m(), lb.m());
    debug_assert_eq!(la.m(), (a.m() - 1) * (b.m() - 1) + 1);
    Ok(finite_verdict(&la, &lb, tol))
}

const SCAN_START: usize = 64;
const SCAN_CAP: usize = 1 << 22;

/// Coordinatewise comparison of two ℓ² parameters: the scan stops once a
/// coordinate differs by more than `tol` or once the certified envelope of
/// all remaining coordinates is below `tol`.
pub fn compare_l2<T: Real>(a: &L2GpParam<T>, b: &L2GpParam<T>, tol: T) -> Result<Equivalence> {
    same_n(a.n(), b.n())?;
    let equal = if a.is_exact() && b.is_exact() {
        Equivalence::ExactEquivalent
    } else {
        Equivalence::EquivalentWithinTol
    };
    if let (
        L2Family::Zeta {
            x: xa, phase: ca, ..
        },
        L2Family::Zeta {
            x: xb, phase: cb, ..
        },
    ) = (a.family(), b.family())
    {
        if xa == xb {
            let diff = (*ca - *cb).norm() * a.coord(1).norm();
            return Ok(if diff <= tol {
                equal
            } else {
                Equivalence::Distinct
            });
        }
    }
    let horizon = match (a.known_len(), b.known_len()) {
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => SCAN_CAP,
    };
    let mut scanned = 0usize;
    let mut target = SCAN_START.min(horizon);
    loop {
        for j in scanned + 1..=target {
            if (a.coord(j) - b.coord(j)).norm() > tol {
                return Ok(Equivalence::Distinct);
            }
        }
        scanned = target;
        let envelope = a.sup_beyond(scanned) + b.sup_beyond(scanned);
        if envelope <= tol {
            return Ok(equal);
        }
        if scanned >= horizon {
            return Err(Error::TailBoundTooLoose {
                requested: tol.as_f64(),
                achievable: envelope.as_f64(),
            });
        }
        target = (target * 2).min(horizon);
    }
}

pub fn compare_invariants<T: Real>(
    a: &CanonicalInvariant<T>,
    b: &CanonicalInvariant<T>,
    tol: T,
) -> Result<Equivalence> {
    same_n(a.n(), b.n())?;
    match (a, b) {
        (
            CanonicalInvariant::Boundary { c: ca, .. },
            CanonicalInvariant::Boundary { c: cb, .. },
        ) => Ok(if (*ca - *cb).norm() <= tol {
            Equivalence::ExactEquivalent
        } else {
            Equivalence::Distinct
        }),
        (CanonicalInvariant::Interior(x), CanonicalInvariant::Interior(y)) => compare_l2(x, y, tol),
        _ => Ok(Equivalence::Distinct),
    }
}

enum Side<T> {
    Finite(FiniteGpParam<T>),
    Infinite(L2GpParam<T>),
    Boundary(Complex<T>),
}

fn side<T: Real>(state: &GpState<T>) -> Result<Side<T>> {
    Ok(match state.clone().simplify() {
        GpState::Infinite(p) => Side::Infinite(p),
        GpState::Cuntz(y) => match y.region()? {
            Region::Boundary => Side::Boundary(y.last() / y.last().norm()),
            Region::Interior => Side::Finite(y.to_finite()),
        },
        GpState::Finite(p) => match p.region()? {
            Region::Boundary => return Err(Error::MixtureHasNoInvariant),
            Region::Interior => Side::Finite(p),
        },
    })
}

/// Unitary equivalence of the GNS representations of two pure GP states.
pub fn equivalent<T: Real>(p: &GpState<T>, q: &GpState<T>, tol: T) -> Result<Equivalence> {
    same_n(p.n(), q.n())?;
    match (side(p)?, side(q)?) {
        (Side::Boundary(a), Side::Boundary(b)) => Ok(if (a - b).norm() <= tol {
            Equivalence::ExactEquivalent
        } else {
            Equivalence::Distinct
        }),
        (Side::Boundary(_), _) | (_, Side::Boundary(_)) => Ok(Equivalence::Distinct),
        (Side::Finite(a), Side::Finite(b)) => compare_finite_lcm(&a, &b, tol),
        (Side::Infinite(a), Side::Finite(b)) | (Side::Finite(b), Side::Infinite(a)) => {
            compare_l2(&a, &tilde_of_finite(&b)?, tol)
        }
        (Side::Infinite(a), Side::Infinite(b)) => compare_l2(&a, &b, tol),
    }
}

/// Equivalence of flipped-embedding states; these are equivalent iff the
/// vectors coincide.
pub fn equivalent_flipped<T: Real>(
    n: usize,
    z: &[Complex<T>],
    y: &[Complex<T>],
    tol: T,
) -> Result<Equivalence> {
    let a = flipped_as_gp(n, z)?;
    let b = flipped_as_gp(n, y)?;
    for p in [&a, &b] {
        if region_of(p.last())? == Region::Boundary {
            return Err(Error::MixtureHasNoInvariant);
        }
    }
    Ok(finite_verdict(&a, &b, tol))
}
