//! Zeta-function sums needed by the zeta family of ℓ² parameters.

use crate::scalar::Real;

// B_2, B_4, ..., B_14 divided by (2k)!.
const BERNOULLI_OVER_FACTORIAL: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
];

const EM_SHIFT: f64 = 24.0;

/// Hurwitz zeta `Σ_{j>=0} (q+j)^(-s)` for `s > 1`, `q > 0`.
pub fn hurwitz_zeta<T: Real>(s: T, q: T) -> T {
    debug_assert!(s > T::one() && q > T::zero());
    let mut head = T::zero();
    let mut q = q;
    let shift = T::lit(EM_SHIFT);
    while q < shift {
        head += q.powf(-s);
        q += T::one();
    }
    // Euler-Maclaurin at q >= 24; the first omitted term is below 1e-20 there.
    let mut tail = q.powf(T::one() - s) / (s - T::one()) + q.powf(-s) / T::lit(2.0);
    let mut rising = s; // s (s+1) ... (s+2k-2)
    let mut qpow = q.powf(-s - T::one());
    let q2 = q * q;
    for (k, &b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        tail += T::lit(b) * rising * qpow;
        let kk = T::lit((2 * k + 1) as f64);
        rising = rising * (s + kk) * (s + kk + T::one());
        qpow /= q2;
    }
    head + tail
}

/// Riemann zeta `ζ(s)` for real `s > 1`.
pub fn riemann_zeta<T: Real>(s: T) -> T {
    hurwitz_zeta(s, T::one())
}

/// `Σ_{j>=1} ((a+j)(b+j))^(-x/2)` with a certified absolute error.
///
/// The tail beyond `N` is expanded around `c = (a+b)/2` as
/// `Σ (j+c)^(-x) (1 - d²/(j+c)²)^(-x/2)`, `d = (b-a)/2`, keeping the first
/// two terms exactly (as Hurwitz sums) and bounding the Taylor remainder.
/// Returns `None` when `tol` cannot be reached with at most `2^22` terms.
pub fn shifted_zeta_sum<T: Real>(x: T, a: usize, b: usize, tol: T) -> Option<(T, T)> {
    if a == b {
        return Some((hurwitz_zeta(x, T::lit((a + 1) as f64)), T::zero()));
    }
    let af = T::lit(a as f64);
    let bf = T::lit(b as f64);
    let c = (af + bf) / T::lit(2.0);
    let d = (bf - af).abs() / T::lit(2.0);
    let p = x / T::lit(2.0);
    let term = |j: usize| {
        let jf = T::lit(j as f64);
        ((af + jf) * (bf + jf)).powf(-p)
    };
    let mut partial = T::zero();
    let mut summed = 0usize;
    let mut horizon = 256usize.max((4.0 * d.as_f64()).ceil() as usize);
    while horizon <= 1 << 22 {
        for j in summed + 1..=horizon {
            partial += term(j);
        }
        summed = horizon;
        let q = T::lit((horizon + 1) as f64) + c;
        let u0 = d * d / (q * q);
        let d2 = d * d;
        let main = hurwitz_zeta(x, q) + p * d2 * hurwitz_zeta(x + T::lit(2.0), q);
        let remainder = p * (p + T::one()) / T::lit(2.0)
            * d2
            * d2
            * (T::one() - u0).powf(-p - T::lit(2.0))
            * hurwitz_zeta(x + T::lit(4.0), q);
        let err = remainder / T::lit(2.0);
        if err <= tol {
            return Some((partial + main + err, err));
        }
        horizon *= 2;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn known_zeta_values() {
        assert!((riemann_zeta(2.0_f64) - PI * PI / 6.0).abs() < 1e-14);
        assert!((riemann_zeta(4.0_f64) - PI.powi(4) / 90.0).abs() < 1e-14);
        assert!((riemann_zeta(3.0_f64) - 1.202_056_903_159_594_3).abs() < 1e-14);
        // ζ(s) ~ 1/(s-1) + γ near s = 1
        let eps = 1e-6_f64;
        let gamma = 0.577_215_664_901_532_9;
        let s = 1.0 + eps;
        assert!((riemann_zeta(s) - (1.0 / (s - 1.0) + gamma)).abs() < 1e-6);
    }

    #[test]
    fn hurwitz_shift_identity() {
        // H(s, q) = q^-s + H(s, q+1)
        for &(s, q) in &[(1.5_f64, 0.3), (2.5, 3.0), (4.0, 40.0)] {
            let lhs = hurwitz_zeta(s, q);
            let rhs = q.powf(-s) + hurwitz_zeta(s, q + 1.0);
            assert!((lhs - rhs).abs() < 1e-13 * lhs.max(1.0));
        }
    }

    #[test]
    fn shifted_sum_against_brute_force_with_tail() {
        // Brute force to 2e6 terms plus the integral enclosure of the rest.
        for &(x, a, b) in &[(2.0_f64, 0usize, 1usize), (3.0, 2, 5), (2.5, 1, 7)] {
            let big = 2_000_000usize;
            let mut s = 0.0;
            for j in (1..=big).rev() {
                s += (((a + j) * (b + j)) as f64).powf(-x / 2.0);
            }
            let lo = ((big + 1 + b) as f64).powf(1.0 - x) / (x - 1.0);
            let hi = ((big + a) as f64).powf(1.0 - x) / (x - 1.0);
            let (v, err) = shifted_zeta_sum(x, a, b, 1e-12).unwrap();
            assert!(err <= 1e-12);
            assert!(
                v >= s + lo - 1e-11 && v <= s + hi + 1e-11,
                "x={x} a={a} b={b}: {v} vs [{}, {}]",
                s + lo,
                s + hi
            );
        }
    }
}
