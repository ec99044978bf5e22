use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `m` with `len = n^m`, `m >= 1`.
fn word_length(n: usize, len: usize) -> Result<usize> {
    let bad = Error::BadTensorDimension { len, n };
    if n < 2 || len < n {
        return Err(bad);
    }
    let mut m = 0;
    let mut acc = 1usize;
    while acc < len {
        acc = acc.checked_mul(n).ok_or(bad.clone())?;
        m += 1;
    }
    if acc == len {
        Ok(m)
    } else {
        Err(bad)
    }
}

/// `a ⊗ b` in the lexicographic coding of multi-indices.
pub fn tensor_product<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

fn argmax<T: Real>(v: &[Complex<T>]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.norm() > v[best].norm() {
            best = i;
        }
    }
    best
}

fn max_diff<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    a.iter()
        .zip(b)
        .map(|(x, y)| (*x - *y).norm())
        .fold(T::zero(), T::max)
}

/// Whether `v` (length `L^p`) is a `p`-fold tensor power, within `tol`.
fn is_tensor_power<T: Real>(v: &[Complex<T>], block: usize, p: usize, tol: T) -> bool {
    let star = argmax(v);
    if v[star].norm() <= tol {
        return true;
    }
    // Fix blocks 2..p at the dominant index and read off the first factor.
    let inner = v.len() / block;
    let rest = star % inner;
    let slice: Vec<Complex<T>> = (0..block).map(|i| v[i * inner + rest]).collect();
    let mut power = slice.clone();
    for _ in 1..p {
        power = tensor_product(&power, &slice);
    }
    let anchor = argmax(&power);
    if power[anchor].norm() <= T::zero() {
        return false;
    }
    let scale = v[anchor] / power[anchor];
    let candidate: Vec<Complex<T>> = power.iter().map(|&x| x * scale).collect();
    max_diff(v, &candidate) <= tol
}

/// `v ∈ (C^n)^{⊗m}` is not `x^{⊗p}` for any divisor `p > 1` of `m`.
pub fn is_nonperiodic<T: Real>(n: usize, v: &[Complex<T>], tol: T) -> Result<bool> {
    let m = word_length(n, v.len())?;
    for p in 2..=m {
        if m % p == 0 && is_tensor_power(v, n.pow((m / p) as u32), p, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `M = x_1 x_2^T` within `tol`, for `M` given row-major as `rows × cols`.
fn is_rank_one<T: Real>(v: &[Complex<T>], cols: usize, tol: T) -> bool {
    let star = argmax(v);
    let pivot = v[star];
    if pivot.norm() <= tol {
        return true;
    }
    let (r0, c0) = (star / cols, star % cols);
    v.iter().enumerate().all(|(idx, &x)| {
        let (r, c) = (idx / cols, idx % cols);
        (x - v[r * cols + c0] * v[r0 * cols + c] / pivot).norm() <= tol
    })
}

/// `v = x_1 ⊗ x_2` and `w = x_2 ⊗ x_1` for some split, or `v = w`.
pub fn are_conjugate<T: Real>(
    n: usize,
    v: &[Complex<T>],
    w: &[Complex<T>],
    tol: T,
) -> Result<bool> {
    let m = word_length(n, v.len())?;
    if word_length(n, w.len())? != m {
        return Err(Error::BadTensorDimension { len: w.len(), n });
    }
    if max_diff(v, w) <= tol {
        return Ok(true);
    }
    for s in 1..m {
        let rows = n.pow(s as u32);
        let cols = v.len() / rows;
        let rotated_matches =
            (0..rows).all(|r| (0..cols).all(|c| (w[c * rows + r] - v[r * cols + c]).norm() <= tol));
        if rotated_matches && is_rank_one(v, cols, tol) {
            return Ok(true);
        }
    }
    Ok(false)
}
