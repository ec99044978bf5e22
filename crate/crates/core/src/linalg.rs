//! Dense helpers: hermitian spectra via nalgebra, plus a small generic
//! Gaussian elimination used by the oracle.

use nalgebra::DMatrix;
use num_complex::{Complex, Complex64};

use crate::error::{Error, Result};
use crate::scalar::{to_c64, Real};

fn to_dmatrix<T: Real>(rows: &[Vec<Complex<T>>]) -> DMatrix<Complex64> {
    let d = rows.len();
    DMatrix::from_fn(d, d, |i, j| to_c64(rows[i][j]))
}

/// Eigenvalues of a hermitian matrix, ascending.
pub fn hermitian_eigenvalues<T: Real>(rows: &[Vec<Complex<T>>]) -> Vec<f64> {
    if rows.is_empty() {
        return Vec::new();
    }
    let eig = to_dmatrix(rows).symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}

/// Number of singular values above `rel * σ_max`.
pub fn numerical_rank<T: Real>(rows: &[Vec<Complex<T>>], rel: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let sv = to_dmatrix(rows).singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel * smax).count()
}

/// `max |A_ij - conj(A_ji)|`.
pub fn hermitian_defect<T: Real>(rows: &[Vec<Complex<T>>]) -> T {
    let mut worst = T::zero();
    for (i, row) in rows.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            worst = worst.max((*x - rows[j][i].conj()).norm());
        }
    }
    worst
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve_real<T: Real>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Result<Vec<T>> {
    let d = b.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |m, x| m.max(x.abs()));
    let eps = T::epsilon() * T::lit(64.0) * scale.max(T::one());
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .expect("finite")
            })
            .expect("nonempty");
        if a[pivot][col].abs() <= eps {
            return Err(Error::SingularSystem);
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..d {
            let f = a[row][col] / a[col][col];
            if f == T::zero() {
                continue;
            }
            for c in col..d {
                let delta = f * a[col][c];
                a[row][c] -= delta;
            }
            let delta = f * b[col];
            b[row] -= delta;
        }
    }
    let mut x = vec![T::zero(); d];
    for row in (0..d).rev() {
        let mut acc = b[row];
        for c in row + 1..d {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}
