//! Small dense row-major matrices used for gauge actions.

use crate::error::{Error, Result};
use crate::scalar::Coefficient;

#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<C> {
    dim: usize,
    data: Vec<C>,
}

impl<C: Coefficient> SquareMatrix<C> {
    pub fn from_rows(rows: Vec<Vec<C>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidParameter(
                "matrix must be square and nonempty".into(),
            ));
        }
        Ok(SquareMatrix {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![C::zero(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C::one();
        }
        SquareMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(i, j)`, 0-based.
    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.data[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<C>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                data.push(self.get(j, i).conj());
            }
        }
        SquareMatrix { dim: d, data }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Usage("matrix dimensions differ".into()));
        }
        let d = self.dim;
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = C::zero();
                for l in 0..d {
                    acc = acc + self.get(i, l).clone() * other.get(l, j).clone();
                }
                data.push(acc);
            }
        }
        Ok(SquareMatrix { dim: d, data })
    }

    /// `max |(g* g - I)_ij|`.
    pub fn unitarity_residual(&self) -> f64 {
        let prod = self.adjoint().mul(self).expect("same dimension");
        let id = Self::identity(self.dim);
        prod.data
            .iter()
            .zip(&id.data)
            .map(|(a, b)| (a.clone() - b.clone()).magnitude())
            .fold(0.0, f64::max)
    }

    pub fn ensure_unitary(&self, tol: f64) -> Result<()> {
        let residual = self.unitarity_residual();
        if residual <= tol {
            Ok(())
        } else {
            Err(Error::NonUnitary { residual })
        }
    }

    /// `diag(g, 1)`: the copy of `U(d)` inside `U(d+1)` fixing the last basis vector.
    pub fn block_embed(&self) -> Self {
        let d = self.dim + 1;
        let mut rows = vec![vec![C::zero(); d]; d];
        for (i, row) in rows.iter_mut().enumerate().take(self.dim) {
            for (j, e) in row.iter_mut().enumerate().take(self.dim) {
                *e = self.get(i, j).clone();
            }
        }
        rows[d - 1][d - 1] = C::one();
        SquareMatrix::from_rows(rows).expect("square")
    }

    /// Inverse of a unitary matrix.
    pub fn unitary_inverse(&self) -> Self {
        self.adjoint()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn rotation_is_unitary_and_shear_is_not() {
        let (c, s) = (0.6, 0.8);
        let g = SquareMatrix::from_rows(vec![
            vec![Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
            vec![Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
        ])
        .unwrap();
        assert!(g.unitarity_residual() < 1e-15);
        let h = SquareMatrix::from_rows(vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            h.ensure_unitary(1e-9),
            Err(Error::NonUnitary { .. })
        ));
        let e = g.block_embed();
        assert_eq!(e.dim(), 3);
        assert_eq!(*e.get(2, 2), Complex64::new(1.0, 0.0));
        assert!(e.unitarity_residual() < 1e-15);
    }
}
