//! Cholesky factorization and triangular solves.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Real;
use crate::triangular;

/// Lower-triangular `L` with `L L^T = A`.
#[derive(Clone, Debug)]
pub struct CholeskyFactor<T> {
    pub l: DenseMatrix<T>,
}

pub(crate) fn check_symmetric<T: Real>(a: &DenseMatrix<T>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let asym = a.symmetry_defect();
    if asym > T::lit(10.0) * T::unit_roundoff() * a.frobenius_norm() {
        return Err(Error::NotSymmetric {
            asymmetry: asym.to_f64().unwrap_or(f64::INFINITY),
        });
    }
    Ok(())
}

/// Factors a symmetric positive definite matrix.
///
/// Only the lower triangle is read after the symmetry check. A pivot that is
/// not positive, or below `u * trace(A) / n`, is reported as
/// [`Error::NotPositiveDefinite`].
pub fn cholesky<T: Real>(a: &DenseMatrix<T>) -> Result<CholeskyFactor<T>> {
    check_symmetric(a)?;
    cholesky_lower(a)
}

pub(crate) fn cholesky_lower<T: Real>(a: &DenseMatrix<T>) -> Result<CholeskyFactor<T>> {
    let n = a.rows();
    let floor = T::unit_roundoff() * a.trace().abs() / T::from_usize_lossy(n.max(1));
    let mut l = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let (li, lj) = (l.row(i), l.row(j));
            let dot: T = li[..j].iter().zip(&lj[..j]).map(|(&x, &y)| x * y).sum();
            let v = a[(i, j)] - dot;
            if i == j {
                if !(v > T::zero()) || v <= floor {
                    return Err(Error::NotPositiveDefinite {
                        index: i,
                        pivot: v.to_f64().unwrap_or(f64::NAN),
                    });
                }
                l[(i, i)] = v.sqrt();
            } else {
                l[(i, j)] = v / l[(j, j)];
            }
        }
    }
    Ok(CholeskyFactor { l })
}

impl<T: Real> CholeskyFactor<T> {
    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn reconstruct(&self) -> DenseMatrix<T> {
        self.l.matmul_tr(&self.l)
    }

    /// `L^{-1} B`.
    pub fn solve_l(&self, b: &DenseMatrix<T>) -> DenseMatrix<T> {
        forward_solve(&self.l, b)
    }

    /// `L^{-T} B`.
    pub fn solve_lt(&self, b: &DenseMatrix<T>) -> DenseMatrix<T> {
        backward_solve_transposed(&self.l, b)
    }

    /// `A^{-1} B`.
    pub fn solve(&self, b: &DenseMatrix<T>) -> DenseMatrix<T> {
        self.solve_lt(&self.solve_l(b))
    }
}

/// Solves `L X = B` for lower-triangular `L`.
pub fn forward_solve<T: Real>(l: &DenseMatrix<T>, b: &DenseMatrix<T>) -> DenseMatrix<T> {
    let mut x = b.clone();
    triangular::solve_lower(l, &mut x, false);
    x
}

/// Solves `L^T X = B` for lower-triangular `L`.
pub fn backward_solve_transposed<T: Real>(l: &DenseMatrix<T>, b: &DenseMatrix<T>) -> DenseMatrix<T> {
    let mut x = b.clone();
    triangular::solve_lower_transposed(l, &mut x, false);
    x
}
