//! Cyclic Jacobi eigensolver for dense symmetric matrices.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Real;

pub const MAX_SWEEPS: usize = 30;

/// Eigen-decomposition `A = Q diag(lambda) Q^T` of a symmetric matrix.
///
/// Eigenvalues are returned in descending order with the columns of `Q`
/// permuted to match. Sweeps stop once the off-diagonal Frobenius norm drops
/// to `u * ||A||_F`.
pub fn sym_eig_jacobi<T: Real>(a: &DenseMatrix<T>) -> Result<(DenseMatrix<T>, Vec<T>)> {
    assert!(a.is_square(), "eigensolver needs a square matrix");
    let n = a.rows();
    let mut w = a.symmetrized();
    // rows of `qt` are the eigenvectors
    let mut qt = DenseMatrix::identity(n);
    let target = T::unit_roundoff() * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..=MAX_SWEEPS {
        if off_norm(&w) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut w, &mut qt, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { iterations: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(j, j)].partial_cmp(&w[(i, i)]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| w[(i, i)]).collect();
    let q = qt.select_rows(&order).transpose();
    Ok((q, values))
}

fn off_norm<T: Real>(w: &DenseMatrix<T>) -> T {
    let mut s = T::zero();
    for i in 0..w.rows() {
        for j in (i + 1)..w.cols() {
            s += w[(i, j)] * w[(i, j)];
        }
    }
    (s + s).sqrt()
}

fn rotate<T: Real>(w: &mut DenseMatrix<T>, qt: &mut DenseMatrix<T>, p: usize, q: usize) {
    let apq = w[(p, q)];
    if apq == T::zero() {
        return;
    }
    let (app, aqq) = (w[(p, p)], w[(q, q)]);
    let tau = (aqq - app) / (T::two() * apq);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    let n = w.rows();
    {
        let (rp, rq) = w.rows_mut_pair(p, q);
        for k in 0..n {
            let (x, y) = (rp[k], rq[k]);
            rp[k] = c * x - s * y;
            rq[k] = s * x + c * y;
        }
    }
    for k in 0..n {
        if k != p && k != q {
            w[(k, p)] = w[(p, k)];
            w[(k, q)] = w[(q, k)];
        }
    }
    w[(p, p)] = app - t * apq;
    w[(q, q)] = aqq + t * apq;
    w[(p, q)] = T::zero();
    w[(q, p)] = T::zero();

    let (rp, rq) = qt.rows_mut_pair(p, q);
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let (u, v) = (*x, *y);
        *x = c * u - s * v;
        *y = s * u + c * v;
    }
}
