//! Cheap bounds on the extreme singular values of a pseudosymmetric matrix.

use crate::error::{Error, Result};
use crate::ldl::factor_lower;
use crate::matrix::{DenseMatrix, Signature};
use crate::scalar::Real;

const MAX_ESTIMATOR_STEPS: usize = 5;

/// `alpha >= sigma_max(A)` and `beta <= sigma_min(A)` (the latter up to the
/// quality of the 1-norm estimate).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormBounds<T> {
    pub alpha: T,
    pub beta: T,
}

/// Bounds for `A` pseudosymmetric with respect to `sigma`.
///
/// `alpha = min(||A||_F, sqrt(||A||_1 ||A||_inf))`. `beta = 1 / (sqrt(n) c)`
/// with `c` a Hager-type estimate of `||A^{-1}||_1`, applied through an `LDL^T`
/// factorization of the symmetric `sigma A`.
pub fn norm_bounds<T: Real>(a: &DenseMatrix<T>, sigma: &Signature) -> Result<NormBounds<T>> {
    let n = a.rows();
    let alpha = a.frobenius_norm().min((a.norm1() * a.norm_inf()).sqrt());
    let f = factor_lower(&sigma.apply_left(a).symmetrized());
    if let Some(index) = f.zero_pivot() {
        return Err(Error::Singular { index });
    }
    let s = sigma.values::<T>();
    // A^{-1} x = (sigma A)^{-1} sigma x,  A^{-T} x = sigma (sigma A)^{-1} x
    let inv = |x: &[T]| -> Result<Vec<T>> {
        let sx: Vec<T> = x.iter().zip(&s).map(|(&v, &g)| v * g).collect();
        f.solve_vec(&sx)
    };
    let inv_t = |x: &[T]| -> Result<Vec<T>> {
        Ok(f.solve_vec(x)?.into_iter().zip(&s).map(|(v, &g)| v * g).collect())
    };
    let est = onenorm_estimate(n, inv, inv_t)?;
    if !(est > T::zero()) || !est.is_finite() {
        return Err(Error::Singular { index: 0 });
    }
    let beta = T::one() / (T::from_usize_lossy(n).sqrt() * est);
    Ok(NormBounds { alpha, beta })
}

/// Hager's estimator of `||B||_1` with Higham's extra alternating-sign probe.
pub fn onenorm_estimate<T: Real>(
    n: usize,
    apply: impl Fn(&[T]) -> Result<Vec<T>>,
    apply_t: impl Fn(&[T]) -> Result<Vec<T>>,
) -> Result<T> {
    let nt = T::from_usize_lossy(n);
    let mut x = vec![T::one() / nt; n];
    let mut est = T::zero();
    for step in 0..MAX_ESTIMATOR_STEPS {
        let y = apply(&x)?;
        let e = y.iter().map(|v| v.abs()).sum::<T>();
        if step > 0 && e <= est {
            break;
        }
        est = e;
        let xi: Vec<T> = y
            .iter()
            .map(|&v| if v >= T::zero() { T::one() } else { -T::one() })
            .collect();
        let z = apply_t(&xi)?;
        let (j, zj) = z
            .iter()
            .enumerate()
            .fold((0, T::zero()), |b, (i, &v)| if v.abs() > b.1 { (i, v.abs()) } else { b });
        let ztx: T = z.iter().zip(&x).map(|(&a, &b)| a * b).sum();
        if step > 0 && zj <= ztx {
            break;
        }
        x = vec![T::zero(); n];
        x[j] = T::one();
    }
    let denom = T::from_usize_lossy(n.saturating_sub(1).max(1));
    let alt: Vec<T> = (0..n)
        .map(|i| {
            let mag = T::one() + T::from_usize_lossy(i) / denom;
            if i % 2 == 0 {
                mag
            } else {
                -mag
            }
        })
        .collect();
    let y = apply(&alt)?;
    let alt_est = T::two() * y.iter().map(|v| v.abs()).sum::<T>() / (T::lit(3.0) * nt);
    Ok(est.max(alt_est))
}
