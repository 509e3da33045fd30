use super::{check_input, IterRecord, SignMethod, SignResult};
use crate::condest::norm_bounds;
use crate::error::{Error, Result};
use crate::ldl::factor_lower;
use crate::matrix::{DenseMatrix, Signature};
use crate::scalar::Real;

pub const NEWTON_MAX_ITER: usize = 50;

/// Scaled Newton iteration `X <- (mu X + (mu X)^{-1}) / 2`.
///
/// The iteration runs on the symmetric `B = Sigma X`, for which the update
/// reads `B <- (mu B + Sigma B^{-1} Sigma / mu) / 2`, so every iterate stays
/// exactly pseudosymmetric.
/// Scaling: `mu_0 = 1/sqrt(alpha beta)`, then
/// `mu_1 = sqrt(2 sqrt(alpha beta) / (alpha + beta))` and
/// `mu_{k+1} = sqrt(2 mu_k / (1 + mu_k^2))`. One unscaled step follows
/// convergence.
pub fn sign_newton<T: Real>(a: &DenseMatrix<T>, sigma: &Signature) -> Result<SignResult<T>> {
    check_input(a, sigma)?;
    let bounds = norm_bounds(a, sigma)?;
    let ab = bounds.alpha * bounds.beta;
    let tol = T::lit(10.0) * T::unit_roundoff().sqrt();

    let mut b = sigma.apply_left(a).symmetrized();
    let mut mu = T::one() / ab.sqrt();
    let mut trace = Vec::new();
    let mut converged = false;

    for k in 0..NEWTON_MAX_ITER {
        let next = newton_step(&b, sigma, mu)?;
        let change = super::rel_change(&next, &b);
        trace.push(IterRecord { rel_change: change, ell: None });
        b = next;
        if converged {
            break;
        }
        if change <= tol {
            converged = true;
            mu = T::one();
            continue;
        }
        mu = if k == 0 {
            (T::two() * ab.sqrt() / (bounds.alpha + bounds.beta)).sqrt()
        } else {
            (T::two() * mu / (T::one() + mu * mu)).sqrt()
        };
    }
    if !converged {
        return Err(Error::NoConvergence { iterations: NEWTON_MAX_ITER });
    }
    Ok(SignResult {
        s: sigma.apply_left(&b),
        iterations: trace.len(),
        method: SignMethod::Newton,
        trace,
    })
}

fn newton_step<T: Real>(b: &DenseMatrix<T>, sigma: &Signature, mu: T) -> Result<DenseMatrix<T>> {
    let binv = sigma.apply_left(&sigma.apply_right(&factor_lower(b).inverse()?));
    let mut next = b.scale(mu * T::half());
    next.axpy(T::half() / mu, &binv);
    if !next.is_finite() {
        return Err(Error::Singular { index: 0 });
    }
    Ok(next.symmetrized())
}
