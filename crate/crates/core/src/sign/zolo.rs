use rayon::prelude::*;

use super::hqr::hqr_transposed;
use super::{check_input, rel_change, IterRecord, SignMethod, SignResult};
use crate::cholesky::cholesky_lower;
use crate::condest::norm_bounds;
use crate::error::{Error, Result};
use crate::ldl::factor_lower_tol;
use crate::matrix::{DenseMatrix, Signature};
use crate::scalar::Real;
use crate::zolotarev::{choose_rank, ell_update, zolotarev_coeffs, ZolotarevParams, MIN_ELL};

pub const DWH_MAX_ITER: usize = 50;
pub const ZOLO_MAX_RESTARTS: usize = 3;

/// How the `r = 1` step of [`sign_sigma_dwh`] is realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DwhMode {
    /// Direct `LDL^T` solves.
    Ldl,
    /// Hyperbolic QR with one refinement pass.
    Ldliqr2,
}

/// `Zhat(X)` through `r` hyperbolic QR factorizations of `[X; sqrt(c) I]`.
pub fn zolo_step_hr<T: Real>(x: &DenseMatrix<T>, sigma: &Signature, params: &ZolotarevParams<T>) -> Result<DenseMatrix<T>> {
    check_input(x, sigma)?;
    let n = x.rows();
    let gram = x.tr_matmul(&sigma.apply_left(x));
    let terms = odd_poles(params)
        .map(|(c, a)| {
            let eta = c.sqrt();
            let (ht, sigma_hat) = hqr_transposed(x, &gram, eta, sigma)?;
            // H1 sh H2^T Sigma = (H1^T)^T sh (H2^T) Sigma
            let h1t = sigma_hat.apply_left(&ht.block(0, n, 0, n));
            let prod = h1t.tr_matmul(&ht.block(0, n, n, 2 * n));
            Ok(sigma.apply_right(&prod).scale(a / eta))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(combine(x, sigma, params, terms))
}

/// `Zhat(X)` through `r` `LDL^T` solves with `X^T Sigma X + c Sigma`.
pub fn zolo_step_ldl<T: Real>(x: &DenseMatrix<T>, sigma: &Signature, params: &ZolotarevParams<T>) -> Result<DenseMatrix<T>> {
    check_input(x, sigma)?;
    let gram = x.tr_matmul(&sigma.apply_left(x)).symmetrized();
    let xt = x.transpose();
    let s = sigma.values::<T>();
    let terms = odd_poles(params)
        .map(|(c, a)| {
            let mut z = gram.clone();
            for (i, &si) in s.iter().enumerate() {
                z[(i, i)] += c * si;
            }
            // X Z^{-1} Sigma = (Sigma Z^{-1} X^T)^T
            let y = factor_lower_tol(&z, T::zero()).solve(&xt)?;
            Ok(sigma.apply_left(&y).transpose().scale(a))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(combine(x, sigma, params, terms))
}

/// `(c_{2j-1}, a_j)` pairs, iterated in parallel.
fn odd_poles<T: Real>(params: &ZolotarevParams<T>) -> impl ParallelIterator<Item = (T, T)> + '_ {
    (0..params.r).into_par_iter().map(|j| (params.c[2 * j], params.a[j]))
}

/// `chat (X + sum_j terms_j)`, summed in index order, then projected back
/// onto the pseudosymmetric matrices.
fn combine<T: Real>(x: &DenseMatrix<T>, sigma: &Signature, params: &ZolotarevParams<T>, terms: Vec<DenseMatrix<T>>) -> DenseMatrix<T> {
    let mut out = x.clone();
    for t in &terms {
        out.axpy(T::one(), t);
    }
    sigma.pseudosymmetrize(&out.scale(params.chat))
}

fn clamp_ell<T: Real>(ell: T) -> T {
    ell.max(T::lit(MIN_ELL)).min(T::one())
}

/// Two-step Zolotarev iteration for definite pseudosymmetric `A`.
///
/// The first step uses hyperbolic QR, the second `LDL^T` solves. The pair is
/// accepted when the second step moves the iterate by no more than
/// `max(u^{1/(2r+1)}, 1 - ell_1)`: a larger change means some eigenvalue of
/// the first iterate fell below `ell_1`, i.e. the bounds were not valid, and
/// the pair is repeated from the result, at most [`ZOLO_MAX_RESTARTS`] times.
pub fn sign_zolo_pd<T: Real>(a: &DenseMatrix<T>, sigma: &Signature) -> Result<SignResult<T>> {
    check_input(a, sigma)?;
    if cholesky_lower(&sigma.apply_left(a).symmetrized()).is_err() {
        return Err(Error::NotDefinite);
    }
    let mut x0 = a.clone();
    let mut trace = Vec::new();
    for _ in 0..=ZOLO_MAX_RESTARTS {
        let bounds = norm_bounds(&x0, sigma)?;
        let ell = clamp_ell(bounds.beta / bounds.alpha);
        let r = choose_rank(ell)?;
        let p0 = zolotarev_coeffs(ell, r)?;
        let x = x0.scale(T::one() / bounds.alpha);

        let x1 = zolo_step_hr(&x, sigma, &p0)?;
        trace.push(IterRecord { rel_change: rel_change(&x1, &x), ell: Some(ell) });
        let ell1 = clamp_ell(ell_update(&p0));
        let p1 = zolotarev_coeffs(ell1, r)?;
        let x2 = zolo_step_ldl(&x1, sigma, &p1)?;
        let change = rel_change(&x2, &x1);
        trace.push(IterRecord { rel_change: change, ell: Some(ell1) });

        let rate = T::unit_roundoff().powf(T::one() / T::from_usize_lossy(2 * r + 1));
        let accept = rate.max(T::one() - ell1);
        if change <= accept {
            return Ok(SignResult {
                s: x2,
                iterations: trace.len(),
                method: SignMethod::ZoloPd,
                trace,
            });
        }
        x0 = x2;
    }
    Err(Error::NoConvergence { iterations: trace.len() })
}

/// Dynamically weighted Halley iteration: the `r = 1` Zolotarev step with
/// `ell` updated after every step.
pub fn sign_sigma_dwh<T: Real>(a: &DenseMatrix<T>, sigma: &Signature, mode: DwhMode) -> Result<SignResult<T>> {
    check_input(a, sigma)?;
    let bounds = norm_bounds(a, sigma)?;
    let mut ell = clamp_ell(bounds.beta / bounds.alpha);
    let mut x = a.scale(T::one() / bounds.alpha);
    let tol = T::unit_roundoff().cbrt();
    let ell_done = T::one() - T::lit(1e-12);
    let mut trace = Vec::new();
    for _ in 0..DWH_MAX_ITER {
        let p = zolotarev_coeffs(ell, 1)?;
        let next = match mode {
            DwhMode::Ldl => zolo_step_ldl(&x, sigma, &p)?,
            DwhMode::Ldliqr2 => zolo_step_hr(&x, sigma, &p)?,
        };
        let change = rel_change(&next, &x);
        trace.push(IterRecord { rel_change: change, ell: Some(ell) });
        x = next;
        ell = clamp_ell(ell_update(&p));
        if ell >= ell_done && change <= tol {
            let method = match mode {
                DwhMode::Ldl => SignMethod::SigmaDwhLdl,
                DwhMode::Ldliqr2 => SignMethod::SigmaDwhLdliqr2,
            };
            return Ok(SignResult { s: x, iterations: trace.len(), method, trace });
        }
    }
    Err(Error::NoConvergence { iterations: DWH_MAX_ITER })
}
