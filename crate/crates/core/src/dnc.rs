//! Spectral division and the eigensolver drivers built on it.

use crate::cholesky::cholesky_lower;
use crate::error::{Error, Result};
use crate::jacobi::sym_eig_jacobi;
use crate::matrix::{DenseMatrix, Signature};
use crate::scalar::Real;
use crate::sign::{matrix_sign, SignMethod, SignResult};
use crate::subspace::{extract_basis, BasisMethod, SubspaceBasis};

/// Inputs whose pseudosymmetry defect exceeds this (relative) are rejected.
pub const PSEUDOSYMMETRY_TOL: f64 = 1e-8;
pub const SHIFT_RETRIES: usize = 3;

#[derive(Clone, Debug)]
pub struct DivisionResult<T> {
    pub basis: SubspaceBasis<T>,
    pub a11: DenseMatrix<T>,
    pub a22: DenseMatrix<T>,
    pub sigma_plus: Signature,
    pub sigma_minus: Signature,
    /// `||Q+^T Sigma A Q-||_F / ||A||_F`.
    pub backward_error: T,
    pub sign_result: SignResult<T>,
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition<T> {
    /// Descending.
    pub eigenvalues: Vec<T>,
    pub v: DenseMatrix<T>,
    pub sigma_hat: Signature,
    /// `||A V - V diag(lambda)||_F / ||A||_F`.
    pub residual: T,
    /// `||V^T Sigma V - sigma_hat||_F`.
    pub orthogonality_defect: T,
    /// Sign iterations summed over all divisions.
    pub iterations: usize,
    /// Largest division backward error over all divisions (0 if none).
    pub backward_error: T,
}

impl<T: Real> EigenDecomposition<T> {
    /// Sorts the eigenpairs and evaluates the residual and orthogonality.
    fn assemble(
        a: &DenseMatrix<T>,
        sigma: &Signature,
        lambda: Vec<T>,
        v: DenseMatrix<T>,
        sigma_hat: Signature,
        iterations: usize,
        backward_error: T,
    ) -> Self {
        let mut order: Vec<usize> = (0..lambda.len()).collect();
        order.sort_by(|&i, &j| lambda[j].partial_cmp(&lambda[i]).unwrap_or(std::cmp::Ordering::Equal));
        let eigenvalues: Vec<T> = order.iter().map(|&i| lambda[i]).collect();
        let v = v.select_columns(&order);
        let sigma_hat = sigma_hat.select(&order);

        let res = &a.matmul(&v) - &v.scale_columns(&eigenvalues);
        let na = a.frobenius_norm();
        let residual = if na > T::zero() { res.frobenius_norm() / na } else { res.frobenius_norm() };
        let g = v.tr_matmul(&sigma.apply_left(&v));
        let orthogonality_defect = (&g - &sigma_hat.to_matrix()).frobenius_norm();
        EigenDecomposition { eigenvalues, v, sigma_hat, residual, orthogonality_defect, iterations, backward_error }
    }
}

pub(crate) fn check_pseudosymmetric<T: Real>(a: &DenseMatrix<T>, sigma: &Signature) -> Result<()> {
    if !a.is_square() || a.rows() != sigma.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix with signature of length {}",
            a.rows(),
            a.cols(),
            sigma.len()
        )));
    }
    let defect = sigma.pseudosymmetry_defect(a);
    if defect > T::lit(PSEUDOSYMMETRY_TOL) * a.frobenius_norm() {
        return Err(Error::NotPseudosymmetric {
            defect: defect.to_f64().unwrap_or(f64::INFINITY),
        });
    }
    Ok(())
}

/// One division step: `S = sign(A - shift I)`, a basis of the two invariant
/// subspaces, and the diagonal blocks `Q+^dagger A Q+`, `Q-^dagger A Q-`.
pub fn spectral_divide<T: Real>(
    a: &DenseMatrix<T>,
    sigma: &Signature,
    method: SignMethod,
    basis: BasisMethod,
    shift: T,
) -> Result<DivisionResult<T>> {
    check_pseudosymmetric(a, sigma)?;
    let n = a.rows();
    let sign_result = matrix_sign(&a.shifted(shift), sigma, method)?;
    let basis = extract_basis(basis, &sign_result.s, sigma)?;
    if basis.r_plus == 0 || basis.r_plus == n {
        return Err(Error::SplitDegenerate { plus: basis.r_plus, n });
    }
    let sa = sigma.apply_left(a).symmetrized();
    let sigma_plus = basis.sigma_plus();
    let sigma_minus = basis.sigma_minus();
    // Q^dagger A Q = sigma_hat (Q^T Sigma A Q)
    let block = |q: &DenseMatrix<T>, sh: &Signature| sh.apply_left(&q.tr_matmul(&sa.matmul(q)).symmetrized());
    let a11 = block(&basis.q_plus, &sigma_plus);
    let a22 = block(&basis.q_minus, &sigma_minus);
    let backward_error = basis.backward_error(a, sigma);
    Ok(DivisionResult { basis, a11, a22, sigma_plus, sigma_minus, backward_error, sign_result })
}

/// Definite `A`: one division at zero, then a symmetric eigensolve of each
/// (definite) block.
pub fn solve_definite<T: Real>(a: &DenseMatrix<T>, sigma: &Signature, method: SignMethod) -> Result<EigenDecomposition<T>> {
    solve_definite_with(a, sigma, method, BasisMethod::DefLdl)
}

/// [`solve_definite`] with an explicit basis routine.
pub fn solve_definite_with<T: Real>(
    a: &DenseMatrix<T>,
    sigma: &Signature,
    method: SignMethod,
    basis: BasisMethod,
) -> Result<EigenDecomposition<T>> {
    check_pseudosymmetric(a, sigma)?;
    if cholesky_lower(&sigma.apply_left(a).symmetrized()).is_err() {
        return Err(Error::NotDefinite);
    }
    if sigma.is_uniform() {
        return symmetric_base(a, sigma);
    }
    let div = spectral_divide(a, sigma, method, basis, T::zero())?;
    let (l1, v1) = eig_sorted(&div.a11)?;
    let (l2, v2) = eig_sorted(&div.a22)?;
    let v = div.basis.q_plus.matmul(&v1).hstack(&div.basis.q_minus.matmul(&v2));
    let lambda = l1.into_iter().chain(l2).collect();
    let sigma_hat = div.sigma_plus.concat(&div.sigma_minus);
    Ok(EigenDecomposition::assemble(a, sigma, lambda, v, sigma_hat, div.sign_result.iterations, div.backward_error))
}

fn eig_sorted<T: Real>(a: &DenseMatrix<T>) -> Result<(Vec<T>, DenseMatrix<T>)> {
    let (q, l) = sym_eig_jacobi(&a.symmetrized())?;
    Ok((l, q))
}

/// `Sigma = +-I`: `A` is symmetric.
fn symmetric_base<T: Real>(a: &DenseMatrix<T>, sigma: &Signature) -> Result<EigenDecomposition<T>> {
    let (l, q) = eig_sorted(a)?;
    Ok(EigenDecomposition::assemble(a, sigma, l, q, sigma.clone(), 0, T::zero()))
}

/// Settings for [`solve_recursive`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RecursiveConfig {
    pub method: SignMethod,
    /// Basis routine for non-definite divisions; definite ones always use
    /// [`BasisMethod::DefLdl`].
    pub basis: BasisMethod,
}

impl Default for RecursiveConfig {
    fn default() -> Self {
        RecursiveConfig { method: SignMethod::Newton, basis: BasisMethod::HypLdl }
    }
}

/// Full divide-and-conquer eigensolver for pseudosymmetric matrices with
/// real spectrum.
///
/// Blocks with a uniform signature, or of size one, are solved directly.
/// Definite blocks are divided at zero; other blocks at [`select_shift`],
/// retried up to [`SHIFT_RETRIES`] times when the split is degenerate or the
/// shift hits an eigenvalue. Zolo-PD only applies to definite blocks; other
/// blocks fall back to Newton.
pub fn solve_recursive<T: Real>(a: &DenseMatrix<T>, sigma: &Signature, config: RecursiveConfig) -> Result<EigenDecomposition<T>> {
    check_pseudosymmetric(a, sigma)?;
    let n = a.rows();
    let max_depth = 2 * (usize::BITS - n.max(1).leading_zeros()) as usize + 10;
    let p = recurse(a, sigma, config, 0, max_depth)?;
    Ok(EigenDecomposition::assemble(a, sigma, p.lambda, p.v, p.sigma_hat, p.iterations, p.backward_error))
}

struct Parts<T> {
    lambda: Vec<T>,
    v: DenseMatrix<T>,
    sigma_hat: Signature,
    iterations: usize,
    backward_error: T,
}

impl<T: Real> Parts<T> {
    fn leaf(lambda: Vec<T>, v: DenseMatrix<T>, sigma_hat: Signature) -> Self {
        Parts { lambda, v, sigma_hat, iterations: 0, backward_error: T::zero() }
    }
}

fn recurse<T: Real>(
    a: &DenseMatrix<T>,
    sigma: &Signature,
    config: RecursiveConfig,
    depth: usize,
    max_depth: usize,
) -> Result<Parts<T>> {
    let n = a.rows();
    if n == 1 {
        return Ok(Parts::leaf(vec![a[(0, 0)]], DenseMatrix::identity(1), sigma.clone()));
    }
    if sigma.is_uniform() {
        let (l, q) = eig_sorted(a)?;
        return Ok(Parts::leaf(l, q, sigma.clone()));
    }
    if depth >= max_depth {
        return Err(Error::NoConvergence { iterations: depth });
    }

    let definite = cholesky_lower(&sigma.apply_left(a).symmetrized()).is_ok();
    let div = if definite {
        spectral_divide(a, sigma, config.method, BasisMethod::DefLdl, T::zero())?
    } else {
        let method = match config.method {
            SignMethod::ZoloPd => SignMethod::Newton,
            m => m,
        };
        let mut last = None;
        let mut found = None;
        for attempt in 0..=SHIFT_RETRIES {
            let shift = select_shift(a, sigma, attempt);
            match spectral_divide(a, sigma, method, config.basis, shift) {
                Ok(d) => {
                    found = Some(d);
                    break;
                }
                Err(e @ (Error::SplitDegenerate { .. } | Error::Singular { .. })) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        match found {
            Some(d) => d,
            None => return Err(last.unwrap_or(Error::SplitDegenerate { plus: 0, n })),
        }
    };

    let (r1, r2) = rayon::join(
        || recurse(&div.a11, &div.sigma_plus, config, depth + 1, max_depth),
        || recurse(&div.a22, &div.sigma_minus, config, depth + 1, max_depth),
    );
    let (p1, p2) = (r1?, r2?);
    Ok(Parts {
        v: div.basis.q_plus.matmul(&p1.v).hstack(&div.basis.q_minus.matmul(&p2.v)),
        lambda: p1.lambda.into_iter().chain(p2.lambda).collect(),
        sigma_hat: p1.sigma_hat.concat(&p2.sigma_hat),
        iterations: div.sign_result.iterations + p1.iterations + p2.iterations,
        backward_error: div.backward_error.max(p1.backward_error).max(p2.backward_error),
    })
}

/// `trace(A)/n`, moved by `(-1)^k k ||A||_F / (10 n)` on attempt `k`.
pub fn select_shift<T: Real>(a: &DenseMatrix<T>, _sigma: &Signature, attempt: usize) -> T {
    let n = T::from_usize_lossy(a.rows());
    let base = a.trace() / n;
    if attempt == 0 {
        return base;
    }
    let k = T::from_usize_lossy(attempt);
    let dir = if attempt % 2 == 1 { -T::one() } else { T::one() };
    base + dir * k * a.frobenius_norm() / (T::lit(10.0) * n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{casida_like, pencil_oracle, random_definite_pseudosym, random_signature};

    #[test]
    fn divide_diagonal() {
        let sigma = Signature::new(vec![1, -1]).unwrap();
        let a = DenseMatrix::from_diagonal(&[4.0f64, -1.0]);
        let d = spectral_divide(&a, &sigma, SignMethod::Newton, BasisMethod::HypLdl, 0.0).unwrap();
        assert_eq!(d.a11, DenseMatrix::from_rows(&[[4.0]]));
        assert_eq!(d.a22, DenseMatrix::from_rows(&[[-1.0]]));
        assert_eq!(d.sigma_plus.as_slice(), &[1]);
        assert_eq!(d.sigma_minus.as_slice(), &[-1]);
        assert_eq!(d.backward_error, 0.0);
    }

    #[test]
    fn definite_divide_gives_definite_blocks() {
        let (a, sigma) = random_definite_pseudosym::<f64>(40, 1e4, 2);
        for m in [SignMethod::ZoloPd, SignMethod::Newton] {
            let d = spectral_divide(&a, &sigma, m, BasisMethod::DefLdl, 0.0).unwrap();
            assert!(cholesky_lower(&d.a11).is_ok());
            assert!(cholesky_lower(&d.a22.scale(-1.0)).is_ok());
            assert!(d.backward_error < 1e-11);
        }
    }

    #[test]
    fn degenerate_split() {
        let sigma = Signature::new(vec![1, -1]).unwrap();
        let a = DenseMatrix::from_diagonal(&[4.0f64, -1.0]);
        let r = spectral_divide(&a, &sigma, SignMethod::Newton, BasisMethod::HypLdl, -5.0);
        assert!(matches!(r, Err(Error::SplitDegenerate { plus: 2, n: 2 })));
    }

    #[test]
    fn rejects_non_pseudosymmetric() {
        let sigma = Signature::new(vec![1, -1]).unwrap();
        let a: DenseMatrix<f64> = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, -1.0]]);
        assert!(matches!(
            spectral_divide(&a, &sigma, SignMethod::Newton, BasisMethod::HypLdl, 0.0),
            Err(Error::NotPseudosymmetric { .. })
        ));
    }

    #[test]
    fn definite_diagonal() {
        let sigma = Signature::new(vec![1, -1, 1]).unwrap();
        let a = sigma.apply_left(&DenseMatrix::from_diagonal(&[2.0f64, 5.0, 0.5]));
        let e = solve_definite(&a, &sigma, SignMethod::ZoloPd).unwrap();
        let want = [2.0, 0.5, -5.0];
        for (l, w) in e.eigenvalues.iter().zip(want) {
            assert!((l - w).abs() < 1e-14);
        }
        assert_eq!(e.sigma_hat.as_slice(), &[1, 1, -1]);
    }

    #[test]
    fn definite_matches_oracle() {
        let (a, sigma) = random_definite_pseudosym::<f64>(50, 1e3, 12);
        let oracle = pencil_oracle(&a, &sigma).unwrap();
        for m in SignMethod::ALL {
            let e = solve_definite(&a, &sigma, m).unwrap();
            for (l, o) in e.eigenvalues.iter().zip(&oracle) {
                assert!((l - o).abs() <= 1e-10 * o.abs(), "{m}: {l} vs {o}");
            }
            assert!(e.residual < 1e-8);
            assert!(e.orthogonality_defect < 1e-8 * 50.0);
            assert_eq!(e.eigenvalues.iter().filter(|&&l| l > 0.0).count(), sigma.p());
        }
    }

    #[test]
    fn casida_pairs() {
        let (h, sigma) = casida_like::<f64>(10, 3, 0.5);
        let e = solve_definite(&h, &sigma, SignMethod::ZoloPd).unwrap();
        for i in 0..10 {
            let (x, y) = (e.eigenvalues[i], e.eigenvalues[19 - i]);
            assert!((x + y).abs() <= 1e-8 * x.abs());
        }
    }

    #[test]
    fn not_definite_rejected() {
        let sigma = Signature::new(vec![1, -1]).unwrap();
        let a = DenseMatrix::from_diagonal(&[1.0f64, 1.0]);
        assert!(matches!(solve_definite(&a, &sigma, SignMethod::Newton), Err(Error::NotDefinite)));
    }

    #[test]
    fn recursive_trivial_cases() {
        let a = DenseMatrix::from_rows(&[[7.0f64]]);
        let e = solve_recursive(&a, &Signature::identity(1), RecursiveConfig::default()).unwrap();
        assert_eq!(e.eigenvalues, vec![7.0]);
        assert_eq!(e.v, DenseMatrix::identity(1));
    }

    #[test]
    fn recursive_matches_definite() {
        let (a, sigma) = random_definite_pseudosym::<f64>(30, 1e2, 6);
        let d = solve_definite(&a, &sigma, SignMethod::ZoloPd).unwrap();
        let cfg = RecursiveConfig { method: SignMethod::ZoloPd, basis: BasisMethod::HypLdl };
        let r = solve_recursive(&a, &sigma, cfg).unwrap();
        for (x, y) in d.eigenvalues.iter().zip(&r.eigenvalues) {
            assert!((x - y).abs() <= 1e-9 * x.abs());
        }
    }

    #[test]
    fn recursive_symmetric_matches_jacobi() {
        let n = 24;
        let q: DenseMatrix<f64> = crate::gen::random_orthogonal(n, 9);
        let d: Vec<f64> = (0..n).map(|i| i as f64 - 7.5).collect();
        let a = q.scale_columns(&d).matmul_tr(&q).symmetrized();
        let sigma = Signature::identity(n);
        let r = solve_recursive(&a, &sigma, RecursiveConfig::default()).unwrap();
        let (_, want) = sym_eig_jacobi(&a).unwrap();
        for (x, y) in r.eigenvalues.iter().zip(&want) {
            assert!((x - y).abs() <= 1e-10 * y.abs().max(1.0));
        }
    }

    #[test]
    fn recursive_indefinite_real_spectrum() {
        let n = 20;
        let (a, sigma) = random_signature::<f64>(n, 8.0, 4);
        for m in [SignMethod::Newton, SignMethod::SigmaDwhLdliqr2] {
            let cfg = RecursiveConfig { method: m, basis: BasisMethod::HypLdl };
            let r = solve_recursive(&a, &sigma, cfg).unwrap();
            assert!(r.residual < 1e-8, "{m}: residual {}", r.residual);
            assert!(r.orthogonality_defect < 1e-8 * n as f64);
            let mut mags: Vec<f64> = r.eigenvalues.iter().map(|l| l.abs()).collect();
            mags.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let want = crate::gen::linspace_spectrum(n, 8.0);
            for (x, y) in mags.iter().zip(&want) {
                assert!((x - y).abs() < 1e-8 * y);
            }
        }
    }

    #[test]
    fn shift_ladder() {
        let a = DenseMatrix::from_diagonal(&[1.0f64, 3.0]);
        let s = Signature::identity(2);
        assert_eq!(select_shift(&a, &s, 0), 2.0);
        let f = a.frobenius_norm() / 20.0;
        assert!((select_shift(&a, &s, 1) - (2.0 - f)).abs() < 1e-15);
        assert!((select_shift(&a, &s, 2) - (2.0 + 2.0 * f)).abs() < 1e-15);
    }
}
