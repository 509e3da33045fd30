use crate::error::{Error, Result};
use crate::ldl::factor_lower_tol;
use crate::matrix::{DenseMatrix, Signature};
use crate::scalar::Real;

/// `[X; eta I] = [H1; H2] R` with `H1^T Sigma H1 + H2^T Sigma H2 = sigma_hat`.
#[derive(Clone, Debug)]
pub struct HyperbolicQrResult<T> {
    pub h1: DenseMatrix<T>,
    pub h2: DenseMatrix<T>,
    pub sigma_hat: Signature,
}

impl<T: Real> HyperbolicQrResult<T> {
    /// `||H1^T Sigma H1 + H2^T Sigma H2 - sigma_hat||_F`.
    pub fn orthogonality_defect(&self, sigma: &Signature) -> T {
        let mut g = self.h1.tr_matmul(&sigma.apply_left(&self.h1));
        g.axpy(T::one(), &self.h2.tr_matmul(&sigma.apply_left(&self.h2)));
        (&g - &self.sigma_hat.to_matrix()).frobenius_norm()
    }
}

/// Hyperbolic QR of the stacked matrix `[X; eta I]` with respect to
/// `Sigma (+) Sigma`.
///
/// `R` comes from an `LDL^T` factorization of the Gram matrix
/// `X^T Sigma X + eta^2 Sigma` with its 2x2 pivots rotated to diagonal form.
/// The resulting `H` is factored a second time the same way, which restores
/// the orthogonality lost to the conditioning of the Gram matrix.
pub fn hyperbolic_qr_tall<T: Real>(x: &DenseMatrix<T>, eta: T, sigma: &Signature) -> Result<HyperbolicQrResult<T>> {
    let gram = x.tr_matmul(&sigma.apply_left(x));
    let (ht, sigma_hat) = hqr_transposed(x, &gram, eta, sigma)?;
    let n = x.rows();
    Ok(HyperbolicQrResult {
        h1: ht.block(0, n, 0, n).transpose(),
        h2: ht.block(0, n, n, 2 * n).transpose(),
        sigma_hat,
    })
}

/// `H^T` (n x 2n) and `sigma_hat`, given the precomputed `X^T Sigma X`.
pub(crate) fn hqr_transposed<T: Real>(
    x: &DenseMatrix<T>,
    gram: &DenseMatrix<T>,
    eta: T,
    sigma: &Signature,
) -> Result<(DenseMatrix<T>, Signature)> {
    let n = x.rows();
    if !x.is_square() || n != sigma.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix with signature of length {}",
            x.rows(),
            x.cols(),
            sigma.len()
        )));
    }
    if !(eta > T::zero()) || !eta.is_finite() {
        return Err(Error::Domain("eta must be positive".into()));
    }
    let eta2 = eta * eta;
    let mut m = gram.symmetrized();
    for (i, s) in sigma.values::<T>().into_iter().enumerate() {
        m[(i, i)] += eta2 * s;
    }
    let stacked_t = x.transpose().hstack(&DenseMatrix::identity(n).scale(eta));
    let (ht, _) = apply_inverse_factor(&m, stacked_t)?;

    // second pass on the Gram matrix of H under Sigma (+) Sigma
    let big = sigma.concat(sigma);
    let g = ht.matmul_tr(&big.apply_right(&ht)).symmetrized();
    apply_inverse_factor(&g, ht)
}

/// Factors `m = R^T diag(sign) R` and returns `(R^{-T} bt, sign)`.
fn apply_inverse_factor<T: Real>(m: &DenseMatrix<T>, bt: DenseMatrix<T>) -> Result<(DenseMatrix<T>, Signature)> {
    let f = factor_lower_tol(m, T::zero());
    let eig = f.diagonalize();
    if let Some(&d) = eig.d.iter().find(|d| **d == T::zero() || !d.is_finite()) {
        return Err(Error::Breakdown {
            pivot: d.to_f64().unwrap_or(f64::NAN),
            threshold: 0.0,
        });
    }
    let mut y = f.solve_lp(&bt);
    eig.apply_vt(&mut y);
    let scale: Vec<T> = eig.d.iter().map(|d| T::one() / d.abs().sqrt()).collect();
    let signs = Signature::from_signs_of(&eig.d)?;
    Ok((y.scale_rows(&scale), signs))
}
