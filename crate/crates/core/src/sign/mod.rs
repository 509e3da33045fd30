//! Matrix sign function of pseudosymmetric matrices.

mod hqr;
mod newton;
mod zolo;

use std::fmt;
use std::str::FromStr;

pub use hqr::{hyperbolic_qr_tall, HyperbolicQrResult};
pub use newton::sign_newton;
pub use zolo::{sign_sigma_dwh, sign_zolo_pd, zolo_step_hr, zolo_step_ldl, DwhMode};

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, Signature};
use crate::scalar::Real;

/// Which iteration produced a [`SignResult`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SignMethod {
    Newton,
    SigmaDwhLdl,
    SigmaDwhLdliqr2,
    ZoloPd,
}

impl SignMethod {
    pub const ALL: [SignMethod; 4] = [
        SignMethod::Newton,
        SignMethod::SigmaDwhLdl,
        SignMethod::SigmaDwhLdliqr2,
        SignMethod::ZoloPd,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            SignMethod::Newton => "newton",
            SignMethod::SigmaDwhLdl => "sigma_dwh_ldl",
            SignMethod::SigmaDwhLdliqr2 => "sigma_dwh_ldliqr2",
            SignMethod::ZoloPd => "zolo_pd",
        }
    }

    /// Name used on the command line.
    pub fn cli_name(&self) -> &'static str {
        match self {
            SignMethod::Newton => "newton",
            SignMethod::SigmaDwhLdl => "dwh-ldl",
            SignMethod::SigmaDwhLdliqr2 => "dwh-ldliqr2",
            SignMethod::ZoloPd => "zolo",
        }
    }
}

impl fmt::Display for SignMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for SignMethod {
    type Err = Error;

    /// Accepts both the command-line names and the tags.
    fn from_str(s: &str) -> Result<Self> {
        SignMethod::ALL
            .into_iter()
            .find(|m| m.cli_name() == s || m.tag() == s)
            .ok_or_else(|| Error::Domain(format!("unknown sign method '{s}'")))
    }
}

/// One step of an iteration: relative change and, for the rational
/// iterations, the lower bound `ell` used by the step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterRecord<T> {
    pub rel_change: T,
    pub ell: Option<T>,
}

#[derive(Clone, Debug)]
pub struct SignResult<T> {
    pub s: DenseMatrix<T>,
    pub iterations: usize,
    pub method: SignMethod,
    pub trace: Vec<IterRecord<T>>,
}

impl<T: Real> SignResult<T> {
    /// `||S^2 - I||_F / sqrt(n)`.
    pub fn involution_defect(&self) -> T {
        let n = self.s.rows();
        let mut s2 = self.s.matmul(&self.s);
        s2.add_identity_scaled(-T::one());
        s2.frobenius_norm() / T::from_usize_lossy(n).sqrt()
    }

    /// `P+ = (I + S) / 2` and `P- = (I - S) / 2`.
    pub fn projectors(&self) -> (DenseMatrix<T>, DenseMatrix<T>) {
        projectors(&self.s)
    }
}

pub fn projectors<T: Real>(s: &DenseMatrix<T>) -> (DenseMatrix<T>, DenseMatrix<T>) {
    let mut plus = s.scale(T::half());
    plus.add_identity_scaled(T::half());
    let mut minus = s.scale(-T::half());
    minus.add_identity_scaled(T::half());
    (plus, minus)
}

/// Dispatches to the iteration named by `method`.
pub fn matrix_sign<T: Real>(a: &DenseMatrix<T>, sigma: &Signature, method: SignMethod) -> Result<SignResult<T>> {
    match method {
        SignMethod::Newton => sign_newton(a, sigma),
        SignMethod::SigmaDwhLdl => sign_sigma_dwh(a, sigma, DwhMode::Ldl),
        SignMethod::SigmaDwhLdliqr2 => sign_sigma_dwh(a, sigma, DwhMode::Ldliqr2),
        SignMethod::ZoloPd => sign_zolo_pd(a, sigma),
    }
}

pub(crate) fn check_input<T: Real>(a: &DenseMatrix<T>, sigma: &Signature) -> Result<()> {
    if !a.is_square() || a.rows() != sigma.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix with signature of length {}",
            a.rows(),
            a.cols(),
            sigma.len()
        )));
    }
    Ok(())
}

pub(crate) fn rel_change<T: Real>(next: &DenseMatrix<T>, prev: &DenseMatrix<T>) -> T {
    (next - prev).frobenius_norm() / next.frobenius_norm()
}
