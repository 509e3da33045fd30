//! Invariant-subspace bases from the spectral projectors of a sign matrix.

use std::fmt;
use std::str::FromStr;

use crate::cholesky::cholesky_lower;
use crate::error::{Error, Result};
use crate::ldl::factor_lower;
use crate::matrix::{DenseMatrix, Signature};
use crate::scalar::Real;
use crate::sign::projectors;
use crate::triangular::solve_lower;

/// Kept and discarded `|d|` must differ by at least this factor.
pub const RANK_GAP: f64 = 1e6;
/// Largest admissible distance of a projector trace from an integer.
pub const TRACE_SLACK: f64 = 0.1;

/// `Q = [Q+ Q-]` with `Q^T Sigma Q = sigma_hat`.
#[derive(Clone, Debug)]
pub struct SubspaceBasis<T> {
    pub q_plus: DenseMatrix<T>,
    pub q_minus: DenseMatrix<T>,
    pub sigma_hat: Signature,
    pub r_plus: usize,
    pub r_minus: usize,
}

/// Basis extraction routine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisMethod {
    /// Orthogonal basis for a symmetric sign matrix.
    OrthChol,
    /// Hyperbolic basis for any pseudosymmetric sign matrix.
    HypLdl,
    /// Definite case, Cholesky of the projector blocks.
    DefChol,
    /// Definite case, truncated `LDL^T`.
    DefLdl,
}

impl BasisMethod {
    pub fn name(&self) -> &'static str {
        match self {
            BasisMethod::OrthChol => "orth-chol",
            BasisMethod::HypLdl => "hyp-ldl",
            BasisMethod::DefChol => "chol",
            BasisMethod::DefLdl => "ldl",
        }
    }
}

impl fmt::Display for BasisMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BasisMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [BasisMethod::OrthChol, BasisMethod::HypLdl, BasisMethod::DefChol, BasisMethod::DefLdl]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown basis method '{s}'")))
    }
}

pub fn extract_basis<T: Real>(method: BasisMethod, s: &DenseMatrix<T>, sigma: &Signature) -> Result<SubspaceBasis<T>> {
    match method {
        BasisMethod::OrthChol => orth_basis_chol(s),
        BasisMethod::HypLdl => hyp_basis_ldl(s, sigma),
        BasisMethod::DefChol => def_basis_chol(s, sigma),
        BasisMethod::DefLdl => def_basis_ldl(s, sigma),
    }
}

impl<T: Real> SubspaceBasis<T> {
    pub fn dim(&self) -> usize {
        self.r_plus + self.r_minus
    }

    /// `[Q+ Q-]`.
    pub fn q(&self) -> DenseMatrix<T> {
        self.q_plus.hstack(&self.q_minus)
    }

    /// `||Q^T Sigma Q - sigma_hat||_F`.
    pub fn orthogonality_defect(&self, sigma: &Signature) -> T {
        let q = self.q();
        let g = q.tr_matmul(&sigma.apply_left(&q));
        (&g - &self.sigma_hat.to_matrix()).frobenius_norm()
    }

    pub fn sigma_plus(&self) -> Signature {
        self.sigma_hat.select(&(0..self.r_plus).collect::<Vec<_>>())
    }

    pub fn sigma_minus(&self) -> Signature {
        self.sigma_hat.select(&(self.r_plus..self.dim()).collect::<Vec<_>>())
    }

    /// `||Q+^T Sigma A Q-||_F / ||A||_F`.
    pub fn backward_error(&self, a: &DenseMatrix<T>, sigma: &Signature) -> T {
        let coupling = self.q_plus.tr_matmul(&sigma.apply_left(&a.matmul(&self.q_minus)));
        let na = a.frobenius_norm();
        if na == T::zero() {
            coupling.frobenius_norm()
        } else {
            coupling.frobenius_norm() / na
        }
    }
}

/// `round(trace(P))`, failing when the trace is more than 0.1 away from an
/// integer.
pub fn rank_from_trace<T: Real>(p: &DenseMatrix<T>) -> Result<usize> {
    let t = p.trace().to_f64().unwrap_or(f64::NAN);
    let r = t.round();
    if !((t - r).abs() <= TRACE_SLACK) || r < 0.0 || r > p.rows() as f64 {
        return Err(Error::IllConditionedProjector { trace: t });
    }
    Ok(r as usize)
}

/// `B L^{-T}`.
fn right_solve_lt<T: Real>(b: &DenseMatrix<T>, l: &DenseMatrix<T>) -> DenseMatrix<T> {
    let mut xt = b.transpose();
    solve_lower(l, &mut xt, false);
    xt.transpose()
}

/// `P[:, idx] L^{-T}` with `L L^T = P[idx, idx]`: the low-rank Cholesky
/// factor of `P` extended from the rows `idx`.
fn chol_extension<T: Real>(p: &DenseMatrix<T>, idx: &[usize]) -> Result<DenseMatrix<T>> {
    if idx.is_empty() {
        return Ok(DenseMatrix::zeros(p.rows(), 0));
    }
    let f = cholesky_lower(&p.select(idx, idx).symmetrized())?;
    Ok(right_solve_lt(&p.select_columns(idx), &f.l))
}

/// Orthogonal basis for a symmetric sign matrix `S`: Cholesky of the leading
/// `r+ x r+` block of `P+` and of the trailing `r- x r-` block of `P-`.
pub fn orth_basis_chol<T: Real>(s: &DenseMatrix<T>) -> Result<SubspaceBasis<T>> {
    let n = s.rows();
    let (pp, pm) = projectors(&s.symmetrized());
    let r_plus = rank_from_trace(&pp)?;
    let q_plus = chol_extension(&pp, &(0..r_plus).collect::<Vec<_>>())?;
    let q_minus = chol_extension(&pm, &(r_plus..n).collect::<Vec<_>>())?;
    Ok(finish(q_plus, q_minus, Signature::identity(n)))
}

/// Hyperbolic basis from truncated `LDL^T` factorizations of `Sigma P+-`.
pub fn hyp_basis_ldl<T: Real>(s: &DenseMatrix<T>, sigma: &Signature) -> Result<SubspaceBasis<T>> {
    let n = s.rows();
    let (pp, pm) = projectors(s);
    let r_plus = rank_from_trace(&pp)?;
    let (q_plus, sh_plus) = ldl_truncated(&sigma.apply_left(&pp), sigma, r_plus)?;
    let (q_minus, sh_minus) = ldl_truncated(&sigma.apply_left(&pm), sigma, n - r_plus)?;
    Ok(finish(q_plus, q_minus, sh_plus.concat(&sh_minus)))
}

/// `Sigma P = W diag(d) W^T` with `W = P L V`; keeps the `r` largest `|d|`
/// and returns `Q = Sigma W_r |d_r|^{1/2} sign(d_r)` with `sign(d_r)`.
fn ldl_truncated<T: Real>(sp: &DenseMatrix<T>, sigma: &Signature, r: usize) -> Result<(DenseMatrix<T>, Signature)> {
    let n = sp.rows();
    let f = factor_lower(&sp.symmetrized());
    let eig = f.diagonalize();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.d[j].abs().partial_cmp(&eig.d[i].abs()).unwrap_or(std::cmp::Ordering::Equal));
    let (keep, drop) = order.split_at(r);
    if let (Some(&k), Some(&d)) = (keep.last(), drop.first()) {
        if !(eig.d[k].abs() >= T::lit(RANK_GAP) * eig.d[d].abs()) {
            return Err(Error::RankMismatch(format!(
                "kept |d| {:e} not separated from discarded {:e}",
                eig.d[k].abs().to_f64().unwrap_or(f64::NAN),
                eig.d[d].abs().to_f64().unwrap_or(f64::NAN)
            )));
        }
    }
    if keep.iter().any(|&k| eig.d[k] == T::zero()) {
        return Err(Error::RankMismatch("zero pivot among kept columns".into()));
    }
    let dk: Vec<T> = keep.iter().map(|&k| eig.d[k]).collect();
    let signs = Signature::from_signs_of(&dk)?;
    let w = scaled_columns(&f, &eig, keep, |d| d.abs().sqrt() * d.signum());
    Ok((sigma.apply_left(&w), signs))
}

/// Columns `keep` of `P L V`, each scaled by `scale(d)`.
fn scaled_columns<T: Real>(
    f: &crate::ldl::LdlFactorization<T>,
    eig: &crate::ldl::BlockEigen<T>,
    keep: &[usize],
    scale: impl Fn(T) -> T,
) -> DenseMatrix<T> {
    // P L V = (V^T L^T P^T)^T; build V^T L^T and undo the row permutation
    let mut vtlt = f.l.transpose();
    eig.apply_vt(&mut vtlt);
    let rows = vtlt.select_rows(keep);
    let s: Vec<T> = keep.iter().map(|&k| scale(eig.d[k])).collect();
    f.unpermute_rows(&rows.transpose()).scale_columns(&s)
}

/// Definite case via Cholesky of the `Sigma`-sorted blocks of the projectors;
/// the rank is the inertia of `Sigma`.
pub fn def_basis_chol<T: Real>(s: &DenseMatrix<T>, sigma: &Signature) -> Result<SubspaceBasis<T>> {
    let (pp, pm) = projectors(s);
    let q_plus = chol_extension(&pp, &sigma.positions(1))?;
    let q_minus = chol_extension(&pm, &sigma.positions(-1))?;
    Ok(finish(q_plus, q_minus, Signature::split(sigma.p(), sigma.q())))
}

/// Definite case via truncated `LDL^T` of `Sigma P+` and `-Sigma P-`.
pub fn def_basis_ldl<T: Real>(s: &DenseMatrix<T>, sigma: &Signature) -> Result<SubspaceBasis<T>> {
    let (pp, pm) = projectors(s);
    let q_plus = ldl_definite(&sigma.apply_left(&pp), sigma, sigma.p())?;
    let q_minus = ldl_definite(&sigma.apply_left(&pm).scale(-T::one()), sigma, sigma.q())?;
    Ok(finish(q_plus, q_minus, Signature::split(sigma.p(), sigma.q())))
}

/// `Sigma W_r d_r^{1/2}` for the `r` largest (positive) `d`.
fn ldl_definite<T: Real>(m: &DenseMatrix<T>, sigma: &Signature, r: usize) -> Result<DenseMatrix<T>> {
    let n = m.rows();
    let f = factor_lower(&m.symmetrized());
    let eig = f.diagonalize();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.d[j].partial_cmp(&eig.d[i]).unwrap_or(std::cmp::Ordering::Equal));
    let keep = &order[..r];
    if let Some(&k) = keep.iter().find(|&&k| !(eig.d[k] > T::zero())) {
        return Err(Error::RankMismatch(format!(
            "kept pivot {:e} is not positive",
            eig.d[k].to_f64().unwrap_or(f64::NAN)
        )));
    }
    let w = scaled_columns(&f, &eig, keep, |d| d.sqrt());
    Ok(sigma.apply_left(&w))
}

fn finish<T: Real>(q_plus: DenseMatrix<T>, q_minus: DenseMatrix<T>, sigma_hat: Signature) -> SubspaceBasis<T> {
    let (r_plus, r_minus) = (q_plus.cols(), q_minus.cols());
    SubspaceBasis {
        q_plus: normalize_signs(q_plus),
        q_minus: normalize_signs(q_minus),
        sigma_hat,
        r_plus,
        r_minus,
    }
}

/// Flips columns so that the first entry that is not negligible is positive.
fn normalize_signs<T: Real>(q: DenseMatrix<T>) -> DenseMatrix<T> {
    let n = q.rows();
    let flips: Vec<T> = (0..q.cols())
        .map(|j| {
            let col = q.column(j);
            let big = col.iter().fold(T::zero(), |m, x| m.max(x.abs()));
            let tiny = T::from_usize_lossy(n) * T::unit_roundoff() * big;
            match col.iter().find(|x| x.abs() > tiny) {
                Some(&x) if x < T::zero() => -T::one(),
                _ => T::one(),
            }
        })
        .collect();
    q.scale_columns(&flips)
}
