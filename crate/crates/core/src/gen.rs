//! Seeded test-matrix generators.
//!
//! All randomness comes from SplitMix64 (`rand_xoshiro::SplitMix64`, seeded
//! with the raw 64-bit seed). Uniforms take the top 53 bits of each output;
//! normals use the Box–Muller pair `sqrt(-2 ln u1) (cos, sin)(2 pi u2)` with
//! `u1` in `(0, 1]`, both values consumed in order.

use std::fmt;
use std::str::FromStr;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::cholesky::cholesky;
use crate::error::{Error, Result};
use crate::jacobi::sym_eig_jacobi;
use crate::matrix::{DenseMatrix, Signature};
use crate::scalar::Real;

/// Uniform and normal variates on top of SplitMix64.
#[derive(Clone, Debug)]
pub struct Rng {
    inner: SplitMix64,
    spare: Option<f64>,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { inner: SplitMix64::seed_from_u64(seed), spare: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.uniform();
        let rad = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
        self.spare = Some(rad * s);
        rad * c
    }

    /// Fair coin as `+1` / `-1`.
    pub fn sign(&mut self) -> i8 {
        if self.next_u64() >> 63 == 0 {
            1
        } else {
            -1
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    /// `Sigma Q D Q^T` with `D = linspace(1, kappa, n)`.
    RandomDefinite,
    /// Indefinite but real spectrum `+-linspace(1, kappa, n)`.
    RandomSignature,
    /// Two-by-two block Casida structure with `gap = 1 / kappa`.
    CasidaLike,
}

impl GeneratorKind {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::RandomDefinite => "random_definite",
            GeneratorKind::RandomSignature => "random_signature",
            GeneratorKind::CasidaLike => "casida_like",
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [GeneratorKind::RandomDefinite, GeneratorKind::RandomSignature, GeneratorKind::CasidaLike]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown generator kind '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub n: usize,
    pub kappa: f64,
    pub seed: u64,
    pub kind: GeneratorKind,
}

impl GeneratorSpec {
    pub fn new(n: usize, kappa: f64, seed: u64, kind: GeneratorKind) -> Result<Self> {
        let spec = GeneratorSpec { n, kappa, seed, kind };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Domain(format!("n = {} must be at least 2", self.n)));
        }
        if !(self.kappa >= 1.0) || !self.kappa.is_finite() {
            return Err(Error::Domain(format!("kappa = {} must be finite and >= 1", self.kappa)));
        }
        if self.kind == GeneratorKind::CasidaLike && !self.n.is_multiple_of(2) {
            return Err(Error::Domain("casida_like needs an even n".into()));
        }
        Ok(())
    }

    pub fn generate<T: Real>(&self) -> Result<(DenseMatrix<T>, Signature)> {
        self.validate()?;
        Ok(match self.kind {
            GeneratorKind::RandomDefinite => random_definite_pseudosym(self.n, self.kappa, self.seed),
            GeneratorKind::RandomSignature => random_signature(self.n, self.kappa, self.seed),
            GeneratorKind::CasidaLike => casida_like(self.n / 2, self.seed, T::one() / T::lit(self.kappa)),
        })
    }
}

/// Random orthogonal matrix: the rows of a standard-normal matrix
/// orthonormalized by modified Gram–Schmidt, twice.
pub fn random_orthogonal<T: Real>(n: usize, seed: u64) -> DenseMatrix<T> {
    let mut rng = Rng::new(seed);
    let mut q: DenseMatrix<f64> = DenseMatrix::from_fn(n, n, |_, _| rng.normal());
    for i in 0..n {
        for _ in 0..2 {
            for j in 0..i {
                let (done, rest) = q.as_mut_slice().split_at_mut(i * n);
                let qj = &done[j * n..(j + 1) * n];
                let qi = &mut rest[..n];
                let r: f64 = qi.iter().zip(qj).map(|(a, b)| a * b).sum();
                qi.iter_mut().zip(qj).for_each(|(a, &b)| *a -= r * b);
            }
        }
        let row = q.row_mut(i);
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        row.iter_mut().for_each(|x| *x /= norm);
    }
    q.transpose().cast()
}

/// `n` equally spaced values from 1 to `kappa`.
pub fn linspace_spectrum(n: usize, kappa: f64) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| if i + 1 == n { kappa } else { 1.0 + (kappa - 1.0) * i as f64 / (n - 1) as f64 })
        .collect()
}

/// Random signature with fair-coin signs.
pub fn random_signature_vector(n: usize, rng: &mut Rng) -> Signature {
    Signature::new((0..n).map(|_| rng.sign()).collect()).expect("signs are +-1")
}

/// `A = Sigma Q D Q^T` with `D = linspace(1, kappa, n)`: `Sigma A` is positive
/// definite and the singular values of `A` are exactly `D`.
pub fn random_definite_pseudosym<T: Real>(n: usize, kappa: f64, seed: u64) -> (DenseMatrix<T>, Signature) {
    let mut rng = Rng::new(seed);
    let sigma = random_signature_vector(n, &mut rng);
    let q: DenseMatrix<f64> = random_orthogonal(n, rng.next_u64());
    let d = linspace_spectrum(n, kappa);
    let m = q.scale_columns(&d).matmul_tr(&q).symmetrized();
    (sigma.apply_left(&m).cast(), sigma)
}

/// Indefinite pseudosymmetric matrix with real spectrum.
///
/// `A = H diag(lambda) H^{-1}` where `H` is Sigma-orthogonal (a product of an
/// orthogonal block-diagonal factor and hyperbolic rotations with
/// `cosh <= 2` pairing positive and negative indices) and the eigenvalues are
/// `linspace(1, kappa, n)` with independent random signs. `H^{-1} =
/// Sigma H^T Sigma`, so `Sigma A` is symmetric.
pub fn random_signature<T: Real>(n: usize, kappa: f64, seed: u64) -> (DenseMatrix<T>, Signature) {
    let mut rng = Rng::new(seed);
    let sigma = random_signature_vector(n, &mut rng);
    let pos = sigma.positions(1);
    let neg = sigma.positions(-1);

    let mut h = DenseMatrix::<f64>::identity(n);
    for idx in [&pos, &neg] {
        let k = idx.len();
        if k == 0 {
            continue;
        }
        let q: DenseMatrix<f64> = random_orthogonal(k, rng.next_u64());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                h[(i, j)] = q[(a, b)];
            }
        }
    }
    for (&i, &j) in pos.iter().zip(&neg) {
        // rows i, j <- [[ch, sh], [sh, ch]] [row i; row j]
        let t = rng.uniform() * 2f64.acosh();
        let (ch, sh) = (t.cosh(), t.sinh());
        let (ri, rj) = h.rows_mut_pair(i, j);
        for (x, y) in ri.iter_mut().zip(rj.iter_mut()) {
            let (u, v) = (*x, *y);
            *x = ch * u + sh * v;
            *y = sh * u + ch * v;
        }
    }
    let lambda: Vec<f64> = linspace_spectrum(n, kappa).into_iter().map(|l| l * rng.sign() as f64).collect();
    // H diag(lambda) Sigma H^T Sigma; Sigma A = (Sigma H) diag(lambda) (Sigma H)^T
    let sh = sigma.apply_left(&h);
    let sa = sh.scale_columns(&lambda).matmul_tr(&sh).symmetrized();
    (sigma.apply_left(&sa).cast(), sigma)
}

/// `H = [[A, B], [-B, -A]]` with `A = M^T M / m + gap I` and `B` symmetric,
/// scaled to `||B||_F = gap / 2`, so `Sigma H = [[A, B], [B, A]]` is positive
/// definite for `Sigma = diag(I, -I)`.
pub fn casida_like<T: Real>(n_half: usize, seed: u64, gap: T) -> (DenseMatrix<T>, Signature) {
    casida_with_coupling(n_half, seed, gap, T::one())
}

/// [`casida_like`] with `||B||_F = coupling * gap / 2`; `coupling = 0` gives
/// the decoupled `diag(A, -A)`.
pub fn casida_with_coupling<T: Real>(n_half: usize, seed: u64, gap: T, coupling: T) -> (DenseMatrix<T>, Signature) {
    let m = n_half;
    let mut rng = Rng::new(seed);
    let mm: DenseMatrix<f64> = DenseMatrix::from_fn(m, m, |_, _| rng.normal());
    let mut a: DenseMatrix<T> = mm.tr_matmul(&mm).scale(1.0 / m as f64).symmetrized().cast();
    a.add_identity_scaled(gap);
    let braw: DenseMatrix<f64> = DenseMatrix::from_fn(m, m, |_, _| rng.normal());
    let braw: DenseMatrix<T> = braw.symmetrized().cast();
    let bnorm = braw.frobenius_norm();
    let b = if bnorm > T::zero() {
        braw.scale(coupling * gap * T::half() / bnorm)
    } else {
        braw
    };
    let top = a.hstack(&b);
    let bottom = b.scale(-T::one()).hstack(&a.scale(-T::one()));
    (top.vstack(&bottom), Signature::split(m, m))
}

/// Reference eigenvalues of a definite pseudosymmetric `A`, sorted
/// descending: with `Sigma A = L L^T`, they are the reciprocals of the
/// eigenvalues of `L^{-1} Sigma L^{-T}`.
pub fn pencil_oracle<T: Real>(a: &DenseMatrix<T>, sigma: &Signature) -> Result<Vec<T>> {
    let f = cholesky(&sigma.apply_left(a).symmetrized()).map_err(|_| Error::NotDefinite)?;
    // L^{-1} Sigma L^{-T} = (L^{-1} Sigma) (L^{-1})^T
    let linv = f.solve_l(&DenseMatrix::identity(a.rows()));
    let m = sigma.apply_right(&linv).matmul_tr(&linv).symmetrized();
    let (_, mu) = sym_eig_jacobi(&m)?;
    let mut lambda: Vec<T> = mu.into_iter().map(|x| T::one() / x).collect();
    lambda.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    Ok(lambda)
}
