//! Spectral divide-and-conquer eigensolver for pseudosymmetric matrices.

// `!(x > 0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cholesky;
pub mod condest;
pub mod dnc;
pub mod elliptic;
pub mod error;
pub mod gen;
pub mod jacobi;
pub mod ldl;
pub mod matrix;
pub mod scalar;
pub mod sign;
pub mod subspace;
pub mod triangular;
pub mod zolotarev;

pub use error::{Error, Result};
pub use matrix::{DenseMatrix, Signature};
pub use scalar::Real;
pub use dnc::{solve_definite, solve_recursive, spectral_divide, EigenDecomposition, RecursiveConfig};
pub use sign::{matrix_sign, SignMethod};
pub use subspace::{BasisMethod, SubspaceBasis};

pub type Matrix = DenseMatrix<f64>;
pub type MatrixF32 = DenseMatrix<f32>;
pub type Eigen = EigenDecomposition<f64>;
