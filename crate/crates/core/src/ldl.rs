//! Symmetric indefinite `P L D L^T P^T` factorization with Bunch–Kaufman
//! partial pivoting.

use crate::cholesky::check_symmetric;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Real;
use crate::triangular;

/// One diagonal block of `D`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DBlock<T> {
    /// 1x1 pivot `d` at position `at`.
    One { at: usize, d: T },
    /// Symmetric 2x2 pivot `[[a, b], [b, c]]` occupying `at` and `at + 1`.
    Two { at: usize, a: T, b: T, c: T },
}

impl<T: Real> DBlock<T> {
    pub fn at(&self) -> usize {
        match *self {
            DBlock::One { at, .. } | DBlock::Two { at, .. } => at,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            DBlock::One { .. } => 1,
            DBlock::Two { .. } => 2,
        }
    }
}

/// `P^T A P = L D L^T` where `(P^T A P)[i][j] = A[perm[i]][perm[j]]`.
#[derive(Clone, Debug)]
pub struct LdlFactorization<T> {
    pub perm: Vec<usize>,
    /// Unit lower triangular.
    pub l: DenseMatrix<T>,
    pub blocks: Vec<DBlock<T>>,
}

/// Orthogonal block-diagonal `V` with `V^T D V = diag(d)`.
///
/// Stored as one optional Givens pair per block; `v_matrix` expands it.
#[derive(Clone, Debug)]
pub struct BlockEigen<T> {
    pub d: Vec<T>,
    rotations: Vec<(usize, T, T)>,
}

/// Bunch–Kaufman growth parameter `(1 + sqrt(17)) / 8`.
fn bk_alpha<T: Real>() -> T {
    (T::one() + T::lit(17.0).sqrt()) / T::lit(8.0)
}

/// Factors a symmetric (possibly singular or indefinite) matrix.
///
/// Pivot candidates no larger than `n * u * max|A_ij|` are recorded as exact
/// zero 1x1 blocks, so singular inputs yield a low-rank factorization rather
/// than an error.
pub fn ldl_bunch_kaufman<T: Real>(a: &DenseMatrix<T>) -> Result<LdlFactorization<T>> {
    check_symmetric(a)?;
    Ok(factor_lower(a))
}

/// Factorization reading only the lower triangle of `a`.
pub(crate) fn factor_lower<T: Real>(a: &DenseMatrix<T>) -> LdlFactorization<T> {
    let tol = T::from_usize_lossy(a.rows()) * T::unit_roundoff() * a.max_abs();
    factor_lower_tol(a, tol)
}

/// As [`factor_lower`] with an explicit zero-pivot threshold.
pub(crate) fn factor_lower_tol<T: Real>(a: &DenseMatrix<T>, tol: T) -> LdlFactorization<T> {
    let n = a.rows();
    let alpha = bk_alpha::<T>();
    let mut w = a.clone();
    let mut l = DenseMatrix::identity(n);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut blocks = Vec::with_capacity(n);
    let mut col = vec![T::zero(); n];
    let mut col2 = vec![T::zero(); n];

    let mut k = 0;
    while k < n {
        let absakk = w[(k, k)].abs();
        let (imax, colmax) = ((k + 1)..n)
            .map(|i| (i, w[(i, k)].abs()))
            .fold((k, T::zero()), |best, c| if c.1 > best.1 { c } else { best });

        if absakk.max(colmax) <= tol {
            blocks.push(DBlock::One { at: k, d: T::zero() });
            for i in (k + 1)..n {
                l[(i, k)] = T::zero();
            }
            k += 1;
            continue;
        }

        let mut two = false;
        let mut swap_with = k;
        if absakk < alpha * colmax {
            let mut rowmax = (k..imax).map(|j| w[(imax, j)].abs()).fold(T::zero(), T::max);
            rowmax = ((imax + 1)..n).map(|j| w[(j, imax)].abs()).fold(rowmax, T::max);
            if absakk * rowmax >= alpha * colmax * colmax {
                // 1x1 without interchange
            } else if w[(imax, imax)].abs() >= alpha * rowmax {
                swap_with = imax;
            } else {
                two = true;
                swap_with = imax;
            }
        }

        let kp = if two { k + 1 } else { k };
        if swap_with != kp {
            symmetric_swap(&mut w, kp, swap_with);
            if two {
                // the first pivot column is still active
                let t = w[(kp, k)];
                w[(kp, k)] = w[(swap_with, k)];
                w[(swap_with, k)] = t;
            }
            perm.swap(kp, swap_with);
            for j in 0..k {
                let t = l[(kp, j)];
                l[(kp, j)] = l[(swap_with, j)];
                l[(swap_with, j)] = t;
            }
        }

        if !two {
            let d = w[(k, k)];
            for i in (k + 1)..n {
                col[i] = w[(i, k)];
                l[(i, k)] = col[i] / d;
            }
            for i in (k + 1)..n {
                let li = l[(i, k)];
                if li != T::zero() {
                    let row = &mut w.row_mut(i)[(k + 1)..=i];
                    for (x, &c) in row.iter_mut().zip(&col[(k + 1)..=i]) {
                        *x -= li * c;
                    }
                }
            }
            blocks.push(DBlock::One { at: k, d });
            k += 1;
        } else {
            let (a11, b, c22) = (w[(k, k)], w[(k + 1, k)], w[(k + 1, k + 1)]);
            for i in (k + 2)..n {
                col[i] = w[(i, k)];
                col2[i] = w[(i, k + 1)];
                let (x1, x2) = solve_2x2(a11, b, c22, col[i], col2[i]);
                l[(i, k)] = x1;
                l[(i, k + 1)] = x2;
            }
            for i in (k + 2)..n {
                let (l1, l2) = (l[(i, k)], l[(i, k + 1)]);
                let row = &mut w.row_mut(i)[(k + 2)..=i];
                for ((x, &c1), &c2) in row.iter_mut().zip(&col[(k + 2)..=i]).zip(&col2[(k + 2)..=i]) {
                    *x -= l1 * c1 + l2 * c2;
                }
            }
            l[(k + 1, k)] = T::zero();
            blocks.push(DBlock::Two { at: k, a: a11, b, c: c22 });
            k += 2;
        }
    }
    LdlFactorization { perm, l, blocks }
}

/// Interchanges indices `k < p` of the symmetric matrix held in the lower
/// triangle of `w`, for the trailing part starting at `k`.
fn symmetric_swap<T: Real>(w: &mut DenseMatrix<T>, k: usize, p: usize) {
    debug_assert!(k < p);
    let n = w.rows();
    let t = w[(k, k)];
    w[(k, k)] = w[(p, p)];
    w[(p, p)] = t;
    for i in (p + 1)..n {
        let t = w[(i, k)];
        w[(i, k)] = w[(i, p)];
        w[(i, p)] = t;
    }
    for j in (k + 1)..p {
        let t = w[(j, k)];
        w[(j, k)] = w[(p, j)];
        w[(p, j)] = t;
    }
}

/// Solves `[[a, b], [b, c]] x = y` in the scaled form used for 2x2 pivots.
#[inline]
fn solve_2x2<T: Real>(a: T, b: T, c: T, y1: T, y2: T) -> (T, T) {
    let akm1 = a / b;
    let ak = c / b;
    let denom = akm1 * ak - T::one();
    let bkm1 = y1 / b;
    let bk = y2 / b;
    ((ak * bkm1 - bk) / denom, (akm1 * bk - bkm1) / denom)
}

impl<T: Real> LdlFactorization<T> {
    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// Dense block-diagonal `D`.
    pub fn d_matrix(&self) -> DenseMatrix<T> {
        let mut d = DenseMatrix::zeros(self.dim(), self.dim());
        for blk in &self.blocks {
            match *blk {
                DBlock::One { at, d: v } => d[(at, at)] = v,
                DBlock::Two { at, a, b, c } => {
                    d[(at, at)] = a;
                    d[(at + 1, at)] = b;
                    d[(at, at + 1)] = b;
                    d[(at + 1, at + 1)] = c;
                }
            }
        }
        d
    }

    /// The permutation as a matrix `P` with `P^T A P = L D L^T`.
    pub fn p_matrix(&self) -> DenseMatrix<T> {
        let n = self.dim();
        let mut p = DenseMatrix::zeros(n, n);
        for (i, &pi) in self.perm.iter().enumerate() {
            p[(pi, i)] = T::one();
        }
        p
    }

    /// `P L D L^T P^T`.
    pub fn reconstruct(&self) -> DenseMatrix<T> {
        let ld = self.l.matmul(&self.d_matrix());
        let inner = ld.matmul_tr(&self.l);
        let n = self.dim();
        let mut out = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(self.perm[i], self.perm[j])] = inner[(i, j)];
            }
        }
        out
    }

    /// Index of the first exactly-zero pivot, if any.
    pub fn zero_pivot(&self) -> Option<usize> {
        self.blocks.iter().find_map(|blk| match *blk {
            DBlock::One { at, d } if d == T::zero() => Some(at),
            _ => None,
        })
    }

    /// `P^T B` (rows gathered through `perm`).
    pub fn permute_rows(&self, b: &DenseMatrix<T>) -> DenseMatrix<T> {
        b.select_rows(&self.perm)
    }

    /// `P B` (inverse gather).
    pub fn unpermute_rows(&self, b: &DenseMatrix<T>) -> DenseMatrix<T> {
        let mut out = DenseMatrix::zeros(b.rows(), b.cols());
        for (i, &pi) in self.perm.iter().enumerate() {
            out.row_mut(pi).copy_from_slice(b.row(i));
        }
        out
    }

    /// `L^{-1} P^T B`.
    pub fn solve_lp(&self, b: &DenseMatrix<T>) -> DenseMatrix<T> {
        let mut x = self.permute_rows(b);
        triangular::solve_lower(&self.l, &mut x, true);
        x
    }

    /// `P L^{-T} B`.
    pub fn solve_ltp(&self, b: &DenseMatrix<T>) -> DenseMatrix<T> {
        let mut x = b.clone();
        triangular::solve_lower_transposed(&self.l, &mut x, true);
        self.unpermute_rows(&x)
    }

    /// `D^{-1} B` in place; fails on a zero pivot.
    pub fn solve_d_in_place(&self, b: &mut DenseMatrix<T>) -> Result<()> {
        for blk in &self.blocks {
            match *blk {
                DBlock::One { at, d } => {
                    if d == T::zero() {
                        return Err(Error::Singular { index: at });
                    }
                    b.row_mut(at).iter_mut().for_each(|x| *x /= d);
                }
                DBlock::Two { at, a, b: off, c } => {
                    let (r1, r2) = b.rows_mut_pair(at, at + 1);
                    for (y1, y2) in r1.iter_mut().zip(r2.iter_mut()) {
                        let (x1, x2) = solve_2x2(a, off, c, *y1, *y2);
                        *y1 = x1;
                        *y2 = x2;
                    }
                }
            }
        }
        Ok(())
    }

    /// `A^{-1} B`.
    pub fn solve(&self, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        let mut y = self.solve_lp(b);
        self.solve_d_in_place(&mut y)?;
        Ok(self.solve_ltp(&y))
    }

    pub fn solve_vec(&self, b: &[T]) -> Result<Vec<T>> {
        let bm = DenseMatrix::from_fn(b.len(), 1, |i, _| b[i]);
        Ok(self.solve(&bm)?.into_vec())
    }

    /// Symmetric `A^{-1}`, exploiting the triangular structure of `L^{-1}`.
    pub fn inverse(&self) -> Result<DenseMatrix<T>> {
        let n = self.dim();
        let mut linv = DenseMatrix::identity(n);
        triangular::solve_lower(&self.l, &mut linv, true);
        let mut dl = linv.clone();
        self.solve_d_in_place(&mut dl)?;
        // L^{-T} D^{-1} L^{-1}, then undo the permutation on both sides
        let inner = linv.tr_matmul(&dl).symmetrized();
        let mut out = DenseMatrix::zeros(n, n);
        for i in 0..n {
            let pi = self.perm[i];
            for j in 0..n {
                out[(pi, self.perm[j])] = inner[(i, j)];
            }
        }
        Ok(out)
    }

    /// `V`, `d` with `V^T D V = diag(d)`.
    pub fn diagonalize(&self) -> BlockEigen<T> {
        diagonalize_block_diag(&self.blocks, self.dim())
    }

    /// Numbers of positive, negative and zero eigenvalues of `A`.
    pub fn inertia(&self) -> (usize, usize, usize) {
        let d = self.diagonalize().d;
        let pos = d.iter().filter(|&&x| x > T::zero()).count();
        let neg = d.iter().filter(|&&x| x < T::zero()).count();
        (pos, neg, d.len() - pos - neg)
    }
}

/// Diagonalizes the block-diagonal `D` with one symmetric Schur rotation per
/// 2x2 block.
pub fn diagonalize_block_diag<T: Real>(blocks: &[DBlock<T>], n: usize) -> BlockEigen<T> {
    let mut d = vec![T::zero(); n];
    let mut rotations = Vec::new();
    for blk in blocks {
        match *blk {
            DBlock::One { at, d: v } => d[at] = v,
            DBlock::Two { at, a, b, c } => {
                if b == T::zero() {
                    d[at] = a;
                    d[at + 1] = c;
                    continue;
                }
                let tau = (c - a) / (T::two() * b);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = t * cs;
                d[at] = a - t * b;
                d[at + 1] = c + t * b;
                rotations.push((at, cs, sn));
            }
        }
    }
    BlockEigen { d, rotations }
}

impl<T: Real> BlockEigen<T> {
    /// Dense `V`; each rotation block is `[[c, s], [-s, c]]`.
    pub fn v_matrix(&self) -> DenseMatrix<T> {
        let mut v = DenseMatrix::identity(self.d.len());
        for &(at, c, s) in &self.rotations {
            v[(at, at)] = c;
            v[(at, at + 1)] = s;
            v[(at + 1, at)] = -s;
            v[(at + 1, at + 1)] = c;
        }
        v
    }

    /// `B <- V^T B`.
    pub fn apply_vt(&self, b: &mut DenseMatrix<T>) {
        for &(at, c, s) in &self.rotations {
            let (r1, r2) = b.rows_mut_pair(at, at + 1);
            for (x, y) in r1.iter_mut().zip(r2.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = c * u - s * v;
                *y = s * u + c * v;
            }
        }
    }

    /// `B <- V B`.
    pub fn apply_v(&self, b: &mut DenseMatrix<T>) {
        for &(at, c, s) in &self.rotations {
            let (r1, r2) = b.rows_mut_pair(at, at + 1);
            for (x, y) in r1.iter_mut().zip(r2.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = c * u + s * v;
                *y = -s * u + c * v;
            }
        }
    }
}
