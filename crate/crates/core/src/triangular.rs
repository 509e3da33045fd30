//! Lower-triangular solves with many right-hand sides.
//!
//! Recursive halving turns the off-diagonal work into matrix products; the
//! leaves use plain row operations.

use crate::matrix::DenseMatrix;
use crate::scalar::Real;

const LEAF: usize = 48;

/// Solves `L X = B` in place. With `unit`, the diagonal of `L` is taken as one.
pub fn solve_lower<T: Real>(l: &DenseMatrix<T>, b: &mut DenseMatrix<T>, unit: bool) {
    check(l, b);
    forward(l, b, 0, l.rows(), unit);
}

/// Solves `L^T X = B` in place.
pub fn solve_lower_transposed<T: Real>(l: &DenseMatrix<T>, b: &mut DenseMatrix<T>, unit: bool) {
    check(l, b);
    backward_t(l, b, 0, l.rows(), unit);
}

fn check<T: Real>(l: &DenseMatrix<T>, b: &DenseMatrix<T>) {
    assert!(l.is_square(), "triangular factor must be square");
    assert_eq!(l.rows(), b.rows(), "right-hand side has wrong row count");
}

fn forward<T: Real>(l: &DenseMatrix<T>, b: &mut DenseMatrix<T>, lo: usize, hi: usize, unit: bool) {
    if hi - lo <= LEAF {
        for i in lo..hi {
            for k in lo..i {
                let lik = l[(i, k)];
                if lik != T::zero() {
                    let (bi, bk) = b.rows_mut_pair(i, k);
                    for (x, &y) in bi.iter_mut().zip(bk.iter()) {
                        *x -= lik * y;
                    }
                }
            }
            if !unit {
                let d = l[(i, i)];
                b.row_mut(i).iter_mut().for_each(|x| *x /= d);
            }
        }
        return;
    }
    let mid = lo + (hi - lo) / 2;
    forward(l, b, lo, mid, unit);
    // B[mid..hi] -= L[mid..hi, lo..mid] * B[lo..mid]
    update(l, b, lo, mid, hi, false);
    forward(l, b, mid, hi, unit);
}

fn backward_t<T: Real>(l: &DenseMatrix<T>, b: &mut DenseMatrix<T>, lo: usize, hi: usize, unit: bool) {
    if hi - lo <= LEAF {
        for i in (lo..hi).rev() {
            if !unit {
                let d = l[(i, i)];
                b.row_mut(i).iter_mut().for_each(|x| *x /= d);
            }
            for k in lo..i {
                let lik = l[(i, k)];
                if lik != T::zero() {
                    let (bk, bi) = b.rows_mut_pair(k, i);
                    for (x, &y) in bk.iter_mut().zip(bi.iter()) {
                        *x -= lik * y;
                    }
                }
            }
        }
        return;
    }
    let mid = lo + (hi - lo) / 2;
    backward_t(l, b, mid, hi, unit);
    // B[lo..mid] -= L[mid..hi, lo..mid]^T * B[mid..hi]
    update(l, b, lo, mid, hi, true);
    backward_t(l, b, lo, mid, unit);
}

fn update<T: Real>(l: &DenseMatrix<T>, b: &mut DenseMatrix<T>, lo: usize, mid: usize, hi: usize, transposed: bool) {
    let n = l.cols();
    let m = b.cols();
    if m == 0 {
        return;
    }
    let (top, bottom) = b.as_mut_slice().split_at_mut(mid * m);
    let top = &mut top[lo * m..];
    let bottom = &mut bottom[..(hi - mid) * m];
    let lp = l.as_slice()[mid * n + lo..].as_ptr();
    // SAFETY: `top` and `bottom` are disjoint row ranges of B; the L block
    // `[mid, hi) x [lo, mid)` lies inside `l`, which is not mutated.
    unsafe {
        if transposed {
            T::gemm(
                mid - lo,
                hi - mid,
                m,
                -T::one(),
                lp,
                1,
                n as isize,
                bottom.as_ptr(),
                m as isize,
                1,
                T::one(),
                top.as_mut_ptr(),
                m as isize,
                1,
            );
        } else {
            T::gemm(
                hi - mid,
                mid - lo,
                m,
                -T::one(),
                lp,
                n as isize,
                1,
                top.as_ptr(),
                m as isize,
                1,
                T::one(),
                bottom.as_mut_ptr(),
                m as isize,
                1,
            );
        }
    }
}
