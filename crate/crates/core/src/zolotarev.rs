//! Scaled Zolotarev rational approximants to `sign(x)` on `[-1, -ell] U [ell, 1]`.

use crate::elliptic::{complement, complete_elliptic_k_from_complement, nome_log_inverse, sn_cn_dn};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MAX_RANK: usize = 8;
/// Smallest admissible lower spectral bound.
pub const MIN_ELL: f64 = 1e-16;
/// Two composed steps must push `[ell, 1]` into `[1 - TWO_STEP_TOL, 1]`.
pub const TWO_STEP_TOL: f64 = 1e-15;

/// Below this bound the coefficients come from theta series in the nome of
/// `ell`; above it from the AGM elliptic functions of modulus `ell'`.
const SERIES_SWITCH: f64 = 0.5;

/// `Zhat(x) = chat * x * prod_j (x^2 + c[2j+1]) / (x^2 + c[2j])` (zero-based),
/// the type `(2r+1, 2r)` approximant normalized so that `Zhat(1) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZolotarevParams<T> {
    pub r: usize,
    pub ell: T,
    /// `c_1 .. c_{2r}`, increasing.
    pub c: Vec<T>,
    /// Partial-fraction weights `a_1 .. a_r`.
    pub a: Vec<T>,
    pub chat: T,
}

/// Coefficients for `1 <= r <= 8` and `1e-16 <= ell <= 1`.
pub fn zolotarev_coeffs<T: Real>(ell: T, r: usize) -> Result<ZolotarevParams<T>> {
    if !(1..=MAX_RANK).contains(&r) {
        return Err(Error::Domain(format!("rank {r} outside 1..={MAX_RANK}")));
    }
    ZolotarevParams::with_rank(ell, r)
}

/// `Zhat(x)` in product form.
pub fn eval_zhat<T: Real>(x: T, params: &ZolotarevParams<T>) -> T {
    params.eval(x)
}

/// `ell_1 = Zhat(ell; ell)`, the lower bound after one step.
pub fn ell_update<T: Real>(params: &ZolotarevParams<T>) -> T {
    (T::one() - params.defect(params.ell)).min(T::one())
}

/// Smallest rank whose two-step composition maps `[ell, 1]` into
/// `[1 - 1e-15, 1]`; saturates at [`MAX_RANK`].
pub fn choose_rank<T: Real>(ell: T) -> Result<usize> {
    for r in 1..=MAX_RANK {
        if two_step_defect(ell, r)? <= T::lit(TWO_STEP_TOL) {
            return Ok(r);
        }
    }
    Ok(MAX_RANK)
}

/// `1 - Zhat(Zhat(ell; ell); ell_1)`, the worst defect over `[ell, 1]` after
/// two steps of rank `r`.
pub fn two_step_defect<T: Real>(ell: T, r: usize) -> Result<T> {
    let p = ZolotarevParams::with_rank(ell, r)?;
    let ell1 = ell_update(&p);
    let p1 = ZolotarevParams::with_rank(ell1, r)?;
    Ok(p1.defect(ell1))
}

impl<T: Real> ZolotarevParams<T> {
    /// Like [`zolotarev_coeffs`] without the upper limit on `r` (used for
    /// composite degrees).
    pub fn with_rank(ell: T, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::Domain("rank must be positive".into()));
        }
        if !(ell >= T::lit(MIN_ELL) && ell <= T::one()) {
            return Err(Error::Domain(format!(
                "lower bound {} outside [{MIN_ELL}, 1]",
                ell.to_f64().unwrap_or(f64::NAN)
            )));
        }
        let c = if ell < T::lit(SERIES_SWITCH) {
            coeffs_theta(ell, r)
        } else {
            coeffs_agm(ell, r)
        };
        let mut chat = T::one();
        for j in 0..r {
            chat *= (T::one() + c[2 * j]) / (T::one() + c[2 * j + 1]);
        }
        let a = (0..r)
            .map(|j| {
                let pole = c[2 * j];
                let mut num = T::one();
                let mut den = T::one();
                for k in 0..r {
                    num *= c[2 * k + 1] - pole;
                    if k != j {
                        den *= c[2 * k] - pole;
                    }
                }
                num / den
            })
            .collect();
        Ok(Self { r, ell, c, a, chat })
    }

    /// Product form.
    pub fn eval(&self, x: T) -> T {
        let x2 = x * x;
        let mut v = self.chat * x;
        for j in 0..self.r {
            v *= (x2 + self.c[2 * j + 1]) / (x2 + self.c[2 * j]);
        }
        v
    }

    /// Partial-fraction form `chat * x * (1 + sum_j a_j / (x^2 + c_{2j-1}))`.
    pub fn eval_partial_fractions(&self, x: T) -> T {
        let x2 = x * x;
        let s: T = (0..self.r).map(|j| self.a[j] / (x2 + self.c[2 * j])).sum();
        self.chat * x * (T::one() + s)
    }

    /// `1 - Zhat(x)` for `x > 0`, free of the cancellation of the product form
    /// near `x = 1`.
    pub fn defect(&self, x: T) -> T {
        let x2 = x * x;
        let one_minus_x2 = (T::one() - x) * (T::one() + x);
        // x - 1 is exact only for x >= 1/2
        let mut log_z = if x >= T::half() { (x - T::one()).ln_1p() } else { x.ln() };
        for j in 0..self.r {
            let (lo, hi) = (self.c[2 * j], self.c[2 * j + 1]);
            log_z += ((hi - lo) * one_minus_x2 / ((x2 + lo) * (T::one() + hi))).ln_1p();
        }
        -log_z.exp_m1()
    }
}

/// `c_i = ell^2 sc^2(i K' / (2r+1) | ell')` through the AGM scheme.
fn coeffs_agm<T: Real>(ell: T, r: usize) -> Vec<T> {
    let ellc = complement(ell);
    let kp = complete_elliptic_k_from_complement(ell);
    let m = T::from_usize_lossy(2 * r + 1);
    (1..=2 * r)
        .map(|i| {
            let u = T::from_usize_lossy(i) * kp / m;
            let (sn, cn, _) = sn_cn_dn(u, ellc, ell);
            let sc = sn / cn;
            ell * ell * sc * sc
        })
        .collect()
}

/// Same coefficients via Jacobi's imaginary transformation: with `q` the nome
/// of `ell`, `ell * sc^2(. | ell') = (theta_1 / theta_4)^2` at an imaginary
/// argument, summed as rapidly converging hyperbolic series.
fn coeffs_theta<T: Real>(ell: T, r: usize) -> Vec<T> {
    let ellc = complement(ell);
    let log_inv_q = nome_log_inverse(ell, ellc);
    let ln_q = -log_inv_q;
    let m = T::from_usize_lossy(2 * r + 1);
    (1..=2 * r)
        .map(|i| {
            let w = T::from_usize_lossy(i) / m * log_inv_q * T::half();
            let (s1, s4) = theta_pair(w, ln_q);
            let ratio = s1 / s4;
            ell * ratio * ratio
        })
        .collect()
}

/// `(-i theta_1(i w), theta_4(i w))` for nome `exp(ln_q)`.
fn theta_pair<T: Real>(w: T, ln_q: T) -> (T, T) {
    let u = T::unit_roundoff();
    let mut s1 = T::zero();
    for n in 0..64 {
        let nh = T::from_usize_lossy(n) + T::half();
        let odd = T::from_usize_lossy(2 * n + 1);
        let base = nh * nh * ln_q;
        let term = ((base + odd * w).exp() - (base - odd * w).exp()) * T::half();
        s1 += if n % 2 == 0 { term } else { -term };
        if term.abs() <= u * s1.abs() {
            break;
        }
    }
    let mut s4 = T::zero();
    for n in 1..64 {
        let nf = T::from_usize_lossy(n);
        let base = nf * nf * ln_q;
        let two_n = T::two() * nf;
        let term = ((base + two_n * w).exp() + (base - two_n * w).exp()) * T::half();
        s4 += if n % 2 == 0 { term } else { -term };
        if term.abs() <= u * (T::one() + T::two() * s4).abs() {
            break;
        }
    }
    (T::two() * s1, T::one() + T::two() * s4)
}
