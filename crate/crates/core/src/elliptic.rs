//! Complete elliptic integral of the first kind and Jacobi elliptic functions,
//! both through the arithmetic-geometric mean.

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const AGM_MAX_STEPS: usize = 40;

fn check_modulus<T: Real>(k: T) -> Result<()> {
    if !(k >= T::zero() && k < T::one()) {
        return Err(Error::ModulusOutOfRange(k.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// Complementary modulus `sqrt(1 - k^2)` without cancellation near `k = 1`.
pub fn complement<T: Real>(k: T) -> T {
    ((T::one() - k) * (T::one() + k)).sqrt()
}

/// `agm(a, b)`.
pub fn agm<T: Real>(mut a: T, mut b: T) -> T {
    for _ in 0..AGM_MAX_STEPS {
        if (a - b).abs() <= T::unit_roundoff() * a {
            break;
        }
        let an = (a + b) * T::half();
        b = (a * b).sqrt();
        a = an;
    }
    (a + b) * T::half()
}

/// `K(k) = int_0^{pi/2} (1 - k^2 sin^2 t)^{-1/2} dt` for `0 <= k < 1`.
pub fn complete_elliptic_k<T: Real>(k: T) -> Result<T> {
    check_modulus(k)?;
    Ok(complete_elliptic_k_from_complement(complement(k)))
}

/// `K` expressed through the complementary modulus `kc = sqrt(1 - k^2) > 0`.
///
/// Passing `kc` directly keeps full accuracy when `k` is within rounding of 1.
pub fn complete_elliptic_k_from_complement<T: Real>(kc: T) -> T {
    T::FRAC_PI_2() / agm(T::one(), kc)
}

/// Jacobi elliptic functions `(sn, cn, dn)(u | k)` for `0 <= k < 1`.
pub fn jacobi_sn_cn<T: Real>(u: T, k: T) -> Result<(T, T, T)> {
    check_modulus(k)?;
    if !u.is_finite() {
        return Err(Error::Domain("argument must be finite".into()));
    }
    Ok(sn_cn_dn(u, k, complement(k)))
}

/// Descending Landen (AGM) scheme with modulus `k` and complement `kc`
/// supplied independently.
pub(crate) fn sn_cn_dn<T: Real>(u: T, k: T, kc: T) -> (T, T, T) {
    let mut a = vec![T::one()];
    let mut c = vec![k];
    let mut b = kc;
    while c.len() <= AGM_MAX_STEPS {
        let (an, cn) = (*a.last().unwrap(), *c.last().unwrap());
        if cn.abs() <= T::unit_roundoff() * an {
            break;
        }
        a.push((an + b) * T::half());
        c.push((an - b) * T::half());
        b = (an * b).sqrt();
    }
    let levels = a.len() - 1;
    let mut phi = T::two().powi(levels as i32) * a[levels] * u;
    let mut phi_prev = phi;
    for m in (1..=levels).rev() {
        phi_prev = phi;
        phi = (phi + (c[m] / a[m] * phi.sin()).asin()) * T::half();
    }
    let (sn, cn) = phi.sin_cos();
    // the ratio form loses digits near the zeros of cn
    let dn = if levels > 0 && cn.abs() >= T::half() {
        cn / (phi_prev - phi).cos()
    } else {
        (kc * kc + k * k * cn * cn).sqrt()
    };
    (sn, cn, dn)
}

/// Nome `q(k) = exp(-pi K(k') / K(k))` given `k` and its complement.
pub(crate) fn nome_log_inverse<T: Real>(k: T, kc: T) -> T {
    // ln(1/q)
    T::PI() * complete_elliptic_k_from_complement(k) / complete_elliptic_k_from_complement(kc)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Gauss-Legendre quadrature (5 nodes per panel) of the
    /// defining integral, as an independent oracle for `K`.
    fn k_by_quadrature(k: f64) -> f64 {
        let nodes = [
            (0.0, 0.5688888888888889),
            (-0.5384693101056831, 0.4786286704993665),
            (0.5384693101056831, 0.4786286704993665),
            (-0.906179845938664, 0.2369268850561891),
            (0.906179845938664, 0.2369268850561891),
        ];
        let panels = 400;
        let h = std::f64::consts::FRAC_PI_2 / panels as f64;
        let mut s = 0.0;
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for &(x, w) in &nodes {
                let t: f64 = mid + 0.5 * h * x;
                s += 0.5 * h * w / (1.0 - k * k * t.sin().powi(2)).sqrt();
            }
        }
        s
    }

    /// Inverts `u = F(phi | k)` by quadrature plus bisection: returns
    /// `sin(phi)`, i.e. `sn(u)`.
    fn sn_by_quadrature(u: f64, k: f64) -> f64 {
        let f = |phi: f64| {
            let panels = 200;
            let h = phi / panels as f64;
            let mut s = 0.0;
            for p in 0..=panels {
                let t = p as f64 * h;
                let w = if p == 0 || p == panels { 1.0 } else if p % 2 == 1 { 4.0 } else { 2.0 };
                s += w / (1.0 - k * k * t.sin().powi(2)).sqrt();
            }
            s * h / 3.0
        };
        let (mut lo, mut hi) = (0.0, std::f64::consts::PI);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (0.5 * (lo + hi)).sin()
    }

    #[test]
    fn k_at_zero_is_half_pi() {
        assert_eq!(complete_elliptic_k(0.0f64).unwrap(), std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn k_matches_quadrature() {
        let k = std::f64::consts::FRAC_1_SQRT_2;
        let exact = 1.854_074_677_301_371_9;
        let v = complete_elliptic_k(k).unwrap();
        assert!((v - exact).abs() <= 10.0 * f64::unit_roundoff() * exact);
        let oracle = k_by_quadrature(k);
        assert!((v - oracle).abs() < 1e-13);
        for &k in &[0.1f64, 0.5, 0.9, 0.99] {
            let o = k_by_quadrature(k);
            assert!((complete_elliptic_k(k).unwrap() - o).abs() < 1e-12 * o, "k={k}");
        }
    }

    #[test]
    fn k_near_one_is_finite_and_logarithmic() {
        let k = 1.0f64 - 1e-12;
        let v = complete_elliptic_k(k).unwrap();
        assert!(v.is_finite() && v > 14.0);
        let kc = complement(k);
        assert!((v - (4.0 / kc).ln()).abs() < 1e-10);
    }

    #[test]
    fn modulus_out_of_range() {
        assert!(matches!(complete_elliptic_k(1.0f64), Err(Error::ModulusOutOfRange(_))));
        assert!(matches!(jacobi_sn_cn(0.3, -0.1f64), Err(Error::ModulusOutOfRange(_))));
    }

    #[test]
    fn trivial_values() {
        assert_eq!(jacobi_sn_cn(0.0f64, 0.7).unwrap(), (0.0, 1.0, 1.0));
        let (s, c, d) = jacobi_sn_cn(0.9f64, 0.0).unwrap();
        assert!((s - 0.9f64.sin()).abs() < 1e-16 && (c - 0.9f64.cos()).abs() < 1e-16 && d == 1.0);
    }

    #[test]
    fn quarter_period() {
        for &k in &[0.2f64, 0.6, 0.95] {
            let kk = complete_elliptic_k(k).unwrap();
            let (s, c, _) = jacobi_sn_cn(kk, k).unwrap();
            assert!((s - 1.0).abs() < 1e-14 && c.abs() < 1e-14, "k={k}");
            let oracle = sn_by_quadrature(kk, k);
            assert!((oracle - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn dn_near_zero_of_cn() {
        let k = 0.149_043_768_045_905_27f64;
        let (s, c, d) = jacobi_sn_cn(-4.731_151_291_624_760_4, k).unwrap();
        assert!(c.abs() < 1e-2);
        assert!((d * d + k * k * s * s - 1.0).abs() <= 4.0 * f64::unit_roundoff());
    }

    #[test]
    fn sn_matches_quadrature_inversion() {
        for &(u, k) in &[(0.3f64, 0.5f64), (1.1, 0.8), (0.7, 0.99)] {
            let (s, _, _) = jacobi_sn_cn(u, k).unwrap();
            assert!((s - sn_by_quadrature(u, k)).abs() < 1e-9, "u={u} k={k}");
        }
    }
}
