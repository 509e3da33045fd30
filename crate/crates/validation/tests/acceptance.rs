//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use psdc_core::cholesky::cholesky;
use psdc_core::dnc::{solve_definite, spectral_divide};
use psdc_core::gen::{casida_like, pencil_oracle, random_definite_pseudosym};
use psdc_core::subspace::{def_basis_chol, def_basis_ldl, BasisMethod, SubspaceBasis};
use psdc_core::zolotarev::{ell_update, zolotarev_coeffs, ZolotarevParams};
use psdc_core::{matrix_sign, Matrix, SignMethod, Signature};

/// Methods with stable factorization paths. The LDL-only DWH variant loses
/// accuracy roughly in proportion to the condition number and is reported
/// separately.
const STABLE: [SignMethod; 3] = [SignMethod::ZoloPd, SignMethod::SigmaDwhLdliqr2, SignMethod::Newton];

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn() -> Outcome;

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn median(mut v: Vec<usize>) -> usize {
    v.sort_unstable();
    v[v.len() / 2]
}

// 1. Iteration counts at n = 500, median over 5 seeds.
const C1_N: usize = 500;
const C1_SEEDS: u64 = 5;
const C1_BUDGET: Duration = Duration::from_secs(60);

fn iteration_counts() -> Outcome {
    // (method, kappa, expected, tolerance)
    let table = [
        (SignMethod::ZoloPd, 1e2, 2, 0),
        (SignMethod::ZoloPd, 1e8, 2, 0),
        (SignMethod::ZoloPd, 1e12, 2, 0),
        (SignMethod::SigmaDwhLdliqr2, 1e2, 5, 1),
        (SignMethod::SigmaDwhLdliqr2, 1e8, 6, 1),
        (SignMethod::SigmaDwhLdliqr2, 1e12, 6, 1),
        (SignMethod::Newton, 1e2, 7, 1),
        (SignMethod::Newton, 1e8, 9, 1),
        (SignMethod::Newton, 1e12, 9, 1),
    ];
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for (method, kappa, want, tol) in table {
        let mut its = Vec::new();
        for seed in 0..C1_SEEDS {
            let (a, sigma) = random_definite_pseudosym::<f64>(C1_N, kappa, seed);
            match matrix_sign(&a, &sigma, method) {
                Ok(r) => its.push(r.iterations),
                Err(e) => return outcome(false, format!("{method} kappa={kappa:e} seed={seed}: {e}")),
            }
        }
        let m = median(its);
        let ok = m.abs_diff(want) <= tol;
        pass &= ok;
        parts.push(format!("{method}@{kappa:e}={m}{}", if ok { "" } else { "!" }));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < C1_BUDGET;
    outcome(pass, format!("{} in {:.1}s", parts.join(" "), elapsed.as_secs_f64()))
}

// 2. Mean backward error of one division, n = 250, 10 seeds.
const C2_N: usize = 250;
const C2_SEEDS: u64 = 10;
const C2_BUDGET: Duration = Duration::from_secs(300);

fn backward_error_sweep() -> Outcome {
    let mean_error = |method: SignMethod, kappa: f64| -> Result<f64, String> {
        let mut sum = 0.0;
        for seed in 0..C2_SEEDS {
            let (a, sigma) = random_definite_pseudosym::<f64>(C2_N, kappa, seed);
            let d = spectral_divide(&a, &sigma, method, BasisMethod::DefLdl, 0.0)
                .map_err(|e| format!("{method} kappa={kappa:e} seed={seed}: {e}"))?;
            sum += d.backward_error;
        }
        Ok(sum / C2_SEEDS as f64)
    };
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for kappa in [1e1, 1e2, 1e4, 1e6, 1e8] {
        let limit = if kappa <= 1e6 { 1e-11 } else { 1e-10 };
        let mut worst = 0.0f64;
        for method in STABLE {
            match mean_error(method, kappa) {
                Ok(mean) => {
                    pass &= mean <= limit;
                    worst = worst.max(mean);
                }
                Err(e) => return outcome(false, e),
            }
        }
        let ldl = mean_error(SignMethod::SigmaDwhLdl, kappa).map_or(f64::NAN, |m| m);
        parts.push(format!("kappa={kappa:e} max-mean={worst:.1e} (dwh-ldl {ldl:.1e})"));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < C2_BUDGET;
    outcome(pass, format!("{} in {:.1}s", parts.join(", "), elapsed.as_secs_f64()))
}

// 3. Diagonal blocks of a definite division are definite.
fn decoupling() -> Outcome {
    let (n, kappa, count) = (100, 1e4, 50u64);
    let mut good = 0;
    for seed in 0..count {
        let (a, sigma) = random_definite_pseudosym::<f64>(n, kappa, 1000 + seed);
        let Ok(d) = spectral_divide(&a, &sigma, SignMethod::ZoloPd, BasisMethod::DefLdl, 0.0) else {
            continue;
        };
        let split = Signature::split(sigma.p(), sigma.q());
        let hat = d.sigma_plus.concat(&d.sigma_minus);
        if cholesky(&d.a11).is_ok() && cholesky(&d.a22.scale(-1.0)).is_ok() && hat == split {
            good += 1;
        }
    }
    outcome(good == count, format!("{good}/{count} definite splits"))
}

// 4. solve_definite against the pencil oracle.
fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let mut pass = true;
    for n in [8usize, 16, 32, 64] {
        for seed in 0..20u64 {
            let (a, sigma) = random_definite_pseudosym::<f64>(n, 1e4, 7 * seed + n as u64);
            let oracle = pencil_oracle(&a, &sigma).expect("oracle");
            let e = match solve_definite(&a, &sigma, SignMethod::ZoloPd) {
                Ok(e) => e,
                Err(err) => return outcome(false, format!("n={n} seed={seed}: {err}")),
            };
            let rel = e
                .eigenvalues
                .iter()
                .zip(&oracle)
                .map(|(l, o)| (l - o).abs() / o.abs())
                .fold(0.0, f64::max);
            let orth = e.orthogonality_defect / n as f64;
            pass &= rel <= 1e-9 && e.residual <= 1e-8 && orth <= 1e-8;
            pass &= e.sigma_hat == Signature::split(sigma.p(), sigma.q());
            worst = (worst.0.max(rel), worst.1.max(e.residual), worst.2.max(orth));
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    outcome(
        pass,
        format!(
            "max rel eig err {:.1e}, residual {:.1e}, orth/n {:.1e} in {:.1}s",
            worst.0,
            worst.1,
            worst.2,
            elapsed.as_secs_f64()
        ),
    )
}

/// Largest spread of the local maxima of `1 - Zhat` on `[ell, 1]`, with each
/// grid maximum refined by golden-section search.
fn equioscillation_spread(p: &ZolotarevParams<f64>) -> f64 {
    let grid = 100_000;
    let ell = p.ell;
    let xs: Vec<f64> = (0..grid).map(|i| ell + (1.0 - ell) * i as f64 / (grid - 1) as f64).collect();
    let e: Vec<f64> = xs.iter().map(|&x| p.defect(x)).collect();
    let mut peaks = vec![e[0]];
    for i in 1..grid - 1 {
        if e[i] >= e[i - 1] && e[i] > e[i + 1] {
            let (mut lo, mut hi) = (xs[i - 1], xs[i + 1]);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..100 {
                let m1 = hi - g * (hi - lo);
                let m2 = lo + g * (hi - lo);
                if p.defect(m1) < p.defect(m2) {
                    lo = m1;
                } else {
                    hi = m2;
                }
            }
            peaks.push(p.defect(0.5 * (lo + hi)));
        }
    }
    let hi = peaks.iter().cloned().fold(f64::MIN, f64::max);
    let lo = peaks.iter().cloned().fold(f64::MAX, f64::min);
    (hi - lo) / hi
}

// 5. Scalar Zolotarev checks.
fn zolotarev_scalar() -> Outcome {
    let start = Instant::now();
    let mut norm_err = 0.0f64;
    for ell in [1e-1, 1e-4, 1e-8, 1e-16] {
        for r in 1..=8 {
            let p: ZolotarevParams<f64> = zolotarev_coeffs(ell, r).expect("coefficients");
            norm_err = norm_err.max((p.eval(1.0) - 1.0).abs());
        }
    }

    let ell = 1e-16;
    let p0 = zolotarev_coeffs(ell, 8).expect("coefficients");
    let p1 = zolotarev_coeffs(ell_update(&p0), 8).expect("coefficients");
    // log-spaced through [ell, 1/2], then linear up to 1
    let mut xs: Vec<f64> = (0..=16_000).map(|i| 10f64.powf(-16.0 + i as f64 * 15.7 / 16_000.0)).collect();
    xs.extend((0..=10_000).map(|i| 0.5 + 0.5 * i as f64 / 10_000.0));
    let two_step = xs.iter().map(|&x| p1.defect(p0.eval(x))).fold(0.0, f64::max);

    let mut spread = 0.0f64;
    for ell in [0.5, 0.1, 0.01] {
        for r in 1..=3 {
            spread = spread.max(equioscillation_spread(&zolotarev_coeffs(ell, r).expect("coefficients")));
        }
    }
    let elapsed = start.elapsed();
    let pass = norm_err <= 1e-13 && two_step <= 1e-15 && spread <= 1e-8 && elapsed < Duration::from_secs(10);
    outcome(
        pass,
        format!(
            "|Z(1)-1| {norm_err:.1e}, two-step defect {two_step:.1e}, spread {spread:.1e} in {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

// 6. Sign function properties and agreement across methods.
fn sign_properties() -> Outcome {
    let n = 100;
    let mut pass = true;
    let (mut inv, mut agree, mut ldl_agree) = (0.0f64, 0.0f64, 0.0f64);
    for kappa in [1e2, 1e4, 1e8] {
        for seed in 0..3u64 {
            let (a, sigma) = random_definite_pseudosym::<f64>(n, kappa, 50 + seed);
            let mut signs: Vec<(SignMethod, Matrix)> = Vec::new();
            for method in SignMethod::ALL {
                let r = match matrix_sign(&a, &sigma, method) {
                    Ok(r) => r,
                    Err(e) => return outcome(false, format!("{method} kappa={kappa:e}: {e}")),
                };
                let d = r.involution_defect() / (n as f64).sqrt();
                inv = inv.max(d);
                pass &= d <= 1e-8;
                pass &= r.s.trace().round() as i64 == sigma.p() as i64 - sigma.q() as i64;
                signs.push((method, r.s));
            }
            for i in 0..signs.len() {
                for j in i + 1..signs.len() {
                    let ((mi, si), (mj, sj)) = (&signs[i], &signs[j]);
                    let d = (si - sj).frobenius_norm() / si.frobenius_norm();
                    if STABLE.contains(mi) && STABLE.contains(mj) {
                        agree = agree.max(d);
                        pass &= d <= 1e-8;
                    } else {
                        ldl_agree = ldl_agree.max(d);
                    }
                }
            }
        }
    }
    outcome(
        pass,
        format!("max involution defect {inv:.1e}, max pairwise difference {agree:.1e} (dwh-ldl {ldl_agree:.1e})"),
    )
}

fn basis_invariant(b: &SubspaceBasis<f64>, a: &Matrix, sigma: &Signature) -> f64 {
    b.orthogonality_defect(sigma).max(b.backward_error(a, sigma))
}

// 7. Cholesky-based basis breaks down on a shrinking gap, LDL does not.
fn robustness_contrast() -> Outcome {
    let (n_half, count) = (20, 20u64);
    let mut log = Vec::new();
    for e in 1..=14 {
        let gap = 10f64.powi(-e);
        let (mut chol_fail, mut ldl_ok) = (0, 0);
        for seed in 0..count {
            let (a, sigma) = casida_like::<f64>(n_half, seed, gap);
            let Ok(s) = matrix_sign(&a, &sigma, SignMethod::ZoloPd) else {
                continue;
            };
            match def_basis_chol(&s.s, &sigma) {
                Ok(b) if basis_invariant(&b, &a, &sigma) <= 1e-8 => {}
                _ => chol_fail += 1,
            }
            if let Ok(b) = def_basis_ldl(&s.s, &sigma) {
                if basis_invariant(&b, &a, &sigma) <= 1e-8 {
                    ldl_ok += 1;
                }
            }
        }
        log.push(format!("{gap:.0e}:{chol_fail}/{ldl_ok}"));
        if chol_fail >= 1 && ldl_ok == count {
            return outcome(true, format!("chol fails at gap {gap:e} ({chol_fail}/{count}), ldl ok on all"));
        }
        if ldl_ok < count {
            break;
        }
    }
    outcome(false, format!("no gap separates the bases (gap:chol-failures/ldl-ok) {}", log.join(" ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 7] = [
        ("iteration counts", iteration_counts),
        ("backward error sweep", backward_error_sweep),
        ("definite blocks after division", decoupling),
        ("oracle equivalence", oracle_equivalence),
        ("zolotarev scalar suite", zolotarev_scalar),
        ("sign function properties", sign_properties),
        ("cholesky vs ldl robustness", robustness_contrast),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!("{} [{}] {}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, name, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("SKIP [8] wall-clock tables and external application data are not reproduced");
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
