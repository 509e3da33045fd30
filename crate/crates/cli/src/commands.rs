use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use psdc_core::dnc::{solve_definite_with, solve_recursive, spectral_divide, RecursiveConfig};
use psdc_core::gen::{GeneratorKind, GeneratorSpec};
use psdc_core::{BasisMethod, EigenDecomposition, SignMethod};
use rayon::prelude::*;

use crate::args::{BenchArgs, DefiniteBasis, GenArgs, SolveArgs};
use crate::error::{CliError, Result};
use crate::mm::{read_matrix, read_signature, sig_path_for, write_matrix, write_signature};
use crate::report::{aggregate, to_csv, write_aggregate, write_csv, RunRecord};

impl From<DefiniteBasis> for BasisMethod {
    fn from(b: DefiniteBasis) -> Self {
        match b {
            DefiniteBasis::Chol => BasisMethod::DefChol,
            DefiniteBasis::Ldl => BasisMethod::DefLdl,
        }
    }
}

fn usage(e: psdc_core::Error) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn gen(args: &GenArgs) -> Result<()> {
    let spec = GeneratorSpec::new(args.n, args.kappa, args.seed, args.kind).map_err(usage)?;
    let (a, sigma) = spec.generate::<f64>()?;
    write_matrix(&args.out, &a, args.format)?;
    write_signature(&sig_path_for(&args.out), &sigma)
}

/// Eigenvalues with 17 significant digits, one per line.
pub fn format_eigenvalues(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.16e}\n")).collect()
}

pub fn solve(args: &SolveArgs) -> Result<RunRecord> {
    let a = read_matrix(&args.matrix)?;
    let sig_path = args.sig.clone().unwrap_or_else(|| sig_path_for(&args.matrix));
    let sigma = read_signature(&sig_path)?;
    if !a.is_square() || a.rows() != sigma.len() {
        return Err(CliError::Parse {
            path: sig_path,
            line: 1,
            msg: format!("signature of length {} for a {}x{} matrix", sigma.len(), a.rows(), a.cols()),
        });
    }

    let basis = if args.recursive { BasisMethod::HypLdl } else { args.basis.into() };
    let mut record = RunRecord::new(args.method.cli_name(), basis.name(), a.rows(), f64::NAN, 0);
    let start = Instant::now();
    let result = if args.recursive {
        solve_recursive(&a, &sigma, RecursiveConfig { method: args.method, basis })
    } else {
        solve_definite_with(&a, &sigma, args.method, basis)
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;

    match result {
        Ok(eig) => {
            fill_solve(&mut record, &eig, elapsed);
            let text = format_eigenvalues(&eig.eigenvalues);
            match &args.eigenvalues {
                Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e))?,
                None => std::io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::io("<stdout>", e))?,
            }
            if let Some(out) = &args.out {
                write_csv(out, std::slice::from_ref(&record))?;
            }
            Ok(record)
        }
        Err(e) => {
            if let Some(out) = &args.out {
                write_csv(out, &[record.failed(&e)])?;
            }
            Err(e.into())
        }
    }
}

/// `kappa` is the spread `max|lambda| / min|lambda|` of the computed spectrum.
fn fill_solve(record: &mut RunRecord, eig: &EigenDecomposition<f64>, elapsed_ms: f64) {
    let mags = eig.eigenvalues.iter().map(|l| l.abs());
    let hi = mags.clone().fold(0.0, f64::max);
    let lo = mags.fold(f64::INFINITY, f64::min);
    record.kappa = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    record.iterations = Some(eig.iterations);
    record.backward_error = Some(eig.backward_error);
    record.residual = Some(eig.residual);
    record.orthogonality_defect = Some(eig.orthogonality_defect);
    record.wall_time_ms = Some(elapsed_ms);
}

/// `a,b,c` or a decade range `lo..hi` (both powers of ten apart).
pub fn parse_sweep(s: &str) -> Result<Vec<f64>> {
    let bad = |msg: String| CliError::Usage(format!("--sweep '{s}': {msg}"));
    let num = |t: &str| -> Result<f64> {
        let v: f64 = t.trim().parse().map_err(|_| bad(format!("'{t}' is not a number")))?;
        if v.is_finite() && v >= 1.0 {
            Ok(v)
        } else {
            Err(bad(format!("{t} is not a condition number >= 1")))
        }
    };
    let values = if let Some((lo, hi)) = s.split_once("..") {
        let (lo, hi) = (num(lo)?, num(hi)?);
        let (e0, e1) = (lo.log10(), hi.log10());
        if e0.fract() != 0.0 || e1.fract() != 0.0 || e1 < e0 {
            return Err(bad("a range needs increasing powers of ten".into()));
        }
        (e0 as i32..=e1 as i32).map(|e| format!("1e{e}").parse().unwrap()).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<f64>>>()?
    };
    if values.is_empty() {
        return Err(bad("empty".into()));
    }
    Ok(values)
}

pub fn parse_methods(s: &str) -> Result<Vec<SignMethod>> {
    let methods = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<SignMethod>().map_err(usage))
        .collect::<Result<Vec<_>>>()?;
    if methods.is_empty() {
        return Err(CliError::Usage("--methods: empty list".into()));
    }
    Ok(methods)
}

/// One generated matrix, one division at zero.
fn bench_cell(spec: GeneratorSpec, method: SignMethod, basis: BasisMethod) -> RunRecord {
    let mut record = RunRecord::new(method.cli_name(), basis.name(), spec.n, spec.kappa, spec.seed);
    let (a, sigma) = match spec.generate::<f64>() {
        Ok(x) => x,
        Err(e) => return record.failed(&e),
    };
    let start = Instant::now();
    let div = spectral_divide(&a, &sigma, method, basis, 0.0);
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    match div {
        Ok(d) => {
            let n = a.rows() as f64;
            record.iterations = Some(d.sign_result.iterations);
            record.backward_error = Some(d.backward_error);
            record.residual = Some(d.sign_result.involution_defect() / n.sqrt());
            record.orthogonality_defect = Some(d.basis.orthogonality_defect(&sigma));
            record.wall_time_ms = Some(elapsed);
            record
        }
        Err(e) => record.failed(&e),
    }
}

pub fn bench(args: &BenchArgs) -> Result<Vec<RunRecord>> {
    let kappas = parse_sweep(&args.sweep)?;
    let methods = parse_methods(&args.methods)?;
    if args.seeds == 0 {
        return Err(CliError::Usage("--seeds must be positive".into()));
    }
    if args.kind == GeneratorKind::RandomSignature {
        return Err(CliError::Usage("bench needs a definite generator kind".into()));
    }
    let basis: BasisMethod = args.basis.into();
    let mut cells = Vec::new();
    for &kappa in &kappas {
        for seed in 0..args.seeds {
            let spec = GeneratorSpec::new(args.n, kappa, seed, args.kind).map_err(usage)?;
            cells.extend(methods.iter().map(|&m| (spec, m)));
        }
    }
    // collect keeps (kappa, seed, method) order
    let records: Vec<RunRecord> = cells.par_iter().map(|&(spec, m)| bench_cell(spec, m, basis)).collect();

    match &args.out {
        Some(out) => {
            write_csv(out, &records)?;
            let agg = args.aggregate.clone().unwrap_or_else(|| aggregate_path(out));
            write_aggregate(&agg, &aggregate(&records))?;
        }
        None => {
            to_csv(std::io::stdout().lock(), &records)?;
            if let Some(agg) = &args.aggregate {
                write_aggregate(agg, &aggregate(&records))?;
            }
        }
    }
    Ok(records)
}

/// `runs.csv` -> `runs_aggregate.csv`.
pub fn aggregate_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}_aggregate.csv"))
}

/// Runs `f` on a pool with `threads` workers, or on the global pool.
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}
