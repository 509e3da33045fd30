use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use psdc_cli::mm::{read_matrix, read_signature};
use psdc_cli::report::HEADER;
use psdc_core::cholesky::cholesky;
use psdc_core::{Matrix, Signature};

fn psdc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psdc"))
        .args(args)
        .env_remove("PSDC_THREADS")
        .output()
        .expect("spawn psdc")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_pair(dir: &Path, name: &str, a: &Matrix, sigma: &Signature) -> std::path::PathBuf {
    let m = dir.join(format!("{name}.mtx"));
    psdc_cli::mm::write_matrix(&m, a, psdc_cli::mm::MmFormat::Coordinate).unwrap();
    psdc_cli::mm::write_signature(&m.with_extension("sig"), sigma).unwrap();
    m
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().next().unwrap(), HEADER);
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn gen_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.mtx");
    let o = psdc(&["gen", "--kind", "random_definite", "--n", "30", "--kappa", "1e6", "--seed", "7", "--out", s(&m)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let a = read_matrix(&m).unwrap();
    let sigma = read_signature(&m.with_extension("sig")).unwrap();
    assert_eq!((a.rows(), sigma.len()), (30, 30));
    assert!(sigma.pseudosymmetry_defect(&a) <= 1e-12 * a.frobenius_norm());
    assert!(cholesky(&sigma.apply_left(&a).symmetrized()).is_ok());

    // same spec, same bytes
    let m2 = dir.path().join("m2.mtx");
    psdc(&["gen", "--n", "30", "--kappa", "1e6", "--seed", "7", "--out", s(&m2)]);
    assert_eq!(fs::read(&m).unwrap(), fs::read(&m2).unwrap());
}

#[test]
fn gen_rejects_bad_flags() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.mtx");
    assert_eq!(code(&psdc(&["gen", "--n", "10", "--kappa", "0.5", "--out", s(&m)])), 2);
    assert_eq!(code(&psdc(&["gen", "--n", "1", "--out", s(&m)])), 2);
    assert_eq!(code(&psdc(&["gen", "--kind", "casida_like", "--n", "7", "--out", s(&m)])), 2);
    assert_eq!(code(&psdc(&["gen", "--kind", "nope", "--n", "10", "--out", s(&m)])), 2);
    assert_eq!(code(&psdc(&["gen", "--n", "10"])), 2);
    assert_eq!(code(&psdc(&["frobnicate"])), 2);
    let missing = dir.path().join("no/such/dir/m.mtx");
    assert_eq!(code(&psdc(&["gen", "--n", "10", "--out", s(&missing)])), 3);
}

#[test]
fn solve_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let sigma = Signature::new(vec![1, -1]).unwrap();
    let m = write_pair(dir.path(), "d", &Matrix::from_diagonal(&[3.0, -2.0]), &sigma);
    let ev = dir.path().join("ev.txt");
    let o = psdc(&["solve", s(&m), "--method", "newton", "--eigenvalues", s(&ev)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let vals: Vec<f64> = fs::read_to_string(&ev).unwrap().lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(vals, vec![3.0, -2.0]);

    // stdout by default
    let o = psdc(&["solve", s(&m), "--method", "dwh-ldl", "--basis", "chol"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 2);
}

#[test]
fn solve_definite_zolo_takes_two_steps() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.mtx");
    assert_eq!(code(&psdc(&["gen", "--n", "250", "--kappa", "1e6", "--seed", "3", "--out", s(&m)])), 0);
    let (ev, rep) = (dir.path().join("ev.txt"), dir.path().join("r.csv"));
    let o = psdc(&["solve", s(&m), "--method", "zolo", "--eigenvalues", s(&ev), "--out", s(&rep)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&rep);
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!((r[0].as_str(), r[1].as_str(), r[2].as_str()), ("zolo", "ldl", "250"));
    assert_eq!(r[5], "2");
    assert!(r[6].parse::<f64>().unwrap() < 1e-11);
    assert!(r[7].parse::<f64>().unwrap() < 1e-8);
    assert_eq!(r[10], "ok");
    assert_eq!(fs::read_to_string(&ev).unwrap().lines().count(), 250);
}

#[test]
fn solve_recursive_indefinite() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.mtx");
    assert_eq!(code(&psdc(&["gen", "--kind", "random_signature", "--n", "16", "--kappa", "10", "--out", s(&m)])), 0);
    // not definite: the plain solver refuses
    assert_eq!(code(&psdc(&["solve", s(&m), "--method", "newton"])), 4);
    let o = psdc(&["solve", s(&m), "--method", "newton", "--recursive"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut mags: Vec<f64> = String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .map(|l| l.parse::<f64>().unwrap().abs())
        .collect();
    mags.sort_by(f64::total_cmp);
    for (x, y) in mags.iter().zip(psdc_core::gen::linspace_spectrum(16, 10.0)) {
        assert!((x - y).abs() < 1e-8 * y);
    }
}

#[test]
fn solve_error_paths() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mtx");
    fs::write(&bad, "%%MatrixMarket matrix array real general\n2 2\n1\n2\n").unwrap();
    fs::write(bad.with_extension("sig"), "2\n+1\n-1\n").unwrap();
    assert_eq!(code(&psdc(&["solve", s(&bad)])), 3);
    assert_eq!(code(&psdc(&["solve", s(&dir.path().join("missing.mtx"))])), 3);

    let sigma = Signature::new(vec![1, -1]).unwrap();
    let m = write_pair(dir.path(), "short", &Matrix::from_diagonal(&[1.0, -1.0, 2.0]), &sigma);
    assert_eq!(code(&psdc(&["solve", s(&m)])), 3);

    // Sigma A = diag(1, -1) is indefinite
    let m = write_pair(dir.path(), "indef", &Matrix::from_diagonal(&[1.0, 1.0]), &sigma);
    let rep = dir.path().join("r.csv");
    assert_eq!(code(&psdc(&["solve", s(&m), "--out", s(&rep)])), 4);
    assert_eq!(csv_rows(&rep)[0][10], "error:NotDefinite");

    let m = write_pair(dir.path(), "nonps", &Matrix::from_rows(&[[1.0, 2.0], [2.0, -1.0]]), &sigma);
    assert_eq!(code(&psdc(&["solve", s(&m)])), 4);

    assert_eq!(code(&psdc(&["solve", s(&m), "--method", "qdwh"])), 2);
    assert_eq!(code(&psdc(&["solve", s(&m), "--basis", "qr"])), 2);
}

#[test]
fn bench_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("runs.csv");
    let o = psdc(&[
        "bench", "--n", "250", "--sweep", "1e2", "--seeds", "2", "--methods", "zolo,dwh-ldliqr2,newton", "--out", s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 6);
    let order: Vec<(&str, &str)> = rows.iter().map(|r| (r[4].as_str(), r[0].as_str())).collect();
    assert_eq!(
        order,
        [("0", "zolo"), ("0", "dwh-ldliqr2"), ("0", "newton"), ("1", "zolo"), ("1", "dwh-ldliqr2"), ("1", "newton")]
    );
    for r in &rows {
        assert_eq!(r[10], "ok");
        for f in &r[5..10] {
            assert!(f.parse::<f64>().unwrap().is_finite());
        }
    }

    let agg = fs::read_to_string(dir.path().join("runs_aggregate.csv")).unwrap();
    let lines: Vec<&str> = agg.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("method,basis,n,kappa,runs,failures,mean_iterations,mean_backward_error"));
    for l in &lines[1..] {
        let mean_be: f64 = l.split(',').nth(7).unwrap().parse().unwrap();
        assert!(mean_be <= 1e-12, "{l}");
    }
}

#[test]
fn bench_is_deterministic_on_one_thread() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_psdc"))
            .args(["bench", "--n", "40", "--sweep", "1e1..1e3", "--seeds", "2", "--methods", "zolo,newton", "--out"])
            .arg(&out)
            .env("PSDC_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
        csv_rows(&out)
            .into_iter()
            .map(|mut r| {
                r[9].clear();
                r
            })
            .collect::<Vec<_>>()
    };
    let a = run("a.csv", "1");
    assert_eq!(a.len(), 12);
    assert_eq!(a, run("b.csv", "1"));
    assert_eq!(a, run("c.csv", "3"));
}

#[test]
fn bench_flag_errors() {
    assert_eq!(code(&psdc(&["bench", "--methods", ""])), 2);
    assert_eq!(code(&psdc(&["bench", "--methods", ","])), 2);
    assert_eq!(code(&psdc(&["bench", "--sweep", "1e4..1e2"])), 2);
    assert_eq!(code(&psdc(&["bench", "--seeds", "0"])), 2);
    assert_eq!(code(&psdc(&["bench", "--kind", "random_signature"])), 2);
    assert_eq!(code(&psdc(&["bench", "--threads", "0", "--n", "4", "--sweep", "10", "--seeds", "1"])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_psdc")).args(["bench"]).env("PSDC_THREADS", "many").output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn bench_failures_are_rows() {
    // some 2x2 draws get a uniform signature and cannot split
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = psdc(&["bench", "--n", "2", "--sweep", "1e1", "--seeds", "8", "--methods", "newton", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r[10] == "ok" || r[10].starts_with("error:")));
    assert!(rows.iter().any(|r| r[10] == "error:SplitDegenerate"), "{rows:?}");
    for r in rows.iter().filter(|r| r[10] != "ok") {
        assert!(r[5..10].iter().all(String::is_empty));
    }
}
