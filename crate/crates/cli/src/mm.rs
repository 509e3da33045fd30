//! Matrix Market (real, dense or coordinate) and sidecar signature files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use psdc_core::{Matrix, Signature};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum MmFormat {
    Array,
    Coordinate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

/// `m.mtx` -> `m.sig`.
pub fn sig_path_for(matrix: &Path) -> PathBuf {
    matrix.with_extension("sig")
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    parse_matrix(&read(path)?, path)
}

pub fn parse_matrix(text: &str, path: &Path) -> Result<Matrix> {
    let err = |line: usize, msg: String| CliError::Parse { path: path.to_path_buf(), line, msg };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let h: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if h.len() != 5 || h[0] != "%%matrixmarket" || h[1] != "matrix" {
        return Err(err(1, "expected a '%%MatrixMarket matrix' header".into()));
    }
    let dense = match h[2].as_str() {
        "array" => true,
        "coordinate" => false,
        f => return Err(err(1, format!("unsupported storage '{f}'"))),
    };
    if !matches!(h[3].as_str(), "real" | "double" | "integer") {
        return Err(err(1, format!("unsupported field '{}'", h[3])));
    }
    let symmetry = match h[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        s => return Err(err(1, format!("unsupported symmetry '{s}'"))),
    };

    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (size_line, size) = body.next().ok_or_else(|| err(1, "missing size line".into()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| err(size_line, format!("bad size entry '{t}'"))))
        .collect::<Result<_>>()?;
    let want = if dense { 2 } else { 3 };
    if dims.len() != want {
        return Err(err(size_line, format!("expected {want} size entries")));
    }
    let (rows, cols) = (dims[0], dims[1]);
    if symmetry != Symmetry::General && rows != cols {
        return Err(err(size_line, "symmetric storage needs a square matrix".into()));
    }
    let value = |line: usize, t: &str| -> Result<f64> {
        let v: f64 = t.parse().map_err(|_| err(line, format!("bad value '{t}'")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(err(line, format!("non-finite value '{t}'")))
        }
    };

    let mut m = Matrix::zeros(rows, cols);
    let mut put = |i: usize, j: usize, v: f64| {
        m[(i, j)] = v;
        match symmetry {
            Symmetry::General => {}
            Symmetry::Symmetric => m[(j, i)] = v,
            Symmetry::SkewSymmetric => m[(j, i)] = -v,
        }
    };

    if dense {
        // column-major, lower triangle only for symmetric storage
        let mut slots = Vec::new();
        for j in 0..cols {
            let first = match symmetry {
                Symmetry::General => 0,
                Symmetry::Symmetric => j,
                Symmetry::SkewSymmetric => j + 1,
            };
            slots.extend((first..rows).map(|i| (i, j)));
        }
        let mut count = 0;
        for (line, l) in body {
            for t in l.split_whitespace() {
                let &(i, j) = slots.get(count).ok_or_else(|| err(line, "too many entries".into()))?;
                put(i, j, value(line, t)?);
                count += 1;
            }
        }
        if count != slots.len() {
            return Err(err(size_line, format!("expected {} entries, found {count}", slots.len())));
        }
    } else {
        let nnz = dims[2];
        let mut count = 0;
        for (line, l) in body {
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 3 {
                return Err(err(line, "expected 'row col value'".into()));
            }
            let index = |s: &str, bound: usize| -> Result<usize> {
                match s.parse::<usize>() {
                    Ok(k) if (1..=bound).contains(&k) => Ok(k - 1),
                    _ => Err(err(line, format!("index '{s}' out of range"))),
                }
            };
            let (i, j) = (index(t[0], rows)?, index(t[1], cols)?);
            put(i, j, value(line, t[2])?);
            count += 1;
        }
        if count != nnz {
            return Err(err(size_line, format!("expected {nnz} entries, found {count}")));
        }
    }
    Ok(m)
}

pub fn format_matrix(m: &Matrix, format: MmFormat) -> String {
    let mut s = String::new();
    match format {
        MmFormat::Array => {
            s.push_str("%%MatrixMarket matrix array real general\n");
            let _ = writeln!(s, "{} {}", m.rows(), m.cols());
            for j in 0..m.cols() {
                for i in 0..m.rows() {
                    let _ = writeln!(s, "{:e}", m[(i, j)]);
                }
            }
        }
        MmFormat::Coordinate => {
            let entries: Vec<(usize, usize, f64)> = (0..m.cols())
                .flat_map(|j| (0..m.rows()).map(move |i| (i, j)))
                .map(|(i, j)| (i, j, m[(i, j)]))
                .filter(|e| e.2 != 0.0)
                .collect();
            s.push_str("%%MatrixMarket matrix coordinate real general\n");
            let _ = writeln!(s, "{} {} {}", m.rows(), m.cols(), entries.len());
            for (i, j, v) in entries {
                let _ = writeln!(s, "{} {} {v:e}", i + 1, j + 1);
            }
        }
    }
    s
}

pub fn write_matrix(path: &Path, m: &Matrix, format: MmFormat) -> Result<()> {
    write(path, &format_matrix(m, format))
}

/// `n`, then one `+1` or `-1` per line.
pub fn format_signature(sigma: &Signature) -> String {
    let mut s = format!("{}\n", sigma.len());
    for &x in sigma.as_slice() {
        s.push_str(if x > 0 { "+1\n" } else { "-1\n" });
    }
    s
}

pub fn write_signature(path: &Path, sigma: &Signature) -> Result<()> {
    write(path, &format_signature(sigma))
}

pub fn read_signature(path: &Path) -> Result<Signature> {
    parse_signature(&read(path)?, path)
}

pub fn parse_signature(text: &str, path: &Path) -> Result<Signature> {
    let err = |line: usize, msg: String| CliError::Parse { path: path.to_path_buf(), line, msg };
    let mut tokens = text
        .lines()
        .enumerate()
        .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)));
    let (line, t) = tokens.next().ok_or_else(|| err(1, "empty signature file".into()))?;
    let n: usize = t.parse().map_err(|_| err(line, format!("bad length '{t}'")))?;
    let mut signs = Vec::with_capacity(n);
    for (line, t) in tokens {
        signs.push(match t {
            "+1" | "1" => 1,
            "-1" => -1,
            _ => return Err(err(line, format!("expected +1 or -1, found '{t}'"))),
        });
    }
    if signs.len() != n {
        return Err(err(line, format!("declared {n} entries, found {}", signs.len())));
    }
    Ok(Signature::new(signs)?)
}
