//! Matrix Market coordinate files, densified on load.
//!
//! Supported headers: `%%MatrixMarket matrix coordinate {real|integer}
//! {general|symmetric}`. Symmetric files store one triangle; the loader
//! mirrors off-diagonal entries. Duplicate entries are summed.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::saddle::BlockSaddleSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, msg: msg.into() }
}

/// Parses Matrix Market text; `path` is only used in error messages.
pub fn parse_matrix_market(text: &str, path: &Path) -> Result<Matrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hline, header) = lines.next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(path, hline, format!("bad header {header:?}")));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(path, hline, format!("unsupported format {:?} (only coordinate)", tokens[2])));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(parse_err(path, hline, format!("unsupported field {:?}", tokens[3])));
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(parse_err(path, hline, format!("unsupported symmetry {other:?}"))),
    };

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (sline, size) = body.next().ok_or_else(|| parse_err(path, hline + 1, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(path, sline, format!("bad size line: {e}")))?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(parse_err(path, sline, "size line needs rows, cols and entry count"));
    };
    if symmetry == Symmetry::Symmetric && rows != cols {
        return Err(parse_err(path, sline, format!("symmetric matrix must be square, got {rows}x{cols}")));
    }

    let mut m = Matrix::zeros(rows, cols);
    let mut seen = 0usize;
    for (ln, line) in body {
        let mut it = line.split_whitespace();
        let (Some(i), Some(j), Some(v), None) = (it.next(), it.next(), it.next(), it.next()) else {
            return Err(parse_err(path, ln, "entry needs row, column and value"));
        };
        let i: usize = i.parse().map_err(|e| parse_err(path, ln, format!("bad row index: {e}")))?;
        let j: usize = j.parse().map_err(|e| parse_err(path, ln, format!("bad column index: {e}")))?;
        let v: f64 = v.parse().map_err(|e| parse_err(path, ln, format!("bad value: {e}")))?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(parse_err(path, ln, format!("index ({i}, {j}) outside {rows}x{cols}")));
        }
        if !v.is_finite() {
            return Err(parse_err(path, ln, "non-finite value"));
        }
        let (i, j) = (i - 1, j - 1);
        m[(i, j)] += v;
        if symmetry == Symmetry::Symmetric && i != j {
            m[(j, i)] += v;
        }
        seen += 1;
    }
    if seen != nnz {
        return Err(parse_err(path, sline, format!("declared {nnz} entries, found {seen}")));
    }
    Ok(m)
}

pub fn read_matrix_market(path: &Path) -> Result<Matrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io { path: path.to_path_buf(), msg: e.to_string() })?;
    parse_matrix_market(&text, path)
}

/// Serializes `m` as a general coordinate file holding its nonzeros.
pub fn to_matrix_market(m: &Matrix) -> String {
    let nnz = m.iter().filter(|v| **v != 0.0).count();
    let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", m.nrows(), m.ncols(), nnz);
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v != 0.0 {
                let _ = writeln!(out, "{} {} {:e}", i + 1, j + 1, v);
            }
        }
    }
    out
}

pub fn write_matrix_market(path: &Path, m: &Matrix) -> Result<()> {
    fs::write(path, to_matrix_market(m)).map_err(|e| Error::Io { path: path.to_path_buf(), msg: e.to_string() })
}

/// `A{k}.mtx` for `k = 0..=N` and `B{k}.mtx` for `k = 1..=N` inside `dir`.
pub fn system_paths(dir: &Path, n: usize) -> (Vec<PathBuf>, Vec<PathBuf>) {
    (
        (0..=n).map(|k| dir.join(format!("A{k}.mtx"))).collect(),
        (1..=n).map(|k| dir.join(format!("B{k}.mtx"))).collect(),
    )
}

/// Loads a system from explicit block files. Rows of `B_k` index level `k`.
pub fn read_system(diag: &[PathBuf], offdiag: &[PathBuf]) -> Result<BlockSaddleSystem> {
    let a = diag.iter().map(|p| read_matrix_market(p)).collect::<Result<Vec<_>>>()?;
    let b = offdiag.iter().map(|p| read_matrix_market(p)).collect::<Result<Vec<_>>>()?;
    BlockSaddleSystem::new(a, b)
}

/// Loads `A0.mtx, A1.mtx, …` and `B1.mtx, …` from `dir`, taking `N` from the
/// number of `A` files present.
pub fn read_system_dir(dir: &Path) -> Result<BlockSaddleSystem> {
    let mut n = 0;
    while dir.join(format!("A{}.mtx", n + 1)).exists() {
        n += 1;
    }
    if !dir.join("A0.mtx").exists() {
        return Err(Error::Io { path: dir.join("A0.mtx"), msg: "missing block file".into() });
    }
    let (a, b) = system_paths(dir, n);
    read_system(&a, &b)
}

pub fn write_system_dir(dir: &Path, sys: &BlockSaddleSystem) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), msg: e.to_string() })?;
    let (a, b) = system_paths(dir, sys.depth());
    for (p, m) in a.iter().zip(sys.diag_blocks()) {
        write_matrix_market(p, m)?;
    }
    for (p, m) in b.iter().zip(sys.offdiag_blocks()) {
        write_matrix_market(p, m)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("t.mtx")
    }

    #[test]
    fn symmetric_entries_are_mirrored() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n% c\n2 2 2\n1 1 2.0\n2 1 -1\n";
        let m = parse_matrix_market(text, p()).unwrap();
        assert_eq!(m, Matrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 0.0]));
    }

    #[test]
    fn duplicates_sum() {
        let text = "%%MatrixMarket matrix coordinate integer general\n1 2 2\n1 2 3\n1 2 4\n";
        let m = parse_matrix_market(text, p()).unwrap();
        assert_eq!(m[(0, 1)], 7.0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad_header = "%%MatrixMarket matrix array real general\n1 1\n1\n";
        assert!(matches!(parse_matrix_market(bad_header, p()), Err(Error::Parse { line: 1, .. })));
        let bad_entry = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n";
        assert!(matches!(parse_matrix_market(bad_entry, p()), Err(Error::Parse { line: 3, .. })));
        let short = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n";
        assert!(matches!(parse_matrix_market(short, p()), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn writer_round_trips() {
        let m = Matrix::from_row_slice(2, 3, &[0.1, 0.0, -3.5e-12, 0.0, 7.0, 1.0 / 3.0]);
        let back = parse_matrix_market(&to_matrix_market(&m), p()).unwrap();
        assert_eq!(back, m);
    }
}
