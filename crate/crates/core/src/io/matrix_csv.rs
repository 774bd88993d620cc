use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernels::SymMatrix;

use super::{read_text, write_text};

/// One row per line, comma separated, each value in its shortest exactly
/// round-tripping decimal form (at most 17 significant digits).
pub fn format_matrix_csv(m: &SymMatrix) -> String {
    let n = m.dim();
    let mut out = String::new();
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format!("{}", m.get(i, j))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_matrix_csv(text: &str) -> Result<SymMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        let mut column = 1;
        for field in line.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::parse(
                    idx + 1,
                    column,
                    format!("invalid number '{}'", field.trim()),
                )
            })?;
            row.push(v);
            column += field.len() + 1;
        }
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::parse(1, 1, "empty matrix file"));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::parse(
            i + 1,
            1,
            format!("row has {} entries but the matrix has {n} rows", r.len()),
        ));
    }
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let scale = m.amax().max(1.0);
    for i in 0..n {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-9 * scale {
                return Err(Error::parse(i + 1, j + 1, "matrix is not symmetric"));
            }
        }
    }
    SymMatrix::new(m)
}

pub fn write_matrix_csv(m: &SymMatrix, path: &Path) -> Result<()> {
    write_text(path, &format_matrix_csv(m))
}

pub fn read_matrix_csv(path: &Path) -> Result<SymMatrix> {
    parse_matrix_csv(&read_text(path)?)
}
