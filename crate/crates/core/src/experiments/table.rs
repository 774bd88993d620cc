use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::io::write_text;

use super::ExperimentId;

/// The four compared estimators, in CSV column order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Gl,
    Ggl,
    Lvgl,
    Joint,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Gl, Method::Ggl, Method::Lvgl, Method::Joint];

    pub fn name(self) -> &'static str {
        match self {
            Method::Gl => "GL",
            Method::Ggl => "GGL",
            Method::Lvgl => "LVGL",
            Method::Joint => "Joint",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Errors of every realization at one sweep value, per method.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub xaxis: usize,
    pub errors: [Vec<f64>; 4],
}

impl ResultRow {
    pub fn errors(&self, m: Method) -> &[f64] {
        &self.errors[m.index()]
    }

    pub fn mean(&self, m: Method) -> f64 {
        let e = self.errors(m);
        e.iter().sum::<f64>() / e.len() as f64
    }

    pub fn median(&self, m: Method) -> f64 {
        median(self.errors(m))
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Penalty weights chosen for one method on the held-out realization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Selection {
    pub rho: f64,
    pub beta: Option<f64>,
    pub eta: Option<f64>,
    pub heldout_error: f64,
}

/// Audit record of a run: resolved config, selected hyperparameters and solver counts.
#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    pub config: String,
    /// One entry per sweep value, methods in [`Method::ALL`] order.
    pub selections: Vec<(usize, [Selection; 4])>,
    /// Method runs in the Monte Carlo loop: `4 x |sweep| x n_realizations`.
    pub solver_invocations: usize,
    /// Method runs spent on the hyperparameter search.
    pub tuning_invocations: usize,
    /// Monte Carlo runs that hit `max_iters`, per method.
    pub nonconverged: [usize; 4],
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub experiment: ExperimentId,
    pub rows: Vec<ResultRow>,
    pub manifest: RunManifest,
}

impl ResultTable {
    pub fn xaxis(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.xaxis).collect()
    }

    pub fn row(&self, xaxis: usize) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.xaxis == xaxis)
    }
}

/// `v` rounded to six significant digits, printed in its shortest form.
pub(crate) fn six_digits(v: f64) -> String {
    let rounded: f64 = format!("{v:.5e}").parse().unwrap_or(v);
    format!("{rounded}")
}

/// Header `xaxis,GL,GGL,LVGL,Joint`, then the per-method mean error of each sweep value.
pub fn format_csv(table: &ResultTable) -> String {
    let mut out = String::from("xaxis");
    for m in Method::ALL {
        out.push(',');
        out.push_str(m.name());
    }
    out.push('\n');
    for row in &table.rows {
        let _ = write!(out, "{}", row.xaxis);
        for m in Method::ALL {
            let _ = write!(out, ",{}", six_digits(row.mean(m)));
        }
        out.push('\n');
    }
    out
}

pub fn emit_csv(table: &ResultTable, path: &Path) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::invalid("result table is empty"));
    }
    write_text(path, &format_csv(table))
}

/// `results.csv` -> `results.manifest.txt`.
pub fn manifest_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("manifest.txt")
}

pub fn format_manifest(table: &ResultTable) -> String {
    let m = &table.manifest;
    let mut out = String::new();
    let n_real = table.rows.first().map_or(0, |r| r.errors[0].len());
    let _ = writeln!(out, "experiment = {}", table.experiment);
    let _ = writeln!(out, "sweep_axis = {}", table.experiment.axis());
    let _ = writeln!(
        out,
        "solver_invocations = {} (4 methods x {} sweep values x {} realizations)",
        m.solver_invocations,
        table.rows.len(),
        n_real
    );
    let _ = writeln!(out, "tuning_invocations = {}", m.tuning_invocations);
    let nc: Vec<String> = Method::ALL
        .iter()
        .map(|x| format!("{}={}", x.name(), m.nonconverged[x.index()]))
        .collect();
    let _ = writeln!(out, "nonconverged = {}", nc.join(" "));
    out.push_str("\n[selected]\n");
    for (x, sel) in &m.selections {
        for meth in Method::ALL {
            let s = &sel[meth.index()];
            let _ = write!(
                out,
                "{}={} {} rho={}",
                table.experiment.axis(),
                x,
                meth.name(),
                s.rho
            );
            if let Some(b) = s.beta {
                let _ = write!(out, " beta={b}");
            }
            if let Some(e) = s.eta {
                let _ = write!(out, " eta={e}");
            }
            let _ = writeln!(out, " heldout_error={}", six_digits(s.heldout_error));
        }
    }
    out.push_str("\n[config]\n");
    out.push_str(&m.config);
    out
}

pub fn write_manifest(table: &ResultTable, path: &Path) -> Result<()> {
    write_text(path, &format_manifest(table))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: Vec<ResultRow>) -> ResultTable {
        ResultTable {
            experiment: ExperimentId::Tc1,
            rows,
            manifest: RunManifest {
                config: String::new(),
                selections: Vec::new(),
                solver_invocations: 0,
                tuning_invocations: 0,
                nonconverged: [0; 4],
            },
        }
    }

    fn row(x: usize, v: [f64; 4]) -> ResultRow {
        ResultRow {
            xaxis: x,
            errors: v.map(|e| vec![e]),
        }
    }

    #[test]
    fn csv_layout() {
        let t = table(vec![
            row(1, [0.5, 0.25, 1.0 / 3.0, 0.1234567]),
            row(2, [1.0, 2.0, 3.0, 0.0]),
        ]);
        let csv = format_csv(&t);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "xaxis,GL,GGL,LVGL,Joint");
        assert_eq!(lines[1], "1,0.5,0.25,0.333333,0.123457");
        assert_eq!(lines[2], "2,1,2,3,0");
        let parsed: Vec<f64> = lines[1]
            .split(',')
            .skip(1)
            .map(|s| s.parse().unwrap())
            .collect();
        for (p, v) in parsed.iter().zip([0.5, 0.25, 1.0 / 3.0, 0.1234567]) {
            assert!((p - v).abs() <= 5e-6 * v.abs());
        }
    }

    #[test]
    fn statistics() {
        let r = ResultRow {
            xaxis: 1,
            errors: [
                vec![3.0, 1.0, 2.0],
                vec![4.0, 1.0],
                vec![1.0],
                vec![0.0, 0.0, 9.0, 1.0],
            ],
        };
        assert_eq!(r.median(Method::Gl), 2.0);
        assert_eq!(r.median(Method::Ggl), 2.5);
        assert_eq!(r.median(Method::Joint), 0.5);
        assert_eq!(r.mean(Method::Joint), 2.5);
    }

    #[test]
    fn empty_table_rejected_and_manifest_path() {
        let dir = tempfile::tempdir().unwrap();
        assert!(emit_csv(&table(vec![]), &dir.path().join("x.csv")).is_err());
        assert_eq!(
            manifest_path(Path::new("out/r.csv")),
            Path::new("out/r.manifest.txt")
        );
    }
}
