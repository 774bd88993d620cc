use std::path::Path;
use std::process::{Command, Output};

fn ggm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ggm"))
        .args(args)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = "experiment = tc1\nlayers = 1,2\nn_realizations = 1\nn_nodes = 10\nrho_grid = 0.02\nbeta_grid = 0.4\neta_grid = 1\n";

fn write_covs(dir: &Path) -> Vec<String> {
    let mats = [
        "2,0.5,0.1\n0.5,1.5,0.2\n0.1,0.2,1\n",
        "2,0.4,0.1\n0.4,1.5,0.3\n0.1,0.3,1.1\n",
    ];
    mats.iter()
        .enumerate()
        .map(|(i, m)| {
            let p = dir.join(format!("c{i}.csv"));
            std::fs::write(&p, m).unwrap();
            p.display().to_string()
        })
        .collect()
}

#[test]
fn run_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    std::fs::write(&cfg, SMALL).unwrap();
    let out = dir.path().join("tc1.csv");
    let o = ggm(&[
        "run",
        "tc1",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--n_nodes",
        "12",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "xaxis,GL,GGL,LVGL,Joint");
    assert_eq!(lines.len(), 3);
    let manifest = std::fs::read_to_string(dir.path().join("tc1.manifest.txt")).unwrap();
    assert!(manifest.contains("n_nodes = 12"));
    assert!(manifest.contains("solver_invocations = 8"));

    // same config and seed: byte-identical output
    let out2 = dir.path().join("again.csv");
    let o = ggm(&[
        "run",
        "tc1",
        "--config",
        cfg.to_str().unwrap(),
        "--n_nodes",
        "12",
        "--workers",
        "2",
        "--out",
        out2.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&out2).unwrap());
}

#[test]
fn run_reports_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let out = out.to_str().unwrap();
    for args in [
        vec!["run", "tc7", "--out", out],
        vec!["run", "tc1"],
        vec!["run", "tc1", "--out", out, "--bogus", "1"],
        vec!["run", "tc1", "--out", out, "--samples", "10,20"],
        vec!["run", "tc3", "--out", out],
    ] {
        let o = ggm(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("error:"));
    }
    let o = ggm(&["run", "tc1", "--config", "/nonexistent/cfg", "--out", out]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("/nonexistent/cfg"));
}

#[test]
fn solve_and_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let covs = write_covs(dir.path());
    let out = dir.path().join("fit");
    let mut args = vec!["solve", "--covs"];
    args.extend(covs.iter().map(String::as_str));
    args.extend([
        "--weights",
        "rho=0.05,beta=0.2,rho_pair=0.05,beta_pair=0.1",
        "--out",
        out.to_str().unwrap(),
    ]);
    let o = ggm(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["S_1.csv", "S_2.csv", "P_1.csv", "P_2.csv", "summary.txt"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let admm: f64 = String::from_utf8_lossy(&o.stdout)
        .lines()
        .find_map(|l| l.strip_prefix("objective = ").map(|v| v.parse().unwrap()))
        .unwrap();

    let mut args = vec!["oracle", "--covs"];
    args.extend(covs.iter().map(String::as_str));
    args.extend([
        "--weights",
        "rho=0.05,beta=0.2,rho_pair=0.05,beta_pair=0.1",
        "--budget",
        "50000",
    ]);
    let o = ggm(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let oracle: f64 = String::from_utf8_lossy(&o.stdout)
        .trim()
        .strip_prefix("objective = ")
        .unwrap()
        .parse()
        .unwrap();
    assert!(
        (admm - oracle).abs() / oracle.abs() < 1e-3,
        "{admm} vs {oracle}"
    );

    for method in ["gl", "ggl", "lvgl"] {
        let out = dir.path().join(method);
        let o = ggm(&[
            "solve",
            "--covs",
            &covs[0],
            "--method",
            method,
            "--weights",
            "rho=0.05,beta=0.3",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{method}: {}", stderr(&o));
        assert!(out.join("S_1.csv").exists());
    }
}

#[test]
fn solve_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fit");
    let out = out.to_str().unwrap();
    let o = ggm(&["solve", "--covs", "/nonexistent.csv", "--out", out]);
    assert_eq!(o.status.code(), Some(3));
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "1,2\n3\n").unwrap();
    let o = ggm(&["solve", "--covs", bad.to_str().unwrap(), "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    let covs = write_covs(dir.path());
    let o = ggm(&[
        "solve",
        "--covs",
        &covs[0],
        "--weights",
        "rho=x",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(2));
    let big = dir.path().join("big.csv");
    let row = vec!["0"; 6].join(",");
    let text: String = (0..6)
        .map(|i| {
            let mut r: Vec<&str> = row.split(',').collect();
            r[i] = "1";
            r.join(",") + "\n"
        })
        .collect();
    std::fs::write(&big, text).unwrap();
    let o = ggm(&["oracle", "--covs", big.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
