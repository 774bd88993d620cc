//! `ggm`: run the benchmark experiments, fit one-off joint estimates, and query the
//! reference solver.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ggm_core::experiments::{
    self, emit_csv, manifest_path, write_manifest, ExperimentConfig, ExperimentId,
};
use ggm_core::io::{read_matrix_csv, write_matrix_csv};
use ggm_core::solvers::{
    reference_oracle, solve_ggl, solve_joint_hidden, AdmissibleSet, OracleProblem, OracleStart,
    SolverConfig,
};
use ggm_core::{Error, ObservedCovariances, PenaltyWeights, SymMatrix};

#[derive(Parser)]
#[command(
    name = "ggm",
    version,
    about = "Joint graph learning with hidden nodes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo experiment and write its CSV and manifest.
    ///
    /// Any config key can be overridden with `--key value`, e.g. `--n_realizations 5`.
    Run {
        /// tc1, tc2 or tc3.
        experiment: String,
        /// Flat `key = value` config file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output CSV; the manifest is written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
        /// `--key value` overrides applied after the config file.
        #[arg(
            trailing_var_arg = true,
            allow_hyphen_values = true,
            value_name = "--KEY VALUE"
        )]
        overrides: Vec<String>,
    },
    /// Fit one model to sample covariance matrices stored as CSV files.
    Solve {
        /// One covariance CSV per layer.
        #[arg(long, num_args = 1.., required = true)]
        covs: Vec<PathBuf>,
        /// Penalty weights, e.g. `rho=0.05,beta=0.2,rho_pair=0.05,beta_pair=0.2`.
        #[arg(long, default_value = "")]
        weights: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Joint)]
        method: MethodArg,
        /// Output directory for `S_<k>.csv`, `P_<k>.csv` and `summary.txt`.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2000)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        /// Constrain off-diagonal entries of S to be nonpositive.
        #[arg(long)]
        nonpositive_offdiag: bool,
        #[arg(long)]
        penalize_diagonal: bool,
    },
    /// Solve a tiny problem (at most 5 variables, 3 layers) with the subgradient reference solver.
    Oracle {
        #[arg(long, num_args = 1.., required = true)]
        covs: Vec<PathBuf>,
        #[arg(long, default_value = "")]
        weights: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Joint)]
        method: MethodArg,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        /// Optional output directory for the solution matrices.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Gl,
    Ggl,
    Lvgl,
    Joint,
}

#[derive(Debug, Default, PartialEq)]
struct Weights {
    rho: f64,
    beta: f64,
    rho_pair: f64,
    beta_pair: f64,
}

fn parse_weights(text: &str) -> Result<Weights, Error> {
    let mut w = Weights::default();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("weight '{item}' is not key=value")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("weight '{item}' is not a number")))?;
        match k.trim() {
            "rho" | "lambda1" => w.rho = v,
            "beta" => w.beta = v,
            "rho_pair" | "lambda2" => w.rho_pair = v,
            "beta_pair" => w.beta_pair = v,
            other => return Err(Error::Config(format!("unknown weight '{other}'"))),
        }
    }
    Ok(w)
}

/// Splits `--key value` / `--key=value` tokens into pairs.
fn parse_overrides(tokens: &[String]) -> Result<Vec<(String, String)>, Error> {
    let mut out = Vec::new();
    let mut it = tokens.iter();
    while let Some(tok) = it.next() {
        let key = tok
            .strip_prefix("--")
            .ok_or_else(|| Error::Config(format!("expected --key, got '{tok}'")))?;
        match key.split_once('=') {
            Some((k, v)) => out.push((k.to_string(), v.to_string())),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| Error::Config(format!("--{key} needs a value")))?;
                out.push((key.to_string(), v.clone()));
            }
        }
    }
    Ok(out)
}

fn load_covs(paths: &[PathBuf]) -> Result<ObservedCovariances, Error> {
    let mats = paths
        .iter()
        .map(|p| read_matrix_csv(p))
        .collect::<Result<Vec<_>, _>>()?;
    ObservedCovariances::from_matrices(mats)
}

fn create_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn write_solution(
    dir: &Path,
    s: &[SymMatrix],
    p: &[SymMatrix],
    summary: &str,
) -> Result<(), Error> {
    create_dir(dir)?;
    for (k, m) in s.iter().enumerate() {
        write_matrix_csv(m, &dir.join(format!("S_{}.csv", k + 1)))?;
    }
    for (k, m) in p.iter().enumerate() {
        write_matrix_csv(m, &dir.join(format!("P_{}.csv", k + 1)))?;
    }
    write_text(&dir.join("summary.txt"), summary)
}

fn run(
    experiment: &str,
    config: Option<&Path>,
    out: Option<PathBuf>,
    overrides: &[String],
) -> Result<(), Error> {
    let id: ExperimentId = experiment.parse()?;
    let pairs = parse_overrides(overrides)?;
    let mut config_path = config.map(Path::to_path_buf);
    let mut out = out;
    let mut rest = Vec::new();
    for (k, v) in pairs {
        match k.as_str() {
            "config" => config_path = Some(PathBuf::from(v)),
            "out" | "output" => out = Some(PathBuf::from(v)),
            _ => rest.push((k, v)),
        }
    }
    let mut cfg = match &config_path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io {
                path: p.clone(),
                source: e,
            })?;
            ExperimentConfig::from_text(&text, Some(id))?
        }
        None => ExperimentConfig::defaults(id),
    };
    for (k, v) in &rest {
        cfg.set(k, v)?;
    }
    if let Some(o) = out {
        cfg.output = Some(o);
    }
    let out = cfg
        .output
        .clone()
        .ok_or_else(|| Error::Config("no output path: pass --out <csv>".into()))?;
    cfg.validate()?;
    let table = experiments::run_experiment(&cfg)?;
    emit_csv(&table, &out)?;
    let manifest = manifest_path(&out);
    write_manifest(&table, &manifest)?;
    eprintln!("wrote {} and {}", out.display(), manifest.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn solve(
    covs: &[PathBuf],
    weights: &str,
    method: MethodArg,
    out: &Path,
    max_iters: usize,
    tol: f64,
    nonpositive_offdiag: bool,
    penalize_diagonal: bool,
) -> Result<(), Error> {
    let w = parse_weights(weights)?;
    let covs = load_covs(covs)?;
    let k = covs.num_layers();
    let cfg = SolverConfig {
        max_iters,
        tol_primal: tol,
        tol_dual: tol,
        penalize_diagonal,
        admissible_set: if nonpositive_offdiag {
            AdmissibleSet::NonpositiveOffdiag
        } else {
            AdmissibleSet::Symmetric
        },
        ..SolverConfig::default()
    };
    let mut s_all = Vec::with_capacity(k);
    let mut p_all = Vec::new();
    let mut lines = Vec::new();
    match method {
        MethodArg::Gl | MethodArg::Ggl => {
            let (l2, per_layer) = match method {
                MethodArg::Gl => (0.0, true),
                _ => (w.rho_pair, false),
            };
            let problems: Vec<ObservedCovariances> = if per_layer {
                (0..k).map(|l| covs.layer(l)).collect()
            } else {
                vec![covs.clone()]
            };
            for c in &problems {
                let e = solve_ggl(c, w.rho, l2, &cfg)?;
                lines.push(format!(
                    "objective = {}\niterations = {}\nconverged = {}",
                    e.objective, e.iterations, e.converged
                ));
                s_all.extend(e.s_hat);
            }
        }
        MethodArg::Lvgl | MethodArg::Joint => {
            let problems: Vec<(ObservedCovariances, PenaltyWeights)> = if method == MethodArg::Lvgl
            {
                (0..k)
                    .map(|l| {
                        Ok((
                            covs.layer(l),
                            PenaltyWeights::tied(1, w.rho, w.beta, 0.0, 0.0)?,
                        ))
                    })
                    .collect::<Result<_, Error>>()?
            } else {
                vec![(
                    covs.clone(),
                    PenaltyWeights::tied(k, w.rho, w.beta, w.rho_pair, w.beta_pair)?,
                )]
            };
            for (c, pw) in &problems {
                let e = solve_joint_hidden(c, pw, &cfg)?;
                lines.push(format!(
                    "objective = {}\niterations = {}\nconverged = {}",
                    e.objective, e.iterations, e.converged
                ));
                s_all.extend(e.s_hat);
                p_all.extend(e.p_hat);
            }
        }
    }
    let summary = lines.join("\n") + "\n";
    write_solution(out, &s_all, &p_all, &summary)?;
    print!("{summary}");
    Ok(())
}

fn oracle(
    covs: &[PathBuf],
    weights: &str,
    method: MethodArg,
    budget: usize,
    out: Option<&Path>,
) -> Result<(), Error> {
    let w = parse_weights(weights)?;
    let covs = load_covs(covs)?;
    let k = covs.num_layers();
    let problem = match method {
        MethodArg::Gl | MethodArg::Lvgl if k != 1 => {
            return Err(Error::Config(
                "gl and lvgl take exactly one covariance".into(),
            ))
        }
        MethodArg::Gl => OracleProblem::Ggl {
            covs,
            lambda1: w.rho,
            lambda2: 0.0,
            penalize_diagonal: false,
        },
        MethodArg::Ggl => OracleProblem::Ggl {
            covs,
            lambda1: w.rho,
            lambda2: w.rho_pair,
            penalize_diagonal: false,
        },
        MethodArg::Lvgl => OracleProblem::lvgl(covs.covs()[0].clone(), w.rho, w.beta)?,
        MethodArg::Joint => OracleProblem::JointHidden {
            covs,
            weights: PenaltyWeights::tied(k, w.rho, w.beta, w.rho_pair, w.beta_pair)?,
            penalize_diagonal: false,
        },
    };
    let sol = reference_oracle(&problem, budget, OracleStart::default())?;
    let summary = format!("objective = {}\n", sol.objective);
    if let Some(dir) = out {
        write_solution(dir, &sol.s, &sol.p, &summary)?;
    }
    print!("{summary}");
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidInput(_) | Error::Parse { .. } => 2,
        Error::Io { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            experiment,
            config,
            out,
            overrides,
        } => run(&experiment, config.as_deref(), out, &overrides),
        Command::Solve {
            covs,
            weights,
            method,
            out,
            max_iters,
            tol,
            nonpositive_offdiag,
            penalize_diagonal,
        } => solve(
            &covs,
            &weights,
            method,
            &out,
            max_iters,
            tol,
            nonpositive_offdiag,
            penalize_diagonal,
        ),
        Command::Oracle {
            covs,
            weights,
            method,
            budget,
            out,
        } => oracle(&covs, &weights, method, budget, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_parse() {
        let w = parse_weights("rho=0.1, beta=2,rho_pair=0.05,beta_pair=1e-1").unwrap();
        assert_eq!(
            w,
            Weights {
                rho: 0.1,
                beta: 2.0,
                rho_pair: 0.05,
                beta_pair: 0.1
            }
        );
        assert!(parse_weights("rho").is_err());
        assert!(parse_weights("gamma=1").is_err());
    }

    #[test]
    fn overrides_parse() {
        let toks: Vec<String> = ["--a", "1", "--b=2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(
            parse_overrides(&toks).unwrap(),
            vec![("a".into(), "1".into()), ("b".into(), "2".into())]
        );
        assert!(parse_overrides(&["x".to_string()]).is_err());
        assert!(parse_overrides(&["--a".to_string()]).is_err());
    }
}
