use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::PrecisionParams;
use crate::solvers::{AdmissibleSet, SolverConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    /// Error versus number of related ER graphs.
    Tc1,
    /// Error versus number of samples per layer on small-world graphs.
    Tc2,
    /// Error versus number of observed nodes on a fixed 32-node multilayer network.
    Tc3,
}

impl ExperimentId {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::Tc1 => "tc1",
            ExperimentId::Tc2 => "tc2",
            ExperimentId::Tc3 => "tc3",
        }
    }

    /// Name of the swept quantity.
    pub fn axis(self) -> &'static str {
        match self {
            ExperimentId::Tc1 => "layers",
            ExperimentId::Tc2 => "samples",
            ExperimentId::Tc3 => "observed",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tc1" => Ok(ExperimentId::Tc1),
            "tc2" => Ok(ExperimentId::Tc2),
            "tc3" => Ok(ExperimentId::Tc3),
            other => Err(Error::Config(format!(
                "unknown experiment '{other}' (expected tc1, tc2 or tc3)"
            ))),
        }
    }
}

/// Base graph model of the synthetic families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BaseGraph {
    ErdosRenyi,
    SmallWorld,
}

/// Penalty grid. Every method searches the tied-weight combinations it uses:
/// GL over `rho`, GGL over `rho x eta` (group weight `rho * eta`), LVGL over
/// `rho x beta`, and the joint estimator over `rho x beta x eta` (pairwise weights
/// `rho * eta` and `beta * eta`).
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub rho: Vec<f64>,
    pub beta: Vec<f64>,
    pub eta: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            rho: vec![0.005, 0.01, 0.02, 0.04, 0.08],
            beta: vec![0.05, 0.1, 0.2, 0.4, 0.8],
            eta: vec![0.5, 1.0, 2.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub base_graph: BaseGraph,
    pub n_nodes: usize,
    /// Edge probability of the ER base graph.
    pub er_p: f64,
    /// Ring-lattice neighbors of the small-world base graph.
    pub neighbors: usize,
    pub rewire_p: f64,
    /// Edges swapped per additional layer; `None` uses 10% of the base edges, rounded up.
    pub n_rewire: Option<usize>,
    pub n_hidden: usize,
    pub layers: Vec<usize>,
    pub samples: Vec<usize>,
    pub observed: Vec<usize>,
    pub n_realizations: usize,
    pub base_seed: u64,
    pub grid: GridSpec,
    pub precision: PrecisionParams,
    pub solver: SolverConfig,
    /// Layer files for the multilayer-network experiment (Pajek `.net` or edge lists).
    pub layer_files: Vec<PathBuf>,
    /// Use a generated 32-node four-layer network when no layer files are given.
    pub synthetic_substitute: bool,
    pub binarize: bool,
    /// Worker threads; 0 uses all available cores.
    pub workers: usize,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn defaults(experiment: ExperimentId) -> Self {
        let mut cfg = ExperimentConfig {
            experiment,
            base_graph: BaseGraph::ErdosRenyi,
            n_nodes: 20,
            er_p: 0.15,
            neighbors: 3,
            rewire_p: 0.15,
            n_rewire: None,
            n_hidden: 2,
            layers: vec![4],
            samples: vec![200],
            observed: vec![18],
            n_realizations: 20,
            base_seed: 1,
            grid: GridSpec::default(),
            precision: PrecisionParams::default(),
            solver: SolverConfig::default(),
            layer_files: Vec::new(),
            synthetic_substitute: false,
            binarize: false,
            workers: 0,
            output: None,
        };
        match experiment {
            ExperimentId::Tc1 => cfg.layers = (1..=6).collect(),
            ExperimentId::Tc2 => {
                cfg.base_graph = BaseGraph::SmallWorld;
                cfg.samples = (1..=10).map(|i| 50 * i).collect();
            }
            ExperimentId::Tc3 => {
                cfg.n_nodes = 32;
                cfg.observed = (25..=31).collect();
            }
        }
        cfg
    }

    /// Defaults for the experiment named in `text` (or `fallback`), then every
    /// `key = value` line of `text` applied in order. `#` starts a comment.
    pub fn from_text(text: &str, fallback: Option<ExperimentId>) -> Result<Self> {
        let pairs = parse_pairs(text)?;
        let named = pairs
            .iter()
            .find(|(k, _)| k == "experiment")
            .map(|(_, v)| v.parse::<ExperimentId>())
            .transpose()?;
        let id = match (named, fallback) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Config(format!(
                    "config is for {a} but {b} was requested"
                )))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(Error::Config("no experiment given".into())),
        };
        let mut cfg = ExperimentConfig::defaults(id);
        for (k, v) in &pairs {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    /// Sets one key; list values are comma separated and may contain inclusive ranges `a..b`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let key = key.trim().trim_start_matches("--").replace('-', "_");
        match key.as_str() {
            "experiment" => {
                let id: ExperimentId = value.parse()?;
                if id != self.experiment {
                    return Err(Error::Config(format!(
                        "cannot change experiment from {} to {id}",
                        self.experiment
                    )));
                }
            }
            "base_graph" => {
                self.base_graph = match value.to_ascii_lowercase().as_str() {
                    "er" | "erdos_renyi" => BaseGraph::ErdosRenyi,
                    "sw" | "small_world" => BaseGraph::SmallWorld,
                    _ => return Err(bad(&key, value)),
                }
            }
            "n_nodes" | "n" => self.n_nodes = num(&key, value)?,
            "er_p" | "p" => self.er_p = num(&key, value)?,
            "neighbors" => self.neighbors = num(&key, value)?,
            "rewire_p" => self.rewire_p = num(&key, value)?,
            "n_rewire" => {
                self.n_rewire = if value.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(num(&key, value)?)
                }
            }
            "n_hidden" => self.n_hidden = num(&key, value)?,
            "layers" | "k" => self.layers = int_list(&key, value)?,
            "samples" | "m" => self.samples = int_list(&key, value)?,
            "observed" | "o" => self.observed = int_list(&key, value)?,
            "n_realizations" | "realizations" => self.n_realizations = num(&key, value)?,
            "base_seed" | "seed" => self.base_seed = num(&key, value)?,
            "rho_grid" => self.grid.rho = float_list(&key, value)?,
            "beta_grid" => self.grid.beta = float_list(&key, value)?,
            "eta_grid" => self.grid.eta = float_list(&key, value)?,
            "weight_lo" => self.precision.weight_lo = num(&key, value)?,
            "weight_hi" => self.precision.weight_hi = num(&key, value)?,
            "diag_margin" => self.precision.diag_margin = num(&key, value)?,
            "step" => self.solver.step = num(&key, value)?,
            "max_iters" => self.solver.max_iters = num(&key, value)?,
            "tol_primal" => self.solver.tol_primal = num(&key, value)?,
            "tol_dual" => self.solver.tol_dual = num(&key, value)?,
            "tol" => {
                self.solver.tol_primal = num(&key, value)?;
                self.solver.tol_dual = self.solver.tol_primal;
            }
            "adapt_step" => self.solver.adapt_step = boolean(&key, value)?,
            "pd_floor" => self.solver.pd_floor = num(&key, value)?,
            "penalize_diagonal" => self.solver.penalize_diagonal = boolean(&key, value)?,
            "admissible_set" => {
                self.solver.admissible_set = match value.to_ascii_lowercase().as_str() {
                    "symmetric" => AdmissibleSet::Symmetric,
                    "nonpositive_offdiag" => AdmissibleSet::NonpositiveOffdiag,
                    _ => return Err(bad(&key, value)),
                }
            }
            "layer_files" | "files" => {
                self.layer_files = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(PathBuf::from)
                    .collect()
            }
            "synthetic_substitute" | "synthetic" => {
                self.synthetic_substitute = boolean(&key, value)?
            }
            "binarize" => self.binarize = boolean(&key, value)?,
            "workers" => self.workers = num(&key, value)?,
            "out" | "output" => self.output = Some(PathBuf::from(value)),
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Values of the swept quantity.
    pub fn sweep(&self) -> &[usize] {
        match self.experiment {
            ExperimentId::Tc1 => &self.layers,
            ExperimentId::Tc2 => &self.samples,
            ExperimentId::Tc3 => &self.observed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        let axis = self.experiment.axis();
        for (name, list) in [
            ("layers", &self.layers),
            ("samples", &self.samples),
            ("observed", &self.observed),
        ] {
            if list.is_empty() {
                return fail(format!("{name} must not be empty"));
            }
            if list.contains(&0) {
                return fail(format!("{name} values must be positive"));
            }
            let applies = name != "observed" || self.experiment == ExperimentId::Tc3;
            if applies && name != axis && list.len() > 1 {
                return fail(format!(
                    "{} sweeps {axis}; {name} must hold a single value",
                    self.experiment
                ));
            }
        }
        if self.n_nodes < 2 {
            return fail("n_nodes must be at least 2".into());
        }
        if self.n_realizations == 0 {
            return fail("n_realizations must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.er_p) || !(0.0..=1.0).contains(&self.rewire_p) {
            return fail("probabilities must lie in [0, 1]".into());
        }
        match self.experiment {
            ExperimentId::Tc1 | ExperimentId::Tc2 => {
                if self.n_hidden >= self.n_nodes {
                    return fail("n_hidden must be smaller than n_nodes".into());
                }
                if self.base_graph == BaseGraph::SmallWorld
                    && (self.neighbors < 2 || self.neighbors >= self.n_nodes)
                {
                    return fail("neighbors must lie in 2..n_nodes".into());
                }
            }
            ExperimentId::Tc3 => {
                if self.layer_files.is_empty() && !self.synthetic_substitute {
                    return fail("tc3 needs layer_files or synthetic_substitute = true".into());
                }
                if self.layer_files.is_empty() && self.observed.iter().any(|&o| o > self.n_nodes) {
                    return fail(format!(
                        "observed counts must not exceed n_nodes = {}",
                        self.n_nodes
                    ));
                }
            }
        }
        for (name, grid) in [
            ("rho_grid", &self.grid.rho),
            ("beta_grid", &self.grid.beta),
            ("eta_grid", &self.grid.eta),
        ] {
            if grid.is_empty() || grid.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return fail(format!(
                    "{name} must be a nonempty list of nonnegative numbers"
                ));
            }
        }
        let p = &self.precision;
        if !(p.weight_lo > 0.0 && p.weight_lo <= p.weight_hi && p.weight_hi.is_finite())
            || !(p.diag_margin > 0.0)
        {
            return fail("need 0 < weight_lo <= weight_hi and diag_margin > 0".into());
        }
        self.solver
            .validate()
            .map_err(|e| Error::Config(e.to_string()))
    }

    /// Canonical `key = value` dump; parsing it back yields the same config.
    pub fn to_text(&self) -> String {
        let list = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let flist = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut lines = vec![
            format!("experiment = {}", self.experiment),
            format!(
                "base_graph = {}",
                match self.base_graph {
                    BaseGraph::ErdosRenyi => "er",
                    BaseGraph::SmallWorld => "sw",
                }
            ),
            format!("n_nodes = {}", self.n_nodes),
            format!("er_p = {}", self.er_p),
            format!("neighbors = {}", self.neighbors),
            format!("rewire_p = {}", self.rewire_p),
            format!(
                "n_rewire = {}",
                self.n_rewire.map_or("auto".to_string(), |n| n.to_string())
            ),
            format!("n_hidden = {}", self.n_hidden),
            format!("layers = {}", list(&self.layers)),
            format!("samples = {}", list(&self.samples)),
            format!("observed = {}", list(&self.observed)),
            format!("n_realizations = {}", self.n_realizations),
            format!("base_seed = {}", self.base_seed),
            format!("rho_grid = {}", flist(&self.grid.rho)),
            format!("beta_grid = {}", flist(&self.grid.beta)),
            format!("eta_grid = {}", flist(&self.grid.eta)),
            format!("weight_lo = {}", self.precision.weight_lo),
            format!("weight_hi = {}", self.precision.weight_hi),
            format!("diag_margin = {}", self.precision.diag_margin),
            format!("step = {}", self.solver.step),
            format!("max_iters = {}", self.solver.max_iters),
            format!("tol_primal = {}", self.solver.tol_primal),
            format!("tol_dual = {}", self.solver.tol_dual),
            format!("adapt_step = {}", self.solver.adapt_step),
            format!("pd_floor = {}", self.solver.pd_floor),
            format!("penalize_diagonal = {}", self.solver.penalize_diagonal),
            format!(
                "admissible_set = {}",
                match self.solver.admissible_set {
                    AdmissibleSet::Symmetric => "symmetric",
                    AdmissibleSet::NonpositiveOffdiag => "nonpositive_offdiag",
                }
            ),
            format!("synthetic_substitute = {}", self.synthetic_substitute),
            format!("binarize = {}", self.binarize),
        ];
        if !self.layer_files.is_empty() {
            let files: Vec<String> = self
                .layer_files
                .iter()
                .map(|p| p.display().to_string())
                .collect();
            lines.push(format!("layer_files = {}", files.join(",")));
        }
        lines.join("\n") + "\n"
    }
}

fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn bad(key: &str, value: &str) -> Error {
    Error::Config(format!("invalid value '{value}' for {key}"))
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| bad(key, value))
}

fn boolean(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(bad(key, value)),
    }
}

fn int_list(key: &str, value: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once("..") {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (
                    num(key, a.trim())?,
                    num(key, b.trim_start_matches('=').trim())?,
                );
                if a > b {
                    return Err(bad(key, item));
                }
                out.extend(a..=b);
            }
            None => out.push(num(key, item)?),
        }
    }
    Ok(out)
}

fn float_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| num(key, s))
        .collect()
}
