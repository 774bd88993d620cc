//! Seeded Monte Carlo reproductions of the three benchmark test cases.
//!
//! Every realization is generated from `derive_seed(base_seed, [sweep index,
//! realization index])`, so all four methods see identical data and the results do
//! not depend on the number of worker threads. Penalty weights are picked once per
//! sweep value by grid search on an extra held-out realization.

mod config;
mod table;

pub use config::{BaseGraph, ExperimentConfig, ExperimentId, GridSpec};
pub use table::{
    emit_csv, format_csv, format_manifest, manifest_path, median, write_manifest, Method,
    ResultRow, ResultTable, RunManifest, Selection,
};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{
    choose_hidden, gen_erdos_renyi, gen_rewired_family, gen_small_world, to_precision, Graph,
    MultiLayerFamily,
};
use crate::kernels::SymMatrix;
use crate::metrics::mean_normalized_error;
use crate::rng::derive_seed;
use crate::sampling::{ObservedCovariances, SampleSet};
use crate::solvers::{solve_ggl, solve_joint_hidden, PenaltyWeights, SolverConfig};

const HELDOUT: u64 = u64::MAX;
const SUBSTITUTE: u64 = u64::MAX - 1;

/// Observed covariances of one realization and the matching true observed precisions.
#[derive(Clone, Debug)]
pub struct Instance {
    pub covs: ObservedCovariances,
    pub truth: Vec<SymMatrix>,
}

/// Penalty weights of one method run; `beta` and `eta` are unused by the methods
/// that have no such term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hyper {
    pub rho: f64,
    pub beta: f64,
    pub eta: f64,
}

pub fn run_test_case_1(cfg: &ExperimentConfig) -> Result<ResultTable> {
    expect(cfg, ExperimentId::Tc1)?;
    run_experiment(cfg)
}

pub fn run_test_case_2(cfg: &ExperimentConfig) -> Result<ResultTable> {
    expect(cfg, ExperimentId::Tc2)?;
    run_experiment(cfg)
}

pub fn run_test_case_3(cfg: &ExperimentConfig) -> Result<ResultTable> {
    expect(cfg, ExperimentId::Tc3)?;
    run_experiment(cfg)
}

fn expect(cfg: &ExperimentConfig, id: ExperimentId) -> Result<()> {
    if cfg.experiment != id {
        return Err(Error::Config(format!(
            "expected a {id} config, got {}",
            cfg.experiment
        )));
    }
    Ok(())
}

/// Runs whichever experiment `cfg` describes.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_in_pool(cfg))
}

fn run_in_pool(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let supports = match cfg.experiment {
        ExperimentId::Tc3 => Some(fixed_supports(cfg)?),
        _ => None,
    };
    if let Some(g) = &supports {
        let n = g[0].n_nodes();
        if let Some(o) = cfg.observed.iter().find(|&&o| o > n) {
            return Err(Error::Config(format!(
                "observed = {o} exceeds the {n} network nodes"
            )));
        }
    }
    let supports = supports.as_deref();
    let sweep = cfg.sweep();

    let mut selections = Vec::with_capacity(sweep.len());
    let mut tuning_invocations = 0;
    for (si, &x) in sweep.iter().enumerate() {
        let heldout = build_instance(
            cfg,
            supports,
            x,
            derive_seed(cfg.base_seed, &[si as u64, HELDOUT]),
        )?;
        let (sel, count) = select(cfg, &heldout)?;
        tuning_invocations += count;
        selections.push((x, sel));
    }

    let tasks: Vec<(usize, usize)> = (0..sweep.len())
        .flat_map(|si| (0..cfg.n_realizations).map(move |r| (si, r)))
        .collect();
    let outcomes = tasks
        .par_iter()
        .map(|&(si, r)| {
            let x = sweep[si];
            let inst = build_instance(
                cfg,
                supports,
                x,
                derive_seed(cfg.base_seed, &[si as u64, r as u64]),
            )?;
            let sel = &selections[si].1;
            let mut out = [(0.0, true); 4];
            for m in Method::ALL {
                let s = sel[m.index()];
                let h = Hyper {
                    rho: s.rho,
                    beta: s.beta.unwrap_or(0.0),
                    eta: s.eta.unwrap_or(0.0),
                };
                out[m.index()] = run_method(m, h, &inst, &cfg.solver)?;
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows: Vec<ResultRow> = sweep
        .iter()
        .map(|&x| ResultRow {
            xaxis: x,
            errors: Default::default(),
        })
        .collect();
    let mut nonconverged = [0; 4];
    let mut solver_invocations = 0;
    for (&(si, _), out) in tasks.iter().zip(&outcomes) {
        for m in Method::ALL {
            let (err, converged) = out[m.index()];
            rows[si].errors[m.index()].push(err);
            nonconverged[m.index()] += usize::from(!converged);
            solver_invocations += 1;
        }
    }
    Ok(ResultTable {
        experiment: cfg.experiment,
        rows,
        manifest: RunManifest {
            config: cfg.to_text(),
            selections,
            solver_invocations,
            tuning_invocations,
            nonconverged,
        },
    })
}

fn fixed_supports(cfg: &ExperimentConfig) -> Result<Vec<Graph>> {
    if !cfg.layer_files.is_empty() {
        return crate::io::load_multilayer(&cfg.layer_files, cfg.binarize);
    }
    synthetic_network(
        cfg.n_nodes,
        cfg.layers[0],
        derive_seed(cfg.base_seed, &[SUBSTITUTE]),
    )
}

/// Stand-in for a real multilayer network: a small-world base graph (4 ring
/// neighbors, rewiring probability 0.15) and `k - 1` rewired copies.
pub fn synthetic_network(n: usize, k: usize, seed: u64) -> Result<Vec<Graph>> {
    let base = gen_small_world(n, 4, 0.15, derive_seed(seed, &[0]))?;
    gen_rewired_family(
        &base,
        k,
        default_n_rewire(base.edge_count()),
        derive_seed(seed, &[1]),
    )
}

/// 10% of the edges, rounded up.
pub fn default_n_rewire(edges: usize) -> usize {
    edges.div_ceil(10)
}

/// Generates one realization at sweep value `x`. `supports` holds the fixed layer
/// graphs of the multilayer-network experiment.
pub fn build_instance(
    cfg: &ExperimentConfig,
    supports: Option<&[Graph]>,
    x: usize,
    seed: u64,
) -> Result<Instance> {
    let sub = |i: u64| derive_seed(seed, &[i]);
    let (graphs, partition) = match (cfg.experiment, supports) {
        (ExperimentId::Tc3, Some(graphs)) => {
            let n = graphs[0].n_nodes();
            (graphs.to_vec(), choose_hidden(n, n - x, sub(2))?)
        }
        (ExperimentId::Tc3, None) => {
            return Err(Error::invalid("network experiment needs layer graphs"))
        }
        (id, _) => {
            let k = if id == ExperimentId::Tc1 {
                x
            } else {
                cfg.layers[0]
            };
            let base = match cfg.base_graph {
                BaseGraph::ErdosRenyi => gen_erdos_renyi(cfg.n_nodes, cfg.er_p, sub(0))?,
                BaseGraph::SmallWorld => {
                    gen_small_world(cfg.n_nodes, cfg.neighbors, cfg.rewire_p, sub(0))?
                }
            };
            let n_rewire = cfg
                .n_rewire
                .unwrap_or_else(|| default_n_rewire(base.edge_count()));
            let graphs = gen_rewired_family(&base, k, n_rewire, sub(1))?;
            (graphs, choose_hidden(cfg.n_nodes, cfg.n_hidden, sub(2))?)
        }
    };
    let m = if cfg.experiment == ExperimentId::Tc2 {
        x
    } else {
        cfg.samples[0]
    };
    // One weight seed for all layers: edges shared between layers share their weight.
    let layers = graphs
        .iter()
        .map(|g| to_precision(g, cfg.precision, sub(3)))
        .collect::<Result<Vec<_>>>()?;
    let family = MultiLayerFamily::new(layers, partition)?;
    let samples = SampleSet::draw(&family, m, sub(4))?;
    Ok(Instance {
        covs: samples.observed_covariances(&family.partition)?,
        truth: family.observed_truth()?,
    })
}

/// Runs one method and scores it; returns the mean normalized error and whether
/// every underlying solve converged.
pub fn run_method(
    method: Method,
    h: Hyper,
    inst: &Instance,
    cfg: &SolverConfig,
) -> Result<(f64, bool)> {
    let covs = &inst.covs;
    let k = covs.num_layers();
    let mut converged = true;
    let est: Vec<SymMatrix> = match method {
        Method::Gl => (0..k)
            .map(|l| {
                let e = solve_ggl(&covs.layer(l), h.rho, 0.0, cfg)?;
                converged &= e.converged;
                Ok(e.s_hat.into_iter().next().expect("one layer"))
            })
            .collect::<Result<_>>()?,
        Method::Ggl => {
            let e = solve_ggl(covs, h.rho, h.rho * h.eta, cfg)?;
            converged = e.converged;
            e.s_hat
        }
        Method::Lvgl => (0..k)
            .map(|l| {
                let w = PenaltyWeights::tied(1, h.rho, h.beta, 0.0, 0.0)?;
                let e = solve_joint_hidden(&covs.layer(l), &w, cfg)?;
                converged &= e.converged;
                Ok(e.s_hat.into_iter().next().expect("one layer"))
            })
            .collect::<Result<_>>()?,
        Method::Joint => {
            let w = PenaltyWeights::tied(k, h.rho, h.beta, h.rho * h.eta, h.beta * h.eta)?;
            let e = solve_joint_hidden(covs, &w, cfg)?;
            converged = e.converged;
            e.s_hat
        }
    };
    Ok((mean_normalized_error(&est, &inst.truth)?, converged))
}

/// Grid candidates of one method. With a single layer the fusion weight has no
/// effect, so only the first `eta` is tried.
pub fn candidates(method: Method, grid: &GridSpec, n_layers: usize) -> Vec<Hyper> {
    let etas: &[f64] = if n_layers > 1 {
        &grid.eta
    } else {
        &grid.eta[..1]
    };
    let mut out = Vec::new();
    for &rho in &grid.rho {
        match method {
            Method::Gl => out.push(Hyper {
                rho,
                beta: 0.0,
                eta: 0.0,
            }),
            Method::Ggl => out.extend(etas.iter().map(|&eta| Hyper {
                rho,
                beta: 0.0,
                eta,
            })),
            Method::Lvgl => out.extend(grid.beta.iter().map(|&beta| Hyper {
                rho,
                beta,
                eta: 0.0,
            })),
            Method::Joint => {
                for &beta in &grid.beta {
                    out.extend(etas.iter().map(|&eta| Hyper { rho, beta, eta }));
                }
            }
        }
    }
    out
}

/// Best grid point per method on `inst` (first minimum in grid order), plus the
/// number of method runs spent.
fn select(cfg: &ExperimentConfig, inst: &Instance) -> Result<([Selection; 4], usize)> {
    let k = inst.covs.num_layers();
    let jobs: Vec<(Method, Hyper)> = Method::ALL
        .iter()
        .flat_map(|&m| candidates(m, &cfg.grid, k).into_iter().map(move |h| (m, h)))
        .collect();
    let scores: Vec<f64> = jobs
        .par_iter()
        .map(|&(m, h)| match run_method(m, h, inst, &cfg.solver) {
            Ok((e, _)) if e.is_finite() => e,
            _ => f64::INFINITY,
        })
        .collect();
    let mut best: [Option<Selection>; 4] = [None; 4];
    for (&(m, h), &err) in jobs.iter().zip(&scores) {
        let slot = &mut best[m.index()];
        if slot.is_none_or(|s| err < s.heldout_error) {
            *slot = Some(Selection {
                rho: h.rho,
                beta: matches!(m, Method::Lvgl | Method::Joint).then_some(h.beta),
                eta: (matches!(m, Method::Ggl | Method::Joint) && k > 1).then_some(h.eta),
                heldout_error: err,
            });
        }
    }
    let mut out = [Selection {
        rho: 0.0,
        beta: None,
        eta: None,
        heldout_error: 0.0,
    }; 4];
    for m in Method::ALL {
        let s = best[m.index()].expect("grid is nonempty");
        if !s.heldout_error.is_finite() {
            return Err(Error::numerical(format!(
                "every {} grid point failed on the held-out realization",
                m.name()
            )));
        }
        out[m.index()] = s;
    }
    Ok((out, jobs.len()))
}
