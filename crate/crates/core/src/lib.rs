//! Joint topology inference for related Gaussian graphical models with hidden nodes.
//!
//! The crate covers the full experimental pipeline: ground-truth graph families and
//! precision matrices ([`graph`]), GMRF sampling ([`sampling`]), the joint
//! latent-variable estimator with its GL/GGL/LVGL baselines ([`solvers`]), the
//! scale-invariant error metric ([`metrics`]), file formats ([`io`]) and the seeded
//! Monte Carlo experiments ([`experiments`]).

pub mod error;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod kernels;
pub mod metrics;
pub mod rng;
pub mod sampling;
pub mod solvers;

pub use error::{Error, Result};
pub use graph::{BlockPartition, Graph, MultiLayerFamily, PrecisionGraph};
pub use kernels::{EigenDecomp, PairWeights, SymMatrix};
pub use sampling::{ObservedCovariances, SampleSet};
pub use solvers::{JointEstimate, PenaltyWeights, SolverConfig};
