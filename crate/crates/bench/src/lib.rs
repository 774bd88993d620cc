//! Shared fixtures for the criterion benchmarks.

use ggm_core::graph::{
    choose_hidden, gen_erdos_renyi, gen_rewired_family, to_precision, PrecisionParams,
};
use ggm_core::rng::derive_seed;
use ggm_core::{MultiLayerFamily, ObservedCovariances, SampleSet, SymMatrix};

/// Sample covariances of a `k`-layer rewired ER family over `n` nodes with two hidden
/// nodes and 200 samples per layer.
pub fn covariances(n: usize, k: usize, seed: u64) -> ObservedCovariances {
    let base = gen_erdos_renyi(n, 0.15, derive_seed(seed, &[0])).expect("valid ER parameters");
    let n_rewire = base.edge_count().div_ceil(10);
    let graphs =
        gen_rewired_family(&base, k, n_rewire, derive_seed(seed, &[1])).expect("rewirable base");
    let layers = graphs
        .iter()
        .map(|g| to_precision(g, PrecisionParams::default(), derive_seed(seed, &[2])))
        .collect::<Result<Vec<_>, _>>()
        .expect("precision");
    let part = choose_hidden(n, 2, derive_seed(seed, &[3])).expect("partition");
    let family = MultiLayerFamily::new(layers, part).expect("family");
    SampleSet::draw(&family, 200, derive_seed(seed, &[4]))
        .and_then(|s| s.observed_covariances(&family.partition))
        .expect("samples")
}

/// A well-conditioned symmetric matrix with entries of unit order.
pub fn random_symmetric(n: usize, seed: u64) -> SymMatrix {
    covariances(n + 2, 1, seed).covs()[0].clone()
}
