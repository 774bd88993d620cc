//! Dense symmetric linear algebra and the proximal operators the solvers are built from.

mod prox;
mod sym;

pub(crate) use prox::{fused_prox_per_layer, group_prox_in_place};
pub use prox::{
    group_soft_threshold, prox_fused_l1, prox_logdet, prox_psd_trace, soft, soft_threshold,
    PairWeights,
};
pub(crate) use sym::symmetrize_in_place;
pub use sym::{eigh, EigenDecomp, SymMatrix};
