//! Computations in the completions `O_p`, carried out in `O / p^k O`.

mod eichler;
mod embed;
mod fp;
mod norms;
mod residue;
mod units;

pub use eichler::{eichler_invariant, jacobson_radical};
pub use embed::{
    embed_precision, guo_qin_test, has_local_embedding, local_embed_count, local_embed_count_at, local_embed_count_with,
    optimality_defect,
};
pub use fp::{kernel, Subspace};
pub use norms::{
    embedding_norm_group, local_profile, normalizer_norms, normalizer_norms_closed_form, unit_norms,
    EmbeddingNorms, LocalProfile, NormalizerNorms,
};
pub use residue::{snf_mod, solve_mod, ResidueAlgebra, Vec4};
pub use units::{certify_locally_principal, unit_index};
