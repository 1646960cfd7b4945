//! Set algebra in `Aff_d(F_p)`: product sets and growth, block views `L(A)` and
//! `R_M(A)`, the embedding `A_α` of `H × Spec_α(I)`, the iteration over the `α_j`
//! ladder with its restricted-product certificate, and the block-inequality verifiers.

mod blocks;
mod embed;
mod families;
mod growth;
mod iteration;
mod lemmas;
mod set;

pub use blocks::BlockView;
pub use embed::build_a_alpha;
pub use families::{
    coset_union, cyclic_subgroups, fitted_k, invariant_subspaces, semidirect, thickening,
};
pub use growth::{greedy_cover, growth_report, power_sizes, GrowthReport, COVER_SEARCH_LIMIT};
pub use iteration::{
    prop_p_iteration, IterationOptions, IterationReport, IterationSchedule, PairCertificate,
};
pub use lemmas::{
    block_observations_check, blocks_lemma_check, stab_lemma_check, translate_union_check,
    ApproxHypotheses, BlocksReport, ObservationsReport, StabReport, TranslateReport,
    TranslateUnion,
};
pub use set::{AffineSet, SetCaps, DEFAULT_SET_CAP, DEFAULT_WORK_CAP};
