//! Exponential sums `S(ξ) = Σ_{x∈I} e_p(ξ·x)`, the full transform over `F_p^d`,
//! large spectra and the spectral verifiers.

mod chirp;
mod exact;
mod field;
mod level;
mod spectrum;
mod sums;
mod verify;

pub use chirp::ChirpTransform;
pub use exact::{CyclotomicEvaluator, EXACT_MAX_P, EXACT_PRECISION};
pub use field::{
    dft_full, DftAlgorithm, DftOptions, SpectrumField, DEFAULT_DFT_CAP, TOLERANCE_FACTOR,
};
pub use level::Level;
pub use spectrum::{
    max_nonzero_ratio, spec_alpha, spec_alpha_exact, spec_at, Spectrum, MARGIN_BAND,
};
pub use sums::{exp_sum, exp_sum_complex, CharacterTable};
pub use verify::{
    field_check, spec_difference_check, subspace_concentration_check, ConcentrationReport,
    DifferenceReport, FieldReport, DEFAULT_CONCENTRATION_CAP, DEFAULT_PAIR_CAP, PARSEVAL_TOLERANCE,
};
