//! Matrix groups acting on `F_p^d`: closure, orbits, stabilizers, hyperplane
//! profiles, and the affine group with its commutator calculus.

mod affine_element;
mod central_series;
pub mod closure;
mod matrix_group;
mod orbit;
mod profile;

pub use affine_element::{commutator, AffineElement};
pub use central_series::{
    lower_central_probe, SeriesLevel, SeriesOutcome, SeriesReport, FULL_PAIR_LIMIT,
};
pub use closure::GroupElement;
pub use matrix_group::{MatrixGroup, DEFAULT_GROUP_CAP};
pub use orbit::OrbitSet;
pub use profile::{
    hyperplane_profile, orbit_profile, stab_chain_check, InstanceProfile, StabChainReport,
};
