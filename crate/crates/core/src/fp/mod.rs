//! Exact arithmetic and linear algebra over a prime field `F_p`.

mod hyperplane;
mod matrix;
mod modulus;
mod pointset;
mod subspace;
mod vector;

pub use hyperplane::{hyperplane_count, hyperplane_enumerate, normal_classes, AffineHyperplane};
pub use matrix::FpMatrix;
pub use modulus::{is_prime, PrimeModulus};
pub use pointset::PointSet;
pub use subspace::Subspace;
pub use vector::{all_vectors, FpVector};
