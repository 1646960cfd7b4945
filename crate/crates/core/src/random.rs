//! Seeded randomness shared by instance generators and samplers.
//!
//! Every draw comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded through
//! `SeedableRng::seed_from_u64`. Bounded integers use `Rng::gen_range`, whose
//! widening-multiply rejection method is value-stable across platforms in rand 0.8,
//! so a seed reproduces the same instance everywhere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fp::{FpMatrix, FpVector, PrimeModulus};
use crate::group::AffineElement;

pub type LabRng = ChaCha8Rng;

/// Attempts before a rejection sampler gives up.
pub const MAX_REJECTIONS: usize = 10_000;

pub fn rng(seed: u64) -> LabRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector(modulus: PrimeModulus, d: usize, rng: &mut LabRng) -> FpVector {
    let p = modulus.as_u64() as i64;
    let coords: Vec<i64> = (0..d).map(|_| rng.gen_range(0..p)).collect();
    FpVector::new(modulus, &coords)
}

pub fn random_nonzero_vector(
    modulus: PrimeModulus,
    d: usize,
    rng: &mut LabRng,
) -> Result<FpVector> {
    for _ in 0..MAX_REJECTIONS {
        let v = random_vector(modulus, d, rng);
        if !v.is_zero() {
            return Ok(v);
        }
    }
    Err(Error::Precondition("no nonzero vector drawn".into()))
}

/// Uniform matrix from `GL_d(F_p)` by rejecting singular draws.
pub fn random_invertible(modulus: PrimeModulus, d: usize, rng: &mut LabRng) -> Result<FpMatrix> {
    let p = modulus.as_u64() as i64;
    for _ in 0..MAX_REJECTIONS {
        let entries: Vec<i64> = (0..d * d).map(|_| rng.gen_range(0..p)).collect();
        let m = FpMatrix::new(modulus, d, &entries)?;
        if m.is_invertible() {
            return Ok(m);
        }
    }
    Err(Error::Precondition("no invertible matrix drawn".into()))
}

pub fn random_affine(modulus: PrimeModulus, d: usize, rng: &mut LabRng) -> Result<AffineElement> {
    let m = random_invertible(modulus, d, rng)?;
    AffineElement::new(m, random_vector(modulus, d, rng))
}
