use std::sync::Arc;

use serde::Serialize;

use super::config::{Family, InstanceConfig};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fp::{FpMatrix, FpVector, PrimeModulus};
use crate::group::{orbit_profile, InstanceProfile, MatrixGroup, OrbitSet};
use crate::random::{random_invertible, random_nonzero_vector, rng};

/// Draws of `M` for `cyclic-random` before giving up on a fixed point orbit.
pub const MAX_DRAWS: usize = 64;

/// A generated group, its orbit and the eagerly computed hyperplane profile.
#[derive(Clone, Debug)]
pub struct Instance {
    pub config: InstanceConfig,
    pub group: Arc<MatrixGroup>,
    pub orbit: OrbitSet,
    pub profile: InstanceProfile,
}

/// Summary used by the CLI `orbit` command.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitSummary {
    pub family: Family,
    pub p: u64,
    pub d: usize,
    pub group_order: usize,
    pub orbit_size: usize,
    pub points: Vec<Vec<u32>>,
}

impl Instance {
    pub fn modulus(&self) -> PrimeModulus {
        self.orbit.points().modulus()
    }

    pub fn summary(&self) -> OrbitSummary {
        OrbitSummary {
            family: self.config.family,
            p: self.config.p,
            d: self.config.d,
            group_order: self.group.order(),
            orbit_size: self.orbit.len(),
            points: self
                .orbit
                .points()
                .iter()
                .map(|x| x.coords().to_vec())
                .collect(),
        }
    }
}

fn shear(m: PrimeModulus, d: usize) -> FpMatrix {
    let mut e = vec![0i64; d * d];
    for i in 0..d {
        e[i * d + i] = 1;
    }
    e[1] = 1;
    FpMatrix::new(m, d, &e).expect("unipotent matrix is invertible")
}

/// `diag(1, …, g, g⁻¹, …, 1)` for each adjacent pair of coordinates.
fn torus_generators(m: PrimeModulus, d: usize) -> Vec<FpMatrix> {
    let g = m.primitive_root();
    let gi = m.inv(g).expect("primitive root is a unit");
    (0..d.saturating_sub(1))
        .map(|i| {
            let mut diag = vec![1i64; d];
            diag[i] = i64::from(g);
            diag[i + 1] = i64::from(gi);
            FpMatrix::diagonal(m, &diag)
        })
        .collect()
}

/// Builds the instance described by `cfg`.
///
/// `cyclic-random` seeds ChaCha8 with `cfg.seed`, draws `v` first when none is given,
/// then draws `M` until the orbit has more than one point, at most [`MAX_DRAWS`] times.
pub fn gen_instance(cfg: &InstanceConfig) -> Result<Instance> {
    let m = cfg.validate()?;
    let d = cfg.d;
    let given_v = cfg.v.as_ref().map(|v| FpVector::new(m, v));
    let cap = cfg.caps.group;
    let (group, v) = match cfg.family {
        Family::QuadraticResidue => {
            let g = m.primitive_root();
            let sq = FpMatrix::new(m, 1, &[i64::from(m.mul(g, g))])?;
            (
                MatrixGroup::generate(m, 1, &[sq], cap)?,
                given_v.unwrap_or_else(|| FpVector::new(m, &[1])),
            )
        }
        Family::DiagonalTorus => (
            MatrixGroup::generate(m, d, &torus_generators(m, d), cap)?,
            given_v.unwrap_or_else(|| FpVector::new(m, &vec![1; d])),
        ),
        Family::UnipotentCounterexample => (
            MatrixGroup::generate(m, d, &[shear(m, d)], cap)?,
            given_v.unwrap_or_else(|| FpVector::basis(m, d, 0)),
        ),
        Family::ExplicitGenerators => {
            let gens = cfg
                .gens
                .as_ref()
                .expect("validated")
                .iter()
                .map(|rows| FpMatrix::from_rows(m, rows))
                .collect::<Result<Vec<_>>>()?;
            (
                MatrixGroup::generate(m, d, &gens, cap)?,
                given_v.unwrap_or_else(|| FpVector::basis(m, d, 0)),
            )
        }
        Family::CyclicRandom => {
            let mut r = rng(cfg.seed);
            let v = match given_v {
                Some(v) => v,
                None => random_nonzero_vector(m, d, &mut r)?,
            };
            let mut found = None;
            for _ in 0..MAX_DRAWS {
                let mat = random_invertible(m, d, &mut r)?;
                let moved = if cfg.transposed {
                    mat.apply_transpose(&v)
                } else {
                    mat.apply(&v)
                };
                if moved != v {
                    found = Some(mat);
                    break;
                }
            }
            let mat = found.ok_or_else(|| {
                Error::Precondition(format!(
                    "no draw in {MAX_DRAWS} moved the base point (degenerate draws)"
                ))
            })?;
            (MatrixGroup::generate(m, d, &[mat], cap)?, v)
        }
    };
    let group = Arc::new(group);
    let orbit = OrbitSet::compute(group.clone(), &v, cfg.transposed)?;
    let profile = orbit_profile(&orbit, cfg.caps.space, Execution::Sequential)?;
    Ok(Instance {
        config: cfg.clone(),
        group,
        orbit,
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_residues_mod_7() {
        let inst = gen_instance(&InstanceConfig::new(Family::QuadraticResidue, 7, 1)).unwrap();
        assert_eq!(inst.group.order(), 3);
        assert_eq!(inst.orbit.points().indices(), &[1, 2, 4]);
        assert_eq!(inst.profile.beta_eff, 1.0);
    }

    #[test]
    fn unipotent_orbit_is_a_line() {
        let inst =
            gen_instance(&InstanceConfig::new(Family::UnipotentCounterexample, 11, 2)).unwrap();
        let expected: Vec<u64> = (0..11).map(|t| 11 + t).collect();
        assert_eq!(inst.orbit.points().indices(), expected.as_slice());
        assert_eq!(inst.profile.beta_eff, 0.0);
    }

    #[test]
    fn torus_orbit_mod_5() {
        let inst =
            gen_instance(&InstanceConfig::new(Family::DiagonalTorus, 5, 2).with_v(vec![1, 1]))
                .unwrap();
        let pts: Vec<(u32, u32)> = inst
            .orbit
            .points()
            .iter()
            .map(|x| (x.coords()[0], x.coords()[1]))
            .collect();
        assert_eq!(pts.len(), 4);
        assert!(pts.iter().all(|&(a, b)| a * b % 5 == 1));
    }

    #[test]
    fn cyclic_random_is_reproducible() {
        let cfg = InstanceConfig::new(Family::CyclicRandom, 11, 2).with_seed(3);
        let a = gen_instance(&cfg).unwrap();
        let b = gen_instance(&cfg).unwrap();
        assert_eq!(a.group.generators(), b.group.generators());
        assert_eq!(a.orbit.points(), b.orbit.points());
        assert!(a.orbit.len() > 1);
    }

    #[test]
    fn explicit_generators() {
        let cfg = InstanceConfig::new(Family::ExplicitGenerators, 5, 2)
            .with_gens(vec![vec![vec![1, 1], vec![0, 1]]]);
        let inst = gen_instance(&cfg).unwrap();
        assert_eq!(inst.group.order(), 5);
        assert_eq!(inst.orbit.len(), 5);
    }

    #[test]
    fn group_cap_is_reported() {
        let mut cfg = InstanceConfig::new(Family::QuadraticResidue, 101, 1);
        cfg.caps.group = 10;
        assert!(matches!(gen_instance(&cfg), Err(Error::CapExceeded { .. })));
    }
}
