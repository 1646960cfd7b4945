use indexmap::IndexSet;

use super::closure::close;
use crate::error::{Error, Result};
use crate::fp::{FpMatrix, FpVector, PrimeModulus};

/// Default bound on materialized group elements.
pub const DEFAULT_GROUP_CAP: usize = 2_000_000;

/// A finite subgroup of `GL_d(F_p)` with all elements materialized.
#[derive(Clone, Debug)]
pub struct MatrixGroup {
    modulus: PrimeModulus,
    dim: usize,
    generators: Vec<FpMatrix>,
    elements: IndexSet<FpMatrix>,
}

impl MatrixGroup {
    /// Closes `gens` under multiplication. Fails once more than `cap` elements are found.
    pub fn generate(
        modulus: PrimeModulus,
        dim: usize,
        gens: &[FpMatrix],
        cap: usize,
    ) -> Result<Self> {
        for g in gens {
            if g.modulus() != modulus {
                return Err(Error::ModulusMismatch(modulus.get(), g.modulus().get()));
            }
            if g.dim() != dim {
                return Err(Error::DimensionMismatch(dim, g.dim()));
            }
            if !g.is_invertible() {
                return Err(Error::SingularMatrix);
            }
        }
        let elements = close(FpMatrix::identity(modulus, dim), gens, cap)?;
        Ok(Self {
            modulus,
            dim,
            generators: gens.to_vec(),
            elements,
        })
    }

    pub fn trivial(modulus: PrimeModulus, dim: usize) -> Self {
        Self::generate(modulus, dim, &[], 1).expect("trivial group")
    }

    /// Wraps a set already known to be a subgroup (e.g. a stabilizer).
    pub(crate) fn from_closed(
        modulus: PrimeModulus,
        dim: usize,
        elements: IndexSet<FpMatrix>,
    ) -> Self {
        Self {
            modulus,
            dim,
            generators: elements.iter().cloned().collect(),
            elements,
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[FpMatrix] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &IndexSet<FpMatrix> {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = &FpMatrix> {
        self.elements.iter()
    }

    pub fn contains(&self, m: &FpMatrix) -> bool {
        self.elements.contains(m)
    }

    pub fn identity(&self) -> FpMatrix {
        FpMatrix::identity(self.modulus, self.dim)
    }

    /// `{M ∈ H : M ξ = ξ}`.
    pub fn stabilizer(&self, xi: &FpVector) -> Result<MatrixGroup> {
        self.check_vector(xi)?;
        if xi.is_zero() {
            return Err(Error::ZeroVector);
        }
        let elements = self
            .elements
            .iter()
            .filter(|m| &m.apply(xi) == xi)
            .cloned()
            .collect();
        Ok(Self::from_closed(self.modulus, self.dim, elements))
    }

    /// Stabilizer of `v` under `M ↦ M^T v` when `transposed`, else under `M ↦ M v`.
    pub fn stabilizer_under(&self, v: &FpVector, transposed: bool) -> Result<MatrixGroup> {
        if !transposed {
            return self.stabilizer(v);
        }
        self.check_vector(v)?;
        if v.is_zero() {
            return Err(Error::ZeroVector);
        }
        let elements = self
            .elements
            .iter()
            .filter(|m| &m.apply_transpose(v) == v)
            .cloned()
            .collect();
        Ok(Self::from_closed(self.modulus, self.dim, elements))
    }

    pub(crate) fn check_vector(&self, v: &FpVector) -> Result<()> {
        if v.modulus() != self.modulus {
            return Err(Error::ModulusMismatch(
                self.modulus.get(),
                v.modulus().get(),
            ));
        }
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, v.dim()));
        }
        Ok(())
    }

    /// Checks closure under products and inverses; used by tests and probes.
    pub fn is_closed(&self) -> bool {
        self.elements.contains(&self.identity())
            && self.elements.iter().all(|a| {
                self.elements.contains(&a.inverse().expect("group element"))
                    && self
                        .generators
                        .iter()
                        .all(|g| self.elements.contains(&a.mul(g)))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> PrimeModulus {
        PrimeModulus::new(n).unwrap()
    }

    #[test]
    fn powers_of_two_mod_seven() {
        let m = p(7);
        let g = FpMatrix::new(m, 1, &[2]).unwrap();
        let h = MatrixGroup::generate(m, 1, &[g], 100).unwrap();
        let mut elems: Vec<u32> = h.iter().map(|x| x.entry(0, 0)).collect();
        elems.sort();
        assert_eq!(elems, vec![1, 2, 4]);
    }

    #[test]
    fn identity_generates_trivial_group() {
        let m = p(5);
        let h = MatrixGroup::generate(m, 2, &[FpMatrix::identity(m, 2)], 10).unwrap();
        assert_eq!(h.order(), 1);
    }

    #[test]
    fn quarter_turn_has_order_four() {
        let m = p(5);
        let g = FpMatrix::from_rows(m, &[vec![0, 4], vec![1, 0]]).unwrap();
        let h = MatrixGroup::generate(m, 2, &[g], 100).unwrap();
        assert_eq!(h.order(), 4);
        assert!(h.is_closed());
    }

    #[test]
    fn cap_reports_partial_size() {
        let m = p(101);
        let g = FpMatrix::new(m, 1, &[2]).unwrap();
        match MatrixGroup::generate(m, 1, &[g], 10) {
            Err(Error::CapExceeded { reached, cap, .. }) => {
                assert_eq!(cap, 10);
                assert_eq!(reached, 11);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn singular_generator_rejected() {
        let m = p(5);
        let g = FpMatrix::from_rows(m, &[vec![1, 1], vec![1, 1]]).unwrap();
        assert!(matches!(
            MatrixGroup::generate(m, 2, &[g], 10),
            Err(Error::SingularMatrix)
        ));
    }

    #[test]
    fn torus_stabilizer_is_trivial() {
        let m = p(5);
        let h = MatrixGroup::generate(m, 2, &[FpMatrix::diagonal(m, &[2, 3])], 100).unwrap();
        assert_eq!(h.order(), 4);
        let s = h.stabilizer(&FpVector::new(m, &[1, 0])).unwrap();
        assert_eq!(s.order(), 1);
        assert!(h.stabilizer(&FpVector::zero(m, 2)).is_err());
    }
}
