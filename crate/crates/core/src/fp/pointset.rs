use super::{FpVector, PrimeModulus};
use crate::error::{Error, Result};

/// A finite subset of `F_p^d`, stored as sorted rank indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointSet {
    modulus: PrimeModulus,
    dim: usize,
    indices: Vec<u64>,
}

impl PointSet {
    pub fn new(
        modulus: PrimeModulus,
        dim: usize,
        points: impl IntoIterator<Item = FpVector>,
    ) -> Result<Self> {
        if modulus.space_size(dim).is_none() {
            return Err(Error::InvalidArgument(format!(
                "p^d overflows for p={modulus}, d={dim}"
            )));
        }
        let mut indices = Vec::new();
        for x in points {
            if x.modulus() != modulus {
                return Err(Error::ModulusMismatch(modulus.get(), x.modulus().get()));
            }
            if x.dim() != dim {
                return Err(Error::DimensionMismatch(dim, x.dim()));
            }
            indices.push(x.rank_index());
        }
        indices.sort_unstable();
        indices.dedup();
        Ok(Self {
            modulus,
            dim,
            indices,
        })
    }

    /// Builds from rank indices (sorted and deduplicated here).
    pub fn from_indices(modulus: PrimeModulus, dim: usize, mut indices: Vec<u64>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self {
            modulus,
            dim,
            indices,
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn contains(&self, x: &FpVector) -> bool {
        self.indices.binary_search(&x.rank_index()).is_ok()
    }

    pub fn contains_index(&self, i: u64) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = FpVector> + '_ {
        self.indices
            .iter()
            .map(|&i| FpVector::from_index(self.modulus, self.dim, i))
    }

    pub fn to_vectors(&self) -> Vec<FpVector> {
        self.iter().collect()
    }

    pub fn intersection_len(&self, other: &PointSet) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < self.indices.len() && j < other.indices.len() {
            match self.indices[i].cmp(&other.indices[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    pub fn is_subset_of(&self, other: &PointSet) -> bool {
        self.intersection_len(other) == self.len()
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        let indices = self
            .indices
            .iter()
            .copied()
            .filter(|&i| other.contains_index(i))
            .collect();
        Self {
            modulus: self.modulus,
            dim: self.dim,
            indices,
        }
    }

    /// Sumset `self + other`.
    pub fn sumset(&self, other: &PointSet) -> PointSet {
        let a = self.to_vectors();
        let b = other.to_vectors();
        let idx = a
            .iter()
            .flat_map(|x| b.iter().map(move |y| x.add(y).rank_index()))
            .collect();
        Self::from_indices(self.modulus, self.dim, idx)
    }
}
