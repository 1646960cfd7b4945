use super::{FpVector, PrimeModulus};
use crate::error::{Error, Result};

/// `{x : normal·x = offset}` with the normal scaled so its first nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineHyperplane {
    normal: FpVector,
    offset: u32,
}

impl AffineHyperplane {
    /// Normalizes `(normal, offset)` to the canonical representative of its scalar class.
    pub fn new(normal: &FpVector, offset: i64) -> Result<Self> {
        let lead = *normal
            .coords()
            .iter()
            .find(|&&c| c != 0)
            .ok_or(Error::ZeroVector)?;
        let m = normal.modulus();
        let s = m.inv(lead).expect("nonzero");
        Ok(Self {
            normal: normal.scale(s),
            offset: m.mul(m.reduce(offset), s),
        })
    }

    pub fn normal(&self) -> &FpVector {
        &self.normal
    }

    pub fn offset(&self) -> u32 {
        self.offset
    }

    pub fn contains(&self, x: &FpVector) -> bool {
        self.normal.dot(x) == self.offset
    }
}

/// Normalized normals: one per line through the origin of the dual space.
/// There are `(p^d − 1)/(p − 1)` of them.
pub fn normal_classes(modulus: PrimeModulus, d: usize) -> impl Iterator<Item = FpVector> {
    (0..d).flat_map(move |lead| {
        let tail = d - lead - 1;
        let count = modulus.as_u64().pow(tail as u32);
        (0..count).map(move |i| {
            let rest = FpVector::from_index(modulus, tail, i);
            let mut c = vec![0i64; d];
            c[lead] = 1;
            for (slot, &x) in c[lead + 1..].iter_mut().zip(rest.coords()) {
                *slot = x as i64;
            }
            FpVector::new(modulus, &c)
        })
    })
}

/// Every affine hyperplane of `F_p^d` exactly once, normal class major, offset minor.
pub fn hyperplane_enumerate(
    modulus: PrimeModulus,
    d: usize,
    cap: u64,
) -> Result<impl Iterator<Item = AffineHyperplane>> {
    if d == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    let size = modulus.space_size(d).unwrap_or(u64::MAX);
    if size > cap {
        return Err(Error::cap("hyperplane enumeration (p^d)", cap, size));
    }
    let p = modulus.get();
    Ok(normal_classes(modulus, d).flat_map(move |n| {
        (0..p).map(move |c| AffineHyperplane {
            normal: n.clone(),
            offset: c,
        })
    }))
}

pub fn hyperplane_count(modulus: PrimeModulus, d: usize) -> u64 {
    let p = modulus.as_u64();
    (p.pow(d as u32) - 1) / (p - 1) * p
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::fp::all_vectors;

    fn p(n: u64) -> PrimeModulus {
        PrimeModulus::new(n).unwrap()
    }

    /// Dedup oracle: hyperplanes as point sets, from every nonzero (normal, offset).
    fn brute_force_count(m: PrimeModulus, d: usize) -> usize {
        let mut seen = HashSet::new();
        for n in all_vectors(m, d).filter(|n| !n.is_zero()) {
            for c in 0..m.get() {
                let pts: Vec<u64> = all_vectors(m, d)
                    .filter(|x| n.dot(x) == c)
                    .map(|x| x.rank_index())
                    .collect();
                seen.insert(pts);
            }
        }
        seen.len()
    }

    #[test]
    fn counts_match_formula_and_dedup_oracle() {
        for (n, d, want) in [(3, 1, 3), (3, 2, 12), (5, 2, 30), (3, 3, 39)] {
            let m = p(n);
            let got: Vec<_> = hyperplane_enumerate(m, d, 1 << 20).unwrap().collect();
            assert_eq!(got.len(), want);
            assert_eq!(hyperplane_count(m, d), want as u64);
            assert_eq!(brute_force_count(m, d), want);
            let uniq: HashSet<_> = got.iter().collect();
            assert_eq!(uniq.len(), got.len());
        }
    }

    #[test]
    fn cap_guard() {
        assert!(matches!(
            hyperplane_enumerate(p(101), 3, 1000),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn new_normalizes() {
        let m = p(5);
        let h = AffineHyperplane::new(&FpVector::new(m, &[2, 4]), 1).unwrap();
        assert_eq!(h.normal().coords(), &[1, 2]);
        assert_eq!(h.offset(), 3);
        assert!(AffineHyperplane::new(&FpVector::zero(m, 2), 0).is_err());
    }
}
