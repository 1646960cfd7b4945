use super::{FpMatrix, FpVector, PrimeModulus};
use crate::error::{Error, Result};

/// A linear subspace of `F_p^d` held as a reduced row-echelon basis.
///
/// Two values describing the same subspace compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    modulus: PrimeModulus,
    ambient: usize,
    basis: Vec<FpVector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(modulus: PrimeModulus, ambient: usize) -> Self {
        Self {
            modulus,
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(modulus: PrimeModulus, ambient: usize) -> Self {
        Self {
            modulus,
            ambient,
            basis: (0..ambient)
                .map(|i| FpVector::basis(modulus, ambient, i))
                .collect(),
            pivots: (0..ambient).collect(),
        }
    }

    /// Span of the given vectors. All vectors must share modulus and dimension.
    pub fn span(modulus: PrimeModulus, ambient: usize, vectors: &[FpVector]) -> Result<Self> {
        for v in vectors {
            if v.modulus() != modulus {
                return Err(Error::ModulusMismatch(modulus.get(), v.modulus().get()));
            }
            if v.dim() != ambient {
                return Err(Error::DimensionMismatch(ambient, v.dim()));
            }
        }
        let mut rows: Vec<Vec<u32>> = vectors.iter().map(|v| v.coords().to_vec()).collect();
        let pivots = rref(modulus, ambient, &mut rows);
        let basis = rows
            .into_iter()
            .take(pivots.len())
            .map(|r| FpVector::from_reduced(modulus, r.into_iter().collect()))
            .collect();
        Ok(Self {
            modulus,
            ambient,
            basis,
            pivots,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn basis(&self) -> &[FpVector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// `p^dim`.
    pub fn size(&self) -> u64 {
        self.modulus.as_u64().pow(self.dim() as u32)
    }

    /// Canonical representative of `x + V`: the unique element with zero pivot coordinates.
    pub fn reduce(&self, x: &FpVector) -> FpVector {
        let mut out = x.clone();
        for (row, &c) in self.basis.iter().zip(&self.pivots) {
            let f = out.coords()[c];
            if f != 0 {
                out = out.sub(&row.scale(f));
            }
        }
        debug_assert!(self.pivots.iter().all(|&c| out.coords()[c] == 0));
        out
    }

    pub fn contains(&self, x: &FpVector) -> bool {
        self.reduce(x).is_zero()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    /// Orthogonal complement under the standard dot product.
    pub fn perp(&self) -> Subspace {
        let m = self.modulus;
        let d = self.ambient;
        let free: Vec<usize> = (0..d).filter(|c| !self.pivots.contains(c)).collect();
        let vectors: Vec<FpVector> = free
            .iter()
            .map(|&f| {
                let mut x = vec![0i64; d];
                x[f] = 1;
                for (row, &c) in self.basis.iter().zip(&self.pivots) {
                    x[c] = m.neg(row.coords()[f]) as i64;
                }
                FpVector::new(m, &x)
            })
            .collect();
        Subspace::span(m, d, &vectors).expect("same modulus")
    }

    /// One representative per coset of `F_p^d / V`, in rank order.
    pub fn coset_reps(&self) -> Vec<FpVector> {
        let m = self.modulus;
        let free: Vec<usize> = (0..self.ambient)
            .filter(|c| !self.pivots.contains(c))
            .collect();
        let count = m.as_u64().pow(free.len() as u32);
        (0..count)
            .map(|i| {
                let sub = FpVector::from_index(m, free.len(), i);
                let mut x = vec![0i64; self.ambient];
                for (&f, &c) in free.iter().zip(sub.coords()) {
                    x[f] = c as i64;
                }
                FpVector::new(m, &x)
            })
            .collect()
    }

    /// All `p^dim` elements.
    pub fn elements(&self) -> impl Iterator<Item = FpVector> + '_ {
        let m = self.modulus;
        let k = self.dim();
        (0..self.size()).map(move |i| {
            let coeffs = FpVector::from_index(m, k, i);
            self.basis
                .iter()
                .zip(coeffs.coords())
                .fold(FpVector::zero(m, self.ambient), |acc, (b, &c)| {
                    acc.add(&b.scale(c))
                })
        })
    }

    pub fn is_invariant_under(&self, mat: &FpMatrix) -> bool {
        self.basis.iter().all(|b| self.contains(&mat.apply(b)))
    }

    /// Every subspace of `F_p^d`, ordered by dimension then pivot pattern.
    pub fn enumerate_all(modulus: PrimeModulus, ambient: usize) -> Vec<Subspace> {
        let mut out = Vec::new();
        for k in 0..=ambient {
            for pivots in combinations(ambient, k) {
                // free slots: (row, col) with col > pivot and col not a pivot
                let slots: Vec<(usize, usize)> = pivots
                    .iter()
                    .enumerate()
                    .flat_map(|(r, &c)| {
                        let pivots = &pivots;
                        (c + 1..ambient)
                            .filter(move |j| !pivots.contains(j))
                            .map(move |j| (r, j))
                    })
                    .collect();
                let count = modulus.as_u64().pow(slots.len() as u32);
                for i in 0..count {
                    let fill = FpVector::from_index(modulus, slots.len(), i);
                    let mut rows = vec![vec![0u32; ambient]; k];
                    for (r, &c) in pivots.iter().enumerate() {
                        rows[r][c] = 1;
                    }
                    for (&(r, j), &v) in slots.iter().zip(fill.coords()) {
                        rows[r][j] = v;
                    }
                    out.push(Subspace {
                        modulus,
                        ambient,
                        basis: rows
                            .into_iter()
                            .map(|r| FpVector::from_reduced(modulus, r.into_iter().collect()))
                            .collect(),
                        pivots: pivots.clone(),
                    });
                }
            }
        }
        out
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// In-place reduced row echelon form; returns pivot columns. Nonzero rows come first.
pub(crate) fn rref(m: PrimeModulus, cols: usize, rows: &mut [Vec<u32>]) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = m.inv(rows[r][c]).expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            *x = m.mul(*x, inv);
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c] == 0 {
                continue;
            }
            let f = rows[i][c];
            for j in 0..cols {
                let sub = m.mul(f, rows[r][j]);
                rows[i][j] = m.sub(rows[i][j], sub);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> PrimeModulus {
        PrimeModulus::new(n).unwrap()
    }

    fn v(m: PrimeModulus, c: &[i64]) -> FpVector {
        FpVector::new(m, c)
    }

    #[test]
    fn axis_perp() {
        let m = p(5);
        let s = Subspace::span(m, 2, &[v(m, &[1, 0])]).unwrap();
        assert_eq!(s.perp(), Subspace::span(m, 2, &[v(m, &[0, 1])]).unwrap());
    }

    #[test]
    fn diagonal_perp_mod_three() {
        let m = p(3);
        let s = Subspace::span(m, 2, &[v(m, &[1, 1])]).unwrap();
        let perp = s.perp();
        assert_eq!(perp.basis(), &[v(m, &[1, 2])]);
        // exhaustive oracle: perp is exactly the set of x with x·(1,1)=0
        let brute: Vec<FpVector> = super::super::all_vectors(m, 2)
            .filter(|x| x.dot(&v(m, &[1, 1])) == 0)
            .collect();
        let mut elems: Vec<FpVector> = perp.elements().collect();
        elems.sort();
        assert_eq!(elems, brute);
    }

    #[test]
    fn coset_reps_of_second_axis() {
        let m = p(5);
        let s = Subspace::span(m, 2, &[v(m, &[0, 1])]).unwrap();
        let reps = s.coset_reps();
        let want: Vec<FpVector> = (0..5).map(|a| v(m, &[a, 0])).collect();
        assert_eq!(reps, want);
    }

    #[test]
    fn canonical_form_is_unique() {
        let m = p(7);
        let a = Subspace::span(m, 3, &[v(m, &[1, 2, 3]), v(m, &[0, 1, 1])]).unwrap();
        let b = Subspace::span(
            m,
            3,
            &[v(m, &[1, 3, 4]), v(m, &[2, 4, 6]), v(m, &[0, 0, 0])],
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
    }

    #[test]
    fn subspace_counts_match_gaussian_binomials() {
        // F_3^2: 1 + 4 + 1; F_3^3: 1 + 13 + 13 + 1
        assert_eq!(Subspace::enumerate_all(p(3), 2).len(), 6);
        assert_eq!(Subspace::enumerate_all(p(3), 3).len(), 28);
        assert_eq!(Subspace::enumerate_all(p(11), 2).len(), 14);
    }

    #[test]
    fn zero_and_full_are_complementary() {
        let m = p(5);
        assert_eq!(Subspace::zero(m, 3).perp(), Subspace::full(m, 3));
        assert_eq!(Subspace::full(m, 3).perp(), Subspace::zero(m, 3));
        assert_eq!(Subspace::zero(m, 3).coset_reps().len(), 125);
    }
}
