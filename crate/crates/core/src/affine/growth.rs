use serde::Serialize;

use super::set::{AffineSet, SetCaps};
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Sizes of `A, A², A³` and a greedy covering number for `A² ⊆ XA`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub size: usize,
    pub size_sq: usize,
    pub size_cube: usize,
    /// `|A³| / |A|`.
    pub tripling: f64,
    /// `|X|` for the greedy `X`; an upper bound on the least `K` with `A² ⊆ XA`.
    pub covering_k: usize,
}

/// Above this `|A|²` only the plain scan runs in [`greedy_cover`].
pub const COVER_SEARCH_LIMIT: u64 = 50_000_000;

/// Upper bound on the least `|X|` with `A² ⊆ XA`, for `1 ∈ A`.
///
/// The plain scan walks `A²` in key order and, for each `y` not yet covered, adds
/// `y` to `X` and marks `yA ∩ A²` covered. When `|A|²` is at most
/// [`COVER_SEARCH_LIMIT`] two more passes run (forward and reverse order) that pick,
/// among the `x` with `y ∈ xA`, the one covering the most uncovered elements. Every
/// pass produces a valid `X`; the smallest is returned.
pub fn greedy_cover(a: &AffineSet, a2: &AffineSet) -> Result<usize> {
    if !a.contains_identity() {
        return Err(Error::Precondition("greedy cover needs 1 ∈ A".into()));
    }
    if a2.len() == a.len() {
        // 1 ∈ A gives A ⊆ A², so A² = A
        return Ok(1);
    }
    let codec = a.codec();
    let elems = a.elements();
    let inverses: Vec<_> = elems.iter().map(|g| g.inv()).collect();
    let targets = a2.elements();
    let coset = |x: &crate::group::AffineElement| -> Vec<usize> {
        elems
            .iter()
            .filter_map(|g| a2.keys().binary_search(&codec.encode(&x.mul(g))).ok())
            .collect()
    };
    let scan = |order: &mut dyn Iterator<Item = usize>, search: bool| -> usize {
        let mut covered = vec![false; targets.len()];
        let mut x_count = 0;
        for i in order {
            if covered[i] {
                continue;
            }
            x_count += 1;
            let y = &targets[i];
            let best = if search {
                inverses
                    .iter()
                    .map(|gi| coset(&y.mul(gi)))
                    .max_by_key(|c| c.iter().filter(|&&j| !covered[j]).count())
                    .expect("A is nonempty")
            } else {
                coset(y)
            };
            for j in best {
                covered[j] = true;
            }
        }
        x_count
    };
    let n = targets.len();
    let mut k = scan(&mut (0..n), false);
    if (elems.len() as u64).pow(2) <= COVER_SEARCH_LIMIT {
        k = k.min(scan(&mut (0..n), true));
        k = k.min(scan(&mut (0..n).rev(), true));
    }
    Ok(k)
}

/// Exact growth data for a symmetric `A ∋ 1`.
pub fn growth_report(a: &AffineSet, caps: SetCaps, exec: Execution) -> Result<GrowthReport> {
    if !a.contains_identity() || !a.is_symmetric() {
        return Err(Error::Precondition(
            "growth report needs 1 ∈ A and A = A⁻¹ (see AffineSet::symmetrized)".into(),
        ));
    }
    let a2 = a.product(a, caps, exec)?;
    let a3 = a2.product(a, caps, exec)?;
    let covering_k = greedy_cover(a, &a2)?;
    Ok(GrowthReport {
        size: a.len(),
        size_sq: a2.len(),
        size_cube: a3.len(),
        tripling: a3.len() as f64 / a.len() as f64,
        covering_k,
    })
}

/// `[|A|, |A²|, …, |A^m|]`.
pub fn power_sizes(a: &AffineSet, m: usize, caps: SetCaps, exec: Execution) -> Result<Vec<usize>> {
    let mut sizes = vec![a.len()];
    let mut acc = a.clone();
    for _ in 1..m {
        acc = acc.product(a, caps, exec)?;
        sizes.push(acc.len());
    }
    Ok(sizes)
}
