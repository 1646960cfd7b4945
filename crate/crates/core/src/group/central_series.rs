use indexmap::IndexSet;
use serde::Serialize;

use super::closure::{close, greedy_generators, normal_closure, GroupElement};
use super::AffineElement;
use crate::error::{Error, Result};

/// Above this many pairs `(a, b) ∈ H₂ × W_i` the probe switches from all pairwise
/// commutators to generator commutators plus normal closure.
pub const FULL_PAIR_LIMIT: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesLevel {
    pub index: usize,
    pub size: usize,
    /// `W_i` contains some `(I, ξ)`, `ξ ≠ 0`, that is not in `H₁`.
    pub translation_outside_h1: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SeriesOutcome {
    /// `W_depth` is trivial: the group is nilpotent of this class.
    Terminates {
        depth: usize,
    },
    /// `W_{at+1} = W_at ≠ 1`: the series never reaches the trivial group.
    StabilizesNontrivial {
        at: usize,
        size: usize,
    },
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesReport {
    pub levels: Vec<SeriesLevel>,
    pub outcome: SeriesOutcome,
}

impl SeriesReport {
    pub fn is_nilpotent(&self) -> Option<bool> {
        match self.outcome {
            SeriesOutcome::Terminates { .. } => Some(true),
            SeriesOutcome::StabilizesNontrivial { .. } => Some(false),
            SeriesOutcome::Undecided => None,
        }
    }
}

/// Lower central series `W₀ = H₂`, `W_{i+1} = [H₂, W_i]`, computed up to `depth` steps.
pub fn lower_central_probe(
    h2: &[AffineElement],
    h1: &[AffineElement],
    depth: usize,
    cap: usize,
) -> Result<SeriesReport> {
    let first = h2
        .first()
        .ok_or_else(|| Error::Precondition("H2 must be nonempty".into()))?;
    let identity = AffineElement::identity(first.modulus(), first.dim());
    let h2_set: IndexSet<AffineElement> = h2.iter().cloned().collect();
    let h1_set: IndexSet<AffineElement> = h1.iter().cloned().collect();
    check_group(&identity, &h2_set, "H2", cap)?;
    check_group(&identity, &h1_set, "H1", cap)?;
    if !h1_set.iter().all(|x| h2_set.contains(x)) {
        return Err(Error::Precondition("H1 is not contained in H2".into()));
    }

    let h2_gens = greedy_generators(&identity, &h2_set, cap)?;
    let level = |i: usize, w: &IndexSet<AffineElement>| SeriesLevel {
        index: i,
        size: w.len(),
        translation_outside_h1: w
            .iter()
            .any(|x| x.is_pure_translation() && !h1_set.contains(x)),
    };

    let mut current = h2_set.clone();
    let mut current_gens = h2_gens.clone();
    let mut levels = vec![level(0, &current)];
    if current.len() == 1 {
        return Ok(SeriesReport {
            levels,
            outcome: SeriesOutcome::Terminates { depth: 0 },
        });
    }
    for i in 0..depth {
        let (next_gens, next) = if h2_set.len().saturating_mul(current.len()) <= FULL_PAIR_LIMIT {
            let comms: IndexSet<AffineElement> = h2_set
                .iter()
                .flat_map(|a| current.iter().map(move |b| a.commutator(b)))
                .filter(|c| !c.is_identity())
                .collect();
            let gens: Vec<AffineElement> = comms.into_iter().collect();
            let group = close(identity.clone(), &gens, cap)?;
            (gens, group)
        } else {
            let seeds: Vec<AffineElement> = h2_gens
                .iter()
                .flat_map(|a| current_gens.iter().map(move |b| a.commutator(b)))
                .filter(|c| !c.is_identity())
                .collect();
            normal_closure(&identity, seeds, &h2_gens, cap)?
        };
        levels.push(level(i + 1, &next));
        if next.len() == 1 {
            return Ok(SeriesReport {
                levels,
                outcome: SeriesOutcome::Terminates { depth: i + 1 },
            });
        }
        if next.len() == current.len() {
            // W_{i+1} ⊆ W_i always, so equal size means equal sets.
            return Ok(SeriesReport {
                levels,
                outcome: SeriesOutcome::StabilizesNontrivial {
                    at: i,
                    size: next.len(),
                },
            });
        }
        current = next;
        current_gens = next_gens;
    }
    Ok(SeriesReport {
        levels,
        outcome: SeriesOutcome::Undecided,
    })
}

fn check_group(
    identity: &AffineElement,
    set: &IndexSet<AffineElement>,
    name: &str,
    cap: usize,
) -> Result<()> {
    let gens: Vec<AffineElement> = set.iter().cloned().collect();
    let closed = close(
        identity.clone(),
        &gens,
        cap.max(set.len() * set.len().max(1)),
    )?;
    if closed.len() != set.len() || !set.contains(identity) {
        return Err(Error::Precondition(format!("{name} is not a group")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp::{all_vectors, FpMatrix, FpVector, PrimeModulus};

    fn full_aff1(n: u64) -> Vec<AffineElement> {
        let m = PrimeModulus::new(n).unwrap();
        (1..n as i64)
            .flat_map(|a| (0..n as i64).map(move |t| (a, t)))
            .map(|(a, t)| {
                AffineElement::new(FpMatrix::new(m, 1, &[a]).unwrap(), FpVector::new(m, &[t]))
                    .unwrap()
            })
            .collect()
    }

    fn translations(n: u64, d: usize) -> Vec<AffineElement> {
        let m = PrimeModulus::new(n).unwrap();
        all_vectors(m, d)
            .map(AffineElement::translation_by)
            .collect()
    }

    #[test]
    fn translation_subgroup_is_abelian() {
        let t = translations(5, 2);
        let id = vec![t[0].clone()];
        let r = lower_central_probe(&t, &id, 5, 10_000).unwrap();
        assert_eq!(r.outcome, SeriesOutcome::Terminates { depth: 1 });
        assert!(r.levels[0].translation_outside_h1);
        assert!(!r.levels[1].translation_outside_h1);
    }

    #[test]
    fn full_affine_line_is_not_nilpotent() {
        let g = full_aff1(5);
        assert_eq!(g.len(), 20);
        let id = vec![AffineElement::identity(g[0].modulus(), 1)];
        let r = lower_central_probe(&g, &id, 4, 10_000).unwrap();
        assert_eq!(
            r.outcome,
            SeriesOutcome::StabilizesNontrivial { at: 1, size: 5 }
        );
        assert!(r.levels.iter().all(|l| l.translation_outside_h1));
        assert_eq!(r.is_nilpotent(), Some(false));
    }

    #[test]
    fn quotient_by_translations_hides_them() {
        let g = full_aff1(5);
        let t = translations(5, 1);
        let r = lower_central_probe(&g, &t, 4, 10_000).unwrap();
        assert!(r.levels.iter().all(|l| !l.translation_outside_h1));
    }

    #[test]
    fn generator_route_agrees_with_pairwise_route() {
        // Aff_1(F_13) is small enough for the pairwise route; rebuild W_1 by hand from
        // generator commutators and normal closure and compare.
        let g = full_aff1(13);
        let id = vec![AffineElement::identity(g[0].modulus(), 1)];
        let pairwise = lower_central_probe(&g, &id, 4, 100_000).unwrap();
        let identity = id[0].clone();
        let set: IndexSet<AffineElement> = g.iter().cloned().collect();
        let gens = greedy_generators(&identity, &set, 100_000).unwrap();
        let seeds: Vec<AffineElement> = gens
            .iter()
            .flat_map(|a| gens.iter().map(move |b| a.commutator(b)))
            .collect();
        let (_, derived) = normal_closure(&identity, seeds, &gens, 100_000).unwrap();
        assert_eq!(derived.len(), pairwise.levels[1].size);
        assert_eq!(derived.len(), 13);
    }

    #[test]
    fn rejects_non_groups() {
        let g = full_aff1(5);
        let partial = g[..3].to_vec();
        let id = vec![AffineElement::identity(g[0].modulus(), 1)];
        assert!(matches!(
            lower_central_probe(&partial, &id, 3, 1000),
            Err(Error::Precondition(_))
        ));
    }
}
