use std::collections::VecDeque;
use std::hash::Hash;

use indexmap::IndexSet;

use crate::error::{Error, Result};

/// Composition and inversion for elements of a finite group.
pub trait GroupElement: Clone + Eq + Hash + Send + Sync {
    fn compose(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;

    /// `g h g⁻¹ h⁻¹`.
    fn commutator(&self, other: &Self) -> Self {
        self.compose(other)
            .compose(&self.inverse())
            .compose(&other.inverse())
    }

    fn conjugate_by(&self, g: &Self) -> Self {
        g.compose(self).compose(&g.inverse())
    }
}

/// Breadth-first closure of `⟨gens⟩`, starting from `identity` and right-multiplying by
/// generators. Elements come out in discovery order.
pub fn close<T: GroupElement>(identity: T, gens: &[T], cap: usize) -> Result<IndexSet<T>> {
    let mut seen = IndexSet::new();
    seen.insert(identity);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let x = seen[i].clone();
        for g in gens {
            let y = x.compose(g);
            let (idx, fresh) = seen.insert_full(y);
            if fresh {
                if seen.len() > cap {
                    return Err(Error::cap("group closure", cap as u64, seen.len() as u64));
                }
                queue.push_back(idx);
            }
        }
    }
    Ok(seen)
}

/// Smallest-first greedy generating set for an already closed group.
pub fn greedy_generators<T: GroupElement>(
    identity: &T,
    elements: &IndexSet<T>,
    cap: usize,
) -> Result<Vec<T>> {
    let mut gens = Vec::new();
    let mut span = close(identity.clone(), &gens, cap)?;
    for x in elements {
        if span.len() == elements.len() {
            break;
        }
        if !span.contains(x) {
            gens.push(x.clone());
            span = close(identity.clone(), &gens, cap)?;
        }
    }
    Ok(gens)
}

/// Closure of `S` under conjugation by `by`, then under multiplication.
pub fn normal_closure<T: GroupElement>(
    identity: &T,
    seeds: Vec<T>,
    by: &[T],
    cap: usize,
) -> Result<(Vec<T>, IndexSet<T>)> {
    let mut gens = seeds;
    let mut group = close(identity.clone(), &gens, cap)?;
    loop {
        let mut added = false;
        let mut k = 0;
        while k < gens.len() {
            for g in by {
                let c = gens[k].conjugate_by(g);
                if !group.contains(&c) {
                    gens.push(c);
                    group = close(identity.clone(), &gens, cap)?;
                    added = true;
                }
            }
            k += 1;
        }
        if !added {
            return Ok((gens, group));
        }
    }
}
