use serde::Serialize;

use super::{MatrixGroup, OrbitSet};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fp::{normal_classes, AffineHyperplane, FpVector, PointSet};

/// Effective orbit size and hyperplane exponents of an instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceProfile {
    pub orbit_size: usize,
    /// `log_p |I|`.
    pub delta_eff: f64,
    /// `max_P |I ∩ P|` over affine hyperplanes.
    pub max_hyperplane_hit: usize,
    /// `1 − log_{|I|} max_hit`, and 0 whenever `I` lies inside one hyperplane.
    pub beta_eff: f64,
    #[serde(skip)]
    pub witness: Option<AffineHyperplane>,
}

impl InstanceProfile {
    pub fn lies_in_hyperplane(&self) -> bool {
        self.max_hyperplane_hit == self.orbit_size
    }
}

/// Exact `max_P |I ∩ P|` by histogramming `n·x` over each normalized normal class `n`.
pub fn hyperplane_profile(
    points: &PointSet,
    space_cap: u64,
    exec: Execution,
) -> Result<InstanceProfile> {
    let m = points.modulus();
    let d = points.dim();
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty point set".into()));
    }
    let size = m.space_size(d).unwrap_or(u64::MAX);
    if size > space_cap {
        return Err(Error::cap("hyperplane profile (p^d)", space_cap, size));
    }
    let pts = points.to_vectors();
    let normals: Vec<FpVector> = normal_classes(m, d).collect();
    let best = exec.map(&normals, |n| {
        let mut hist = vec![0usize; m.get() as usize];
        for x in &pts {
            hist[n.dot(x) as usize] += 1;
        }
        let (offset, &count) = hist
            .iter()
            .enumerate()
            .max_by_key(|&(i, c)| (*c, std::cmp::Reverse(i)))
            .expect("p > 0");
        (count, offset)
    });
    let (idx, &(max_hit, offset)) = best
        .iter()
        .enumerate()
        .max_by_key(|&(i, (c, _))| (*c, std::cmp::Reverse(i)))
        .expect("at least one normal");
    let witness = AffineHyperplane::new(&normals[idx], offset as i64).ok();
    let n = pts.len();
    let ln_p = (m.get() as f64).ln();
    let delta_eff = (n as f64).ln() / ln_p;
    let beta_eff = if max_hit == n {
        0.0
    } else {
        (1.0 - (max_hit as f64).ln() / (n as f64).ln()).clamp(0.0, 1.0)
    };
    Ok(InstanceProfile {
        orbit_size: n,
        delta_eff,
        max_hyperplane_hit: max_hit,
        beta_eff,
        witness,
    })
}

/// Quantities in `|Stab_H(ξ)| ≤ |Stab_{H^T}(v)| · |I ∩ P|` with `P = {x : ξ·x = ξ·v}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabChainReport {
    pub stab_xi: usize,
    pub stab_base: usize,
    pub orbit_in_plane: usize,
    pub holds: bool,
}

/// Checks the stabilizer/hyperplane chain for the transposed orbit `I = H^T v`.
pub fn stab_chain_check(
    group: &MatrixGroup,
    v: &FpVector,
    xi: &FpVector,
) -> Result<StabChainReport> {
    let stab_xi = group.stabilizer(xi)?.order();
    let stab_base = group.stabilizer_under(v, true)?.order();
    let level = xi.dot(v);
    let orbit_in_plane = group
        .iter()
        .map(|m| m.apply_transpose(v))
        .collect::<std::collections::HashSet<_>>()
        .into_iter()
        .filter(|x| xi.dot(x) == level)
        .count();
    Ok(StabChainReport {
        stab_xi,
        stab_base,
        orbit_in_plane,
        holds: stab_xi <= stab_base * orbit_in_plane,
    })
}

/// Convenience: profile of an orbit.
pub fn orbit_profile(orbit: &OrbitSet, space_cap: u64, exec: Execution) -> Result<InstanceProfile> {
    hyperplane_profile(orbit.points(), space_cap, exec)
}
