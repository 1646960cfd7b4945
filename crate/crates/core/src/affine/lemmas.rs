use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::blocks::BlockView;
use super::growth::greedy_cover;
use super::set::{AffineSet, SetCaps};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fp::{FpMatrix, FpVector, PointSet, Subspace};
use crate::group::AffineElement;
use crate::Verdict;

fn rational(x: f64) -> Result<BigRational> {
    if !x.is_finite() || x < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "K must be finite and at least 1, got {x}"
        )));
    }
    Ok(BigRational::from_float(x).expect("finite"))
}

fn int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// The two observations on `L` and `R`, plus the intersection bound for a partner set.
#[derive(Clone, Debug, Serialize)]
pub struct ObservationsReport {
    pub size: usize,
    pub size_sq: usize,
    pub linear_count: usize,
    pub max_fiber: usize,
    /// `|A²| ≥ |L(A)| max_N |R_N(A)|`.
    pub square_holds: bool,
    /// `min_{M∈L(A)} |R_M(A³)|`, only for symmetric `A`.
    pub cube_min_fiber: Option<usize>,
    /// `|R_M(A³)| ≥ max_N |R_N(A)|` for every `M ∈ L(A)`.
    pub cube_holds: Option<bool>,
    pub intersection_size: usize,
    /// `|L(A∩A′)| max_N |R_N(A∩A′)|`.
    pub intersection_bound: usize,
    pub intersection_holds: bool,
    pub fiber_partition_holds: bool,
    pub verdict: Verdict,
}

/// Checks the observations on `A`; the intersection clause uses `partner`, or `A²`.
pub fn block_observations_check(
    a: &AffineSet,
    partner: Option<&AffineSet>,
    caps: SetCaps,
    exec: Execution,
) -> Result<ObservationsReport> {
    let view = BlockView::new(a);
    let a2 = a.product(a, caps, exec)?;
    let square_holds = a2.len() >= view.linear_count() * view.max_fiber();
    let (cube_min_fiber, cube_holds) = if a.is_symmetric() {
        let a3 = a2.product(a, caps, exec)?;
        let v3 = BlockView::new(&a3);
        let min = view
            .linear_keys()
            .iter()
            .map(|&k| v3.slot_of_key(k).map_or(0, |s| v3.fiber_len_at(s)))
            .min()
            .unwrap_or(0);
        (Some(min), Some(a.is_empty() || min >= view.max_fiber()))
    } else {
        (None, None)
    };
    let other = partner.unwrap_or(&a2);
    let meet = a.intersection(other)?;
    let mv = BlockView::new(&meet);
    let intersection_bound = mv.linear_count() * mv.max_fiber();
    let intersection_holds = meet.len() <= intersection_bound;
    let fiber_partition_holds = view.fiber_total() == a.len() && mv.fiber_total() == meet.len();
    let ok =
        square_holds && cube_holds.unwrap_or(true) && intersection_holds && fiber_partition_holds;
    Ok(ObservationsReport {
        size: a.len(),
        size_sq: a2.len(),
        linear_count: view.linear_count(),
        max_fiber: view.max_fiber(),
        square_holds,
        cube_min_fiber,
        cube_holds,
        intersection_size: meet.len(),
        intersection_bound,
        intersection_holds,
        fiber_partition_holds,
        verdict: Verdict::from_bool(ok),
    })
}

/// Hypotheses shared by the two lemmas: `B` is a `K`-approximate group (with the
/// greedy covering number standing in for the least one) and `B` is comparable to `A`.
#[derive(Clone, Debug, Serialize)]
pub struct ApproxHypotheses {
    pub k: f64,
    pub covering_k: Option<usize>,
    pub identity_and_symmetric: bool,
    pub covering_ok: bool,
    /// `|B| ≤ K |A|`.
    pub size_ok: bool,
    /// `|A ∩ gB| ≥ K⁻¹ |A|`.
    pub intersection_ok: bool,
}

impl ApproxHypotheses {
    pub fn met(&self) -> bool {
        self.identity_and_symmetric && self.covering_ok && self.size_ok && self.intersection_ok
    }
}

fn approx_hypotheses(
    a: &AffineSet,
    b: &AffineSet,
    meet: usize,
    k: f64,
    caps: SetCaps,
    exec: Execution,
) -> Result<ApproxHypotheses> {
    let kr = rational(k)?;
    let identity_and_symmetric = b.contains_identity() && b.is_symmetric();
    let covering_k = if identity_and_symmetric {
        let b2 = b.product(b, caps, exec)?;
        Some(greedy_cover(b, &b2)?)
    } else {
        None
    };
    let covering_ok = covering_k.is_some_and(|c| int(c) <= kr);
    let size_ok = int(b.len()) <= &kr * int(a.len());
    let intersection_ok = int(meet) * &kr >= int(a.len());
    Ok(ApproxHypotheses {
        k,
        covering_k,
        identity_and_symmetric,
        covering_ok,
        size_ok,
        intersection_ok,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BlocksReport {
    pub hypotheses: ApproxHypotheses,
    pub l_a: usize,
    pub l_b: usize,
    /// `|L(A) ∩ L(B)|`.
    pub l_common: usize,
    pub min_fiber_a: usize,
    pub max_fiber_a: usize,
    pub max_fiber_b: usize,
    /// `max_{N∈L(A∩B)} |R_N(A) ∩ R_N(B)|`.
    pub max_fiber_meet: usize,
    /// `|L(B)| ≤ K³ |L(A)∩L(B)|`.
    pub linear_cover: bool,
    /// `|L(A)∩L(B)| ≥ K⁻¹ (min_N |R_N(A)| / max_N |R_N(A)|) |L(A)|`.
    pub linear_overlap: bool,
    /// `max_N |R_N(B)| ≤ K³ max_{N∈L(A∩B)} |R_N(A)∩R_N(B)|`.
    pub fiber_cover: bool,
    /// `max_{N∈L(A∩B)} |R_N(A)∩R_N(B)| ≥ K⁻¹ min_N |R_N(A)|`.
    pub fiber_overlap: bool,
    pub verdict: Verdict,
}

impl BlocksReport {
    pub fn all_hold(&self) -> bool {
        self.linear_cover && self.linear_overlap && self.fiber_cover && self.fiber_overlap
    }
}

/// The four inequalities relating the blocks of `A` and of a `K`-approximate group `B`.
pub fn blocks_lemma_check(
    a: &AffineSet,
    b: &AffineSet,
    k: f64,
    caps: SetCaps,
    exec: Execution,
) -> Result<BlocksReport> {
    let meet = a.intersection(b)?;
    let hypotheses = approx_hypotheses(a, b, meet.len(), k, caps, exec)?;
    let kr = rational(k)?;
    let k3 = &kr * &kr * &kr;
    let va = BlockView::new(a);
    let vb = BlockView::new(b);
    let vm = BlockView::new(&meet);
    let l_common = va.common_linear_count(&vb);
    let (min_a, max_a, max_b, max_m) = (
        va.min_fiber(),
        va.max_fiber(),
        vb.max_fiber(),
        vm.max_fiber(),
    );
    let linear_cover = int(vb.linear_count()) <= &k3 * int(l_common);
    let linear_overlap = int(l_common) * int(max_a) * &kr >= int(min_a) * int(va.linear_count());
    let fiber_cover = int(max_b) <= &k3 * int(max_m);
    let fiber_overlap = int(max_m) * &kr >= int(min_a);
    let mut report = BlocksReport {
        l_a: va.linear_count(),
        l_b: vb.linear_count(),
        l_common,
        min_fiber_a: min_a,
        max_fiber_a: max_a,
        max_fiber_b: max_b,
        max_fiber_meet: max_m,
        linear_cover,
        linear_overlap,
        fiber_cover,
        fiber_overlap,
        verdict: Verdict::Pass,
        hypotheses,
    };
    report.verdict = if !report.hypotheses.met() {
        Verdict::HypothesesUnmet
    } else {
        Verdict::from_bool(report.all_hold())
    };
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct StabReport {
    pub hypotheses: ApproxHypotheses,
    /// `|H|` with `H = L(A_α)`.
    pub group_order: usize,
    /// `|Stab_H(ξ)|`.
    pub stab_h: usize,
    /// Number of `Stab(ξ)`-cosets meeting `L(B)`, i.e. `|{Mξ : M ∈ L(B)}|`.
    pub cosets: usize,
    /// `|L(g)⁻¹H ∩ L(B)|`.
    pub shifted_overlap: usize,
    pub l_b: usize,
    /// `|L(B) ∩ Stab(ξ)|`.
    pub l_b_stab: usize,
    /// `|L(B²)|`.
    pub l_b2: usize,
    /// `|L(g)⁻¹H ∩ L(B)| ≤ |Stab_H(ξ)| |S|`.
    pub overlap_upper: bool,
    /// `|L(g)⁻¹H ∩ L(B)| ≥ K⁻¹ |H|`.
    pub overlap_lower: bool,
    /// `|S| |Stab_H(ξ)| ≥ K⁻¹ |H|`.
    pub coset_count: bool,
    /// `|L(B²)| ≥ |S| |L(B) ∩ Stab(ξ)|`.
    pub square_lower: bool,
    /// `|L(B²)| ≤ K⁶ |L(B)|`.
    pub square_upper: bool,
    /// `|L(B) ∩ Stab(ξ)| ≤ (|Stab_H(ξ)| / |H|) K⁷ |L(B)|`.
    pub conclusion: bool,
    pub verdict: Verdict,
}

impl StabReport {
    pub fn all_hold(&self) -> bool {
        self.overlap_upper
            && self.overlap_lower
            && self.coset_count
            && self.square_lower
            && self.square_upper
            && self.conclusion
    }
}

/// The stabilizer bound for a `K`-approximate group `B` near `g⁻¹A_α`, with the
/// instance's exact `|Stab_H(ξ)| / |H|` in place of the asymptotic density.
pub fn stab_lemma_check(
    a_alpha: &AffineSet,
    b: &AffineSet,
    g: &AffineElement,
    xi: &FpVector,
    k: f64,
    caps: SetCaps,
    exec: Execution,
) -> Result<StabReport> {
    if xi.is_zero() {
        return Err(Error::ZeroVector);
    }
    let va = BlockView::new(a_alpha);
    if va.min_fiber() != va.max_fiber() {
        return Err(Error::Precondition(
            "A_α must have equal fibers over H".into(),
        ));
    }
    let shifted = b.left_translate(g)?;
    let hypotheses = approx_hypotheses(
        a_alpha,
        b,
        a_alpha.intersection_len(&shifted),
        k,
        caps,
        exec,
    )?;
    let kr = rational(k)?;
    let h: Vec<FpMatrix> = va.linear_parts();
    let stab_h = h.iter().filter(|m| m.apply(xi) == *xi).count();
    let vb = BlockView::new(b);
    let lb = vb.linear_parts();
    let mut images: Vec<u64> = lb.iter().map(|m| m.apply(xi).rank_index()).collect();
    images.sort_unstable();
    images.dedup();
    let cosets = images.len();
    let lg_inv = g.linear().inverse()?;
    let codec = b.codec();
    let mut shifted_keys: Vec<u128> = h
        .iter()
        .map(|m| codec.encode_linear(&lg_inv.mul(m)))
        .collect();
    shifted_keys.sort_unstable();
    let shifted_overlap = vb
        .linear_keys()
        .iter()
        .filter(|k| shifted_keys.binary_search(k).is_ok())
        .count();
    let l_b_stab = lb.iter().filter(|m| m.apply(xi) == *xi).count();
    let b2 = b.product(b, caps, exec)?;
    let l_b2 = BlockView::new(&b2).linear_count();

    let k6 = (0..6).fold(BigRational::one(), |acc, _| acc * &kr);
    let k7 = &k6 * &kr;
    let order = h.len();
    let overlap_upper = shifted_overlap <= stab_h * cosets;
    let overlap_lower = int(shifted_overlap) * &kr >= int(order);
    let coset_count = int(cosets * stab_h) * &kr >= int(order);
    let square_lower = l_b2 >= cosets * l_b_stab;
    let square_upper = int(l_b2) <= &k6 * int(lb.len());
    let conclusion = if order.is_zero() {
        false
    } else {
        int(l_b_stab * order) <= int(stab_h) * &k7 * int(lb.len())
    };
    let mut report = StabReport {
        group_order: order,
        stab_h,
        cosets,
        shifted_overlap,
        l_b: lb.len(),
        l_b_stab,
        l_b2,
        overlap_upper,
        overlap_lower,
        coset_count,
        square_lower,
        square_upper,
        conclusion,
        verdict: Verdict::Pass,
        hypotheses,
    };
    report.verdict = if !report.hypotheses.met() {
        Verdict::HypothesesUnmet
    } else {
        Verdict::from_bool(report.all_hold())
    };
    Ok(report)
}

/// `T_M = R_M(B^{3k}) + V` as a disjoint union of `V`-cosets.
#[derive(Clone, Debug)]
pub struct TranslateUnion {
    pub base_fiber: PointSet,
    pub v: Subspace,
    pub t: PointSet,
    /// Canonical coset representatives `F` with `T_M = ⊔_{ξ∈F} (ξ + V)`.
    pub reps: Vec<FpVector>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TranslateReport {
    pub k: usize,
    pub v_dim: usize,
    pub base_size: usize,
    pub t_size: usize,
    pub coset_count: usize,
    /// `|R_M(B^{3k})| / |T_M|`.
    pub ratio: f64,
    pub base_in_t: bool,
    /// `T_M ⊆ R_M(B^{4k})`.
    pub t_in_fiber: bool,
    /// `|T_M| = |F| |V|`.
    pub disjoint_union: bool,
    pub verdict: Verdict,
}

/// Builds `T_M` for `M ∈ L(B)` given that `{(I, v) : v ∈ V} ⊆ B^k`, and checks
/// `R_M(B^{3k}) ⊆ T_M ⊆ R_M(B^{4k})`.
pub fn translate_union_check(
    b: &AffineSet,
    k: usize,
    m: &FpMatrix,
    v: &Subspace,
    caps: SetCaps,
    exec: Execution,
) -> Result<(TranslateUnion, TranslateReport)> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if v.dim() == 0 {
        return Err(Error::Precondition(
            "V must be a nontrivial subspace".into(),
        ));
    }
    if !BlockView::new(b).contains_linear(m) {
        return Err(Error::Precondition("M is not in L(B)".into()));
    }
    let mut powers = vec![b.clone()];
    while powers.len() < 4 * k {
        let next = powers.last().expect("nonempty").product(b, caps, exec)?;
        powers.push(next);
    }
    let bk = &powers[k - 1];
    if !v
        .elements()
        .all(|x| bk.contains(&AffineElement::translation_by(x)))
    {
        return Err(Error::Precondition(
            "B^k does not contain the translations by V".into(),
        ));
    }
    let base_fiber = BlockView::new(&powers[3 * k - 1]).fiber(m);
    let big_fiber = BlockView::new(&powers[4 * k - 1]).fiber(m);
    let vs: Vec<FpVector> = v.elements().collect();
    let t = PointSet::new(
        b.modulus(),
        b.dim(),
        base_fiber
            .iter()
            .flat_map(|x| vs.iter().map(move |w| x.add(w))),
    )?;
    let mut reps: Vec<FpVector> = t.iter().map(|x| v.reduce(&x)).collect();
    reps.sort_by_key(FpVector::rank_index);
    reps.dedup();
    let disjoint_union = reps.len() as u64 * v.size() == t.len() as u64;
    let base_in_t = base_fiber.is_subset_of(&t);
    let t_in_fiber = t.is_subset_of(&big_fiber);
    let report = TranslateReport {
        k,
        v_dim: v.dim(),
        base_size: base_fiber.len(),
        t_size: t.len(),
        coset_count: reps.len(),
        ratio: base_fiber.len() as f64 / t.len() as f64,
        base_in_t,
        t_in_fiber,
        disjoint_union,
        verdict: Verdict::from_bool(base_in_t && t_in_fiber && disjoint_union),
    };
    Ok((
        TranslateUnion {
            base_fiber,
            v: v.clone(),
            t,
            reps,
        },
        report,
    ))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::affine::{build_a_alpha, semidirect};
    use crate::fourier::{dft_full, spec_alpha, DftOptions};
    use crate::fp::PrimeModulus;
    use crate::group::{MatrixGroup, OrbitSet};

    fn qr7() -> (Arc<MatrixGroup>, AffineSet) {
        let p = PrimeModulus::new(7).unwrap();
        let h = Arc::new(
            MatrixGroup::generate(p, 1, &[FpMatrix::new(p, 1, &[2]).unwrap()], 10).unwrap(),
        );
        let orbit = OrbitSet::compute(h.clone(), &FpVector::new(p, &[1]), true).unwrap();
        let f = dft_full(orbit.points(), DftOptions::default()).unwrap();
        let a = build_a_alpha(&h, &spec_alpha(&f, 0.4).unwrap()).unwrap();
        (h, a)
    }

    #[test]
    fn observations_on_qr7() {
        let (_, a) = qr7();
        let r =
            block_observations_check(&a, None, SetCaps::default(), Execution::Sequential).unwrap();
        assert!(r.size_sq >= 21);
        assert_eq!((r.linear_count, r.max_fiber), (3, 7));
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn subgroup_against_itself() {
        let (_, a) = qr7();
        let r = blocks_lemma_check(&a, &a, 1.0, SetCaps::default(), Execution::Sequential).unwrap();
        assert!(r.hypotheses.met());
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn small_overlap_is_routed() {
        let (h, a) = qr7();
        let p = h.modulus();
        let b = semidirect(&MatrixGroup::trivial(p, 1), &Subspace::zero(p, 1)).unwrap();
        let r = blocks_lemma_check(&a, &b, 2.0, SetCaps::default(), Execution::Sequential).unwrap();
        assert!(!r.hypotheses.intersection_ok);
        assert_eq!(r.verdict, Verdict::HypothesesUnmet);
    }

    #[test]
    fn stab_chain_on_semidirect() {
        let (h, a) = qr7();
        let p = h.modulus();
        let b = semidirect(&h, &Subspace::full(p, 1)).unwrap();
        let g = AffineElement::identity(p, 1);
        let r = stab_lemma_check(
            &a,
            &b,
            &g,
            &FpVector::new(p, &[3]),
            1.0,
            SetCaps::default(),
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!((r.stab_h, r.cosets, r.l_b_stab), (1, 3, 1));
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(stab_lemma_check(
            &a,
            &b,
            &g,
            &FpVector::zero(p, 1),
            1.0,
            SetCaps::default(),
            Execution::Sequential
        )
        .is_err());
    }

    #[test]
    fn translate_union_on_semidirect() {
        let (h, _) = qr7();
        let p = h.modulus();
        let w = Subspace::full(p, 1);
        let b = semidirect(&h, &w).unwrap();
        let (tu, r) = translate_union_check(
            &b,
            1,
            &FpMatrix::new(p, 1, &[2]).unwrap(),
            &w,
            SetCaps::default(),
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(tu.t.len(), 7);
        assert_eq!((r.ratio, r.coset_count), (1.0, 1));
        assert_eq!(r.verdict, Verdict::Pass);
        let zero = Subspace::zero(p, 1);
        assert!(translate_union_check(
            &b,
            1,
            &FpMatrix::new(p, 1, &[2]).unwrap(),
            &zero,
            SetCaps::default(),
            Execution::Sequential
        )
        .is_err());
    }
}
