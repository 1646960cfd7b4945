use std::collections::HashSet;

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{BatteryConfig, Family};
use super::instance::Instance;
use crate::affine::{
    block_observations_check, blocks_lemma_check, build_a_alpha, cyclic_subgroups, fitted_k,
    growth_report, invariant_subspaces, prop_p_iteration, semidirect, stab_lemma_check,
    translate_union_check, AffineSet, IterationOptions,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fourier::{
    dft_full, exp_sum, field_check, spec_at, spec_difference_check, subspace_concentration_check,
    CyclotomicEvaluator, DftAlgorithm, DftOptions, Level, Spectrum, SpectrumField, EXACT_MAX_P,
};
use crate::fp::{FpMatrix, FpVector, PrimeModulus, Subspace};
use crate::group::{
    commutator, lower_central_probe, stab_chain_check, AffineElement, MatrixGroup, SeriesOutcome,
};
use crate::random::{random_invertible, random_nonzero_vector, random_vector, rng};
use crate::Verdict;

/// Check names, in the order they run.
pub const CHECKS: [&str; 18] = [
    "hyperplane-profile",
    "orbit-stabilizer",
    "stab-chain",
    "dft-oracle",
    "parseval",
    "gauss-sum",
    "spectrum-invariance",
    "spec-difference",
    "concentration",
    "block-observations",
    "power-law",
    "prop-p",
    "blocks-lemma",
    "stab-lemma",
    "translate-union",
    "commutator",
    "central-series",
    "trend",
];

/// `p^d · |I|` up to which the naive transform is recomputed in full for the oracle.
pub const ORACLE_BUDGET: u64 = 20_000_000;
/// Frequencies compared against direct sums when the full oracle is too large.
pub const ORACLE_SAMPLES: usize = 64;
/// Total `|V|(|I| + |V|)` spent on the concentration check.
pub const CONCENTRATION_BUDGET: u64 = 100_000_000;
/// Multiplications allowed for the product sets of one affine check.
pub const PRODUCT_BUDGET: u64 = 20_000_000;
/// Largest `|A|` for the covering search of the power-law check and the lemma tuples.
pub const COVER_SET_LIMIT: usize = 600;
/// Largest `|B|` in the lemma tuples and the translate union.
pub const B_LIMIT: u64 = 800;
/// Largest `|H| p^d` handed to the lower central series probe.
pub const SERIES_LIMIT: usize = 2_000;
pub const STAB_SAMPLES: usize = 8;
pub const COMMUTATOR_TRIPLES: usize = 1000;
/// Most `(K₀, W, g)` tuples tried for the block and stabilizer lemmas.
pub const MAX_B_TUPLES: usize = 24;

#[derive(Clone, Debug)]
pub struct BatteryOptions {
    pub alphas: Vec<f64>,
    pub eps_prime: f64,
    pub exact: bool,
    /// Run only these checks; all when `None`.
    pub only: Option<Vec<String>>,
    pub exec: Execution,
}

impl Default for BatteryOptions {
    fn default() -> Self {
        Self::from(&BatteryConfig::default())
    }
}

impl From<&BatteryConfig> for BatteryOptions {
    fn from(c: &BatteryConfig) -> Self {
        Self {
            alphas: c.alphas.clone(),
            eps_prime: c.eps_prime,
            exact: c.exact,
            only: None,
            exec: Execution::Sequential,
        }
    }
}

impl BatteryOptions {
    /// Restricts the battery to `name`, or to everything for `"all"`.
    pub fn select(mut self, name: &str) -> Result<Self> {
        if name == "all" {
            self.only = None;
        } else if CHECKS.contains(&name) {
            self.only
                .get_or_insert_with(Vec::new)
                .push(name.to_string());
        } else {
            return Err(Error::InvalidArgument(format!(
                "unknown check {name:?}; expected one of all, {}",
                CHECKS.join(", ")
            )));
        }
        Ok(self)
    }

    fn wants(&self, name: &str) -> bool {
        self.only
            .as_ref()
            .is_none_or(|o| o.iter().any(|n| n == name))
    }

    fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() {
            return Err(Error::InvalidArgument("α grid is empty".into()));
        }
        if let Some(a) = self.alphas.iter().find(|&&a| !(a > 0.0 && a <= 1.0)) {
            return Err(Error::InvalidArgument(format!(
                "α must lie in (0, 1], got {a}"
            )));
        }
        if !(self.eps_prime > 0.0 && self.eps_prime <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "ε′ must lie in (0, 1], got {}",
                self.eps_prime
            )));
        }
        Ok(())
    }
}

/// Verdict of one check with a one-line summary and its structured report.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub verdict: Verdict,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub report: Value,
    /// Wall time; excluded from every deterministic output.
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BatteryReport {
    pub family: Family,
    pub p: u64,
    pub d: usize,
    pub seed: u64,
    pub group_order: usize,
    pub orbit_size: usize,
    pub delta_eff: f64,
    pub beta_eff: f64,
    pub max_nonzero_ratio: Option<f64>,
    pub checks: Vec<CheckOutcome>,
}

impl BatteryReport {
    pub fn count(&self, verdict: Verdict) -> usize {
        self.checks.iter().filter(|c| c.verdict == verdict).count()
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| c.verdict == Verdict::Fail)
            .map(|c| c.name)
            .collect()
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn any_failed(&self) -> bool {
        self.count(Verdict::Fail) > 0
    }
}

struct Finding {
    verdict: Verdict,
    detail: String,
    report: Value,
}

impl Finding {
    fn new(verdict: Verdict, detail: impl Into<String>, report: impl Serialize) -> Self {
        Self {
            verdict,
            detail: detail.into(),
            report: serde_json::to_value(report).unwrap_or(Value::Null),
        }
    }
}

/// `Ok(None)`: the check does not apply to this instance.
type CheckResult = Result<Option<Finding>>;

struct Ctx<'a> {
    inst: &'a Instance,
    opts: &'a BatteryOptions,
    field: Result<SpectrumField>,
    spectra: Vec<(f64, Result<Spectrum>)>,
    /// Distinct `A_α` in grid order, keyed by the first `α` producing them.
    a_sets: Vec<(f64, Result<AffineSet>)>,
}

impl Ctx<'_> {
    fn m(&self) -> PrimeModulus {
        self.inst.modulus()
    }

    fn d(&self) -> usize {
        self.inst.config.d
    }

    fn space(&self) -> u64 {
        self.m().space_size(self.d()).unwrap_or(u64::MAX)
    }

    fn field(&self) -> Result<&SpectrumField> {
        self.field.as_ref().map_err(Clone::clone)
    }

    fn rng(&self, stream: u64) -> crate::random::LabRng {
        rng(self.inst.config.seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    fn set_caps(&self) -> crate::affine::SetCaps {
        self.inst.config.caps.set_caps()
    }

    /// `A_α` sets whose cube fits [`PRODUCT_BUDGET`], largest first.
    fn small_a_sets(&self) -> Vec<(f64, &AffineSet)> {
        let bound = self.inst.group.order() as u64 * self.space();
        let mut v: Vec<(f64, &AffineSet)> = self
            .a_sets
            .iter()
            .filter_map(|(alpha, a)| a.as_ref().ok().map(|a| (*alpha, a)))
            .filter(|(_, a)| {
                let n = a.len() as u64;
                n.saturating_mul(n.saturating_mul(n).min(bound)) <= PRODUCT_BUDGET
            })
            .collect();
        v.sort_by_key(|(_, a)| std::cmp::Reverse(a.len()));
        v
    }
}

/// Runs the verifier battery on `inst`; a failing computation turns into an
/// inconclusive verdict for its own check only.
pub fn verify_all(inst: &Instance, opts: &BatteryOptions) -> Result<BatteryReport> {
    opts.validate()?;
    let m = inst.modulus();
    let field = dft_full(
        inst.orbit.points(),
        DftOptions {
            algorithm: DftAlgorithm::Auto,
            exec: opts.exec,
            cap: inst.config.caps.space,
        },
    );
    let mut evaluator = if opts.exact && m.get() <= EXACT_MAX_P {
        Some(CyclotomicEvaluator::new(m)?)
    } else {
        None
    };
    let spectra: Vec<(f64, Result<Spectrum>)> = opts
        .alphas
        .iter()
        .map(|&alpha| {
            let s = match &field {
                Ok(f) => Level::decimal(alpha).map(|lvl| spec_at(f, &lvl, evaluator.as_mut())),
                Err(e) => Err(e.clone()),
            };
            (alpha, s)
        })
        .collect();
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut a_sets = Vec::new();
    for (alpha, s) in &spectra {
        match s {
            Ok(s) => {
                if !seen.insert(s.indices().collect()) {
                    continue;
                }
                let size = (inst.group.order() as u64).saturating_mul(s.len() as u64);
                let set_cap = inst.config.caps.set as u64;
                let a = if size > set_cap {
                    Err(Error::cap("A_α elements", set_cap, size))
                } else {
                    build_a_alpha(&inst.group, s)
                };
                a_sets.push((*alpha, a));
            }
            Err(e) => a_sets.push((*alpha, Err(e.clone()))),
        }
    }
    let ctx = Ctx {
        inst,
        opts,
        field,
        spectra,
        a_sets,
    };

    let runners: [(&'static str, fn(&Ctx) -> CheckResult); 18] = [
        ("hyperplane-profile", check_profile),
        ("orbit-stabilizer", check_orbit_stabilizer),
        ("stab-chain", check_stab_chain),
        ("dft-oracle", check_dft_oracle),
        ("parseval", check_parseval),
        ("gauss-sum", check_gauss_sum),
        ("spectrum-invariance", check_spectrum_invariance),
        ("spec-difference", check_spec_difference),
        ("concentration", check_concentration),
        ("block-observations", check_block_observations),
        ("power-law", check_power_law),
        ("prop-p", check_prop_p),
        ("blocks-lemma", check_blocks_lemma),
        ("stab-lemma", check_stab_lemma),
        ("translate-union", check_translate_union),
        ("commutator", check_commutator),
        ("central-series", check_central_series),
        ("trend", check_trend),
    ];
    let mut checks = Vec::new();
    for (name, run) in runners {
        if !opts.wants(name) {
            continue;
        }
        let start = std::time::Instant::now();
        let result = run(&ctx);
        let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        let outcome = match result {
            Ok(None) => continue,
            Ok(Some(f)) => CheckOutcome {
                name,
                verdict: f.verdict,
                detail: f.detail,
                error: None,
                report: f.report,
                elapsed_ms,
            },
            Err(e) => CheckOutcome {
                name,
                verdict: Verdict::Inconclusive,
                detail: "not completed".into(),
                error: Some(e.to_string()),
                report: Value::Null,
                elapsed_ms,
            },
        };
        checks.push(outcome);
    }
    Ok(BatteryReport {
        family: inst.config.family,
        p: inst.config.p,
        d: inst.config.d,
        seed: inst.config.seed,
        group_order: inst.group.order(),
        orbit_size: inst.orbit.len(),
        delta_eff: inst.profile.delta_eff,
        beta_eff: inst.profile.beta_eff,
        max_nonzero_ratio: ctx
            .field
            .as_ref()
            .ok()
            .map(SpectrumField::max_nonzero_ratio),
        checks,
    })
}

fn check_profile(c: &Ctx) -> CheckResult {
    let prof = &c.inst.profile;
    let n = c.inst.orbit.len();
    let witness_hits = prof.witness.as_ref().map(|w| {
        c.inst
            .orbit
            .points()
            .iter()
            .filter(|x| w.contains(x))
            .count()
    });
    let ok = prof.orbit_size == n
        && (1..=n).contains(&prof.max_hyperplane_hit)
        && (0.0..=1.0).contains(&prof.beta_eff)
        && (prof.beta_eff == 0.0) == (prof.lies_in_hyperplane() || n == 1)
        && witness_hits.is_none_or(|h| h == prof.max_hyperplane_hit)
        && (c.d() > 1 || prof.max_hyperplane_hit == 1);
    Ok(Some(Finding::new(
        Verdict::from_bool(ok),
        format!(
            "max_hit={} beta_eff={:.6}",
            prof.max_hyperplane_hit, prof.beta_eff
        ),
        prof,
    )))
}

fn check_orbit_stabilizer(c: &Ctx) -> CheckResult {
    let stab = c.inst.orbit.base_stabilizer().order();
    let ok = stab * c.inst.orbit.len() == c.inst.group.order();
    Ok(Some(Finding::new(
        Verdict::from_bool(ok),
        format!(
            "|I|·|Stab| = {}·{} vs |H| = {}",
            c.inst.orbit.len(),
            stab,
            c.inst.group.order()
        ),
        json!({"orbit_size": c.inst.orbit.len(), "stabilizer": stab, "group_order": c.inst.group.order()}),
    )))
}

fn check_stab_chain(c: &Ctx) -> CheckResult {
    if !c.inst.orbit.transposed() {
        return Ok(Some(Finding::new(
            Verdict::HypothesesUnmet,
            "needs an H^T v orbit",
            Value::Null,
        )));
    }
    let mut r = c.rng(1);
    let mut reports = Vec::new();
    for _ in 0..STAB_SAMPLES {
        let xi = random_nonzero_vector(c.m(), c.d(), &mut r)?;
        reports.push(stab_chain_check(
            &c.inst.group,
            c.inst.orbit.base_point(),
            &xi,
        )?);
    }
    let ok = reports.iter().all(|r| r.holds);
    Ok(Some(Finding::new(
        Verdict::from_bool(ok),
        format!("{} sampled ξ", reports.len()),
        reports,
    )))
}

fn check_dft_oracle(c: &Ctx) -> CheckResult {
    let field = c.field()?;
    let pts = c.inst.orbit.points();
    let n = pts.len() as f64;
    let tol = 1e-9 * n;
    let full = c.space().saturating_mul(pts.len() as u64) <= ORACLE_BUDGET;
    let max_err = if full {
        let opts = |algorithm| DftOptions {
            algorithm,
            exec: c.opts.exec,
            cap: c.inst.config.caps.space,
        };
        let naive = dft_full(pts, opts(DftAlgorithm::Naive))?;
        let chirp = dft_full(pts, opts(DftAlgorithm::Chirp))?;
        naive
            .magnitudes()
            .iter()
            .zip(chirp.magnitudes())
            .chain(naive.magnitudes().iter().zip(field.magnitudes()))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    } else {
        let mut r = c.rng(2);
        (0..ORACLE_SAMPLES)
            .map(|_| {
                let xi = random_vector(c.m(), c.d(), &mut r);
                (exp_sum(pts, &xi) - field.magnitude(&xi)).abs()
            })
            .fold(0.0, f64::max)
    };
    Ok(Some(Finding::new(
        Verdict::from_bool(max_err <= tol),
        format!(
            "{} max|Δ|={max_err:.3e} tol={tol:.3e}",
            if full { "full" } else { "sampled" }
        ),
        json!({"full": full, "max_error": max_err, "tolerance": tol}),
    )))
}

fn check_parseval(c: &Ctx) -> CheckResult {
    let report = field_check(c.field()?);
    Ok(Some(Finding::new(
        report.verdict,
        format!("relative error {:.3e}", report.parseval_relative_error),
        &report,
    )))
}

/// For `I = v · (F_p^×)²` every `|S(ξ)|`, `ξ ≠ 0`, is `(√p ± 1)/2` when `p ≡ 1 (mod 4)`
/// and `√(p+1)/2` when `p ≡ 3 (mod 4)`.
fn check_gauss_sum(c: &Ctx) -> CheckResult {
    if c.inst.config.family != Family::QuadraticResidue || !c.inst.orbit.transposed() {
        return Ok(None);
    }
    let field = c.field()?;
    let p = c.inst.config.p as f64;
    let allowed: Vec<f64> = if c.inst.config.p % 4 == 3 {
        vec![(p + 1.0).sqrt() / 2.0]
    } else {
        vec![(p.sqrt() - 1.0) / 2.0, (p.sqrt() + 1.0) / 2.0]
    };
    let err = field.magnitudes()[1..]
        .iter()
        .map(|&s| {
            allowed
                .iter()
                .map(|a| (s - a).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let mut ok = err <= 1e-9;
    let mut detail = format!("max deviation {err:.3e}");
    if c.inst.config.p % 4 == 3 {
        let expected = (p + 1.0).sqrt() / (p - 1.0);
        let ratio_err = (field.max_nonzero_ratio() - expected).abs();
        ok &= ratio_err <= 1e-9;
        detail.push_str(&format!(", ratio error {ratio_err:.3e}"));
    }
    Ok(Some(Finding::new(
        Verdict::from_bool(ok),
        detail,
        json!({"max_deviation": err, "allowed": allowed}),
    )))
}

fn spectra<'a>(c: &'a Ctx) -> Result<Vec<(f64, &'a Spectrum)>> {
    c.spectra
        .iter()
        .map(|(a, s)| s.as_ref().map(|s| (*a, s)).map_err(Clone::clone))
        .collect()
}

fn check_spectrum_invariance(c: &Ctx) -> CheckResult {
    let mut verdict = Verdict::Pass;
    let mut rows = Vec::new();
    for (alpha, s) in spectra(c)? {
        let symmetric = s.is_symmetric();
        let invariant = s.is_invariant_under(&c.inst.group, c.inst.orbit.transposed());
        let v = if !s.is_conclusive() {
            Verdict::Inconclusive
        } else {
            Verdict::from_bool(symmetric && invariant)
        };
        verdict = verdict.combine(v);
        rows.push(
            json!({"alpha": alpha, "size": s.len(), "symmetric": symmetric, "invariant": invariant,
            "margin_flags": s.margin_flags().len(), "exact_resolutions": s.resolved_count()}),
        );
    }
    Ok(Some(Finding::new(
        verdict,
        format!("{} levels", rows.len()),
        rows,
    )))
}

fn check_spec_difference(c: &Ctx) -> CheckResult {
    let field = c.field()?;
    let mut ev = if c.opts.exact && c.m().get() <= EXACT_MAX_P {
        Some(CyclotomicEvaluator::new(c.m())?)
    } else {
        None
    };
    let mut verdict = Verdict::Pass;
    let mut reports = Vec::new();
    for (_, s) in spectra(c)? {
        let r =
            spec_difference_check(field, s, ev.as_mut(), c.inst.config.caps.pairs, c.opts.exec)?;
        verdict = verdict.combine(r.verdict);
        reports.push(r);
    }
    let incidents: usize = reports.iter().map(|r| r.margin_incidents).sum();
    Ok(Some(Finding::new(
        verdict,
        format!("{} levels, {incidents} margin incidents", reports.len()),
        reports,
    )))
}

fn check_concentration(c: &Ctx) -> CheckResult {
    let field = c.field()?;
    let spectra = spectra(c)?;
    let n = c.inst.orbit.len() as u64;
    let mut budget = CONCENTRATION_BUDGET;
    let mut verdict = Verdict::Pass;
    let (mut pairs, mut skipped, mut failures, mut incidents) = (0u64, 0u64, 0u64, 0usize);
    let mut worst_slack = f64::INFINITY;
    for v in Subspace::enumerate_all(c.m(), c.d())
        .into_iter()
        .filter(|v| v.dim() > 0)
    {
        let reps = v.coset_reps();
        let per = v.size() * (n + v.size());
        for eta in &reps {
            for &(_, s) in &spectra {
                if budget < per {
                    skipped += 1;
                    continue;
                }
                budget -= per;
                let r = subspace_concentration_check(
                    field,
                    s,
                    eta,
                    &v,
                    Some(&c.inst.profile),
                    u64::MAX,
                )?;
                pairs += 1;
                incidents += r.margin_incidents;
                if r.verdict == Verdict::Fail {
                    failures += 1;
                }
                worst_slack = worst_slack.min(r.rhs_exact - r.lhs);
                verdict = verdict.combine(r.verdict);
            }
        }
    }
    if pairs == 0 {
        return Ok(Some(Finding::new(
            Verdict::Inconclusive,
            "skipped: budget",
            json!({"skipped": skipped}),
        )));
    }
    Ok(Some(Finding::new(
        verdict,
        format!("{pairs} (η, V, α) cells, {skipped} skipped, {failures} failures"),
        json!({"checked": pairs, "skipped": skipped, "failures": failures, "margin_incidents": incidents,
            "min_slack": worst_slack}),
    )))
}

fn no_small_sets(c: &Ctx) -> Result<Finding> {
    if let Some((_, Err(e))) = c.a_sets.iter().find(|(_, a)| a.is_err()) {
        return Err(e.clone());
    }
    Ok(skipped("every A_α"))
}

fn check_block_observations(c: &Ctx) -> CheckResult {
    let sets = c.small_a_sets();
    if sets.is_empty() {
        return no_small_sets(c).map(Some);
    }
    let mut verdict = Verdict::Pass;
    let mut reports = Vec::new();
    for (alpha, a) in sets {
        let r = block_observations_check(a, None, c.set_caps(), c.opts.exec)?;
        verdict = verdict.combine(r.verdict);
        reports.push(json!({"alpha": alpha, "report": r}));
    }
    Ok(Some(Finding::new(
        verdict,
        format!("{} distinct A_α", reports.len()),
        reports,
    )))
}

/// The largest `A_α` small enough for a covering search.
fn cover_set<'a>(c: &'a Ctx) -> Result<Option<(f64, &'a AffineSet)>> {
    let sets = c.small_a_sets();
    if sets.is_empty() {
        no_small_sets(c)?;
    }
    Ok(sets.into_iter().find(|(_, a)| a.len() <= COVER_SET_LIMIT))
}

fn skipped(what: &str) -> Finding {
    Finding::new(
        Verdict::Inconclusive,
        format!("skipped: {what} exceeds the size budget"),
        Value::Null,
    )
}

fn check_power_law(c: &Ctx) -> CheckResult {
    let Some((alpha, a)) = cover_set(c)? else {
        return Ok(Some(skipped("every A_α")));
    };
    let g = growth_report(a, c.set_caps(), c.opts.exec)?;
    let k = g.covering_k as u128;
    let size = g.size as u128;
    let ok = g.size_sq as u128 <= k * size && g.size_cube as u128 <= k * k * size;
    Ok(Some(Finding::new(
        Verdict::from_bool(ok),
        format!(
            "α={alpha}: |A|={} |A²|={} |A³|={} K={}",
            g.size, g.size_sq, g.size_cube, g.covering_k
        ),
        json!({"alpha": alpha, "growth": g}),
    )))
}

fn check_prop_p(c: &Ctx) -> CheckResult {
    if !c.inst.orbit.transposed() {
        return Ok(Some(Finding::new(
            Verdict::HypothesesUnmet,
            "needs an H^T v orbit",
            Value::Null,
        )));
    }
    let opts = IterationOptions {
        exact: c.opts.exact,
        seed: c.inst.config.seed,
        pair_cap: c.inst.config.caps.pairs,
        exec: c.opts.exec,
        ..IterationOptions::default()
    };
    let r = prop_p_iteration(&c.inst.orbit, c.field()?, c.opts.eps_prime, opts)?;
    let detail = match (&r.schedule.chosen_j, &r.certificate) {
        (Some(j), Some(cert)) => format!(
            "J={} j={j} |F_j|={} checked={} violations={}",
            r.schedule.j_max, cert.f_count, cert.checked, cert.violations
        ),
        _ => format!("J={} no pigeonhole rung", r.schedule.j_max),
    };
    Ok(Some(Finding::new(r.verdict, detail, &r)))
}

/// The `(A_α, B, g, ξ)` tuples with `B = K₀ ⋉ W`.
struct LemmaTuple {
    alpha: f64,
    a: AffineSet,
    b: AffineSet,
    b_label: String,
    g: AffineElement,
    xi: FpVector,
    k: f64,
    /// Fitted for `g = 1`, which the block lemma uses.
    k_blocks: Option<f64>,
}

fn pick<T: Clone>(items: &[T], n: usize) -> Vec<T> {
    if items.len() <= n {
        return items.to_vec();
    }
    let half = n / 2;
    items[..half]
        .iter()
        .chain(&items[items.len() - (n - half)..])
        .cloned()
        .collect()
}

/// `None` when no `A_α` fits the size budget.
fn lemma_tuples(c: &Ctx) -> Result<Option<Vec<LemmaTuple>>> {
    let Some((alpha, a)) = cover_set(c)? else {
        return Ok(None);
    };
    let m = c.m();
    let d = c.d();
    let spec = c
        .spectra
        .iter()
        .find(|(x, _)| *x == alpha)
        .and_then(|(_, s)| s.as_ref().ok())
        .expect("A_α came from this spectrum");
    let xi = spec
        .vectors()
        .into_iter()
        .find(|x| !x.is_zero())
        .unwrap_or_else(|| FpVector::basis(m, d, 0));
    let h = &c.inst.group;
    let mut shifts = vec![AffineElement::identity(m, d)];
    if let Some(g) = h.generators().iter().find(|g| !g.is_identity()) {
        shifts.push(AffineElement::new(g.clone(), FpVector::zero(m, d))?);
    }
    if spec.contains(&xi) {
        shifts.push(AffineElement::translation_by(xi.clone()));
    }
    let subgroups = pick(&cyclic_subgroups(h)?, 4);
    let mut out = Vec::new();
    'outer: for k0 in &subgroups {
        for w in pick(&invariant_subspaces(k0), 3) {
            if (k0.order() as u64).saturating_mul(w.size()) > B_LIMIT {
                continue;
            }
            let b = semidirect(k0, &w)?;
            let k_blocks = fitted_k(a, &b, &shifts[0], c.set_caps(), c.opts.exec)?;
            for g in &shifts {
                if out.len() >= MAX_B_TUPLES {
                    break 'outer;
                }
                if let Some(k) = fitted_k(a, &b, g, c.set_caps(), c.opts.exec)? {
                    out.push(LemmaTuple {
                        alpha,
                        a: a.clone(),
                        b: b.clone(),
                        b_label: format!("|K0|={} dim W={}", k0.order(), w.dim()),
                        g: g.clone(),
                        xi: xi.clone(),
                        k,
                        k_blocks,
                    });
                }
            }
        }
    }
    Ok(Some(out))
}

fn check_blocks_lemma(c: &Ctx) -> CheckResult {
    let Some(tuples) = lemma_tuples(c)? else {
        return Ok(Some(skipped("every A_α")));
    };
    let mut verdict = Verdict::Pass;
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for t in &tuples {
        let Some(k) = t.k_blocks else { continue };
        if !seen.insert(t.b_label.clone()) {
            continue;
        }
        let r = blocks_lemma_check(&t.a, &t.b, k, c.set_caps(), c.opts.exec)?;
        verdict = verdict.combine(r.verdict);
        rows.push(json!({"alpha": t.alpha, "b": t.b_label, "k": k, "report": r}));
    }
    if rows.is_empty() {
        return Ok(None);
    }
    Ok(Some(Finding::new(
        verdict,
        format!("{} tuples", rows.len()),
        rows,
    )))
}

fn check_stab_lemma(c: &Ctx) -> CheckResult {
    let Some(tuples) = lemma_tuples(c)? else {
        return Ok(Some(skipped("every A_α")));
    };
    if tuples.is_empty() {
        return Ok(None);
    }
    let mut verdict = Verdict::Pass;
    let mut rows = Vec::new();
    for t in &tuples {
        let r = stab_lemma_check(&t.a, &t.b, &t.g, &t.xi, t.k, c.set_caps(), c.opts.exec)?;
        verdict = verdict.combine(r.verdict);
        rows.push(json!({"alpha": t.alpha, "b": t.b_label, "k": t.k, "report": r}));
    }
    Ok(Some(Finding::new(
        verdict,
        format!("{} tuples", rows.len()),
        rows,
    )))
}

fn check_translate_union(c: &Ctx) -> CheckResult {
    let h = &c.inst.group;
    let Some(w) = invariant_subspaces(h)
        .into_iter()
        .filter(|w| w.dim() > 0)
        .min_by_key(Subspace::dim)
    else {
        return Ok(None);
    };
    if (h.order() as u64).saturating_mul(w.size()) > B_LIMIT {
        return Ok(Some(skipped("H ⋉ W")));
    }
    let b = semidirect(h, &w)?;
    let mat = h
        .generators()
        .first()
        .cloned()
        .unwrap_or_else(|| h.identity());
    let (_, r) = translate_union_check(&b, 1, &mat, &w, c.set_caps(), c.opts.exec)?;
    Ok(Some(Finding::new(
        r.verdict,
        format!(
            "dim V={} |T|={} cosets={}",
            r.v_dim, r.t_size, r.coset_count
        ),
        &r,
    )))
}

fn check_commutator(c: &Ctx) -> CheckResult {
    let m = c.m();
    let d = c.d();
    let mut r = c.rng(3);
    let mut bad = 0;
    for _ in 0..COMMUTATOR_TRIPLES {
        let xi = random_vector(m, d, &mut r);
        let n = random_invertible(m, d, &mut r)?;
        let eta = random_vector(m, d, &mut r);
        let lhs = commutator(
            &AffineElement::translation_by(xi.clone()),
            &AffineElement::new(n.clone(), eta)?,
        )?;
        let rhs = AffineElement::translation_by(xi.sub(&n.apply(&xi)));
        if lhs != rhs {
            bad += 1;
        }
    }
    Ok(Some(Finding::new(
        Verdict::from_bool(bad == 0),
        format!("{COMMUTATOR_TRIPLES} triples, {bad} mismatches"),
        json!({"triples": COMMUTATOR_TRIPLES, "mismatches": bad}),
    )))
}

/// `U₀ = F_p^d`, `U_{i+1} = span{(M − I)u}`: the translations forced into the `i`-th
/// term of the lower central series of `H ⋉ F_p^d`.
fn forced_translations(h: &MatrixGroup, depth: usize) -> Vec<Subspace> {
    let m = h.modulus();
    let d = h.dim();
    let id = FpMatrix::identity(m, d);
    let mut out = vec![Subspace::full(m, d)];
    for _ in 0..depth {
        let prev = out.last().expect("nonempty");
        let images: Vec<FpVector> = h
            .iter()
            .flat_map(|g| {
                let diff = g.sub(&id);
                prev.basis()
                    .iter()
                    .map(move |u| diff.apply(u))
                    .collect::<Vec<_>>()
            })
            .collect();
        out.push(Subspace::span(m, d, &images).expect("same modulus"));
    }
    out
}

/// Every term of the series contains the translations `U_i` built from `H`; when
/// `U_i` is nonzero the term holds a nonidentity translation and cannot be trivial.
fn check_central_series(c: &Ctx) -> CheckResult {
    let h = &c.inst.group;
    if (h.order() as u64).saturating_mul(c.space()) > SERIES_LIMIT as u64 {
        return Ok(Some(skipped("H ⋉ F_p^d")));
    }
    let m = c.m();
    let d = c.d();
    let full = semidirect(h, &Subspace::full(m, d))?;
    let depth = d + 3;
    let series = lower_central_probe(
        &full.elements(),
        &[AffineElement::identity(m, d)],
        depth,
        c.inst.config.caps.group,
    )?;
    let forced = forced_translations(h, depth);
    let levels_ok = series.levels.iter().all(|l| {
        forced
            .get(l.index)
            .is_none_or(|u| u.dim() == 0 || l.translation_outside_h1)
    });
    let stable_forced = forced.windows(2).any(|w| w[0].dim() > 0 && w[0] == w[1]);
    let terminates = matches!(series.outcome, SeriesOutcome::Terminates { .. });
    let ok = levels_ok && !(stable_forced && terminates);
    Ok(Some(Finding::new(
        Verdict::from_bool(ok),
        format!(
            "{:?}, forced dims {:?}",
            series.outcome,
            forced.iter().map(Subspace::dim).collect::<Vec<_>>()
        ),
        &series,
    )))
}

fn check_trend(c: &Ctx) -> CheckResult {
    let ratio = c.field()?.max_nonzero_ratio();
    let beta = c.inst.profile.beta_eff;
    let verdict = if beta == 0.0 {
        Verdict::HypothesesUnmet
    } else {
        Verdict::from_bool(ratio < 1.0)
    };
    Ok(Some(Finding::new(
        verdict,
        format!("ratio={ratio:.6} beta_eff={beta:.6}"),
        json!({"max_nonzero_ratio": ratio, "beta_eff": beta, "delta_eff": c.inst.profile.delta_eff}),
    )))
}
