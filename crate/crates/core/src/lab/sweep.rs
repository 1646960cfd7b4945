use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use super::battery::{verify_all, BatteryOptions, BatteryReport};
use super::config::{InstanceConfig, SCHEMA_VERSION};
use super::instance::gen_instance;
use crate::error::{Error, Result};
use crate::Verdict;

/// One CSV row. The field order is the column order of [`SweepRow::COLUMNS`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub family: String,
    pub p: u64,
    pub d: usize,
    pub seed: u64,
    pub group_order: Option<usize>,
    pub orbit_size: Option<usize>,
    pub delta_eff: Option<f64>,
    pub beta_eff: Option<f64>,
    pub max_nonzero_ratio: Option<f64>,
    /// `log_p max_nonzero_ratio`.
    pub log_p_ratio: Option<f64>,
    pub pass: usize,
    pub fail: usize,
    pub hypotheses_unmet: usize,
    pub inconclusive: usize,
    /// Names of failed checks joined by `;`.
    pub failed_checks: String,
    /// Instance-level error, empty when the battery ran.
    pub error: String,
}

/// Floats use 12 significant digits in scientific notation; missing values are empty.
fn fmt_f64(x: Option<f64>) -> String {
    x.map(|x| format!("{x:.11e}")).unwrap_or_default()
}

fn fmt_opt<T: ToString>(x: Option<T>) -> String {
    x.map(|x| x.to_string()).unwrap_or_default()
}

impl SweepRow {
    pub const COLUMNS: [&'static str; 16] = [
        "family",
        "p",
        "d",
        "seed",
        "group_order",
        "orbit_size",
        "delta_eff",
        "beta_eff",
        "max_nonzero_ratio",
        "log_p_ratio",
        "pass",
        "fail",
        "hypotheses_unmet",
        "inconclusive",
        "failed_checks",
        "error",
    ];

    fn from_outcome(cfg: &InstanceConfig, outcome: &Result<BatteryReport>) -> Self {
        let mut row = SweepRow {
            family: cfg.family.to_string(),
            p: cfg.p,
            d: cfg.d,
            seed: cfg.seed,
            group_order: None,
            orbit_size: None,
            delta_eff: None,
            beta_eff: None,
            max_nonzero_ratio: None,
            log_p_ratio: None,
            pass: 0,
            fail: 0,
            hypotheses_unmet: 0,
            inconclusive: 0,
            failed_checks: String::new(),
            error: String::new(),
        };
        match outcome {
            Ok(r) => {
                row.group_order = Some(r.group_order);
                row.orbit_size = Some(r.orbit_size);
                row.delta_eff = Some(r.delta_eff);
                row.beta_eff = Some(r.beta_eff);
                row.max_nonzero_ratio = r.max_nonzero_ratio;
                row.log_p_ratio = r.max_nonzero_ratio.map(|x| x.ln() / (cfg.p as f64).ln());
                row.pass = r.count(Verdict::Pass);
                row.fail = r.count(Verdict::Fail);
                row.hypotheses_unmet = r.count(Verdict::HypothesesUnmet);
                row.inconclusive = r.count(Verdict::Inconclusive);
                row.failed_checks = r.failed().join(";");
            }
            Err(e) => row.error = e.to_string(),
        }
        row
    }

    fn record(&self) -> [String; 16] {
        [
            self.family.clone(),
            self.p.to_string(),
            self.d.to_string(),
            self.seed.to_string(),
            fmt_opt(self.group_order),
            fmt_opt(self.orbit_size),
            fmt_f64(self.delta_eff),
            fmt_f64(self.beta_eff),
            fmt_f64(self.max_nonzero_ratio),
            fmt_f64(self.log_p_ratio),
            self.pass.to_string(),
            self.fail.to_string(),
            self.hypotheses_unmet.to_string(),
            self.inconclusive.to_string(),
            self.failed_checks.clone(),
            self.error.clone(),
        ]
    }
}

/// Rows sorted by `(family, p, seed)`, with per-row battery details and timing.
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub reports: Vec<Option<BatteryReport>>,
    pub timings_ms: Vec<f64>,
}

impl SweepResult {
    pub fn any_failed(&self) -> bool {
        self.rows.iter().any(|r| r.fail > 0)
    }

    /// CSV without timing, so that the bytes depend only on the configs.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(SweepRow::COLUMNS).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.record()).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// JSON with the row fields, per-check verdicts and wall time.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .zip(&self.reports)
            .zip(&self.timings_ms)
            .map(|((row, report), ms)| {
                let mut v = serde_json::to_value(row).expect("row serializes");
                let checks: BTreeMap<&str, Verdict> = report
                    .iter()
                    .flat_map(|r| r.checks.iter().map(|c| (c.name, c.verdict)))
                    .collect();
                v["checks"] = json!(checks);
                v["timing_ms"] = json!(ms);
                v
            })
            .collect();
        json!({"schema_version": SCHEMA_VERSION, "rows": rows})
    }
}

fn run_one(cfg: &InstanceConfig, battery: &BatteryOptions) -> (Result<BatteryReport>, f64) {
    let start = Instant::now();
    let outcome = gen_instance(cfg).and_then(|inst| verify_all(&inst, battery));
    (outcome, start.elapsed().as_secs_f64() * 1e3)
}

/// Runs the battery on every config with `jobs` worker threads (0 picks the
/// number of cores). Rows are independent of `jobs`.
pub fn run_sweep(
    configs: &[InstanceConfig],
    battery: &BatteryOptions,
    jobs: usize,
) -> Result<SweepResult> {
    for cfg in configs {
        cfg.validate()?;
    }
    let outcomes = run_all(configs, battery, jobs)?;
    let mut order: Vec<usize> = (0..configs.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&configs[a], &configs[b]);
        (x.family.as_str(), x.p, x.seed).cmp(&(y.family.as_str(), y.p, y.seed))
    });
    let mut result = SweepResult {
        rows: Vec::with_capacity(configs.len()),
        reports: Vec::with_capacity(configs.len()),
        timings_ms: Vec::with_capacity(configs.len()),
    };
    for i in order {
        let (outcome, ms) = &outcomes[i];
        result
            .rows
            .push(SweepRow::from_outcome(&configs[i], outcome));
        result.reports.push(outcome.as_ref().ok().cloned());
        result.timings_ms.push(*ms);
    }
    Ok(result)
}

#[cfg(feature = "parallel")]
fn run_all(
    configs: &[InstanceConfig],
    battery: &BatteryOptions,
    jobs: usize,
) -> Result<Vec<(Result<BatteryReport>, f64)>> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(pool.install(|| configs.par_iter().map(|c| run_one(c, battery)).collect()))
}

#[cfg(not(feature = "parallel"))]
fn run_all(
    configs: &[InstanceConfig],
    battery: &BatteryOptions,
    _jobs: usize,
) -> Result<Vec<(Result<BatteryReport>, f64)>> {
    Ok(configs.iter().map(|c| run_one(c, battery)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::Family;

    #[test]
    fn columns_match_row_fields() {
        let cfg = InstanceConfig::new(Family::QuadraticResidue, 7, 1);
        let row = SweepRow::from_outcome(&cfg, &Err(Error::ZeroVector));
        let v = serde_json::to_value(&row).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        let mut expected = SweepRow::COLUMNS.to_vec();
        let mut got = keys.clone();
        expected.sort_unstable();
        got.sort_unstable();
        assert_eq!(got, expected);
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let r = run_sweep(&[], &BatteryOptions::default(), 1).unwrap();
        assert_eq!(
            r.to_csv().unwrap(),
            format!("{}\n", SweepRow::COLUMNS.join(","))
        );
        assert!(!r.any_failed());
    }

    #[test]
    fn rows_are_sorted_and_ratio_matches_gauss_sums() {
        let ps = [31u64, 7, 19, 11, 23];
        let configs: Vec<_> = ps
            .iter()
            .map(|&p| InstanceConfig::new(Family::QuadraticResidue, p, 1))
            .collect();
        let opts = BatteryOptions::default().select("parseval").unwrap();
        let r = run_sweep(&configs, &opts, 2).unwrap();
        let got: Vec<u64> = r.rows.iter().map(|row| row.p).collect();
        assert_eq!(got, vec![7, 11, 19, 23, 31]);
        for row in &r.rows {
            let p = row.p as f64;
            assert!((row.max_nonzero_ratio.unwrap() - (p + 1.0).sqrt() / (p - 1.0)).abs() < 1e-9);
        }
        let csv = r.to_csv().unwrap();
        assert_eq!(csv.lines().count(), 6);
        assert!(csv
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("quadratic-residue,7,1,0,3,3,"));
    }

    #[test]
    fn instance_errors_fill_the_error_column() {
        let mut cfg = InstanceConfig::new(Family::QuadraticResidue, 101, 1);
        cfg.caps.group = 3;
        let r = run_sweep(&[cfg], &BatteryOptions::default(), 1).unwrap();
        assert!(!r.rows[0].error.is_empty());
        assert!(r.reports[0].is_none());
        assert!(!r.any_failed());
    }
}
