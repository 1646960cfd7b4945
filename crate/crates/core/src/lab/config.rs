use serde::{Deserialize, Serialize};

use crate::affine::{SetCaps, DEFAULT_SET_CAP, DEFAULT_WORK_CAP};
use crate::error::{Error, Result};
use crate::fourier::{DEFAULT_DFT_CAP, DEFAULT_PAIR_CAP};
use crate::fp::PrimeModulus;
use crate::group::DEFAULT_GROUP_CAP;

/// Environment variable read by [`Caps::from_env`], same syntax as [`Caps::apply_overrides`].
pub const CAP_ENV: &str = "EXPSUM_CAP";

/// Schema version accepted by [`SweepFile::parse`].
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    CyclicRandom,
    DiagonalTorus,
    QuadraticResidue,
    UnipotentCounterexample,
    ExplicitGenerators,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::CyclicRandom,
        Family::DiagonalTorus,
        Family::QuadraticResidue,
        Family::UnipotentCounterexample,
        Family::ExplicitGenerators,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::CyclicRandom => "cyclic-random",
            Family::DiagonalTorus => "diagonal-torus",
            Family::QuadraticResidue => "quadratic-residue",
            Family::UnipotentCounterexample => "unipotent-counterexample",
            Family::ExplicitGenerators => "explicit-generators",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown family {s:?}")))
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Resource limits for one instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    /// Largest matrix group enumerated.
    pub group: usize,
    /// Largest `p^d` for transforms and hyperplane scans.
    pub space: u64,
    /// Largest affine set materialized.
    pub set: usize,
    /// Multiplications allowed for one product set.
    pub work: u64,
    /// Pairs enumerated by the spectrum pair counts.
    pub pairs: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            group: DEFAULT_GROUP_CAP,
            space: DEFAULT_DFT_CAP,
            set: DEFAULT_SET_CAP,
            work: DEFAULT_WORK_CAP,
            pairs: DEFAULT_PAIR_CAP,
        }
    }
}

fn parse_count(s: &str) -> Result<u64> {
    let s = s.trim().replace('_', "");
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 => Ok(x as u64),
        _ => Err(Error::Config(format!("bad cap value {s:?}"))),
    }
}

impl Caps {
    pub fn set_caps(&self) -> SetCaps {
        SetCaps {
            max_elements: self.set,
            max_work: self.work,
        }
    }

    /// Applies `key=value` pairs separated by commas, e.g. `space=1e6,group=5000`.
    /// A bare number sets every cap.
    pub fn apply_overrides(&mut self, spec: &str) -> Result<()> {
        let spec = spec.trim();
        if spec.is_empty() {
            return Ok(());
        }
        if !spec.contains('=') {
            let n = parse_count(spec)?;
            let n_usize = usize::try_from(n).unwrap_or(usize::MAX);
            *self = Caps {
                group: n_usize,
                space: n,
                set: n_usize,
                work: n,
                pairs: n,
            };
            return Ok(());
        }
        for part in spec.split(',').filter(|s| !s.trim().is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got {part:?}")))?;
            let n = parse_count(value)?;
            let as_usize =
                || usize::try_from(n).map_err(|_| Error::Config(format!("cap {n} too large")));
            match key.trim() {
                "group" => self.group = as_usize()?,
                "space" => self.space = n,
                "set" => self.set = as_usize()?,
                "work" => self.work = n,
                "pairs" => self.pairs = n,
                other => return Err(Error::Config(format!("unknown cap {other:?}"))),
            }
        }
        Ok(())
    }

    /// Defaults with the overrides from [`CAP_ENV`], if set.
    pub fn from_env() -> Result<Self> {
        let mut caps = Caps::default();
        if let Ok(spec) = std::env::var(CAP_ENV) {
            caps.apply_overrides(&spec)?;
        }
        Ok(caps)
    }
}

fn default_transposed() -> bool {
    true
}

/// One instance of the laboratory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub family: Family,
    pub p: u64,
    pub d: usize,
    /// Base point; each family has a default.
    #[serde(default)]
    pub v: Option<Vec<i64>>,
    /// Orbit `H^T v` when true, `H v` otherwise.
    #[serde(default = "default_transposed")]
    pub transposed: bool,
    #[serde(default)]
    pub seed: u64,
    /// Generators as lists of rows, for `explicit-generators`.
    #[serde(default)]
    pub gens: Option<Vec<Vec<Vec<i64>>>>,
    #[serde(default)]
    pub caps: Caps,
}

impl InstanceConfig {
    pub fn new(family: Family, p: u64, d: usize) -> Self {
        Self {
            family,
            p,
            d,
            v: None,
            transposed: true,
            seed: 0,
            gens: None,
            caps: Caps::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_v(mut self, v: Vec<i64>) -> Self {
        self.v = Some(v);
        self
    }

    pub fn with_gens(mut self, gens: Vec<Vec<Vec<i64>>>) -> Self {
        self.gens = Some(gens);
        self
    }

    pub fn validate(&self) -> Result<PrimeModulus> {
        let m = PrimeModulus::new(self.p)?;
        if self.d == 0 {
            return Err(Error::Config("d must be at least 1".into()));
        }
        if let Some(v) = &self.v {
            if v.len() != self.d {
                return Err(Error::Config(format!(
                    "v has {} coordinates, expected {}",
                    v.len(),
                    self.d
                )));
            }
            if v.iter().all(|&c| m.reduce(c) == 0) {
                return Err(Error::Config("v must be nonzero".into()));
            }
        }
        match self.family {
            Family::QuadraticResidue if self.d != 1 => {
                return Err(Error::Config("quadratic-residue requires d = 1".into()));
            }
            Family::UnipotentCounterexample if self.d < 2 => {
                return Err(Error::Config(
                    "unipotent-counterexample requires d ≥ 2".into(),
                ));
            }
            Family::ExplicitGenerators => {
                let gens = self
                    .gens
                    .as_ref()
                    .ok_or_else(|| Error::Config("explicit-generators requires gens".into()))?;
                for g in gens {
                    if g.len() != self.d || g.iter().any(|row| row.len() != self.d) {
                        return Err(Error::Config(format!("generator is not {0}×{0}", self.d)));
                    }
                }
            }
            _ => {}
        }
        if self.family != Family::ExplicitGenerators && self.gens.is_some() {
            return Err(Error::Config(format!(
                "gens only applies to explicit-generators, not {}",
                self.family
            )));
        }
        Ok(m)
    }
}

/// Battery parameters shared by a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatteryConfig {
    pub alphas: Vec<f64>,
    pub eps_prime: f64,
    /// Resolve margin cells with the cyclotomic evaluator (p ≤ 61).
    pub exact: bool,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self {
            alphas: (1..=9).map(|i| f64::from(i) / 10.0).collect(),
            eps_prime: 0.5,
            exact: true,
        }
    }
}

/// A sweep description: `schema_version`, an optional `[battery]` table and `[[instance]]` entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub schema_version: u32,
    #[serde(default)]
    pub battery: BatteryConfig,
    #[serde(default, rename = "instance")]
    pub instances: Vec<InstanceConfig>,
}

impl SweepFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: SweepFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        for inst in &file.instances {
            inst.validate()?;
        }
        Ok(file)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_overrides() {
        let mut c = Caps::default();
        c.apply_overrides("space=1e6, group=5_000").unwrap();
        assert_eq!((c.space, c.group), (1_000_000, 5000));
        assert_eq!(c.set, DEFAULT_SET_CAP);
        c.apply_overrides("42").unwrap();
        assert_eq!(
            (c.group, c.space, c.set, c.work, c.pairs),
            (42, 42, 42, 42, 42)
        );
        assert!(c.apply_overrides("nope=3").is_err());
        assert!(c.apply_overrides("space=-1").is_err());
    }

    #[test]
    fn family_validation() {
        assert!(InstanceConfig::new(Family::QuadraticResidue, 7, 1)
            .validate()
            .is_ok());
        assert!(InstanceConfig::new(Family::QuadraticResidue, 7, 2)
            .validate()
            .is_err());
        assert!(InstanceConfig::new(Family::UnipotentCounterexample, 11, 1)
            .validate()
            .is_err());
        assert!(InstanceConfig::new(Family::ExplicitGenerators, 5, 2)
            .validate()
            .is_err());
        assert!(InstanceConfig::new(Family::DiagonalTorus, 9, 2)
            .validate()
            .is_err());
        let bad_v = InstanceConfig::new(Family::DiagonalTorus, 5, 2).with_v(vec![5, 10]);
        assert!(bad_v.validate().is_err());
        let gens = InstanceConfig::new(Family::ExplicitGenerators, 5, 2)
            .with_gens(vec![vec![vec![1, 1], vec![0, 1]]]);
        assert!(gens.validate().is_ok());
    }

    #[test]
    fn sweep_file_round_trip() {
        let text = r#"
            schema_version = 1
            [battery]
            alphas = [0.25, 0.5]
            [[instance]]
            family = "quadratic-residue"
            p = 7
            d = 1
            [[instance]]
            family = "explicit-generators"
            p = 5
            d = 2
            v = [1, 0]
            gens = [[[1, 1], [0, 1]]]
            caps = { space = 1000 }
        "#;
        let f = SweepFile::parse(text).unwrap();
        assert_eq!(f.battery.alphas, vec![0.25, 0.5]);
        assert_eq!(f.battery.eps_prime, 0.5);
        assert_eq!(f.instances.len(), 2);
        assert!(f.instances[0].transposed);
        assert_eq!(f.instances[1].caps.space, 1000);
        assert_eq!(f.instances[1].caps.group, DEFAULT_GROUP_CAP);
        let back = SweepFile::parse(&toml::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
        assert!(SweepFile::parse("schema_version = 2").is_err());
        assert!(
            SweepFile::parse("schema_version = 1\n[[instance]]\nfamily = \"x\"\np = 7\nd = 1")
                .is_err()
        );
    }
}
