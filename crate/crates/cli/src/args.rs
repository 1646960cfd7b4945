use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use expsum::lab::{Caps, Family, InstanceConfig, CAP_ENV};

#[derive(Parser, Debug)]
#[command(
    name = "expsum",
    version,
    about = "Exponential sums over matrix-group orbits in F_p^d, with exact verifiers"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutFormat::Json, global = true)]
    pub out: OutFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate the group and print the orbit.
    Orbit(InstanceArgs),
    /// Spec_α of the orbit.
    Spectrum {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Resolve margin cells with exact cyclotomic arithmetic (p ≤ 61).
        #[arg(long)]
        exact: bool,
    },
    /// Effective orbit size and hyperplane exponents.
    Profile(InstanceArgs),
    /// Run one check of the battery, or all of them.
    Verify {
        /// A check name or `all`.
        lemma: String,
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        battery: BatteryArgs,
    },
    /// Growth of A_α: sizes of A, A², A³ and a covering number.
    Growth {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long)]
        exact: bool,
    },
    /// The α_j ladder, pigeonhole rung and restricted-product certificate.
    Iterate {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long = "eps-prime", default_value_t = 0.5)]
        eps_prime: f64,
        #[arg(long)]
        exact: bool,
    },
    /// Battery over many instances; CSV/JSON to stdout and optional files.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone)]
pub struct InstanceArgs {
    #[arg(long, default_value_t = 7)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, value_parser = parse_family, default_value = "quadratic-residue")]
    pub family: Family,
    /// Generators as JSON, a list of d×d row lists, e.g. `[[[1,1],[0,1]]]`.
    #[arg(long)]
    pub gens: Option<String>,
    /// Base point, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub v: Option<Vec<i64>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Orbit H v instead of H^T v.
    #[arg(long)]
    pub direct: bool,
    #[command(flatten)]
    pub caps: CapArgs,
}

#[derive(Args, Debug, Clone)]
pub struct CapArgs {
    /// Cap overrides such as `space=1e6,group=5000`, or one number for every cap.
    #[arg(long, env = CAP_ENV)]
    pub cap: Option<String>,
}

impl CapArgs {
    pub fn apply(&self, caps: &mut Caps) -> Result<()> {
        if let Some(spec) = &self.cap {
            caps.apply_overrides(spec).context("--cap")?;
        }
        Ok(())
    }
}

#[derive(Args, Debug, Clone)]
pub struct BatteryArgs {
    /// α grid, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    #[arg(long = "eps-prime", default_value_t = 0.5)]
    pub eps_prime: f64,
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    /// TOML sweep file with `schema_version` and `[[instance]]` entries.
    #[arg(long, conflicts_with_all = ["family", "p"])]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_family)]
    pub family: Option<Family>,
    /// Primes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<u64>,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long)]
    pub gens: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub v: Option<Vec<i64>>,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seeds per prime: `seed, seed+1, …`.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[command(flatten)]
    pub battery: BatteryArgs,
    #[command(flatten)]
    pub caps: CapArgs,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub csv_file: Option<PathBuf>,
    #[arg(long)]
    pub json_file: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: expsum::Error| e.to_string())
}

pub fn parse_gens(text: &str) -> Result<Vec<Vec<Vec<i64>>>> {
    serde_json::from_str(text)
        .context("--gens must be JSON: a list of matrices given as lists of rows")
}

impl InstanceArgs {
    pub fn config(&self) -> Result<InstanceConfig> {
        let mut cfg = InstanceConfig::new(self.family, self.p, self.d).with_seed(self.seed);
        cfg.transposed = !self.direct;
        cfg.v = self.v.clone();
        if let Some(g) = &self.gens {
            cfg.gens = Some(parse_gens(g)?);
        }
        self.caps.apply(&mut cfg.caps)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

impl SweepArgs {
    pub fn configs(&self) -> Result<(Vec<InstanceConfig>, Option<expsum::lab::BatteryConfig>)> {
        if let Some(path) = &self.config {
            let file = expsum::lab::SweepFile::load(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let mut configs = file.instances;
            for c in &mut configs {
                self.caps.apply(&mut c.caps)?;
            }
            return Ok((configs, Some(file.battery)));
        }
        let Some(family) = self.family else {
            if self.p.is_empty() {
                return Ok((Vec::new(), None));
            }
            bail!("--family is required with --p");
        };
        let gens = self.gens.as_deref().map(parse_gens).transpose()?;
        let mut configs = Vec::new();
        for &p in &self.p {
            for s in 0..self.seeds {
                let mut cfg = InstanceConfig::new(family, p, self.d).with_seed(self.seed + s);
                cfg.v = self.v.clone();
                cfg.gens = gens.clone();
                self.caps.apply(&mut cfg.caps)?;
                cfg.validate()?;
                configs.push(cfg);
            }
        }
        Ok((configs, None))
    }
}
