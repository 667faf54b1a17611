//! Seeded Monte Carlo experiments and their reports.
//!
//! Every trial `i` draws from its own seed `derive_seed(master, i)` and
//! trials are collected by index, so a report depends only on its config
//! and not on the number of worker threads.

mod runs;
pub mod stats;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::{derive_seed, SamplerConfig, SamplingMethod, SeedStream, RNG_ALGORITHM};
use crate::spectral::DEFAULT_DENSE_CAP;

pub use runs::{
    edge_universality_experiment, gaussian_divisible_experiment, local_law_experiment, loop_bracket,
    loop_equation_check, ramanujan_fraction, rigidity_experiment, LoopEnsemble, Thresholds,
};
pub use stats::{correlation, ks_distance, mean, sem, variance, wilson_interval, Histogram, Z95};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub d: usize,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub method: SamplingMethod,
    /// Resampling radius.
    pub ell: usize,
    /// Ball radius for local extensions.
    pub radius: usize,
    /// Gaussian-divisible time.
    pub t: f64,
    pub z_grid: Vec<Complex64>,
    pub dense_cap: usize,
}

impl ExperimentConfig {
    pub fn new(d: usize, n: usize, trials: usize, seed: u64) -> Self {
        Self {
            d,
            n,
            trials,
            seed,
            method: SamplerConfig::for_degree(d).method,
            ell: 1,
            radius: 2,
            t: 0.0,
            z_grid: vec![Complex64::new(0.0, 1.0)],
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }

    pub fn sampler(&self) -> SamplerConfig {
        SamplerConfig::for_degree(self.d).with_method(self.method)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::BadParams(m));
        if self.d < 3 {
            return bad(format!("degree must be >= 3, got {}", self.d));
        }
        if self.n <= self.d || !(self.n * self.d).is_multiple_of(2) {
            return bad(format!("need n > d and n d even (n={}, d={})", self.n, self.d));
        }
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if !(0.0..=1.0).contains(&self.t) {
            return bad(format!("t must lie in [0, 1], got {}", self.t));
        }
        if self.z_grid.is_empty() || self.z_grid.iter().any(|z| !(z.im > 0.0)) {
            return bad("z grid must be nonempty with Im z > 0".into());
        }
        if self.dense_cap == 0 {
            return bad("dense cap must be positive".into());
        }
        Ok(())
    }
}

/// Raw per-trial values keyed by name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub seed: u64,
    pub values: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub metrics: BTreeMap<String, f64>,
    /// Pass thresholds and, separately, the asymptotic targets.
    pub thresholds: BTreeMap<String, f64>,
    pub histogram: Option<Histogram>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub master_seed: u64,
    pub sampler: Option<SamplerConfig>,
    pub rng: String,
    pub code_version: String,
    pub tolerances: BTreeMap<String, f64>,
}

impl Provenance {
    fn new(cfg: &ExperimentConfig, sampler: Option<SamplerConfig>) -> Self {
        Self {
            master_seed: cfg.seed,
            sampler,
            rng: RNG_ALGORITHM.to_string(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            tolerances: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub experiment: String,
    pub params: ExperimentConfig,
    pub seed: u64,
    pub trials: Vec<TrialRecord>,
    pub summary: Summary,
    pub provenance: Provenance,
}

impl SummaryReport {
    /// The per-trial values stored under `key`, in trial order.
    pub fn column(&self, key: &str) -> Vec<f64> {
        self.trials
            .iter()
            .map(|t| t.values.get(key).copied().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn metric(&self, key: &str) -> Option<f64> {
        self.summary.metrics.get(key).copied()
    }

    /// Pretty JSON with keys sorted at every level.
    pub fn to_json(&self) -> Result<String> {
        let value = serde_json::to_value(self)?;
        Ok(serde_json::to_string_pretty(&value)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// One row per trial: `index,seed,<value keys in sorted order>`, with
    /// 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let keys: Vec<&String> = self
            .trials
            .first()
            .map(|t| t.values.keys().collect())
            .unwrap_or_default();
        write!(w, "index,seed")?;
        for k in &keys {
            write!(w, ",{k}")?;
        }
        writeln!(w)?;
        for t in &self.trials {
            write!(w, "{},{}", t.index, t.seed)?;
            for k in &keys {
                write!(w, ",{:.16e}", t.values.get(*k).copied().unwrap_or(f64::NAN))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::BadParams(format!("unknown format {other:?}"))),
        }
    }
}

pub fn write_report(report: &SummaryReport, path: &Path, format: ReportFormat) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    match format {
        ReportFormat::Json => {
            file.write_all(report.to_json()?.as_bytes())?;
            file.write_all(b"\n")?;
        }
        ReportFormat::Csv => report.write_csv(&mut file)?,
    }
    file.flush()?;
    Ok(())
}

/// Runs `trial(index, seed)` for every trial on the current rayon pool
/// and collects the records by index.
fn run_trials<F>(cfg: &ExperimentConfig, trial: F) -> Result<Vec<TrialRecord>>
where
    F: Fn(usize, u64) -> Result<BTreeMap<String, f64>> + Sync,
{
    let stream = SeedStream::new(cfg.seed);
    (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(&stream, i as u64);
            trial(i, seed).map(|values| TrialRecord { index: i, seed, values })
        })
        .collect()
}

fn values<const K: usize>(pairs: [(&str, f64); K]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
