use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Worker counts of the reference experiment; larger sizes follow in steps
/// of 200 from 1000 to 3000.
pub const BASE_N_LIST: [usize; 9] = [10, 16, 43, 70, 114, 186, 304, 495, 807];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ArrangementRandom,
    SizeProRataMl,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ArrangementRandom => "arrangement-random",
            Method::SizeProRataMl => "size-pro-rata-ml",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "arrangement-random" => Ok(Method::ArrangementRandom),
            "size-pro-rata-ml" => Ok(Method::SizeProRataMl),
            _ => Err(format!("unknown method {s:?} (arrangement-random | size-pro-rata-ml)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph_path: PathBuf,
    pub method: Method,
    #[serde(default = "default_n_list")]
    pub n_workers_list: Vec<usize>,
    /// Fixed execution count per worker count. When absent, random runs use
    /// 100 executions up to 807 workers and 5 beyond.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub executions_per_point: Option<u32>,
    #[serde(default = "default_k_list")]
    pub k_list: Vec<u32>,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default)]
    pub base_run_seed: u64,
}

pub fn default_n_list() -> Vec<usize> {
    BASE_N_LIST
        .iter()
        .copied()
        .chain((0..=10).map(|k| 1000 + 200 * k))
        .collect()
}

/// `points` worker counts spaced evenly on a log scale between `lo` and
/// `hi` inclusive, rounded and deduplicated.
pub fn log_spaced_n_list(lo: usize, hi: usize, points: usize) -> Vec<usize> {
    if points <= 1 || lo >= hi {
        return vec![lo];
    }
    let ratio = (hi as f64 / lo as f64).ln() / (points - 1) as f64;
    let mut out: Vec<usize> = (0..points)
        .map(|i| (lo as f64 * (ratio * i as f64).exp()).round() as usize)
        .collect();
    out.dedup();
    out
}

fn default_k_list() -> Vec<u32> {
    vec![1, 2, 3]
}

fn default_confidence() -> f64 {
    0.975
}

impl ExperimentConfig {
    pub fn new(graph_path: impl Into<PathBuf>, method: Method) -> Self {
        Self {
            graph_path: graph_path.into(),
            method,
            n_workers_list: default_n_list(),
            executions_per_point: None,
            k_list: default_k_list(),
            confidence: default_confidence(),
            base_run_seed: 0,
        }
    }

    /// Executions at worker count `n`. Graph-aware selection is
    /// deterministic, so it always runs once.
    pub fn executions_for(&self, n: usize) -> u32 {
        match (self.method, self.executions_per_point) {
            (Method::SizeProRataMl, _) => 1,
            (_, Some(e)) => e,
            (_, None) if n <= 807 => 100,
            (_, None) => 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_workers_list.is_empty() || self.n_workers_list.contains(&0) {
            return Err(CliError::config("n_workers_list needs positive worker counts"));
        }
        if self.executions_per_point == Some(0) {
            return Err(CliError::config("executions_per_point must be at least 1"));
        }
        if self.k_list.is_empty() || self.k_list.iter().any(|k| !(1..=3).contains(k)) {
            return Err(CliError::config("k_list must be a non-empty subset of {1, 2, 3}"));
        }
        if self.base_run_seed > i64::MAX as u64 {
            return Err(CliError::config("base_run_seed must fit a signed 64-bit integer"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(CliError::config("confidence must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::config(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}
