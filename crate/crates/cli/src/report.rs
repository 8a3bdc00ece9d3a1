//! Aggregated curves over experiment rows, plus the JSON reports printed by
//! the selection commands.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use workerset_core::analysis::{t_max, two_sided_interval, upper_confidence_bound};

use crate::config::Method;
use crate::error::{CliError, Result};
use crate::experiment::RunRow;

/// Largest worker count included in the low-n slope fit.
pub const LOW_N_LIMIT: usize = 807;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub method: Method,
    pub k: u32,
    pub n_workers: usize,
    pub runs: usize,
    pub mean_clique: f64,
    /// One-sided upper bound at the report's confidence level.
    pub m_max: usize,
    /// Central 95% interval of the observed clique sizes.
    pub ci_low: usize,
    pub ci_high: usize,
    pub t_max_strict: u64,
    pub t_max_relaxed: u64,
    /// `m_max >= t_max_strict`.
    pub collusion: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub method: Method,
    pub k: u32,
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
    pub n_limit: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub confidence: f64,
    pub points: Vec<CurvePoint>,
    pub slopes: Vec<SlopeFit>,
    /// Points whose upper bound reaches the strict threshold.
    pub collusion_points: usize,
}

/// Least-squares line through `(x, y)`; `None` with fewer than two distinct
/// `x` values.
pub fn linear_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if points.len() < 2 || sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Aggregates rows per `(method, k, n)`. The result does not depend on row
/// order.
pub fn summarize(rows: &[RunRow], confidence: f64) -> Result<Summary> {
    if rows.is_empty() {
        return Err(CliError::config("no result rows to report on"));
    }
    let mut groups: BTreeMap<(Method, u32, usize), Vec<usize>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.method, r.k, r.n_workers))
            .or_default()
            .push(r.clique_size);
    }
    let mut points = Vec::with_capacity(groups.len());
    for ((method, k, n), mut sizes) in groups {
        sizes.sort_unstable();
        let mean = sizes.iter().map(|&s| s as f64).sum::<f64>() / sizes.len() as f64;
        let m_max = upper_confidence_bound(&sizes, confidence)?;
        let (ci_low, ci_high) = two_sided_interval(&sizes, 0.95)?;
        let bounds = t_max(n as u64);
        points.push(CurvePoint {
            method,
            k,
            n_workers: n,
            runs: sizes.len(),
            mean_clique: mean,
            m_max,
            ci_low,
            ci_high,
            t_max_strict: bounds.t_max_strict,
            t_max_relaxed: bounds.t_max_relaxed,
            collusion: m_max as u64 >= bounds.t_max_strict,
        });
    }
    let mut series: BTreeMap<(Method, u32), Vec<(f64, f64)>> = BTreeMap::new();
    for p in points.iter().filter(|p| p.n_workers <= LOW_N_LIMIT) {
        series
            .entry((p.method, p.k))
            .or_default()
            .push((p.n_workers as f64, p.mean_clique));
    }
    let slopes = series
        .into_iter()
        .filter_map(|((method, k), pts)| {
            linear_fit(&pts).map(|(slope, intercept)| SlopeFit {
                method,
                k,
                slope,
                intercept,
                points: pts.len(),
                n_limit: LOW_N_LIMIT,
            })
        })
        .collect();
    Ok(Summary {
        confidence,
        collusion_points: points.iter().filter(|p| p.collusion).count(),
        points,
        slopes,
    })
}

/// Plot-ready CSV, one line per curve point.
pub fn write_plot_csv(summary: &Summary, w: impl Write) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    for p in &summary.points {
        csv.serialize(p).map_err(CliError::output)?;
    }
    csv.flush().map_err(CliError::output)
}

/// Output of the `seed` and `sample` commands. Big integers are decimal
/// strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedReport {
    pub seed: String,
    pub space: String,
    pub commits: Option<usize>,
    pub n: Option<usize>,
    pub workers: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommunityQuota {
    pub community: u32,
    pub size: usize,
    pub workers: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionParameters {
    pub n_workers: usize,
    pub avoid_adjacent_workers: bool,
    pub communities: usize,
    pub modularity: Option<f64>,
}

/// Output of the `graph-select` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub method: String,
    pub quotas: Vec<CommunityQuota>,
    pub workers: Vec<u64>,
    pub parameters: SelectionParameters,
}
