//! Repeated selection runs over a social graph and their collusion metrics.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use workerset_core::analysis::{distance_k_clique, t_max};
use workerset_core::community::{detect_communities, Partition};
use workerset_core::dispersion::{select_workers_with_partition, GraphAwareOptions};
use workerset_core::graph::{SocialGraph, VertexId};
use workerset_core::seed::{sample_indices, Seed};

use crate::config::{ExperimentConfig, Method};
use crate::error::{CliError, Result};
use crate::formats::{file_digest, read_edge_list};

/// Provenance value of rows produced without randomness.
pub const DETERMINISTIC: &str = "deterministic";

/// Seed of execution `e` at worker count `n`: the first 8 bytes of
/// SHA-256 over `run:<base>:<n>:<e>`, big-endian.
pub fn run_seed(base: u64, n: usize, e: u32) -> u64 {
    let digest = Sha256::digest(format!("run:{base}:{n}:{e}").as_bytes());
    u64::from_be_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// One metric row: a selection run measured at one distance `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRow {
    pub run_id: String,
    pub method: Method,
    pub n_workers: usize,
    pub k: u32,
    pub clique_size: usize,
    pub t_max_strict: u64,
    pub t_max_relaxed: u64,
    pub collusion_flag: bool,
    pub execution: u32,
    /// Decimal run seed, or `deterministic`.
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkerRun {
    pub run_id: String,
    pub n_workers: usize,
    pub execution: u32,
    pub provenance: String,
    /// Selected vertex ids, ascending.
    pub workers: Vec<VertexId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExperimentOutput {
    pub rows: Vec<RunRow>,
    pub worker_sets: Vec<WorkerRun>,
}

fn run_id(n: usize, e: u32) -> String {
    format!("n{n}-e{e}")
}

fn measure(
    g: &SocialGraph,
    cfg: &ExperimentConfig,
    n: usize,
    e: u32,
    provenance: String,
    workers: &[u32],
    out: &mut ExperimentOutput,
) -> Result<()> {
    let bounds = t_max(n as u64);
    for &k in &cfg.k_list {
        let report = distance_k_clique(g, workers, k)?;
        out.rows.push(RunRow {
            run_id: run_id(n, e),
            method: cfg.method,
            n_workers: n,
            k,
            clique_size: report.size,
            t_max_strict: bounds.t_max_strict,
            t_max_relaxed: bounds.t_max_relaxed,
            collusion_flag: report.size as u64 >= bounds.t_max_strict,
            execution: e,
            provenance: provenance.clone(),
        });
    }
    let mut ids: Vec<VertexId> = workers.iter().map(|&v| g.id(v)).collect();
    ids.sort_unstable();
    out.worker_sets.push(WorkerRun {
        run_id: run_id(n, e),
        n_workers: n,
        execution: e,
        provenance,
        workers: ids,
    });
    Ok(())
}

fn check_sizes(g: &SocialGraph, cfg: &ExperimentConfig) -> Result<()> {
    cfg.validate()?;
    if let Some(&n) = cfg.n_workers_list.iter().find(|&&n| n > g.vertex_count()) {
        return Err(CliError::config(format!(
            "{n} workers requested but the graph has {} vertices",
            g.vertex_count()
        )));
    }
    Ok(())
}

/// Uniform samples of vertices, one per `(n, execution)`, each keyed by
/// its own run seed.
pub fn run_random_experiment(
    g: &SocialGraph,
    cfg: &ExperimentConfig,
    mut progress: impl FnMut(usize, u32),
) -> Result<ExperimentOutput> {
    if cfg.method != Method::ArrangementRandom {
        return Err(CliError::config("random experiment needs method arrangement-random"));
    }
    check_sizes(g, cfg)?;
    let mut out = ExperimentOutput::default();
    for &n in &cfg.n_workers_list {
        for e in 0..cfg.executions_for(n) {
            progress(n, e);
            let s = run_seed(cfg.base_run_seed, n, e);
            let picked: Vec<u32> = sample_indices(g.vertex_count(), n, &Seed::from_u64(s))?
                .into_iter()
                .map(|i| i as u32)
                .collect();
            measure(g, cfg, n, e, s.to_string(), &picked, &mut out)?;
        }
    }
    Ok(out)
}

/// Community-aware selection, once per worker count. `partition` is
/// detected when not supplied.
pub fn run_graph_aware_experiment(
    g: &SocialGraph,
    cfg: &ExperimentConfig,
    partition: Option<Partition>,
    mut progress: impl FnMut(usize, u32),
) -> Result<ExperimentOutput> {
    if cfg.method != Method::SizeProRataMl {
        return Err(CliError::config("graph-aware experiment needs method size-pro-rata-ml"));
    }
    check_sizes(g, cfg)?;
    let partition = partition.unwrap_or_else(|| detect_communities(g));
    let mut out = ExperimentOutput::default();
    for &n in &cfg.n_workers_list {
        progress(n, 0);
        let sel = select_workers_with_partition(g, partition.clone(), n, GraphAwareOptions::default())?;
        measure(g, cfg, n, 0, DETERMINISTIC.to_owned(), &sel.indices, &mut out)?;
    }
    Ok(out)
}

pub fn run_on_graph(
    g: &SocialGraph,
    cfg: &ExperimentConfig,
    progress: impl FnMut(usize, u32),
) -> Result<ExperimentOutput> {
    match cfg.method {
        Method::ArrangementRandom => run_random_experiment(g, cfg, progress),
        Method::SizeProRataMl => run_graph_aware_experiment(g, cfg, None, progress),
    }
}

pub fn write_rows(rows: &[RunRow], w: impl Write) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    for r in rows {
        csv.serialize(r).map_err(CliError::output)?;
    }
    csv.flush().map_err(CliError::output)
}

pub fn read_rows(path: &Path) -> Result<Vec<RunRow>> {
    let mut csv = csv::Reader::from_path(path).map_err(|e| CliError::input(path, e.to_string()))?;
    csv.deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| CliError::input(path, format!("row {}: {e}", i + 1))))
        .collect()
}

/// `run_id,workers` with the worker ids space separated.
pub fn write_worker_sets(sets: &[WorkerRun], mut w: impl Write) -> Result<()> {
    let io = CliError::output;
    writeln!(w, "run_id,n_workers,execution,provenance,workers").map_err(io)?;
    for s in sets {
        let ids: Vec<String> = s.workers.iter().map(u64::to_string).collect();
        writeln!(
            w,
            "{},{},{},{},{}",
            s.run_id,
            s.n_workers,
            s.execution,
            s.provenance,
            ids.join(" ")
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSeed {
    pub run_id: String,
    pub n_workers: usize,
    pub execution: u32,
    pub provenance: String,
}

/// Everything needed to replay an experiment and check its outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub inputs: Vec<FileDigest>,
    pub tool_version: String,
    pub runs: Vec<RunSeed>,
    /// Digest of the results CSV as written.
    pub results_sha256: String,
    pub started_unix: u64,
    pub finished_unix: u64,
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn results_digest(rows: &[RunRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(rows, &mut buf)?;
    Ok(hex::encode(Sha256::digest(&buf)))
}

/// Loads the configured graph, runs the experiment and builds its manifest.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    progress: impl FnMut(usize, u32),
) -> Result<(ExperimentOutput, RunManifest)> {
    cfg.validate()?;
    let started_unix = unix_now();
    let graph_digest = file_digest(&cfg.graph_path)?;
    let g = read_edge_list(&cfg.graph_path)?;
    let out = run_on_graph(&g, cfg, progress)?;
    let manifest = RunManifest {
        config: cfg.clone(),
        inputs: vec![FileDigest {
            path: cfg.graph_path.clone(),
            sha256: graph_digest,
        }],
        tool_version: env!("CARGO_PKG_VERSION").to_owned(),
        runs: out
            .worker_sets
            .iter()
            .map(|w| RunSeed {
                run_id: w.run_id.clone(),
                n_workers: w.n_workers,
                execution: w.execution,
                provenance: w.provenance.clone(),
            })
            .collect(),
        results_sha256: results_digest(&out.rows)?,
        started_unix,
        finished_unix: unix_now(),
    };
    Ok((out, manifest))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayOutcome {
    pub output: ExperimentOutput,
    pub results_match: bool,
    pub seeds_match: bool,
}

/// Re-runs a manifest after checking that its inputs are unchanged.
pub fn replay(manifest: &RunManifest, progress: impl FnMut(usize, u32)) -> Result<ReplayOutcome> {
    for input in &manifest.inputs {
        let now = file_digest(&input.path)?;
        if now != input.sha256 {
            return Err(CliError::input(
                &input.path,
                format!("digest {now} differs from the manifest's {}", input.sha256),
            ));
        }
    }
    let (output, fresh) = run_experiment(&manifest.config, progress)?;
    Ok(ReplayOutcome {
        results_match: fresh.results_sha256 == manifest.results_sha256,
        seeds_match: fresh.runs == manifest.runs,
        output,
    })
}
