use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde::Serialize;
use workerset::config::{log_spaced_n_list, ExperimentConfig, Method};
use workerset::error::{CliError, Result};
use workerset::experiment::{self, replay, run_experiment, write_rows, write_worker_sets, RunManifest};
use workerset::formats::{
    create, read_edge_list, read_ledger, read_partition, read_roster, read_workers, write_ledger, write_partition,
};
use workerset::report::{summarize, write_plot_csv, CommunityQuota, SeedReport, SelectionParameters, SelectionReport};
use workerset_core::analysis::{
    collusion_confidence_curve, distance_k_clique, distance_k_clique_unchecked, t_max, worker_distance_stats,
    DistanceBuckets,
};
use workerset_core::combinatorics::{output_space_size, NumberingSpace};
use workerset_core::community::{detect_communities, modularity};
use workerset_core::dispersion::{select_workers_with_partition, GraphAwareOptions};
use workerset_core::graph::{graph_stats, UNREACHABLE};
use workerset_core::ledger::{simulate_commit_round, Ledger};
use workerset_core::seed::{derive_seed, expand_multi_commit, sample_workers, Seed};
use workerset_core::ParticipantId;

#[derive(Parser)]
#[command(name = "workerset", version, about = "Verifiable and graph-aware worker selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the seed from a ledger log and roster, optionally sampling workers.
    Seed(SeedArgs),
    /// Sample workers from a roster with a given seed.
    Sample(SampleArgs),
    /// Simulate a commit round and write it as a ledger log.
    CommitSim(CommitSimArgs),
    /// Detect communities of a graph.
    Communities(CommunitiesArgs),
    /// Select workers spread across communities.
    GraphSelect(GraphSelectArgs),
    /// Largest group of workers pairwise within k hops.
    Metrics(MetricsArgs),
    /// Threshold bounds for n workers.
    Tmax(TmaxArgs),
    /// Malicious-worker bound per sample size under random selection.
    Hypergeom(HypergeomArgs),
    /// Run an experiment from a config file and/or flags.
    Experiment(ExperimentArgs),
    /// Summarize experiment results into curves.
    Report(ReportArgs),
    /// Vertex, edge, diameter and radius figures of a graph.
    Stats(GraphArg),
}

#[derive(Args)]
struct SeedArgs {
    #[arg(long)]
    roster: PathBuf,
    #[arg(long)]
    ledger: PathBuf,
    /// Commits allowed per participant; payloads carry the slot number.
    #[arg(long, default_value_t = 1)]
    commits_per_participant: u32,
    /// Also sample this many workers.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    roster: PathBuf,
    /// Seed value in decimal.
    #[arg(long)]
    seed: BigUint,
    /// Seed space in decimal; defaults to the roster's arrangement space.
    #[arg(long)]
    space: Option<BigUint>,
    #[arg(long)]
    n: usize,
}

#[derive(Args)]
struct CommitSimArgs {
    #[arg(long)]
    roster: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    probability: f64,
    #[arg(long, default_value_t = 0)]
    run_seed: u64,
    #[arg(long, default_value_t = 1)]
    commits_per_participant: u32,
    /// Ledger log to write; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GraphArg {
    /// SNAP-style edge list.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Args)]
struct CommunitiesArgs {
    #[command(flatten)]
    graph: GraphArg,
    /// Partition CSV to write.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GraphSelectArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[arg(long)]
    n: usize,
    /// Use this partition instead of detecting one.
    #[arg(long)]
    partition: Option<PathBuf>,
    #[arg(long)]
    avoid_adjacent_workers: bool,
}

#[derive(Args)]
struct MetricsArgs {
    #[command(flatten)]
    graph: GraphArg,
    /// Worker vertex ids, one per line.
    #[arg(long)]
    workers: PathBuf,
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Accept k above 3.
    #[arg(long)]
    allow_large_k: bool,
    /// Split the distance histogram by this partition.
    #[arg(long)]
    partition: Option<PathBuf>,
}

#[derive(Args)]
struct TmaxArgs {
    #[arg(long, required = true, num_args = 1..)]
    n: Vec<u64>,
}

#[derive(Args)]
struct HypergeomArgs {
    #[arg(long)]
    population: usize,
    #[arg(long)]
    malicious: usize,
    #[arg(long, default_value_t = 0.975)]
    confidence: f64,
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    method: Option<Method>,
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    /// Use 10 log-spaced worker counts from 10 to 807.
    #[arg(long, conflicts_with = "n_list")]
    log_spacing: bool,
    #[arg(long)]
    executions: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    k_list: Option<Vec<u32>>,
    #[arg(long)]
    confidence: Option<f64>,
    #[arg(long)]
    base_run_seed: Option<u64>,
    /// Replay a manifest instead of building a config.
    #[arg(long, conflicts_with_all = ["config", "graph", "method"])]
    replay: Option<PathBuf>,
    /// Results CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Worker sets CSV.
    #[arg(long)]
    workers: Option<PathBuf>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    results: PathBuf,
    #[arg(long, default_value_t = 0.975)]
    confidence: f64,
    /// Summary JSON; standard output when absent.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    plot: Option<PathBuf>,
}

fn print_json(value: &impl Serialize) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(CliError::output)?;
    writeln!(out).map_err(CliError::output)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(CliError::output)?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

fn seed_report(seed: &Seed, commits: Option<usize>, n: Option<usize>, workers: Vec<String>) -> SeedReport {
    let warning = seed.is_low_entropy().then(|| {
        format!(
            "seed space {} is below 2^64; the seed is guessable by enumeration",
            seed.space
        )
    });
    if let Some(w) = &warning {
        eprintln!("warning: {w}");
    }
    SeedReport {
        seed: seed.value.to_string(),
        space: seed.space.to_string(),
        commits,
        n,
        workers,
        warning,
    }
}

fn cmd_seed(a: SeedArgs) -> Result<()> {
    let roster = read_roster(&a.roster)?;
    let ledger = read_ledger(&a.ledger, &roster)?;
    let (commits, seed) = if a.commits_per_participant > 1 {
        let expanded = expand_multi_commit(&roster, a.commits_per_participant)?;
        let seq = ledger
            .effective_expanded_sequence(a.commits_per_participant)
            .map_err(|e| CliError::input(&a.ledger, e.to_string()))?;
        (seq.len(), derive_seed(&seq, &expanded)?)
    } else {
        let seq = ledger.effective_commit_sequence();
        (seq.len(), derive_seed(&seq, &roster)?)
    };
    let workers = match a.n {
        Some(n) => sample_workers(&roster, n, &seed)?
            .workers
            .iter()
            .map(ToString::to_string)
            .collect(),
        None => Vec::new(),
    };
    print_json(&seed_report(&seed, Some(commits), a.n, workers))
}

fn cmd_sample(a: SampleArgs) -> Result<()> {
    let roster = read_roster(&a.roster)?;
    let space = a
        .space
        .unwrap_or_else(|| output_space_size(NumberingSpace::Arrangement { p: roster.len() }));
    let seed = Seed::new(a.seed, space)?;
    let set = sample_workers(&roster, a.n, &seed)?;
    let workers = set.workers.iter().map(ToString::to_string).collect();
    print_json(&seed_report(&seed, None, Some(a.n), workers))
}

fn cmd_commit_sim(a: CommitSimArgs) -> Result<()> {
    let roster = read_roster(&a.roster)?;
    let c = a.commits_per_participant;
    if c == 0 {
        return Err(CliError::config("commits-per-participant must be at least 1"));
    }
    let expanded = expand_multi_commit(&roster, c)?;
    let seq = simulate_commit_round(if c == 1 { &roster } else { &expanded }, a.probability, a.run_seed)?;
    let mut ledger = Ledger::new(roster);
    for id in seq.ids {
        let (id, payload) = if c == 1 {
            (id, Vec::new())
        } else {
            let bytes = id.into_bytes();
            let (orig, slot) = bytes.split_at(bytes.len() - 4);
            let slot = u32::from_be_bytes(slot.try_into().expect("4-byte slot"));
            (ParticipantId::new(orig.to_vec()), slot.to_string().into_bytes())
        };
        ledger.append_commit(id, payload)?;
    }
    ledger.close_window();
    match a.out {
        Some(path) => write_ledger(ledger.records(), create(&path)?).map_err(|e| CliError::io(&path, e)),
        None => write_ledger(ledger.records(), io::stdout().lock()).map_err(CliError::output),
    }
}

#[derive(Serialize)]
struct CommunitySummary {
    vertices: usize,
    edges: usize,
    communities: usize,
    modularity: Option<f64>,
    sizes: Vec<usize>,
}

fn cmd_communities(a: CommunitiesArgs) -> Result<()> {
    let g = read_edge_list(&a.graph.graph)?;
    let p = detect_communities(&g);
    if let Some(path) = &a.out {
        write_partition(&g, &p, create(path)?)?;
    }
    print_json(&CommunitySummary {
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        communities: p.community_count(),
        modularity: modularity(&g, &p).ok(),
        sizes: p.sizes(),
    })
}

fn cmd_graph_select(a: GraphSelectArgs) -> Result<()> {
    let g = read_edge_list(&a.graph.graph)?;
    let partition = match &a.partition {
        Some(path) => read_partition(&g, path)?,
        None => detect_communities(&g),
    };
    let options = GraphAwareOptions {
        avoid_adjacent_workers: a.avoid_adjacent_workers,
    };
    let sel = select_workers_with_partition(&g, partition, a.n, options)?;
    let sizes = sel.partition.sizes();
    print_json(&SelectionReport {
        method: "graph-aware".into(),
        quotas: sizes
            .iter()
            .enumerate()
            .map(|(i, &size)| CommunityQuota {
                community: i as u32 + 1,
                size,
                workers: sel.quota.per_community[i],
            })
            .collect(),
        workers: sel.workers.workers.clone(),
        parameters: SelectionParameters {
            n_workers: a.n,
            avoid_adjacent_workers: a.avoid_adjacent_workers,
            communities: sel.partition.community_count(),
            modularity: modularity(&g, &sel.partition).ok(),
        },
    })
}

#[derive(Serialize)]
struct Buckets {
    d1: u64,
    d2: u64,
    far: u64,
}

impl From<DistanceBuckets> for Buckets {
    fn from(b: DistanceBuckets) -> Self {
        Self {
            d1: b.d1,
            d2: b.d2,
            far: b.far,
        }
    }
}

#[derive(Serialize)]
struct MetricsReport {
    k: u32,
    workers: usize,
    clique_size: usize,
    witness: Vec<u64>,
    t_max_strict: u64,
    t_max_relaxed: u64,
    collusion_possible: bool,
    distances: Buckets,
    intra: Option<Buckets>,
    inter: Option<Buckets>,
}

fn cmd_metrics(a: MetricsArgs) -> Result<()> {
    let g = read_edge_list(&a.graph.graph)?;
    let mut workers = read_workers(&g, &a.workers)?;
    workers.sort_unstable();
    workers.dedup();
    let report = if a.allow_large_k {
        distance_k_clique_unchecked(&g, &workers, a.k)?
    } else {
        distance_k_clique(&g, &workers, a.k)?
    };
    let partition = a.partition.as_deref().map(|p| read_partition(&g, p)).transpose()?;
    let stats = worker_distance_stats(&g, &workers, partition.as_ref())?;
    let bounds = t_max(workers.len() as u64);
    print_json(&MetricsReport {
        k: a.k,
        workers: workers.len(),
        clique_size: report.size,
        witness: report.witness,
        t_max_strict: bounds.t_max_strict,
        t_max_relaxed: bounds.t_max_relaxed,
        collusion_possible: report.size as u64 >= bounds.t_max_strict,
        distances: stats.all.into(),
        intra: stats.intra.map(Into::into),
        inter: stats.inter.map(Into::into),
    })
}

#[derive(Serialize)]
struct TmaxRow {
    n: u64,
    t_max_strict: u64,
    t_max_relaxed: u64,
}

fn cmd_tmax(a: TmaxArgs) -> Result<()> {
    let rows: Vec<TmaxRow> =
        a.n.iter()
            .map(|&n| {
                let b = t_max(n);
                TmaxRow {
                    n,
                    t_max_strict: b.t_max_strict,
                    t_max_relaxed: b.t_max_relaxed,
                }
            })
            .collect();
    print_json(&rows)
}

fn cmd_hypergeom(a: HypergeomArgs) -> Result<()> {
    let curve = collusion_confidence_curve(a.population, a.malicious, a.confidence)?;
    let mut out = io::stdout().lock();
    let io = CliError::output;
    writeln!(out, "n,m_bound").map_err(io)?;
    for (n, m) in curve {
        writeln!(out, "{n},{m}").map_err(io)?;
    }
    Ok(())
}

fn build_config(a: &ExperimentArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => {
            let graph = a
                .graph
                .clone()
                .ok_or_else(|| CliError::config("--graph or --config is required"))?;
            let method = a
                .method
                .ok_or_else(|| CliError::config("--method or --config is required"))?;
            ExperimentConfig::new(graph, method)
        }
    };
    if let Some(g) = &a.graph {
        cfg.graph_path = g.clone();
    }
    if let Some(m) = a.method {
        cfg.method = m;
    }
    if let Some(n) = &a.n_list {
        cfg.n_workers_list = n.clone();
    }
    if a.log_spacing {
        cfg.n_workers_list = log_spaced_n_list(10, 807, 10);
    }
    if a.executions.is_some() {
        cfg.executions_per_point = a.executions;
    }
    if let Some(k) = &a.k_list {
        cfg.k_list = k.clone();
    }
    if let Some(c) = a.confidence {
        cfg.confidence = c;
    }
    if let Some(s) = a.base_run_seed {
        cfg.base_run_seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_experiment(a: ExperimentArgs) -> Result<()> {
    let quiet = a.quiet;
    let progress = |n: usize, e: u32| {
        if !quiet && e == 0 {
            eprintln!("n = {n}");
        }
    };
    let (out, manifest, matched) = match &a.replay {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let manifest: RunManifest =
                serde_json::from_str(&text).map_err(|e| CliError::input(path, e.to_string()))?;
            let outcome = replay(&manifest, progress)?;
            let ok = outcome.results_match && outcome.seeds_match;
            eprintln!(
                "replay {}: results {}, seeds {}",
                if ok { "matches" } else { "DIFFERS" },
                if outcome.results_match { "identical" } else { "differ" },
                if outcome.seeds_match { "identical" } else { "differ" },
            );
            (outcome.output, manifest, ok)
        }
        None => {
            let cfg = build_config(&a)?;
            let (out, manifest) = run_experiment(&cfg, progress)?;
            (out, manifest, true)
        }
    };
    match &a.out {
        Some(path) => write_rows(&out.rows, create(path)?)?,
        None => write_rows(&out.rows, io::stdout().lock())?,
    }
    if let Some(path) = &a.workers {
        write_worker_sets(&out.worker_sets, create(path)?)?;
    }
    if let (Some(path), None) = (&a.manifest, &a.replay) {
        write_json(path, &manifest)?;
    }
    if matched {
        Ok(())
    } else {
        Err(CliError::input(
            a.replay.as_deref().unwrap_or(Path::new("manifest")),
            "replayed outputs differ from the manifest",
        ))
    }
}

fn cmd_report(a: ReportArgs) -> Result<()> {
    let rows = experiment::read_rows(&a.results)?;
    let summary = summarize(&rows, a.confidence)?;
    if let Some(path) = &a.plot {
        write_plot_csv(&summary, create(path)?)?;
    }
    match &a.summary {
        Some(path) => write_json(path, &summary),
        None => print_json(&summary),
    }
}

#[derive(Serialize)]
struct StatsReport {
    vertices: usize,
    edges: usize,
    components: usize,
    connected: bool,
    /// Largest eccentricity over all components.
    diameter: u32,
    /// Whole-graph radius; absent when the graph is disconnected.
    radius: Option<u32>,
}

fn cmd_stats(a: GraphArg) -> Result<()> {
    let g = read_edge_list(&a.graph)?;
    let s = graph_stats(&g);
    print_json(&StatsReport {
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        components: s.components.len(),
        connected: s.is_connected(),
        diameter: s.components.iter().map(|c| c.diameter).max().unwrap_or(0),
        radius: (s.radius != UNREACHABLE).then_some(s.radius),
    })
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Seed(a) => cmd_seed(a),
        Command::Sample(a) => cmd_sample(a),
        Command::CommitSim(a) => cmd_commit_sim(a),
        Command::Communities(a) => cmd_communities(a),
        Command::GraphSelect(a) => cmd_graph_select(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Tmax(a) => cmd_tmax(a),
        Command::Hypergeom(a) => cmd_hypergeom(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Report(a) => cmd_report(a),
        Command::Stats(a) => cmd_stats(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is_broken_pipe() => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
