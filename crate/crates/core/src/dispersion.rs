//! Graph-aware worker selection: apportion workers across communities, then
//! spread them out inside each community.

use alloc::vec::Vec;

use crate::community::{community_graph, detect_communities, Partition};
use crate::error::{invalid, Result};
use crate::graph::{induced_subgraph, SocialGraph, VertexId, UNREACHABLE};
use crate::seed::{Provenance, SelectionMethod, WorkerSet};

/// Tie-break reward for a worker at hop distance `d` from a candidate:
/// 0 for `d <= 1`, 1 for `d == 2`, 2 beyond (including unreachable).
pub fn msr_reward(d: u32) -> u32 {
    match d {
        0 | 1 => 0,
        2 => 1,
        _ => 2,
    }
}

/// Number of workers per community; entry `c - 1` is community `c`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WorkerQuota {
    pub per_community: Vec<usize>,
}

impl WorkerQuota {
    pub fn total(&self) -> usize {
        self.per_community.iter().sum()
    }

    pub fn get(&self, community: u32) -> usize {
        self.per_community[community as usize - 1]
    }
}

/// Vertex of maximum eccentricity, lowest index on ties. Unreachable
/// vertices count as infinitely far.
pub fn select_initial_vertex(g: &SocialGraph) -> Option<u32> {
    let n = g.vertex_count();
    let mut dist = alloc::vec![UNREACHABLE; n];
    let mut queue = Vec::new();
    let mut best: Option<(u32, u32)> = None;
    for v in 0..n as u32 {
        dist.fill(UNREACHABLE);
        g.bfs_into(v, u32::MAX, &mut dist, &mut queue);
        let ecc = dist.iter().copied().max().unwrap_or(0);
        if best.is_none_or(|(e, _)| ecc > e) {
            best = Some((ecc, v));
        }
        if ecc == UNREACHABLE {
            // Nothing can beat an infinite eccentricity.
            break;
        }
    }
    best.map(|(_, v)| v)
}

/// Greedy dispersion: repeatedly add the vertex farthest from its nearest
/// selected vertex. Ties go to the larger reward sum ([`msr_reward`] over
/// all selected vertices), then to the lowest index.
///
/// With an empty `avoid` set the walk starts from
/// [`select_initial_vertex`]. Otherwise the avoid vertices act as already
/// selected and are left out of the result. Exactly `n` vertices are
/// returned, sorted.
pub fn spread_vertices(g: &SocialGraph, n: usize, avoid: &[u32]) -> Result<Vec<u32>> {
    let size = g.vertex_count();
    let mut avoid = avoid.to_vec();
    avoid.sort_unstable();
    avoid.dedup();
    if avoid.iter().any(|&v| v as usize >= size) {
        return invalid("avoid set contains an unknown vertex");
    }
    if n + avoid.len() > size {
        return invalid(alloc::format!(
            "cannot spread {n} vertices with {} avoided in a graph of {size}",
            avoid.len()
        ));
    }
    if n == 0 {
        return Ok(Vec::new());
    }

    let mut selected = alloc::vec![false; size];
    let mut nearest = alloc::vec![UNREACHABLE; size];
    let mut reward = alloc::vec![0u64; size];
    let mut dist = alloc::vec![UNREACHABLE; size];
    let mut queue = Vec::new();
    let mut add = |v: u32, selected: &mut [bool], nearest: &mut [u32], reward: &mut [u64]| {
        selected[v as usize] = true;
        dist.fill(UNREACHABLE);
        g.bfs_into(v, u32::MAX, &mut dist, &mut queue);
        for (u, &d) in dist.iter().enumerate() {
            nearest[u] = nearest[u].min(d);
            reward[u] += msr_reward(d) as u64;
        }
    };

    let mut picks = Vec::with_capacity(n);
    if avoid.is_empty() {
        let first = select_initial_vertex(g).expect("graph is non-empty");
        add(first, &mut selected, &mut nearest, &mut reward);
        picks.push(first);
    } else {
        for &v in &avoid {
            add(v, &mut selected, &mut nearest, &mut reward);
        }
    }
    while picks.len() < n {
        let next = (0..size as u32)
            .filter(|&v| !selected[v as usize])
            .max_by(|&a, &b| {
                let (a_, b_) = (a as usize, b as usize);
                nearest[a_]
                    .cmp(&nearest[b_])
                    .then(reward[a_].cmp(&reward[b_]))
                    .then(b.cmp(&a))
            })
            .expect("enough unselected vertices remain");
        add(next, &mut selected, &mut nearest, &mut reward);
        picks.push(next);
    }
    picks.sort_unstable();
    Ok(picks)
}

/// Largest-remainder apportionment of `n_workers` by community size with
/// every community receiving at least one worker and at most its size.
///
/// Communities whose exact share falls below one (or above their size) are
/// pinned to that bound and the rest is re-apportioned among the others.
/// Remainder ties go to the larger community, then the lower id.
pub fn size_pro_rata(sizes: &[usize], n_workers: usize) -> Result<WorkerQuota> {
    let total: usize = sizes.iter().sum();
    if n_workers < sizes.len() {
        return invalid("fewer workers than communities");
    }
    if n_workers > total {
        return invalid(alloc::format!("cannot place {n_workers} workers on {total} vertices"));
    }
    if sizes.contains(&0) {
        return invalid("empty community");
    }
    let mut pinned: Vec<Option<usize>> = alloc::vec![None; sizes.len()];
    loop {
        let seats = (n_workers - pinned.iter().flatten().sum::<usize>()) as u128;
        let weight: u128 = sizes
            .iter()
            .zip(&pinned)
            .filter(|(_, p)| p.is_none())
            .map(|(&s, _)| s as u128)
            .sum();
        if weight == 0 {
            break;
        }
        let mut changed = false;
        for (i, &s) in sizes.iter().enumerate() {
            if pinned[i].is_some() {
                continue;
            }
            let share = seats * s as u128; // quota = share / weight
            if share < weight {
                pinned[i] = Some(1);
                changed = true;
            } else if share > s as u128 * weight {
                pinned[i] = Some(s);
                changed = true;
            }
        }
        if changed {
            continue;
        }
        let mut quota: Vec<usize> = pinned.iter().map(|p| p.unwrap_or(0)).collect();
        let mut rest: Vec<(u128, usize, usize)> = Vec::new();
        let mut given = 0u128;
        for (i, &s) in sizes.iter().enumerate() {
            if pinned[i].is_none() {
                let share = seats * s as u128;
                quota[i] = (share / weight) as usize;
                given += share / weight;
                rest.push((share % weight, s, i));
            }
        }
        rest.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)));
        for &(_, _, i) in rest.iter().take((seats - given) as usize) {
            quota[i] += 1;
        }
        return Ok(WorkerQuota { per_community: quota });
    }
    Ok(WorkerQuota {
        per_community: pinned.into_iter().map(|p| p.unwrap_or(0)).collect(),
    })
}

/// Workers per community:
/// * as many communities as workers: one each;
/// * more communities: one in each of `n_workers` communities spread out on
///   the community graph;
/// * fewer communities: [`size_pro_rata`].
pub fn quantify_workers_per_community(
    partition: &Partition,
    communities: &SocialGraph,
    n_workers: usize,
) -> Result<WorkerQuota> {
    let n_c = partition.community_count();
    if n_workers == 0 {
        return invalid("at least one worker is required");
    }
    if communities.vertex_count() != n_c {
        return invalid("community graph does not match the partition");
    }
    if n_c == n_workers {
        return Ok(WorkerQuota {
            per_community: alloc::vec![1; n_c],
        });
    }
    if n_c > n_workers {
        let mut per_community = alloc::vec![0; n_c];
        for c in spread_vertices(communities, n_workers, &[])? {
            // community graph vertex ids are 1..=n_c in index order
            per_community[c as usize] = 1;
        }
        return Ok(WorkerQuota { per_community });
    }
    size_pro_rata(&partition.sizes(), n_workers)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GraphAwareOptions {
    /// Keep new workers away from those already placed in adjacent
    /// communities. Off by default.
    pub avoid_adjacent_workers: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphAwareSelection {
    pub workers: WorkerSet<VertexId>,
    /// Selected vertex indices into the input graph, sorted.
    pub indices: Vec<u32>,
    pub partition: Partition,
    pub quota: WorkerQuota,
}

/// Detects communities, apportions the workers and spreads them inside each
/// community.
pub fn select_workers_graph_aware(
    g: &SocialGraph,
    n_workers: usize,
    options: GraphAwareOptions,
) -> Result<GraphAwareSelection> {
    if n_workers == 0 || n_workers > g.vertex_count() {
        return invalid(alloc::format!("need 1..={} workers, got {n_workers}", g.vertex_count()));
    }
    let partition = detect_communities(g);
    select_workers_with_partition(g, partition, n_workers, options)
}

/// Same as [`select_workers_graph_aware`] with a precomputed partition.
pub fn select_workers_with_partition(
    g: &SocialGraph,
    partition: Partition,
    n_workers: usize,
    options: GraphAwareOptions,
) -> Result<GraphAwareSelection> {
    if n_workers == 0 || n_workers > g.vertex_count() {
        return invalid(alloc::format!("need 1..={} workers, got {n_workers}", g.vertex_count()));
    }
    if partition.vertex_count() != g.vertex_count() {
        return invalid("partition does not cover the graph");
    }
    let communities = community_graph(g, &partition);
    let quota = quantify_workers_per_community(&partition, &communities, n_workers)?;
    let members = partition.members();
    let mut chosen: Vec<Vec<u32>> = alloc::vec![Vec::new(); members.len()];
    for (ci, verts) in members.iter().enumerate() {
        let want = quota.per_community[ci];
        if want == 0 {
            continue;
        }
        let mut scope = verts.clone();
        let mut avoid_global = Vec::new();
        if options.avoid_adjacent_workers {
            for &nb in communities.neighbors(ci as u32) {
                avoid_global.extend_from_slice(&chosen[nb as usize]);
            }
            scope.extend_from_slice(&avoid_global);
        }
        let sub = induced_subgraph(g, &scope);
        let local = |v: u32| sub.index_of(g.id(v)).expect("vertex in scope");
        let avoid: Vec<u32> = avoid_global.iter().map(|&v| local(v)).collect();
        let picks = spread_vertices(&sub, want, &avoid)?;
        chosen[ci] = picks
            .into_iter()
            .map(|p| g.index_of(sub.id(p)).expect("subgraph keeps ids"))
            .collect();
    }
    let mut indices: Vec<u32> = chosen.into_iter().flatten().collect();
    indices.sort_unstable();
    Ok(GraphAwareSelection {
        workers: WorkerSet {
            workers: indices.iter().map(|&v| g.id(v)).collect(),
            method: SelectionMethod::GraphAware,
            provenance: Provenance::Quotas(quota.clone()),
        },
        indices,
        partition,
        quota,
    })
}
