//! Largest group of workers pairwise within `k` hops.
//!
//! The workers' power graph (edge when the hop distance is at most `k`) is
//! searched for a maximum clique with a bitset branch-and-bound: candidates
//! are greedily colored and only vertices whose color number can still beat
//! the incumbent are branched on. Vertices are renumbered by a degeneracy
//! ordering first. The reported witness is the lexicographically least
//! maximum clique, so the result does not depend on search order.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::graph::{SocialGraph, VertexId, UNREACHABLE};

/// Largest `k` accepted by [`distance_k_clique`] without an override.
pub const MAX_DEFAULT_K: u32 = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueReport {
    pub k: u32,
    pub size: usize,
    /// External ids of one maximum clique, ascending.
    pub witness: Vec<VertexId>,
}

/// Largest set of workers pairwise at most `k` hops apart, `k` in `1..=3`.
/// `workers` are vertex indices of `g`.
pub fn distance_k_clique(g: &SocialGraph, workers: &[u32], k: u32) -> Result<CliqueReport> {
    if !(1..=MAX_DEFAULT_K).contains(&k) {
        return invalid(alloc::format!(
            "k = {k} is outside 1..={MAX_DEFAULT_K}; use distance_k_clique_unchecked to override"
        ));
    }
    distance_k_clique_unchecked(g, workers, k)
}

/// [`distance_k_clique`] without the bound on `k`.
pub fn distance_k_clique_unchecked(g: &SocialGraph, workers: &[u32], k: u32) -> Result<CliqueReport> {
    let mut ws = workers.to_vec();
    ws.sort_unstable();
    ws.dedup();
    if ws.iter().any(|&w| w as usize >= g.vertex_count()) {
        return invalid("worker is not a vertex of the graph");
    }
    let adjacency = power_graph(g, &ws, k);
    let clique = max_clique(&adjacency);
    Ok(CliqueReport {
        k,
        size: clique.len(),
        witness: clique.iter().map(|&i| g.id(ws[i])).collect(),
    })
}

/// Adjacency lists of the workers' power graph, in worker positions.
fn power_graph(g: &SocialGraph, workers: &[u32], k: u32) -> Vec<Vec<usize>> {
    let mut position = alloc::vec![usize::MAX; g.vertex_count()];
    for (i, &w) in workers.iter().enumerate() {
        position[w as usize] = i;
    }
    let mut dist = alloc::vec![UNREACHABLE; g.vertex_count()];
    let mut visited = Vec::new();
    workers
        .iter()
        .map(|&w| {
            g.bfs_into(w, k, &mut dist, &mut visited);
            let mut near = Vec::new();
            for &u in &visited {
                if u != w && position[u as usize] != usize::MAX {
                    near.push(position[u as usize]);
                }
                dist[u as usize] = UNREACHABLE;
            }
            near.sort_unstable();
            near
        })
        .collect()
}

#[derive(Clone, PartialEq, Eq)]
struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn empty(n: usize) -> Self {
        Self {
            words: alloc::vec![0; n.div_ceil(64)],
        }
    }

    fn full(n: usize) -> Self {
        let mut b = Self::empty(n);
        for i in 0..n {
            b.insert(i);
        }
        b
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    fn and_not_assign(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }
}

struct Search<'a> {
    adj: &'a [Bits],
    best: usize,
    best_set: Vec<usize>,
    /// Stop as soon as a clique of this size is found.
    goal: Option<usize>,
}

impl Search<'_> {
    /// Greedy sequential coloring of `p`; returns vertices in color order and
    /// the color number of each.
    fn color(&self, p: &Bits) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::with_capacity(p.count());
        let mut colors = Vec::with_capacity(order.capacity());
        let mut uncolored = p.clone();
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut q = uncolored.clone();
            while let Some(v) = q.first() {
                q.remove(v);
                q.and_not_assign(&self.adj[v]);
                uncolored.remove(v);
                order.push(v);
                colors.push(color);
            }
        }
        (order, colors)
    }

    fn done(&self) -> bool {
        self.goal.is_some_and(|g| self.best >= g)
    }

    fn expand(&mut self, clique: &mut Vec<usize>, mut p: Bits) {
        let (order, colors) = self.color(&p);
        for idx in (0..order.len()).rev() {
            if clique.len() + colors[idx] <= self.best || self.done() {
                return;
            }
            let v = order[idx];
            clique.push(v);
            let next = p.and(&self.adj[v]);
            if next.is_empty() {
                if clique.len() > self.best {
                    self.best = clique.len();
                    self.best_set = clique.clone();
                }
            } else {
                self.expand(clique, next);
            }
            clique.pop();
            p.remove(v);
        }
    }
}

/// Maximum clique of an undirected graph given as adjacency lists over
/// `0..n`. Returns the lexicographically least maximum clique, ascending.
pub fn max_clique(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let n = adjacency.len();
    if n == 0 {
        return Vec::new();
    }
    // Renumber so that high-core vertices come first; `rank[v]` is the new
    // number of vertex v.
    let (order, core) = degeneracy_order(adjacency);
    let mut rank = alloc::vec![0usize; n];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    let mut adj = alloc::vec![Bits::empty(n); n];
    for (v, list) in adjacency.iter().enumerate() {
        for &w in list {
            if w != v {
                adj[rank[v]].insert(rank[w]);
                adj[rank[w]].insert(rank[v]);
            }
        }
    }

    let mut search = Search {
        adj: &adj,
        best: 0,
        best_set: Vec::new(),
        goal: None,
    };
    search.expand(&mut Vec::new(), Bits::full(n));
    let omega = search.best;

    // Lexicographically least maximum clique in original numbering: take
    // each vertex in turn if the clique built so far can still be completed
    // to size omega with later vertices.
    let mut chosen = Vec::with_capacity(omega);
    let mut candidates = Bits::full(n);
    let mut later = Bits::full(n);
    for v in 0..n {
        later.remove(rank[v]);
        if chosen.len() == omega {
            break;
        }
        // A member of an omega-clique has at least omega - 1 neighbours
        // that outlast it in the peeling.
        if !candidates.contains(rank[v]) || core[v] + 1 < omega {
            candidates.remove(rank[v]);
            continue;
        }
        let rest = candidates.and(&adj[rank[v]]).and(&later);
        let need = omega - chosen.len() - 1;
        let feasible = need == 0 || {
            let mut s = Search {
                adj: &adj,
                best: need - 1,
                best_set: Vec::new(),
                goal: Some(need),
            };
            rest.count() >= need && {
                s.expand(&mut Vec::new(), rest.clone());
                s.best >= need
            }
        };
        if feasible {
            chosen.push(v);
            candidates = rest;
        } else {
            candidates.remove(rank[v]);
        }
    }
    chosen
}

/// Smallest-last ordering reversed (vertices of the densest core first, ties
/// by lower index) and the core number of every vertex.
fn degeneracy_order(adjacency: &[Vec<usize>]) -> (Vec<usize>, Vec<usize>) {
    let n = adjacency.len();
    let mut degree: Vec<usize> = adjacency.iter().map(|l| l.len()).collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0);
    // Bucket queue keyed by current degree; BTreeSet keeps ties by index.
    let mut buckets: Vec<alloc::collections::BTreeSet<usize>> =
        alloc::vec![alloc::collections::BTreeSet::new(); max_deg + 1];
    for (v, &d) in degree.iter().enumerate() {
        buckets[d].insert(v);
    }
    let mut removed = alloc::vec![false; n];
    let mut core = alloc::vec![0; n];
    let mut peel = Vec::with_capacity(n);
    let mut low = 0;
    let mut level = 0;
    for _ in 0..n {
        while buckets[low].is_empty() {
            low += 1;
        }
        let v = buckets[low].pop_first().expect("non-empty bucket");
        level = level.max(low);
        core[v] = level;
        removed[v] = true;
        peel.push(v);
        for &w in &adjacency[v] {
            if !removed[w] {
                buckets[degree[w]].remove(&w);
                degree[w] -= 1;
                buckets[degree[w]].insert(w);
                low = low.min(degree[w]);
            }
        }
    }
    peel.reverse();
    (peel, core)
}
