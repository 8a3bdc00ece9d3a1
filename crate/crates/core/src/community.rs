//! Deterministic modularity-based community detection and the community
//! adjacency graph.
//!
//! The core is a multilevel (Louvain) optimization. Its local-moving phase
//! scans vertices in index order (which is ascending id order), moves a
//! vertex only when that strictly increases modularity, and breaks ties
//! between equally good targets by the lowest community index. Gains are
//! compared in exact integer arithmetic, so repeated runs on the same graph
//! give bit-identical partitions. After each level the communities are
//! numbered by their lowest original vertex and collapsed into a weighted
//! graph.
//!
//! Plain Louvain can stop well short of the best partition on small or
//! highly symmetric graphs, so [`detect_communities`] also refines its result
//! and compares it with a divisive bisection. Nothing in either step is
//! random.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::graph::SocialGraph;

mod refine;

/// Assignment of each vertex to one community. Community ids are dense in
/// `1..=count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<u32>,
    count: u32,
}

impl Partition {
    pub fn new(assignment: Vec<u32>) -> Result<Self> {
        let count = assignment.iter().copied().max().unwrap_or(0);
        let mut used = alloc::vec![false; count as usize];
        for &c in &assignment {
            if c == 0 {
                return invalid("community ids start at 1");
            }
            used[c as usize - 1] = true;
        }
        if used.iter().any(|&u| !u) {
            return invalid("community ids must be dense");
        }
        Ok(Self { assignment, count })
    }

    /// Every vertex in one community.
    pub fn single(n: usize) -> Self {
        Self {
            assignment: alloc::vec![1; n],
            count: (n > 0) as u32,
        }
    }

    /// Every vertex alone.
    pub fn singletons(n: usize) -> Self {
        Self {
            assignment: (1..=n as u32).collect(),
            count: n as u32,
        }
    }

    pub fn community_count(&self) -> usize {
        self.count as usize
    }

    /// Community id of vertex `v`.
    pub fn community_of(&self, v: u32) -> u32 {
        self.assignment[v as usize]
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    pub fn vertex_count(&self) -> usize {
        self.assignment.len()
    }

    /// Vertex lists per community; entry `c - 1` holds community `c`.
    pub fn members(&self) -> Vec<Vec<u32>> {
        let mut out = alloc::vec![Vec::new(); self.count as usize];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c as usize - 1].push(v as u32);
        }
        out
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut out = alloc::vec![0; self.count as usize];
        for &c in &self.assignment {
            out[c as usize - 1] += 1;
        }
        out
    }
}

/// Newman-Girvan modularity `Q = sum_c (e_c/m - (d_c/2m)^2)`.
pub fn modularity(g: &SocialGraph, partition: &Partition) -> Result<f64> {
    if partition.vertex_count() != g.vertex_count() {
        return invalid("partition does not cover the graph");
    }
    let m = g.edge_count() as i128;
    if m == 0 {
        return Err(Error::UndefinedModularity);
    }
    let k = partition.community_count();
    let mut internal = alloc::vec![0i128; k];
    let mut degree = alloc::vec![0i128; k];
    for v in 0..g.vertex_count() as u32 {
        let c = partition.community_of(v) as usize - 1;
        degree[c] += g.degree(v) as i128;
        internal[c] += g
            .neighbors(v)
            .iter()
            .filter(|&&w| w > v && partition.community_of(w) as usize - 1 == c)
            .count() as i128;
    }
    // Q * 4m^2 = sum_c (4m e_c - d_c^2)
    let scaled: i128 = internal.iter().zip(&degree).map(|(&e, &d)| 4 * m * e - d * d).sum();
    Ok(scaled as f64 / (4 * m * m) as f64)
}

/// Weighted graph used by the aggregation levels. `self_weight[i]` is the
/// diagonal entry `A_ii` (twice the internal edge weight); `degree[i]`
/// includes it.
struct Level {
    adj: Vec<Vec<(u32, u64)>>,
    self_weight: Vec<u64>,
    degree: Vec<u64>,
}

impl Level {
    fn from_graph(g: &SocialGraph) -> Self {
        let n = g.vertex_count();
        Self {
            adj: (0..n as u32)
                .map(|v| g.neighbors(v).iter().map(|&w| (w, 1)).collect())
                .collect(),
            self_weight: alloc::vec![0; n],
            degree: (0..n as u32).map(|v| g.degree(v) as u64).collect(),
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Local moving until a full sweep makes no move. Returns the community
    /// index of each node and whether anything moved at all.
    fn local_moves(&self, total: u64) -> (Vec<u32>, bool) {
        let n = self.len();
        let mut comm: Vec<u32> = (0..n as u32).collect();
        let mut tot: Vec<u64> = self.degree.clone();
        let mut link = alloc::vec![0u64; n];
        let mut touched: Vec<u32> = Vec::new();
        let mut any = false;
        let total = total as i128;
        loop {
            let mut moves = 0usize;
            for i in 0..n {
                let own = comm[i];
                let k_i = self.degree[i];
                for &(j, w) in &self.adj[i] {
                    let c = comm[j as usize];
                    if link[c as usize] == 0 {
                        touched.push(c);
                    }
                    link[c as usize] += w;
                }
                tot[own as usize] -= k_i;
                // Gain of inserting the isolated node into community c, up to
                // a positive factor: 2m * k_{i,c} - tot_c * k_i.
                let gain = |c: u32| link[c as usize] as i128 * total - tot[c as usize] as i128 * k_i as i128;
                let stay = gain(own);
                let mut best: Option<(i128, u32)> = None;
                for &c in &touched {
                    if c == own {
                        continue;
                    }
                    let g = gain(c);
                    best = match best {
                        Some((bg, bc)) if bg > g || (bg == g && bc < c) => Some((bg, bc)),
                        _ => Some((g, c)),
                    };
                }
                let target = match best {
                    Some((g, c)) if g > stay => c,
                    _ => own,
                };
                tot[target as usize] += k_i;
                if target != own {
                    comm[i] = target;
                    moves += 1;
                }
                for c in touched.drain(..) {
                    link[c as usize] = 0;
                }
            }
            if moves == 0 {
                break;
            }
            any = true;
        }
        (comm, any)
    }

    /// Collapses communities into nodes, numbered by their lowest member.
    /// Returns the new level and the node-to-new-node map.
    fn aggregate(&self, comm: &[u32]) -> (Level, Vec<u32>) {
        let n = self.len();
        let mut relabel = alloc::vec![u32::MAX; n];
        let mut next = 0u32;
        // Nodes are already ordered by lowest original vertex, so the first
        // node seen of each community carries its lowest original vertex.
        for &c in comm {
            if relabel[c as usize] == u32::MAX {
                relabel[c as usize] = next;
                next += 1;
            }
        }
        let k = next as usize;
        let map: Vec<u32> = comm.iter().map(|&c| relabel[c as usize]).collect();
        let mut self_weight = alloc::vec![0u64; k];
        let mut degree = alloc::vec![0u64; k];
        let mut rows: Vec<Vec<(u32, u64)>> = alloc::vec![Vec::new(); k];
        for i in 0..n {
            let a = map[i] as usize;
            self_weight[a] += self.self_weight[i];
            degree[a] += self.degree[i];
            for &(j, w) in &self.adj[i] {
                let b = map[j as usize];
                if b as usize == a {
                    self_weight[a] += w;
                } else {
                    rows[a].push((b, w));
                }
            }
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|&(b, _)| b);
            let mut merged: Vec<(u32, u64)> = Vec::with_capacity(row.len());
            for &(b, w) in row.iter() {
                match merged.last_mut() {
                    Some((lb, lw)) if *lb == b => *lw += w,
                    _ => merged.push((b, w)),
                }
            }
            *row = merged;
        }
        (
            Level {
                adj: rows,
                self_weight,
                degree,
            },
            map,
        )
    }
}

/// Multilevel run on `g` whose first level is the partition given by
/// `start` (one label per vertex). Returns one label per vertex; labels are
/// node indices of the last level, numbered by lowest original vertex.
fn multilevel(g: &SocialGraph, start: &[u32]) -> Vec<u32> {
    let base = Level::from_graph(g);
    let total: u64 = base.degree.iter().sum();
    let (mut level, mut node_of) = base.aggregate(start);
    loop {
        let (comm, moved) = level.local_moves(total);
        if !moved {
            break;
        }
        let (next, map) = level.aggregate(&comm);
        for x in &mut node_of {
            *x = map[*x as usize];
        }
        let shrunk = next.len() < level.len();
        level = next;
        if !shrunk {
            break;
        }
    }
    node_of
}

/// Modularity-maximizing partition. The number of communities depends only
/// on the graph.
///
/// Two candidates are built: the multilevel result from singletons, and a
/// divisive leading-eigenvector bisection. Both are then polished by
/// alternating Kernighan-Lin passes with further multilevel runs, and the
/// candidate with the higher modularity wins, the multilevel one on ties.
pub fn detect_communities(g: &SocialGraph) -> Partition {
    let n = g.vertex_count();
    if n == 0 {
        return Partition::single(0);
    }
    let singletons: Vec<u32> = (0..n as u32).collect();
    let louvain = multilevel(g, &singletons);
    if g.edge_count() == 0 {
        return relabel(&louvain);
    }
    let (a, qa) = refine::polish(g, louvain);
    let (b, qb) = refine::polish(g, refine::bisect(g));
    relabel(if qb > qa { &b } else { &a })
}

/// Numbers communities `1..` by their lowest vertex.
fn relabel(labels: &[u32]) -> Partition {
    let mut map = alloc::vec![0u32; labels.len()];
    let mut count = 0;
    let assignment = labels
        .iter()
        .map(|&c| {
            if map[c as usize] == 0 {
                count += 1;
                map[c as usize] = count;
            }
            map[c as usize]
        })
        .collect();
    Partition { assignment, count }
}

/// Graph whose vertices are community ids, with an edge between two
/// communities whenever some member of one is adjacent to some member of the
/// other.
pub fn community_graph(g: &SocialGraph, partition: &Partition) -> SocialGraph {
    let mut edges = Vec::new();
    for v in 0..g.vertex_count() as u32 {
        let cv = partition.community_of(v);
        for &w in g.neighbors(v) {
            let cw = partition.community_of(w);
            if cv < cw {
                edges.push((cv as u64, cw as u64));
            }
        }
    }
    SocialGraph::with_vertices(1..=partition.community_count() as u64, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn clique_edges(offset: u64, k: u64) -> Vec<(u64, u64)> {
        let mut e = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                e.push((offset + a, offset + b));
            }
        }
        e
    }

    fn two_triangles() -> SocialGraph {
        let mut e = clique_edges(0, 3);
        e.extend(clique_edges(3, 3));
        SocialGraph::from_edges(e)
    }

    #[test]
    fn modularity_examples() {
        let g = two_triangles();
        assert_eq!(modularity(&g, &Partition::single(6)).unwrap(), 0.0);
        let natural = Partition::new(vec![1, 1, 1, 2, 2, 2]).unwrap();
        assert!((modularity(&g, &natural).unwrap() - 0.5).abs() < 1e-15);
        let k2 = SocialGraph::from_edges([(0, 1)]);
        assert!((modularity(&k2, &Partition::singletons(2)).unwrap() + 0.5).abs() < 1e-15);
        let lonely = SocialGraph::with_vertices([0, 1], []);
        assert_eq!(
            modularity(&lonely, &Partition::single(2)),
            Err(Error::UndefinedModularity)
        );
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![1, 3]).is_err());
        assert!(Partition::new(vec![0, 1]).is_err());
        let p = Partition::new(vec![2, 1, 2]).unwrap();
        assert_eq!(p.members(), vec![vec![1], vec![0, 2]]);
        assert_eq!(p.sizes(), vec![1, 2]);
    }

    #[test]
    fn bridged_cliques_split_at_bridge() {
        let mut e = clique_edges(0, 5);
        e.extend(clique_edges(5, 5));
        e.push((4, 5));
        let g = SocialGraph::from_edges(e);
        let p = detect_communities(&g);
        assert_eq!(p.assignment(), &[1, 1, 1, 1, 1, 2, 2, 2, 2, 2]);
        let c = community_graph(&g, &p);
        assert_eq!((c.vertex_count(), c.edge_count()), (2, 1));
    }

    #[test]
    fn disjoint_triangles() {
        let mut e = clique_edges(0, 3);
        e.extend(clique_edges(3, 3));
        e.extend(clique_edges(6, 3));
        let g = SocialGraph::from_edges(e);
        let p = detect_communities(&g);
        assert_eq!(p.community_count(), 3);
        assert_eq!(p.assignment(), &[1, 1, 1, 2, 2, 2, 3, 3, 3]);
    }

    #[test]
    fn community_graph_shapes() {
        let g = two_triangles();
        let c = community_graph(&g, &Partition::single(6));
        assert_eq!((c.vertex_count(), c.edge_count()), (1, 0));
        let mut e = clique_edges(0, 3);
        e.extend(clique_edges(3, 3));
        e.extend(clique_edges(6, 3));
        e.extend([(0, 3), (3, 6), (6, 0)]);
        let g = SocialGraph::from_edges(e);
        let c = community_graph(&g, &Partition::new(vec![1, 1, 1, 2, 2, 2, 3, 3, 3]).unwrap());
        assert_eq!(c.canonical_edges(), vec![(1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn refinement_recovers_what_local_moves_miss() {
        // Local moves alone end in a single community here (Q = 0).
        let g = SocialGraph::from_edges([(0, 1), (0, 3), (0, 4), (1, 2), (1, 4), (2, 3)]);
        let p = detect_communities(&g);
        assert_eq!(p.assignment(), &[1, 1, 2, 2, 1]);
        assert!((modularity(&g, &p).unwrap() - 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn prism_splits_into_its_triangles() {
        let g = SocialGraph::from_edges([(0, 1), (0, 2), (0, 5), (1, 3), (1, 4), (2, 4), (2, 5), (3, 4), (3, 5)]);
        let p = detect_communities(&g);
        assert_eq!(p.assignment(), &[1, 2, 1, 2, 2, 1]);
    }

    #[test]
    fn edgeless_graph_stays_singletons() {
        let g = SocialGraph::with_vertices([0, 1, 2], []);
        assert_eq!(detect_communities(&g), Partition::singletons(3));
    }
}
