//! Undirected, unweighted social graph with dense vertex indices.
//!
//! Vertices are indexed `0..n` in ascending order of their external id, so
//! index order and id order agree everywhere. Reports always use the
//! external ids.

use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// External vertex id, as found in edge-list files.
pub type VertexId = u64;

/// Hop count marking a vertex that cannot be reached.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SocialGraph {
    ids: Vec<VertexId>,
    adj: Vec<Vec<u32>>,
    edges: usize,
}

impl SocialGraph {
    /// Builds a simple graph from an edge list. Every endpoint becomes a
    /// vertex; self-loops and repeated or reversed edges are dropped.
    pub fn from_edges(edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Self {
        Self::with_vertices(core::iter::empty(), edges)
    }

    /// Like [`from_edges`](Self::from_edges) but also keeps isolated vertices.
    pub fn with_vertices(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Self {
        let edges: Vec<(VertexId, VertexId)> = edges.into_iter().collect();
        let mut ids: Vec<VertexId> = vertices.into_iter().collect();
        ids.extend(edges.iter().flat_map(|&(u, v)| [u, v]));
        ids.sort_unstable();
        ids.dedup();

        let index = |id: VertexId| ids.binary_search(&id).expect("endpoint registered") as u32;
        let mut adj = alloc::vec![Vec::new(); ids.len()];
        for &(u, v) in &edges {
            if u == v {
                continue;
            }
            let (a, b) = (index(u), index(v));
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        let mut count = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            count += list.len();
        }
        Self {
            ids,
            adj,
            edges: count / 2,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Sorted neighbor indices of vertex `v`.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn id(&self, v: u32) -> VertexId {
        self.ids[v as usize]
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn index_of(&self, id: VertexId) -> Option<u32> {
        self.ids.binary_search(&id).ok().map(|i| i as u32)
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Edges as external id pairs `(u, v)` with `u < v`, sorted.
    pub fn canonical_edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.edges);
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list.iter().filter(|&&v| v as usize > u) {
                out.push((self.ids[u], self.ids[v as usize]));
            }
        }
        out
    }

    /// Hop distances from `source` to every vertex.
    pub fn bfs(&self, source: u32) -> Vec<u32> {
        let mut dist = alloc::vec![UNREACHABLE; self.ids.len()];
        self.bfs_into(source, u32::MAX, &mut dist, &mut Vec::new());
        dist
    }

    /// BFS from `source` that stops expanding at `max_depth`. `dist` must be
    /// filled with [`UNREACHABLE`]; vertices further than `max_depth` keep it.
    /// On return `visited` holds every vertex whose distance was set, in BFS
    /// order, so callers can reset `dist` without a full sweep.
    pub fn bfs_into(&self, source: u32, max_depth: u32, dist: &mut [u32], visited: &mut Vec<u32>) {
        visited.clear();
        dist[source as usize] = 0;
        visited.push(source);
        let mut head = 0;
        while head < visited.len() {
            let u = visited[head];
            head += 1;
            let d = dist[u as usize];
            if d >= max_depth {
                continue;
            }
            for &w in &self.adj[u as usize] {
                if dist[w as usize] == UNREACHABLE {
                    dist[w as usize] = d + 1;
                    visited.push(w);
                }
            }
        }
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let mut seen = alloc::vec![false; self.ids.len()];
        let mut out = Vec::new();
        for start in 0..self.ids.len() {
            if seen[start] {
                continue;
            }
            let mut comp = alloc::vec![start as u32];
            seen[start] = true;
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for &w in &self.adj[u as usize] {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Rows of hop distances, one per source vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    pub sources: Vec<u32>,
    pub rows: Vec<Vec<u32>>,
}

impl DistanceMatrix {
    pub fn row(&self, source: u32) -> Option<&[u32]> {
        self.sources
            .iter()
            .position(|&s| s == source)
            .map(|i| self.rows[i].as_slice())
    }
}

pub fn bfs_distances(g: &SocialGraph, sources: &[u32]) -> Result<DistanceMatrix> {
    if let Some(&s) = sources.iter().find(|&&s| s as usize >= g.vertex_count()) {
        return invalid(alloc::format!("unknown source vertex index {s}"));
    }
    Ok(DistanceMatrix {
        sources: sources.to_vec(),
        rows: sources.iter().map(|&s| g.bfs(s)).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentStats {
    pub vertices: usize,
    pub diameter: u32,
    pub radius: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphStats {
    /// Eccentricity of each vertex within its own component.
    pub eccentricities: Vec<u32>,
    pub components: Vec<ComponentStats>,
    /// Whole-graph diameter and radius; [`UNREACHABLE`] when the graph is
    /// disconnected.
    pub diameter: u32,
    pub radius: u32,
}

impl GraphStats {
    pub fn is_connected(&self) -> bool {
        self.components.len() <= 1
    }
}

/// Exact eccentricities from one BFS per vertex.
pub fn graph_stats(g: &SocialGraph) -> GraphStats {
    let n = g.vertex_count();
    let mut ecc = alloc::vec![0u32; n];
    let mut dist = alloc::vec![UNREACHABLE; n];
    let mut queue = Vec::new();
    let mut components = Vec::new();
    for comp in g.components() {
        for &s in &comp {
            g.bfs_into(s, u32::MAX, &mut dist, &mut queue);
            ecc[s as usize] = comp.iter().map(|&v| dist[v as usize]).max().unwrap_or(0);
            for &v in &comp {
                dist[v as usize] = UNREACHABLE;
            }
        }
        let eccs = comp.iter().map(|&v| ecc[v as usize]);
        components.push(ComponentStats {
            vertices: comp.len(),
            diameter: eccs.clone().max().unwrap_or(0),
            radius: eccs.min().unwrap_or(0),
        });
    }
    let (diameter, radius) = match components.as_slice() {
        [] => (0, 0),
        [only] => (only.diameter, only.radius),
        _ => (UNREACHABLE, UNREACHABLE),
    };
    GraphStats {
        eccentricities: ecc,
        components,
        diameter,
        radius,
    }
}

/// Subgraph on `vertices` (indices into `g`), keeping the external ids and
/// exactly the edges between retained vertices.
pub fn induced_subgraph(g: &SocialGraph, vertices: &[u32]) -> SocialGraph {
    let mut keep: Vec<u32> = vertices.to_vec();
    keep.sort_unstable();
    keep.dedup();
    let mut local = alloc::vec![u32::MAX; g.vertex_count()];
    for (i, &v) in keep.iter().enumerate() {
        local[v as usize] = i as u32;
    }
    let mut edges = 0;
    let adj: Vec<Vec<u32>> = keep
        .iter()
        .map(|&v| {
            let row: Vec<u32> = g
                .neighbors(v)
                .iter()
                .filter_map(|&w| (local[w as usize] != u32::MAX).then_some(local[w as usize]))
                .collect();
            edges += row.len();
            row
        })
        .collect();
    SocialGraph {
        ids: keep.iter().map(|&v| g.id(v)).collect(),
        adj,
        edges: edges / 2,
    }
}
