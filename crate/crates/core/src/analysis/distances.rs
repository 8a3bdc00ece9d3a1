//! Pairwise hop distances between selected workers.

use alloc::vec::Vec;

use crate::community::Partition;
use crate::error::{invalid, Result};
use crate::graph::{SocialGraph, UNREACHABLE};

/// Worker pairs by hop distance: 1, 2, and 3 or more (including unreachable).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DistanceBuckets {
    pub d1: u64,
    pub d2: u64,
    pub far: u64,
}

impl DistanceBuckets {
    pub fn total(&self) -> u64 {
        self.d1 + self.d2 + self.far
    }

    fn add(&mut self, d: u32) {
        match d {
            1 => self.d1 += 1,
            2 => self.d2 += 1,
            _ => self.far += 1,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WorkerDistanceStats {
    pub all: DistanceBuckets,
    /// Pairs inside one community; `None` without a partition.
    pub intra: Option<DistanceBuckets>,
    pub inter: Option<DistanceBuckets>,
}

/// Histogram over unordered pairs of distinct workers (vertex indices).
pub fn worker_distance_stats(
    g: &SocialGraph,
    workers: &[u32],
    partition: Option<&Partition>,
) -> Result<WorkerDistanceStats> {
    let mut ws = workers.to_vec();
    ws.sort_unstable();
    ws.dedup();
    let n = g.vertex_count();
    if ws.iter().any(|&w| w as usize >= n) {
        return invalid("worker is not a vertex of the graph");
    }
    if let Some(p) = partition {
        if p.vertex_count() != n {
            return invalid("partition does not cover the graph");
        }
    }
    let mut stats = WorkerDistanceStats {
        intra: partition.map(|_| DistanceBuckets::default()),
        inter: partition.map(|_| DistanceBuckets::default()),
        ..Default::default()
    };
    let mut dist = alloc::vec![UNREACHABLE; n];
    let mut visited = Vec::new();
    for (i, &w) in ws.iter().enumerate() {
        g.bfs_into(w, 2, &mut dist, &mut visited);
        for &x in &ws[i + 1..] {
            let d = dist[x as usize];
            stats.all.add(d);
            if let Some(p) = partition {
                let same = p.community_of(w) == p.community_of(x);
                let bucket = if same { &mut stats.intra } else { &mut stats.inter };
                bucket.as_mut().expect("partition supplied").add(d);
            }
        }
        for &v in &visited {
            dist[v as usize] = UNREACHABLE;
        }
    }
    Ok(stats)
}
