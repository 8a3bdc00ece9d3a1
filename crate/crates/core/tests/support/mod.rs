//! Brute-force reference implementations used by the oracle tests.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const INF: u32 = u32::MAX;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Erdos-Renyi edges on `0..n`.
pub fn random_edges(rng: &mut StdRng, n: u64, p: f64) -> Vec<(u64, u64)> {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// Random spanning tree on `0..n` plus extra edges with probability `p`.
pub fn random_connected_edges(rng: &mut StdRng, n: u64, p: f64) -> Vec<(u64, u64)> {
    let mut edges: Vec<(u64, u64)> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
    for (a, b) in random_edges(rng, n, p) {
        if !edges.contains(&(a, b)) {
            edges.push((a, b));
        }
    }
    edges
}

pub fn adjacency_matrix(n: usize, edges: &[(u64, u64)]) -> Vec<Vec<bool>> {
    let mut a = vec![vec![false; n]; n];
    for &(u, v) in edges {
        if u != v {
            a[u as usize][v as usize] = true;
            a[v as usize][u as usize] = true;
        }
    }
    a
}

/// All-pairs hop distances by Floyd-Warshall.
pub fn floyd(n: usize, edges: &[(u64, u64)]) -> Vec<Vec<u32>> {
    let a = adjacency_matrix(n, edges);
    let mut d = vec![vec![INF; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                d[i][j] = 0;
            } else if a[i][j] {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] != INF && d[k][j] != INF && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// `Q = 1/2m * sum_ij [A_ij - k_i k_j / 2m] delta(c_i, c_j)`.
pub fn modularity_oracle(a: &[Vec<bool>], assign: &[usize]) -> f64 {
    let n = a.len();
    let k: Vec<f64> = a.iter().map(|r| r.iter().filter(|&&x| x).count() as f64).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if assign[i] == assign[j] {
                q += f64::from(a[i][j] as u8) - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Best modularity over every set partition (restricted growth strings).
pub fn max_modularity(a: &[Vec<bool>]) -> f64 {
    fn rec(a: &[Vec<bool>], assign: &mut Vec<usize>, used: usize, best: &mut f64) {
        if assign.len() == a.len() {
            *best = best.max(modularity_oracle(a, assign));
            return;
        }
        for c in 0..=used {
            assign.push(c);
            rec(a, assign, used.max(c + 1), best);
            assign.pop();
        }
    }
    let mut best = f64::NEG_INFINITY;
    rec(a, &mut Vec::new(), 0, &mut best);
    best
}

/// Smallest pairwise distance inside `set`.
pub fn min_pairwise(d: &[Vec<u32>], set: &[usize]) -> u32 {
    let mut best = INF;
    for (i, &a) in set.iter().enumerate() {
        for &b in &set[i + 1..] {
            best = best.min(d[a][b]);
        }
    }
    best
}

/// Every `k`-subset of `0..n`, ascending.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Best achievable min pairwise distance over all `k`-subsets.
pub fn optimal_dispersion(d: &[Vec<u32>], k: usize) -> u32 {
    subsets(d.len(), k)
        .iter()
        .map(|s| min_pairwise(d, s))
        .max()
        .unwrap_or(INF)
}

/// Largest subset of `workers` that is pairwise within `k` hops, by
/// enumerating every subset.
pub fn clique_by_enumeration(d: &[Vec<u32>], workers: &[usize], k: u32) -> usize {
    let w = workers.len();
    assert!(w <= 24);
    let mut near = vec![0u32; w];
    for i in 0..w {
        for j in 0..w {
            if i != j && d[workers[i]][workers[j]] <= k {
                near[i] |= 1 << j;
            }
        }
    }
    let mut best = 0;
    for mask in 0u32..(1u32 << w) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let mut ok = true;
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if mask & !(1 << i) & !near[i] != 0 {
                ok = false;
                break;
            }
        }
        if ok {
            best = size;
        }
    }
    best
}

/// Every ordering of an ascending slice.
pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &head) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Direct evaluation of `sum_i i! * #{k < i : x_k < x_i}`.
pub fn permutation_formula(v: &[usize]) -> u128 {
    let mut fact = 1u128;
    let mut total = 0u128;
    for i in 0..v.len() {
        if i > 0 {
            fact *= i as u128;
        }
        let smaller = v[..i].iter().filter(|&&x| x < v[i]).count() as u128;
        total += fact * smaller;
    }
    total
}

/// Arrangement rank from its definition: all shorter lists first, then the
/// set's position among same-size sets in lexicographic order, then the
/// permutation formula.
pub fn arrangement_formula(v: &[usize], p: usize) -> u128 {
    let falling = |n: u128, k: u128| (0..k).fold(1u128, |acc, i| acc * (n - i));
    let offset: u128 = (0..v.len() as u128).map(|i| falling(p as u128, i)).sum();
    let mut set = v.to_vec();
    set.sort_unstable();
    let set_rank = subsets(p, v.len()).iter().position(|s| *s == set).unwrap() as u128;
    let fact = (1..=v.len() as u128).product::<u128>();
    offset + set_rank * fact + permutation_formula(v)
}

pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
