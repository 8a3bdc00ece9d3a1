//! Refinement of a multilevel result. Two moves are available: Kernighan-Lin
//! style passes, which may take a run of losing single-vertex moves and then
//! keep the best prefix, and leading-eigenvector bisection, which finds splits
//! that no sequence of single-vertex moves can reach from a coarse partition.
//!
//! Labels are plain `u32` values below the vertex count. Acceptance decisions
//! use [`scaled_modularity`], which is exact; floating point is only used to
//! propose a bisection.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::graph::SocialGraph;

/// A pass stops after this many consecutive moves that fail to beat the best
/// prefix seen so far.
const PATIENCE: usize = 64;
const POWER_ITERATIONS: usize = 1000;

/// `4m^2 Q` for a labelling whose labels are all below the vertex count.
pub(super) fn scaled_modularity(g: &SocialGraph, labels: &[u32]) -> i128 {
    let n = labels.len();
    let two_m = 2 * g.edge_count() as i128;
    let mut inside = alloc::vec![0i128; n];
    let mut degree = alloc::vec![0i128; n];
    for v in 0..n as u32 {
        let c = labels[v as usize] as usize;
        degree[c] += g.degree(v) as i128;
        inside[c] += g
            .neighbors(v)
            .iter()
            .filter(|&&w| labels[w as usize] as usize == c)
            .count() as i128;
    }
    inside.iter().zip(&degree).map(|(&e, &d)| two_m * e - d * d).sum()
}

struct State<'a> {
    g: &'a SocialGraph,
    two_m: i128,
    labels: Vec<u32>,
    tot: Vec<i128>,
    size: Vec<u32>,
    link: Vec<i128>,
    touched: Vec<u32>,
}

impl<'a> State<'a> {
    fn new(g: &'a SocialGraph, labels: Vec<u32>) -> Self {
        let n = labels.len();
        let mut tot = alloc::vec![0i128; n];
        let mut size = alloc::vec![0u32; n];
        for (v, &c) in labels.iter().enumerate() {
            tot[c as usize] += g.degree(v as u32) as i128;
            size[c as usize] += 1;
        }
        Self {
            g,
            two_m: 2 * g.edge_count() as i128,
            labels,
            tot,
            size,
            link: alloc::vec![0; n],
            touched: Vec::new(),
        }
    }

    fn shift(&mut self, v: u32, to: u32) {
        let k = self.g.degree(v) as i128;
        let from = self.labels[v as usize];
        self.tot[from as usize] -= k;
        self.size[from as usize] -= 1;
        self.tot[to as usize] += k;
        self.size[to as usize] += 1;
        self.labels[v as usize] = to;
    }

    fn free_label(&self) -> Option<u32> {
        self.size.iter().position(|&s| s == 0).map(|c| c as u32)
    }

    /// Best single move of `v` as `(gain, target)`, where the gain is the
    /// change of `2m^2 Q`. Moving into an unused label is allowed unless `v`
    /// is already alone.
    fn best_move(&mut self, v: u32, free: Option<u32>) -> Option<(i128, u32)> {
        let own = self.labels[v as usize];
        let k = self.g.degree(v) as i128;
        for &w in self.g.neighbors(v) {
            let c = self.labels[w as usize];
            if self.link[c as usize] == 0 {
                self.touched.push(c);
            }
            self.link[c as usize] += 1;
        }
        let stay = self.link[own as usize] * self.two_m - (self.tot[own as usize] - k) * k;
        let mut best: Option<(i128, u32)> = None;
        let mut offer = |gain: i128, c: u32| {
            best = match best {
                Some((bg, bc)) if bg > gain || (bg == gain && bc < c) => Some((bg, bc)),
                _ => Some((gain, c)),
            };
        };
        for &c in &self.touched {
            if c != own {
                offer(self.link[c as usize] * self.two_m - self.tot[c as usize] * k - stay, c);
            }
        }
        if let Some(c) = free.filter(|_| self.size[own as usize] > 1) {
            offer(-stay, c);
        }
        for c in self.touched.drain(..) {
            self.link[c as usize] = 0;
        }
        best
    }

    /// One pass over `scope`; returns whether modularity went up.
    fn pass(&mut self, scope: &[u32]) -> bool {
        let mut moved = alloc::vec![false; scope.len()];
        let mut history: Vec<(u32, u32)> = Vec::new();
        let (mut acc, mut best, mut best_len) = (0i128, 0i128, 0usize);
        while history.len() < scope.len() {
            let free = self.free_label();
            let mut pick: Option<(i128, usize, u32)> = None;
            for (i, &v) in scope.iter().enumerate() {
                if moved[i] {
                    continue;
                }
                if let Some((gain, c)) = self.best_move(v, free) {
                    if pick.is_none_or(|(pg, _, _)| gain > pg) {
                        pick = Some((gain, i, c));
                    }
                }
            }
            let Some((gain, i, c)) = pick else { break };
            let v = scope[i];
            moved[i] = true;
            history.push((v, self.labels[v as usize]));
            self.shift(v, c);
            acc += gain;
            if acc > best {
                best = acc;
                best_len = history.len();
            } else if history.len() - best_len >= PATIENCE {
                break;
            }
        }
        while history.len() > best_len {
            let (v, from) = history.pop().unwrap();
            self.shift(v, from);
        }
        best > 0
    }

    fn improve(&mut self, scope: &[u32]) {
        while self.pass(scope) {}
    }
}

/// Alternates Kernighan-Lin passes over all vertices with a multilevel run
/// seeded by the result, until modularity stops rising.
pub(super) fn polish(g: &SocialGraph, mut labels: Vec<u32>) -> (Vec<u32>, i128) {
    let all: Vec<u32> = (0..labels.len() as u32).collect();
    let mut q = scaled_modularity(g, &labels);
    loop {
        let mut state = State::new(g, labels.clone());
        state.improve(&all);
        let next = super::multilevel(g, &state.labels);
        let q_next = scaled_modularity(g, &next);
        if q_next <= q {
            return (labels, q);
        }
        labels = next;
        q = q_next;
    }
}

/// Divisive partition: starting from one community, split any community
/// along the sign of the leading eigenvector of its modularity matrix and
/// tidy the two halves with Kernighan-Lin passes, as long as that raises
/// modularity.
pub(super) fn bisect(g: &SocialGraph) -> Vec<u32> {
    let n = g.vertex_count();
    let mut labels = alloc::vec![0u32; n];
    let mut q = scaled_modularity(g, &labels);
    let mut settled: BTreeSet<Vec<u32>> = BTreeSet::new();
    loop {
        let mut changed = false;
        for c in 0..n as u32 {
            let members: Vec<u32> = (0..n as u32).filter(|&v| labels[v as usize] == c).collect();
            if members.len() < 2 || settled.contains(&members) {
                continue;
            }
            let Some(side) = leading_split(g, &members) else {
                settled.insert(members);
                continue;
            };
            let mut state = State::new(g, labels.clone());
            let fresh = state
                .free_label()
                .expect("a community of two or more leaves a label free");
            for &v in &side {
                state.shift(v, fresh);
            }
            state.improve(&members);
            let q_next = scaled_modularity(g, &state.labels);
            if q_next > q {
                labels = state.labels;
                q = q_next;
                changed = true;
            } else {
                settled.insert(members);
            }
        }
        if !changed {
            return labels;
        }
    }
}

fn abs(x: f64) -> f64 {
    if x < 0.0 {
        -x
    } else {
        x
    }
}

/// Members on the positive side of the leading eigenvector of the
/// generalized modularity matrix `B_ij - delta_ij sum_l B_il` restricted to
/// `members`, or `None` when that matrix has no positive eigenvalue.
fn leading_split(g: &SocialGraph, members: &[u32]) -> Option<Vec<u32>> {
    let s = members.len();
    let two_m = 2.0 * g.edge_count() as f64;
    let mut index = alloc::vec![u32::MAX; g.vertex_count()];
    for (i, &v) in members.iter().enumerate() {
        index[v as usize] = i as u32;
    }
    let rows: Vec<Vec<u32>> = members
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .map(|&w| index[w as usize])
                .filter(|&j| j != u32::MAX)
                .collect()
        })
        .collect();
    let k: Vec<f64> = members.iter().map(|&v| g.degree(v) as f64).collect();
    let volume: f64 = k.iter().sum();
    let diag: Vec<f64> = (0..s).map(|i| rows[i].len() as f64 - k[i] * volume / two_m).collect();
    let bound = (0..s)
        .map(|i| rows[i].len() as f64 + k[i] * volume / two_m + abs(diag[i]))
        .fold(0.0, |a: f64, b| if b > a { b } else { a });
    let apply = |x: &[f64], out: &mut [f64]| {
        let kx: f64 = k.iter().zip(x).map(|(a, b)| a * b).sum();
        for i in 0..s {
            let adj: f64 = rows[i].iter().map(|&j| x[j as usize]).sum();
            out[i] = adj - k[i] * kx / two_m - diag[i] * x[i];
        }
    };
    let mut x: Vec<f64> = (0..s).map(|i| 1.0 + (i + 1) as f64 / s as f64).collect();
    let mut y = alloc::vec![0.0; s];
    for _ in 0..POWER_ITERATIONS {
        apply(&x, &mut y);
        let mut top = 0.0;
        for i in 0..s {
            y[i] += bound * x[i];
            if abs(y[i]) > top {
                top = abs(y[i]);
            }
        }
        if top == 0.0 {
            return None;
        }
        let mut change = 0.0;
        for i in 0..s {
            let next = y[i] / top;
            if abs(next - x[i]) > change {
                change = abs(next - x[i]);
            }
            x[i] = next;
        }
        if change < 1e-12 {
            break;
        }
    }
    apply(&x, &mut y);
    let rayleigh: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / x.iter().map(|a| a * a).sum::<f64>();
    if rayleigh <= 1e-9 {
        return None;
    }
    let side: Vec<u32> = members
        .iter()
        .zip(&x)
        .filter(|(_, &xi)| xi > 0.0)
        .map(|(&v, _)| v)
        .collect();
    (!side.is_empty() && side.len() < s).then_some(side)
}
