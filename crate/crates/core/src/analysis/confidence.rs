//! Empirical order-statistic bounds over repeated executions.

use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// The `rank`-th smallest sample, 1-based.
pub fn order_statistic<T: Ord + Copy>(samples: &[T], rank: usize) -> Result<T> {
    if rank == 0 || rank > samples.len() {
        return invalid(alloc::format!("rank {rank} outside 1..={}", samples.len()));
    }
    let mut sorted: Vec<T> = samples.to_vec();
    sorted.sort_unstable();
    Ok(sorted[rank - 1])
}

/// `ceil(level * n)` clamped to `1..=n`. Products that land within rounding
/// noise of an integer are taken as that integer, so `0.1 * 10` is 1.
fn rank_at(level: f64, n: usize) -> usize {
    let x = level * n as f64;
    let nearest = (x + 0.5) as usize;
    let r = if (x - nearest as f64).abs() <= 1e-9 * (n as f64).max(1.0) {
        nearest
    } else {
        let t = x as usize;
        if (t as f64) < x {
            t + 1
        } else {
            t
        }
    };
    r.clamp(1, n)
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        invalid(alloc::format!("level {level} is not in (0, 1)"))
    }
}

/// One-sided upper bound: the `ceil(level * N)`-th order statistic.
pub fn upper_confidence_bound<T: Ord + Copy>(samples: &[T], level: f64) -> Result<T> {
    check_level(level)?;
    if samples.is_empty() {
        return invalid("no samples");
    }
    order_statistic(samples, rank_at(level, samples.len()))
}

/// Central interval holding `level` of the samples, from the
/// `(1 - level) / 2` and `(1 + level) / 2` order statistics.
pub fn two_sided_interval<T: Ord + Copy>(samples: &[T], level: f64) -> Result<(T, T)> {
    check_level(level)?;
    if samples.is_empty() {
        return invalid("no samples");
    }
    let n = samples.len();
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let lo = rank_at((1.0 - level) / 2.0, n);
    let hi = rank_at((1.0 + level) / 2.0, n);
    Ok((sorted[lo - 1], sorted[hi - 1]))
}
