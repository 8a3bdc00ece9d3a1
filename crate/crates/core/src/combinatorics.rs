//! Exact counting and the three numbering functions that map an ordered
//! sublist of a roster to a natural number.
//!
//! * permutation number: rank of an ordering among all orderings of the same
//!   elements, in `[0, |v|!)`.
//! * combination number: lexicographic rank of the element set among all
//!   `|v|`-subsets of the roster, in `[0, C(|p|, |v|))`.
//! * arrangement number: rank of the ordered sublist among all ordered
//!   sublists of the roster of any length, in `[0, sum_k A(|p|, k))`.
//!
//! All arithmetic is exact. Products are built incrementally (multiply or
//! divide a running value by a machine word), so rosters of tens of thousands
//! of participants stay cheap.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{invalid, Result};

/// `n!`
pub fn factorial(n: usize) -> BigUint {
    (2..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// Number of `k`-permutations of `n` elements, `n! / (n-k)!`. Zero if `k > n`.
pub fn falling_factorial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    ((n - k + 1) as u64..=n as u64).fold(BigUint::one(), |acc, f| acc * f)
}

/// Binomial coefficient `C(n, k)`. Zero if `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k as u64 {
        // acc = C(n, i) here, so the division is exact.
        acc = acc * (n as u64 - i) / (i + 1);
    }
    acc
}

/// Which numbering function an output space refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NumberingSpace {
    /// Orderings of `v` elements: `v!`.
    Permutation { v: usize },
    /// `v`-subsets of `p` elements: `C(p, v)`.
    Combination { p: usize, v: usize },
    /// Ordered sublists of any length of `p` elements: `sum_{k=0}^{p} A(p, k)`.
    Arrangement { p: usize },
}

/// Size of the output space of a numbering function.
pub fn output_space_size(space: NumberingSpace) -> BigUint {
    match space {
        NumberingSpace::Permutation { v } => factorial(v),
        NumberingSpace::Combination { p, v } => binomial(p, v),
        NumberingSpace::Arrangement { p } => {
            // sum_k p!/(p-k)! = 1 + p(1 + (p-1)(1 + ...)), evaluated inside out.
            (1..=p as u64).fold(BigUint::one(), |acc, j| acc * j + 1u32)
        }
    }
}

/// Number of ordered sublists of a `p`-roster that are strictly shorter than
/// `len`: `sum_{i<len} A(p, i)`.
pub fn size_class_offset(p: usize, len: usize) -> BigUint {
    let mut term = BigUint::one();
    let mut sum = BigUint::zero();
    for i in 0..len.min(p + 1) {
        sum += &term;
        term *= (p - i) as u64;
    }
    sum
}

/// Permutation number of `v`: `sum_i i! * #{k < i : v[k] < v[i]}`.
///
/// Strictly descending input maps to 0, strictly ascending to `|v|! - 1`.
pub fn permutation_number<T: Ord>(v: &[T]) -> Result<BigUint> {
    let ranks = dense_ranks(v)?;
    let digits = smaller_before_counts(&ranks);
    // sum d_i * i! = d_0 + 1*(d_1 + 2*(d_2 + ...)), Horner from the top.
    let mut acc = BigUint::zero();
    for (i, &d) in digits.iter().enumerate().rev() {
        acc = acc * (i as u64 + 1) + d as u64;
    }
    Ok(acc)
}

/// Lexicographic rank of the element set of `v` among all `|v|`-subsets of
/// the strictly ascending roster `p`. The order of `v` is ignored.
pub fn combination_number<T: Ord>(v: &[T], p: &[T]) -> Result<BigUint> {
    let positions = sorted_positions(v, p)?;
    Ok(combination_rank(&positions, p.len()))
}

/// Rank of the ordered sublist `v` among all ordered sublists of the strictly
/// ascending roster `p`:
/// `sum_{i<|v|} A(|p|, i) + CN(v, p) * |v|! + PN(v)`.
pub fn arrangement_number<T: Ord>(v: &[T], p: &[T]) -> Result<BigUint> {
    let positions = sorted_positions(v, p)?;
    let pn = permutation_number(v)?;
    let cn = combination_rank(&positions, p.len());
    Ok(size_class_offset(p.len(), v.len()) + cn * factorial(v.len()) + pn)
}

/// Lexicographic rank of a strictly increasing position list among all
/// subsets of the same size of `0..p_len`.
///
/// Walks the roster once, keeping `C(n, r)` for the current suffix length `n`
/// and number of elements still to place `r`; every skipped roster slot
/// before a chosen one contributes the count of subsets that would have taken
/// it instead.
fn combination_rank(positions: &[usize], p_len: usize) -> BigUint {
    let v = positions.len();
    let mut rank = BigUint::zero();
    if v == 0 {
        return rank;
    }
    let (mut n, mut r) = ((p_len - 1) as u64, (v - 1) as u64);
    let mut term = binomial(n as usize, r as usize);
    let mut placed = 0;
    let mut x = 0;
    while placed < v {
        if x == positions[placed] {
            placed += 1;
            if placed == v {
                break;
            }
            // C(n-1, r-1) = C(n, r) * r / n
            term = term * r / n;
            r -= 1;
        } else {
            rank += &term;
            // C(n-1, r) = C(n, r) * (n - r) / n
            term = term * (n - r) / n;
        }
        n -= 1;
        x += 1;
    }
    rank
}

/// Ranks of the elements of `v` in `0..v.len()`; errors on duplicates.
fn dense_ranks<T: Ord>(v: &[T]) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].cmp(&v[b]));
    if order.windows(2).any(|w| v[w[0]] == v[w[1]]) {
        return invalid("ordered sublist contains a duplicate element");
    }
    let mut ranks = alloc::vec![0; v.len()];
    for (rank, &i) in order.iter().enumerate() {
        ranks[i] = rank;
    }
    Ok(ranks)
}

/// For each `i`, the number of earlier entries with a smaller rank.
fn smaller_before_counts(ranks: &[usize]) -> Vec<usize> {
    // Fenwick tree over ranks.
    let n = ranks.len();
    let mut tree = alloc::vec![0usize; n + 1];
    let mut out = Vec::with_capacity(n);
    for &r in ranks {
        let mut count = 0;
        let mut i = r;
        while i > 0 {
            count += tree[i];
            i &= i - 1;
        }
        out.push(count);
        let mut i = r + 1;
        while i <= n {
            tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }
    out
}

/// Roster positions of the elements of `v`, ascending.
fn sorted_positions<T: Ord>(v: &[T], p: &[T]) -> Result<Vec<usize>> {
    if p.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("roster must be strictly ascending");
    }
    let mut positions = Vec::with_capacity(v.len());
    for item in v {
        match p.binary_search(item) {
            Ok(pos) => positions.push(pos),
            Err(_) => return invalid("sublist element is not in the roster"),
        }
    }
    positions.sort_unstable();
    if positions.windows(2).any(|w| w[0] == w[1]) {
        return invalid("ordered sublist contains a duplicate element");
    }
    Ok(positions)
}
