//! Exact hypergeometric law for the number of marked participants in a
//! uniform sample drawn without replacement.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::combinatorics::binomial;
use crate::error::{invalid, Result};

/// `H(draws; marked, population)`:
/// `P(X = m) = C(M, m) C(P - M, n - m) / C(P, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hypergeometric {
    population: usize,
    marked: usize,
    draws: usize,
}

impl Hypergeometric {
    pub fn new(population: usize, marked: usize, draws: usize) -> Result<Self> {
        if marked > population || draws > population {
            return invalid("marked count and sample size must not exceed the population");
        }
        Ok(Self {
            population,
            marked,
            draws,
        })
    }

    /// Smallest and largest `m` with non-zero probability.
    pub fn support(&self) -> (usize, usize) {
        let lo = self.draws.saturating_sub(self.population - self.marked);
        (lo, self.marked.min(self.draws))
    }

    /// `C(P, n)`, the common denominator.
    pub fn denominator(&self) -> BigUint {
        binomial(self.population, self.draws)
    }

    /// Numerators `C(M, m) C(P - M, n - m)` for `m = 0..=min(M, n)`.
    /// They sum to [`denominator`](Self::denominator).
    pub fn numerators(&self) -> Vec<BigUint> {
        let (lo, hi) = self.support();
        let mut out = alloc::vec![BigUint::zero(); hi + 1];
        let unmarked = (self.population - self.marked) as u64;
        let mut left = binomial(self.marked, lo);
        let mut right = binomial(unmarked as usize, self.draws - lo);
        for (m, slot) in out.iter_mut().enumerate().skip(lo) {
            *slot = &left * &right;
            if m == hi {
                break;
            }
            // C(M, m+1) = C(M, m) (M - m) / (m + 1)
            left = left * (self.marked - m) as u64 / (m as u64 + 1);
            // C(K, j-1) = C(K, j) j / (K - j + 1), j = n - m
            let j = (self.draws - m) as u64;
            right = right * j / (unmarked - j + 1);
        }
        out
    }

    /// Exact `P(X = m)`; zero outside the support.
    pub fn pmf_exact(&self, m: usize) -> BigRational {
        let (lo, hi) = self.support();
        if m < lo || m > hi {
            return BigRational::zero();
        }
        let num = binomial(self.marked, m) * binomial(self.population - self.marked, self.draws - m);
        BigRational::new(BigInt::from(num), BigInt::from(self.denominator()))
    }

    pub fn pmf(&self, m: usize) -> f64 {
        self.pmf_exact(m).to_f64().unwrap_or(0.0)
    }

    /// `P(X = m)` for `m = 0..=min(M, n)`.
    pub fn pmf_table(&self) -> Vec<f64> {
        let den = BigInt::from(self.denominator());
        self.numerators()
            .into_iter()
            .map(|num| ratio_to_f64(num, &den))
            .collect()
    }

    /// Running sums of the exact table: `P(X <= m)` for `m = 0..=min(M, n)`.
    pub fn cdf_table(&self) -> Vec<f64> {
        let den = BigInt::from(self.denominator());
        let mut acc = BigUint::zero();
        self.numerators()
            .into_iter()
            .map(|num| {
                acc += num;
                ratio_to_f64(acc.clone(), &den)
            })
            .collect()
    }

    /// Least `m` with `P(X <= m) >= confidence`, compared exactly.
    pub fn quantile(&self, confidence: f64) -> Result<usize> {
        let level = exact_fraction(confidence)?;
        let den = self.denominator();
        let (level_num, level_den) = (level.numer().magnitude().clone(), level.denom().magnitude().clone());
        let mut acc = BigUint::zero();
        let nums = self.numerators();
        for (m, num) in nums.iter().enumerate() {
            acc += num;
            if &acc * &level_den >= &level_num * &den {
                return Ok(m);
            }
        }
        Ok(nums.len() - 1)
    }
}

/// For each sample size `n = 0..=population`, the least `m` such that at
/// most `m` of the `marked` participants are sampled with probability at
/// least `confidence`.
pub fn collusion_confidence_curve(population: usize, marked: usize, confidence: f64) -> Result<Vec<(usize, usize)>> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return invalid("confidence must lie strictly between 0 and 1");
    }
    (0..=population)
        .map(|n| Ok((n, Hypergeometric::new(population, marked, n)?.quantile(confidence)?)))
        .collect()
}

fn exact_fraction(x: f64) -> Result<BigRational> {
    match BigRational::from_float(x) {
        Some(r) => Ok(r),
        None => invalid("confidence must be finite"),
    }
}

fn ratio_to_f64(num: BigUint, den: &BigInt) -> f64 {
    BigRational::new_raw(BigInt::from(num), den.clone())
        .to_f64()
        .unwrap_or(0.0)
}
