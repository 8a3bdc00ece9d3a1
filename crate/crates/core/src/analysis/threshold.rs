//! Bounds on the threshold `t` of a `t`-of-`n` secret-sharing scheme run by
//! `n` workers of which `m` may collude.

/// Outcome of the three constraints for a given `(n, t, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstraintCheck {
    /// `t > m`: colluders cannot reconstruct the secret.
    pub secrecy: bool,
    /// `n - t > m`: colluders cannot block reconstruction by going silent.
    pub availability: bool,
    /// `n - t^2 > m`: colluders cannot block the checksum reconstruction.
    pub checksum: bool,
}

impl ConstraintCheck {
    pub fn all(&self) -> bool {
        self.secrecy && self.availability && self.checksum
    }
}

pub fn constraints_ok(n: u64, t: u64, m: u64) -> ConstraintCheck {
    let (n, t, m) = (n as i128, t as i128, m as i128);
    ConstraintCheck {
        secrecy: t > m,
        availability: n - t > m,
        checksum: n - t * t > m,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThresholdBounds {
    pub n: u64,
    /// Largest `t` such that `m = t - 1` colluders violate none of the three
    /// constraints; 0 if there is none.
    pub t_max_strict: u64,
    /// `floor(n / 2)`, the bound once the checksum constraint is dropped.
    pub t_max_relaxed: u64,
}

/// Threshold bounds for `n` workers, found by binary search over `t`
/// against the constraints themselves.
pub fn t_max(n: u64) -> ThresholdBounds {
    let holds = |t: u64| constraints_ok(n, t, t - 1).all();
    // holds() is monotone: true up to the answer, false afterwards.
    let (mut lo, mut hi) = (0u64, n);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    ThresholdBounds {
        n,
        t_max_strict: lo,
        t_max_relaxed: n / 2,
    }
}

/// Collusion is considered possible once the largest colluding group
/// reaches the strict threshold.
pub fn collusion_possible(clique_size: u64, n: u64) -> bool {
    clique_size >= t_max(n).t_max_strict
}
