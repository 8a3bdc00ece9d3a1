//! Verifiable random worker selection.
//!
//! The seed is the arrangement number of the anti-chronological commit
//! sequence with respect to the roster. The generator is keyed with
//! `SHA-256(minimal big-endian bytes of the seed)` (zero encodes as the empty
//! string) and runs ChaCha20 with a zero nonce from block 0. Each `u64` draw
//! is the next 8 keystream bytes read little-endian. Bounded integers use
//! rejection sampling and selection is a partial Fisher-Yates shuffle of the
//! roster in canonical order, keeping the first `n` slots.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::Zero;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use sha2::{Digest, Sha256};

use crate::combinatorics::{arrangement_number, output_space_size, NumberingSpace};
use crate::dispersion::WorkerQuota;
use crate::error::{invalid, Result};
use crate::id::{ParticipantId, ParticipantList};
use crate::ledger::CommitSequence;

/// Seed spaces below this size trigger a low-entropy warning.
pub const LOW_ENTROPY_SPACE: u128 = 1 << 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seed {
    pub value: BigUint,
    /// Size of the arrangement output space the value was drawn from.
    pub space: BigUint,
}

impl Seed {
    /// Builds a seed with an explicit space; `value` must lie below `space`.
    pub fn new(value: BigUint, space: BigUint) -> Result<Self> {
        if value >= space {
            return invalid("seed value must be smaller than its space");
        }
        Ok(Self { value, space })
    }

    /// A bare integer seed, e.g. a per-run experiment seed. Its space is
    /// `2^64`.
    pub fn from_u64(value: u64) -> Self {
        Self {
            value: BigUint::from(value),
            space: BigUint::from(1u128 << 64),
        }
    }

    pub fn is_low_entropy(&self) -> bool {
        self.space < BigUint::from(LOW_ENTROPY_SPACE)
    }

    /// Minimal big-endian encoding of the value; empty for zero.
    pub fn key_material(&self) -> Vec<u8> {
        if self.value.is_zero() {
            Vec::new()
        } else {
            self.value.to_bytes_be()
        }
    }
}

/// Derives the seed from a first-commit sequence. Any party holding the
/// ledger and the roster obtains the same value.
pub fn derive_seed(commits: &CommitSequence, participants: &ParticipantList) -> Result<Seed> {
    let latest_first = commits.anti_chronological();
    let value = arrangement_number(&latest_first, participants.as_slice())?;
    let space = output_space_size(NumberingSpace::Arrangement { p: participants.len() });
    Ok(Seed { value, space })
}

/// Deterministic keystream used for every random draw in the crate.
pub struct KeyedStream {
    rng: ChaCha20Rng,
}

impl KeyedStream {
    /// Keys the stream with `SHA-256(bytes)`.
    pub fn from_seed_bytes(bytes: &[u8]) -> Self {
        let key: [u8; 32] = Sha256::digest(bytes).into();
        Self {
            rng: ChaCha20Rng::from_seed(key),
        }
    }

    pub fn for_seed(seed: &Seed) -> Self {
        Self::from_seed_bytes(&seed.key_material())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform integer in `0..bound` by rejection; `bound` must be non-zero.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        // Draws below 2^64 mod bound would over-represent small residues.
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return x % bound;
            }
        }
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// First `n` slots of a partial Fisher-Yates shuffle of `0..len`, in
    /// draw order.
    pub fn sample_indices(&mut self, len: usize, n: usize) -> Vec<usize> {
        let mut slots: Vec<usize> = (0..len).collect();
        for i in 0..n.min(len) {
            let j = i + self.next_below((len - i) as u64) as usize;
            slots.swap(i, j);
        }
        slots.truncate(n);
        slots
    }
}

/// Roster positions of `n` workers drawn with `seed`, sorted ascending.
pub fn sample_indices(len: usize, n: usize, seed: &Seed) -> Result<Vec<usize>> {
    if n > len {
        return invalid(alloc::format!("cannot sample {n} workers from {len} participants"));
    }
    let mut picked = KeyedStream::for_seed(seed).sample_indices(len, n);
    picked.sort_unstable();
    Ok(picked)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionMethod {
    Random,
    GraphAware,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Seed(Seed),
    Quotas(WorkerQuota),
}

/// Selected workers, sorted ascending, with how they were chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkerSet<Id> {
    pub workers: Vec<Id>,
    pub method: SelectionMethod,
    pub provenance: Provenance,
}

impl<Id> WorkerSet<Id> {
    pub fn len(&self) -> usize {
        self.workers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.workers.is_empty()
    }
}

/// Samples `n` workers from the roster with the seeded generator.
pub fn sample_workers(participants: &ParticipantList, n: usize, seed: &Seed) -> Result<WorkerSet<ParticipantId>> {
    let picked = sample_indices(participants.len(), n, seed)?;
    Ok(WorkerSet {
        workers: picked.into_iter().map(|i| participants.as_slice()[i].clone()).collect(),
        method: SelectionMethod::Random,
        provenance: Provenance::Seed(seed.clone()),
    })
}

/// Identity of commit slot `slot` (1-based) of `id` in an expanded roster:
/// the original bytes followed by the slot as a 4-byte big-endian integer.
pub fn expanded_id(id: &ParticipantId, slot: u32) -> ParticipantId {
    let mut bytes = id.as_bytes().to_vec();
    bytes.extend_from_slice(&slot.to_be_bytes());
    ParticipantId::new(bytes)
}

/// Roster of artificial participants when everyone may commit
/// `commits_per_participant` times. The result has `c * |participants|`
/// entries and is sorted.
pub fn expand_multi_commit(participants: &ParticipantList, commits_per_participant: u32) -> Result<ParticipantList> {
    if commits_per_participant == 0 {
        return invalid("at least one commit per participant is required");
    }
    let ids = participants
        .iter()
        .flat_map(|id| (1..=commits_per_participant).map(move |s| expanded_id(id, s)))
        .collect();
    // Fixed-width suffixes keep the encoding injective.
    Ok(ParticipantList::canonicalize(ids))
}
