//! In-process append-only ledger standing in for the blockchain messaging
//! hub, and a simulated commit round for experiments.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::id::{ParticipantId, ParticipantList};
use crate::seed::KeyedStream;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerRecord {
    pub seq: u64,
    pub participant_id: ParticipantId,
    pub payload: Vec<u8>,
    /// Set when the participant had already committed earlier. Superseded
    /// records stay on the ledger but never feed the seed.
    pub superseded: bool,
}

/// First commit per participant, in ledger order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CommitSequence {
    pub ids: Vec<ParticipantId>,
}

impl CommitSequence {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Latest commit first, the traversal order used for seeding.
    pub fn anti_chronological(&self) -> Vec<ParticipantId> {
        self.ids.iter().rev().cloned().collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Window {
    Open,
    Closed,
}

#[derive(Clone, Debug)]
pub struct Ledger {
    roster: ParticipantList,
    records: Vec<LedgerRecord>,
    committed: BTreeSet<ParticipantId>,
    window: Window,
}

impl Ledger {
    /// A ledger for one commit phase; the window starts open.
    pub fn new(roster: ParticipantList) -> Self {
        Self {
            roster,
            records: Vec::new(),
            committed: BTreeSet::new(),
            window: Window::Open,
        }
    }

    pub fn roster(&self) -> &ParticipantList {
        &self.roster
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn open_window(&mut self) {
        self.window = Window::Open;
    }

    pub fn close_window(&mut self) {
        self.window = Window::Closed;
    }

    pub fn records(&self) -> &[LedgerRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn append_commit(&mut self, participant_id: ParticipantId, payload: Vec<u8>) -> Result<&LedgerRecord> {
        if self.window == Window::Closed {
            return Err(Error::RejectedCommit("commit window is closed".into()));
        }
        let seq = self.records.last().map_or(0, |r| r.seq + 1);
        self.push(seq, participant_id, payload)
    }

    /// Re-inserts a record read back from storage. Sequence numbers must keep
    /// strictly increasing; the window state is not checked.
    pub fn replay_record(
        &mut self,
        seq: u64,
        participant_id: ParticipantId,
        payload: Vec<u8>,
    ) -> Result<&LedgerRecord> {
        if let Some(last) = self.records.last() {
            if seq <= last.seq {
                return Err(Error::InvalidInput(format!(
                    "sequence number {seq} does not follow {}",
                    last.seq
                )));
            }
        }
        self.push(seq, participant_id, payload)
    }

    fn push(&mut self, seq: u64, id: ParticipantId, payload: Vec<u8>) -> Result<&LedgerRecord> {
        if !self.roster.contains(&id) {
            return Err(Error::RejectedCommit(format!("{id} is not a registered participant")));
        }
        let superseded = !self.committed.insert(id.clone());
        self.records.push(LedgerRecord {
            seq,
            participant_id: id,
            payload,
            superseded,
        });
        Ok(self.records.last().expect("just pushed"))
    }

    /// First-commit projection in chronological order.
    pub fn effective_commit_sequence(&self) -> CommitSequence {
        CommitSequence {
            ids: self
                .records
                .iter()
                .filter(|r| !r.superseded)
                .map(|r| r.participant_id.clone())
                .collect(),
        }
    }

    /// Commit sequence over the expanded roster when each participant may
    /// commit up to `per_participant` times. Each payload carries its slot as
    /// an ASCII decimal in `1..=per_participant`; the first record per
    /// (participant, slot) counts.
    pub fn effective_expanded_sequence(&self, per_participant: u32) -> Result<CommitSequence> {
        let mut seen = BTreeSet::new();
        let mut ids = Vec::new();
        for r in &self.records {
            let slot = core::str::from_utf8(&r.payload)
                .ok()
                .and_then(|s| s.trim().parse::<u32>().ok())
                .filter(|s| (1..=per_participant).contains(s))
                .ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "record {} does not carry a slot in 1..={per_participant}",
                        r.seq
                    ))
                })?;
            let expanded = crate::seed::expanded_id(&r.participant_id, slot);
            if seen.insert(expanded.clone()) {
                ids.push(expanded);
            }
        }
        Ok(CommitSequence { ids })
    }
}

/// Simulated commit round: each participant commits independently with
/// `commit_probability`, then the committers are ordered by a shuffle. A pure
/// function of its inputs.
pub fn simulate_commit_round(
    participants: &ParticipantList,
    commit_probability: f64,
    run_seed: u64,
) -> Result<CommitSequence> {
    if !(0.0..=1.0).contains(&commit_probability) {
        return Err(Error::InvalidInput(format!(
            "commit probability {commit_probability} outside [0, 1]"
        )));
    }
    let mut stream = KeyedStream::from_seed_bytes(&run_seed.to_be_bytes());
    let mut ids: Vec<ParticipantId> = participants
        .iter()
        .filter(|_| stream.next_unit() < commit_probability)
        .cloned()
        .collect();
    stream.shuffle(&mut ids);
    Ok(CommitSequence { ids })
}
