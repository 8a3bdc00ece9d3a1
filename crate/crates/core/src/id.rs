//! Participant identities and the canonical roster.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{invalid, Result};

/// Opaque participant identity, compared bytewise.
///
/// In practice this is a public key or a printable handle.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParticipantId(Vec<u8>);

impl ParticipantId {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Self {
        Self(bytes.into())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }
}

impl From<&str> for ParticipantId {
    fn from(s: &str) -> Self {
        Self(s.as_bytes().to_vec())
    }
}

impl From<&[u8]> for ParticipantId {
    fn from(b: &[u8]) -> Self {
        Self(b.to_vec())
    }
}

impl fmt::Debug for ParticipantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match core::str::from_utf8(&self.0) {
            Ok(s) => write!(f, "{s:?}"),
            Err(_) => {
                for b in &self.0 {
                    write!(f, "{b:02x}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for ParticipantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match core::str::from_utf8(&self.0) {
            Ok(s) => f.write_str(s),
            Err(_) => {
                for b in &self.0 {
                    write!(f, "{b:02x}")?;
                }
                Ok(())
            }
        }
    }
}

/// Roster of participants in strictly ascending bytewise order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParticipantList {
    ids: Vec<ParticipantId>,
}

impl ParticipantList {
    /// Wraps an already sorted roster. Fails if the ids are not strictly
    /// ascending.
    pub fn from_sorted(ids: Vec<ParticipantId>) -> Result<Self> {
        if let Some(w) = ids.windows(2).find(|w| w[0] >= w[1]) {
            return invalid(alloc::format!(
                "roster is not strictly ascending at {} / {}",
                w[0],
                w[1]
            ));
        }
        Ok(Self { ids })
    }

    /// Sorts and deduplicates an arbitrary collection of ids.
    pub fn canonicalize(mut ids: Vec<ParticipantId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Self { ids }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn as_slice(&self) -> &[ParticipantId] {
        &self.ids
    }

    pub fn iter(&self) -> core::slice::Iter<'_, ParticipantId> {
        self.ids.iter()
    }

    /// Position of `id` in the roster.
    pub fn index_of(&self, id: &ParticipantId) -> Option<usize> {
        self.ids.binary_search(id).ok()
    }

    pub fn contains(&self, id: &ParticipantId) -> bool {
        self.index_of(id).is_some()
    }
}

impl<'a> IntoIterator for &'a ParticipantList {
    type Item = &'a ParticipantId;
    type IntoIter = core::slice::Iter<'a, ParticipantId>;

    fn into_iter(self) -> Self::IntoIter {
        self.ids.iter()
    }
}
