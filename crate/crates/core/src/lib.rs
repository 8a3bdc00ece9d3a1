//! Collusion-resistant worker set selection.
//!
//! Two selection routes are provided: a verifiable random route that derives
//! a seed from the order in which participants commit to a ledger, and a
//! graph-aware route that spreads workers across the communities of a social
//! graph. The [`analysis`] module measures how well either route resists
//! collusion.
//!
//! The crate is `no_std` and only needs an allocator. File formats, the
//! command line and the experiment harness live in the `workerset` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod combinatorics;
pub mod community;
pub mod dispersion;
mod error;
pub mod graph;
pub mod id;
pub mod ledger;
pub mod seed;

pub use error::{Error, Result};
pub use id::{ParticipantId, ParticipantList};
