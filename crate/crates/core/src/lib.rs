//! Cross-network identity search.
//!
//! Given one known identity of a user on a *source* social network, the
//! algorithms in this crate look for the same user's identity on a *target*
//! network using three identity dimensions:
//!
//! * profile attributes ([`search::ProfileSearch`]),
//! * content, both cross-posted text ([`search::ContentSearch`]) and URLs
//!   pointing back at the user's own target account
//!   ([`search::SelfMentionSearch`]),
//! * the social graph ([`search::NetworkSearch`]).
//!
//! [`orchestrator::find_nemo`] chains the four with early exit, and
//! [`evaluation`] aggregates accuracy, candidate-set size and search time over
//! labelled query sets.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches a
//! network, a file or a thread goes through the [`connector::Connector`]
//! trait, implemented elsewhere.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod clock;
pub mod connector;
pub mod error;
pub mod evaluation;
pub mod model;
pub mod orchestrator;
pub mod search;
pub mod similarity;
pub mod text;

pub use clock::{RateLimitPolicy, RateLimiter, SimClock};
pub use connector::{Connector, NetworkRelation, ResolvedTarget};
pub use error::Error;
pub use model::{
    dedupe_candidates, normalize_username, Algorithm, AlgorithmOutcome, Candidate, ConfirmRule,
    Confirmation, EntityClass, Identity, IdentityRef, ImageKey, NetworkKind, Post,
    ProfileSubMethod, SearchResult,
};
pub use orchestrator::{find_nemo, OrchestrationPolicy};
pub use search::SearchSuite;
