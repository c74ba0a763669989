//! The four identity-search algorithms. Each maps a known source-network
//! identity to an [`AlgorithmOutcome`] against a [`Connector`].

mod content;
mod network;
mod profile;
mod self_mention;

#[cfg(test)]
pub(crate) mod testkit;

pub use content::ContentSearch;
pub use network::NetworkSearch;
pub use profile::{ProfileSearch, SelfIdentification, SubMethodHits};
pub use self_mention::SelfMentionSearch;

use crate::connector::Connector;
use crate::error::Result;
use crate::model::{Algorithm, AlgorithmOutcome, IdentityRef};

/// The four algorithms with their settings.
#[derive(Debug, Clone, Default)]
pub struct SearchSuite {
    pub profile: ProfileSearch,
    pub self_mention: SelfMentionSearch,
    pub content: ContentSearch,
    pub network: NetworkSearch,
}

impl SearchSuite {
    pub fn run<C: Connector + ?Sized>(
        &self,
        algorithm: Algorithm,
        connector: &C,
        nemo: &IdentityRef,
    ) -> Result<AlgorithmOutcome> {
        match algorithm {
            Algorithm::Profile => self.profile.search(connector, nemo),
            Algorithm::SelfMention => self.self_mention.search(connector, nemo),
            Algorithm::Content => self.content.search(connector, nemo),
            Algorithm::Network => self.network.search(connector, nemo),
        }
    }
}
