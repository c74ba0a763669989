//! Read-only view of the two social networks, as the algorithms see it.
//!
//! Every method is one API call (or a documented number of calls) against a
//! shared request budget. Implementations own the simulated clock and rate
//! limiter and expose them through [`Connector::now_ms`] and
//! [`Connector::requests`], which the algorithms sample to report cost.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Result;
use crate::model::{Identity, IdentityRef, NetworkKind, Post};
use crate::similarity::Raster;

/// Simulated latency of a profile lookup or search call.
pub const CALL_LATENCY_MS: u64 = 200;
/// Simulated latency of following one redirect.
pub const HOP_LATENCY_MS: u64 = 1_000;
/// Simulated latency of fetching and scanning a landing page.
pub const PAGE_SCAN_LATENCY_MS: u64 = 2_000;
/// Members returned per network page; one request per page.
pub const NETWORK_PAGE_SIZE: usize = 100;
/// Redirect hops followed before giving up.
pub const MAX_REDIRECTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NetworkRelation {
    /// Accounts following the user.
    Follower,
    /// Accounts the user follows.
    Followee,
    /// Both at once.
    Friend,
}

impl NetworkRelation {
    pub const ALL: [NetworkRelation; 3] = [
        NetworkRelation::Follower,
        NetworkRelation::Followee,
        NetworkRelation::Friend,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NetworkRelation::Follower => "follower",
            NetworkRelation::Followee => "followee",
            NetworkRelation::Friend => "friend",
        }
    }
}

/// Where a URL ends up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedTarget {
    /// URL after following redirects.
    pub final_url: String,
    /// Lowercased host of `final_url`, without a leading `www.`.
    pub final_host: String,
    /// Target-network account the URL denotes, if any.
    pub target_identity: Option<Identity>,
    /// The account was found among the landing page's links rather than
    /// being the final URL itself.
    pub via_page_scan: bool,
}

pub trait Connector {
    fn source_network(&self) -> &NetworkKind;
    fn target_network(&self) -> &NetworkKind;

    /// Full profile record. 1 request.
    fn lookup_identity(&self, id: &IdentityRef) -> Result<Identity>;

    /// Searchable target accounts carrying `name` (see
    /// [`name_match`](crate::similarity::name_match)) and, when given, the
    /// location. At most `cap`, deterministic order. 1 request.
    fn search_by_name_location(
        &self,
        name: &str,
        location: Option<&str>,
        cap: usize,
    ) -> Result<Vec<Identity>>;

    /// Searchable target account with exactly this normalized username.
    /// 1 request.
    fn search_by_username(&self, username: &str) -> Result<Option<Identity>>;

    /// Public target posts containing `text`, case-insensitively, with their
    /// authors. At most `cap`. 1 request.
    fn search_posts_by_text(&self, text: &str, cap: usize) -> Result<Vec<(Identity, Post)>>;

    /// Newest-first posts of `id`, at most `n`. 1 request.
    fn fetch_recent_posts(&self, id: &IdentityRef, n: usize) -> Result<Vec<Post>>;

    /// Members of a source account's network. One request per
    /// [`NETWORK_PAGE_SIZE`] members fetched.
    fn fetch_network(&self, id: &IdentityRef, relation: NetworkRelation) -> Result<Vec<Identity>>;

    /// Friend list of a target account, `None` when not public. 1 request.
    fn fetch_friend_list(&self, id: &IdentityRef) -> Result<Option<Vec<Identity>>>;

    /// Follows redirects and identifies a target-network account behind a
    /// URL. Cost depends on the path taken.
    fn resolve_url(&self, url: &str) -> Result<ResolvedTarget>;

    /// Decoded profile picture. Free.
    fn fetch_image(&self, identity: &Identity) -> Option<Raster>;

    /// Simulated time, milliseconds.
    fn now_ms(&self) -> u64;

    /// Requests issued so far.
    fn requests(&self) -> u64;
}

impl<C: Connector + ?Sized> Connector for &C {
    fn source_network(&self) -> &NetworkKind {
        (**self).source_network()
    }
    fn target_network(&self) -> &NetworkKind {
        (**self).target_network()
    }
    fn lookup_identity(&self, id: &IdentityRef) -> Result<Identity> {
        (**self).lookup_identity(id)
    }
    fn search_by_name_location(
        &self,
        name: &str,
        location: Option<&str>,
        cap: usize,
    ) -> Result<Vec<Identity>> {
        (**self).search_by_name_location(name, location, cap)
    }
    fn search_by_username(&self, username: &str) -> Result<Option<Identity>> {
        (**self).search_by_username(username)
    }
    fn search_posts_by_text(&self, text: &str, cap: usize) -> Result<Vec<(Identity, Post)>> {
        (**self).search_posts_by_text(text, cap)
    }
    fn fetch_recent_posts(&self, id: &IdentityRef, n: usize) -> Result<Vec<Post>> {
        (**self).fetch_recent_posts(id, n)
    }
    fn fetch_network(&self, id: &IdentityRef, relation: NetworkRelation) -> Result<Vec<Identity>> {
        (**self).fetch_network(id, relation)
    }
    fn fetch_friend_list(&self, id: &IdentityRef) -> Result<Option<Vec<Identity>>> {
        (**self).fetch_friend_list(id)
    }
    fn resolve_url(&self, url: &str) -> Result<ResolvedTarget> {
        (**self).resolve_url(url)
    }
    fn fetch_image(&self, identity: &Identity) -> Option<Raster> {
        (**self).fetch_image(identity)
    }
    fn now_ms(&self) -> u64 {
        (**self).now_ms()
    }
    fn requests(&self) -> u64 {
        (**self).requests()
    }
}

/// Requests and simulated time spent between construction and
/// [`Meter::stop`].
#[derive(Debug, Clone, Copy)]
pub struct Meter {
    requests: u64,
    now_ms: u64,
}

impl Meter {
    pub fn start<C: Connector + ?Sized>(c: &C) -> Self {
        Self {
            requests: c.requests(),
            now_ms: c.now_ms(),
        }
    }

    /// `(requests, elapsed_ms)` since start.
    pub fn stop<C: Connector + ?Sized>(&self, c: &C) -> (u64, u64) {
        (
            c.requests().saturating_sub(self.requests),
            c.now_ms().saturating_sub(self.now_ms),
        )
    }
}
