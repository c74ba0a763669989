//! Domain types shared by the algorithms, the connector layer and the
//! evaluator. All of them are plain values: build once, share freely.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};
use crate::text::extract_urls;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Role label of a social network ("source", "target", ...).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(transparent))]
pub struct NetworkKind(String);

impl NetworkKind {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(Error::Model("network name must not be empty".into()));
        }
        Ok(Self(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Host name the network's profile URLs live under.
    pub fn host(&self) -> String {
        format!("{}.net", self.0)
    }

    /// Canonical profile URL of `username` on this network.
    pub fn profile_url(&self, username: &str) -> String {
        format!("https://{}/{}", self.host(), username)
    }
}

impl fmt::Display for NetworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Reference to one account: ids are only unique within their network.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct IdentityRef {
    pub network: NetworkKind,
    pub user_id: String,
}

impl IdentityRef {
    pub fn new(network: NetworkKind, user_id: impl Into<String>) -> Self {
        Self {
            network,
            user_id: user_id.into(),
        }
    }
}

impl fmt::Display for IdentityRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.network, self.user_id)
    }
}

/// Key into the corpus image store (content hash of the raster).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(transparent))]
pub struct ImageKey(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "lowercase"))]
pub enum EntityClass {
    Person,
    Page,
    Community,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Identity {
    pub network: NetworkKind,
    pub user_id: String,
    /// Stored raw; compare through [`Identity::normalized_username`].
    pub username: String,
    pub display_name: String,
    pub location: Option<String>,
    pub profile_image: Option<ImageKey>,
    pub url_field: Option<String>,
    pub searchable: bool,
    pub posts_public: bool,
    pub friendlist_public: bool,
    pub entity_class: EntityClass,
}

impl Identity {
    pub fn id(&self) -> IdentityRef {
        IdentityRef::new(self.network.clone(), self.user_id.clone())
    }

    pub fn normalized_username(&self) -> String {
        normalize_username(&self.username)
    }

    pub fn is_person(&self) -> bool {
        self.entity_class == EntityClass::Person
    }

    /// Checks the per-record invariants. Uniqueness of `user_id` is a
    /// property of the whole network and is checked by the corpus loader.
    pub fn validate(&self) -> Result<()> {
        if self.user_id.is_empty() {
            return Err(Error::Model("empty user_id".into()));
        }
        if self.is_person() && normalize_username(&self.username).is_empty() {
            return Err(Error::Model(format!(
                "person {} has an empty username",
                self.id()
            )));
        }
        if !self.is_person() && self.friendlist_public {
            return Err(Error::Model(format!(
                "{} is a page/community and cannot expose a friend list",
                self.id()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Post {
    pub author: IdentityRef,
    pub text: String,
    pub timestamp: u64,
    /// Always the URL tokens of `text`; see [`Post::new`].
    pub urls: Vec<String>,
    /// Posting application. Kept for completeness, no algorithm reads it.
    pub source_app: Option<String>,
}

impl Post {
    pub fn new(
        author: IdentityRef,
        text: impl Into<String>,
        timestamp: u64,
        source_app: Option<String>,
    ) -> Self {
        let text = text.into();
        let urls = extract_urls(&text);
        Self {
            author,
            text,
            timestamp,
            urls,
            source_app,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "kebab-case"))]
pub enum Algorithm {
    Profile,
    SelfMention,
    Content,
    Network,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Profile,
        Algorithm::SelfMention,
        Algorithm::Content,
        Algorithm::Network,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Profile => "profile",
            Algorithm::SelfMention => "self-mention",
            Algorithm::Content => "content",
            Algorithm::Network => "network",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "profile" | "p" => Some(Algorithm::Profile),
            "self-mention" | "self_mention" | "selfmention" | "sm" => Some(Algorithm::SelfMention),
            "content" | "c" => Some(Algorithm::Content),
            "network" | "n" => Some(Algorithm::Network),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which part of profile search surfaced a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum ProfileSubMethod {
    /// Self-identification through the profile URL field.
    #[cfg_attr(feature = "serde", serde(rename = "URL"))]
    Url,
    /// Same (normalized) username.
    #[cfg_attr(feature = "serde", serde(rename = "SU"))]
    SameUsername,
    /// Name + location search.
    #[cfg_attr(feature = "serde", serde(rename = "NL"))]
    NameLocation,
}

impl ProfileSubMethod {
    pub const ALL: [ProfileSubMethod; 3] = [
        ProfileSubMethod::Url,
        ProfileSubMethod::SameUsername,
        ProfileSubMethod::NameLocation,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ProfileSubMethod::Url => "URL",
            ProfileSubMethod::SameUsername => "SU",
            ProfileSubMethod::NameLocation => "NL",
        }
    }
}

impl fmt::Display for ProfileSubMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Candidate {
    pub identity: IdentityRef,
    pub username: String,
    pub display_name: String,
    pub scores: BTreeMap<Algorithm, f64>,
    pub provenance: BTreeSet<Algorithm>,
    pub sub_methods: BTreeSet<ProfileSubMethod>,
    pub rank: Option<u32>,
    pub mention_count: u32,
}

impl Candidate {
    pub fn new(identity: &Identity, algorithm: Algorithm) -> Self {
        let mut provenance = BTreeSet::new();
        provenance.insert(algorithm);
        Self {
            identity: identity.id(),
            username: identity.username.clone(),
            display_name: identity.display_name.clone(),
            scores: BTreeMap::new(),
            provenance,
            sub_methods: BTreeSet::new(),
            rank: None,
            mention_count: 0,
        }
    }

    /// Records `score` for `algorithm`, clamped into `[0, 1]`.
    pub fn set_score(&mut self, algorithm: Algorithm, score: f64) {
        let score = if score.is_nan() { 0.0 } else { score.clamp(0.0, 1.0) };
        self.provenance.insert(algorithm);
        self.scores.insert(algorithm, score);
    }

    pub fn score(&self, algorithm: Algorithm) -> Option<f64> {
        self.scores.get(&algorithm).copied()
    }

    /// Folds `other` (same identity) into `self`.
    fn absorb(&mut self, other: Candidate) {
        debug_assert_eq!(self.identity, other.identity);
        self.provenance.extend(other.provenance);
        self.sub_methods.extend(other.sub_methods);
        for (alg, s) in other.scores {
            let slot = self.scores.entry(alg).or_insert(s);
            if s > *slot {
                *slot = s;
            }
        }
        self.mention_count += other.mention_count;
    }
}

/// Why an identity was declared the queried user's.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(tag = "rule", rename_all = "kebab-case"))]
pub enum ConfirmRule {
    /// The profile URL field names the target account, directly or through a
    /// linked page.
    SelfIdentification { via_page: bool },
    /// Top-ranked mention is also the most frequently mentioned one.
    SelfMention { mentions: u32 },
    /// Listed by at least two self-identified members of the user's network.
    NetworkTally { tally: u32 },
    /// Surfaced independently by two or more algorithms.
    MultiAlgorithm { algorithms: BTreeSet<Algorithm> },
}

impl fmt::Display for ConfirmRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfirmRule::SelfIdentification { via_page: false } => {
                f.write_str("self-identification (direct URL)")
            }
            ConfirmRule::SelfIdentification { via_page: true } => {
                f.write_str("self-identification (URL via linked page)")
            }
            ConfirmRule::SelfMention { mentions } => {
                write!(f, "self-mention (top-ranked and most referred, {mentions} posts)")
            }
            ConfirmRule::NetworkTally { tally } => {
                write!(f, "network (listed by {tally} mapped network members)")
            }
            ConfirmRule::MultiAlgorithm { algorithms } => {
                f.write_str("found by more than one algorithm (")?;
                for (i, a) in algorithms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(a.name())?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Confirmation {
    pub identity: IdentityRef,
    pub rule: ConfirmRule,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct AlgorithmOutcome {
    pub algorithm: Algorithm,
    /// Ranked candidates (rank 1 first).
    pub candidates: Vec<Candidate>,
    /// Candidate order before ranking, i.e. as the target network returned
    /// them. Used for ranked vs. non-ranked comparisons.
    pub unranked: Vec<IdentityRef>,
    pub confirmed: Option<Confirmation>,
    pub requests_used: u64,
    /// Simulated milliseconds.
    pub elapsed_ms: u64,
    /// Set when the algorithm failed and the outcome was degraded to empty.
    pub error: Option<String>,
}

impl AlgorithmOutcome {
    pub fn empty(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            candidates: Vec::new(),
            unranked: Vec::new(),
            confirmed: None,
            requests_used: 0,
            elapsed_ms: 0,
            error: None,
        }
    }

    pub fn elapsed_secs(&self) -> f64 {
        self.elapsed_ms as f64 / 1000.0
    }

    pub fn contains(&self, id: &IdentityRef) -> bool {
        self.candidates.iter().any(|c| &c.identity == id)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct StageConfirmation {
    pub stage: Algorithm,
    pub confirmation: Confirmation,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SearchResult {
    pub query: IdentityRef,
    /// Algorithms in the order they ran.
    pub stages: Vec<Algorithm>,
    pub outcomes: BTreeMap<Algorithm, AlgorithmOutcome>,
    pub merged_candidates: Vec<Candidate>,
    pub confirmed: Option<StageConfirmation>,
    pub total_elapsed_ms: u64,
    pub total_requests: u64,
}

impl SearchResult {
    pub fn confirmed_identity(&self) -> Option<&IdentityRef> {
        self.confirmed.as_ref().map(|c| &c.confirmation.identity)
    }

    pub fn contains(&self, id: &IdentityRef) -> bool {
        self.merged_candidates.iter().any(|c| &c.identity == id)
    }
}

/// Lowercases, trims and drops a leading `@`.
pub fn normalize_username(raw: &str) -> String {
    let trimmed = raw.trim();
    let trimmed = trimmed.strip_prefix('@').unwrap_or(trimmed).trim();
    trimmed.to_lowercase()
}

/// One candidate per identity, first-seen order, everything else merged.
pub fn dedupe_candidates(cands: Vec<Candidate>) -> Vec<Candidate> {
    let mut index: BTreeMap<IdentityRef, usize> = BTreeMap::new();
    let mut out: Vec<Candidate> = Vec::with_capacity(cands.len());
    for c in cands {
        match index.get(&c.identity) {
            Some(&i) => out[i].absorb(c),
            None => {
                index.insert(c.identity.clone(), out.len());
                out.push(c);
            }
        }
    }
    for c in &mut out {
        c.rank = None;
    }
    out
}

/// Orders candidates by `algorithm`'s score, descending, ties by ascending
/// `user_id`. Candidates with no score for `algorithm` go last, in the order
/// they came in.
pub fn rank_by_score(cands: &mut Vec<Candidate>, algorithm: Algorithm) {
    let (mut scored, unscored): (Vec<_>, Vec<_>) =
        cands.drain(..).partition(|c| c.score(algorithm).is_some());
    scored.sort_by(|a, b| compare_scored(a, b, algorithm));
    cands.extend(scored);
    cands.extend(unscored);
    assign_ranks(cands);
}

fn compare_scored(a: &Candidate, b: &Candidate, algorithm: Algorithm) -> Ordering {
    let sa = a.score(algorithm).unwrap_or(0.0);
    let sb = b.score(algorithm).unwrap_or(0.0);
    sb.total_cmp(&sa)
        .then_with(|| a.identity.user_id.cmp(&b.identity.user_id))
        .then_with(|| a.identity.network.cmp(&b.identity.network))
}

/// Numbers the list 1..=n in its current order.
pub fn assign_ranks(cands: &mut [Candidate]) {
    for (i, c) in cands.iter_mut().enumerate() {
        c.rank = Some(i as u32 + 1);
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (@{}, \"{}\")", self.identity, self.username, self.display_name)
    }
}

impl EntityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            EntityClass::Person => "person",
            EntityClass::Page => "page",
            EntityClass::Community => "community",
        }
    }
}
