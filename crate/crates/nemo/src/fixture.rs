//! [`Connector`] over an in-memory [`Corpus`].
//!
//! A [`FixtureIndex`] is built once per corpus and shared read-only; each
//! [`FixtureSession`] carries its own simulated clock and rate limiter, so
//! independent sessions never influence each other's timing.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Mutex;

use nemo_core::connector::{
    CALL_LATENCY_MS, HOP_LATENCY_MS, MAX_REDIRECTS, NETWORK_PAGE_SIZE, PAGE_SCAN_LATENCY_MS,
};
use nemo_core::error::{Error, Result};
use nemo_core::similarity::{name_match, Raster};
use nemo_core::text::{location_matches, searchable_text, tokenize};
use nemo_core::{
    normalize_username, Connector, EntityClass, Identity, IdentityRef, NetworkKind,
    NetworkRelation, Post, RateLimitPolicy, RateLimiter, ResolvedTarget, SimClock,
};
use url::Url;

use crate::corpus::{Corpus, EdgeKind, PageRecord};

/// Parsed form of a URL used for matching: lowercase host without `www.`,
/// path without trailing slash, and the query string.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UrlKey {
    pub host: String,
    pub path: String,
    pub query: Option<String>,
}

impl UrlKey {
    /// Accepts scheme-less URLs (`target.net/alice`).
    pub fn parse(raw: &str) -> Option<Self> {
        let raw = raw.trim();
        let parsed = Url::parse(raw)
            .ok()
            .filter(|u| u.has_host())
            .or_else(|| Url::parse(&format!("http://{raw}")).ok())?;
        let host = parsed.host_str()?.to_ascii_lowercase();
        let host = host.strip_prefix("www.").unwrap_or(&host).to_owned();
        let path = parsed.path().trim_end_matches('/').to_owned();
        Some(Self {
            host,
            path,
            query: parsed.query().map(str::to_owned),
        })
    }

    fn first_segment(&self) -> Option<&str> {
        self.path.split('/').find(|s| !s.is_empty())
    }
}

/// Target-network account a URL denotes: `https://<host>/<username>[/...]`
/// or `https://<host>/profile.php?id=<user_id>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProfileRef {
    Username(String),
    UserId(String),
}

pub fn profile_ref(key: &UrlKey, target_host: &str) -> Option<ProfileRef> {
    if key.host != target_host {
        return None;
    }
    if key.path == "/profile.php" {
        let q = key.query.as_deref()?;
        return url::form_urlencoded::parse(q.as_bytes())
            .find(|(k, _)| k == "id")
            .map(|(_, v)| ProfileRef::UserId(v.into_owned()));
    }
    key.first_segment().map(|s| ProfileRef::Username(normalize_username(s)))
}

/// Read-only lookup structures over a corpus.
pub struct FixtureIndex {
    corpus: Corpus,
    target_host: String,
    by_ref: HashMap<IdentityRef, usize>,
    target_by_username: HashMap<String, usize>,
    /// Lowercase name token -> target identities, corpus order.
    target_name_tokens: HashMap<String, Vec<usize>>,
    /// Whole lowercase name -> target identities, corpus order.
    target_full_names: HashMap<String, Vec<usize>>,
    /// Posts per author, newest first.
    posts_by_author: HashMap<IdentityRef, Vec<usize>>,
    /// Searchable text of every target post.
    target_post_text: Vec<(usize, String)>,
    /// Token -> positions in `target_post_text`.
    target_post_tokens: HashMap<String, Vec<usize>>,
    followers: HashMap<String, BTreeSet<String>>,
    followees: HashMap<String, BTreeSet<String>>,
    friends: HashMap<String, BTreeSet<String>>,
    pages: HashMap<UrlKey, usize>,
}

fn name_key(name: &str) -> String {
    name.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

impl FixtureIndex {
    pub fn new(corpus: Corpus) -> Self {
        let target_host = corpus.target.host();
        let mut by_ref = HashMap::new();
        let mut target_by_username = HashMap::new();
        let mut target_name_tokens: HashMap<String, Vec<usize>> = HashMap::new();
        let mut target_full_names: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, ident) in corpus.identities.iter().enumerate() {
            by_ref.insert(ident.id(), i);
            if ident.network != corpus.target {
                continue;
            }
            target_by_username.entry(ident.normalized_username()).or_insert(i);
            let tokens: BTreeSet<String> = ident
                .display_name
                .split_whitespace()
                .map(str::to_lowercase)
                .collect();
            for t in tokens {
                target_name_tokens.entry(t).or_default().push(i);
            }
            target_full_names.entry(name_key(&ident.display_name)).or_default().push(i);
        }

        let mut posts_by_author: HashMap<IdentityRef, Vec<usize>> = HashMap::new();
        let mut target_post_text = Vec::new();
        let mut target_post_tokens: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, p) in corpus.posts.iter().enumerate() {
            posts_by_author.entry(p.author.clone()).or_default().push(i);
            if p.author.network == corpus.target {
                let text = searchable_text(&p.text);
                let slot = target_post_text.len();
                let tokens: BTreeSet<String> = tokenize(&text).into_iter().collect();
                for t in tokens {
                    target_post_tokens.entry(t).or_default().push(slot);
                }
                target_post_text.push((i, text));
            }
        }
        for list in posts_by_author.values_mut() {
            list.sort_by(|&a, &b| {
                corpus.posts[b]
                    .timestamp
                    .cmp(&corpus.posts[a].timestamp)
                    .then(a.cmp(&b))
            });
        }

        let mut followers: HashMap<String, BTreeSet<String>> = HashMap::new();
        let mut followees: HashMap<String, BTreeSet<String>> = HashMap::new();
        let mut friends: HashMap<String, BTreeSet<String>> = HashMap::new();
        for e in &corpus.edges {
            match e.kind {
                EdgeKind::Follow if e.network == corpus.source.as_str() => {
                    followers.entry(e.to.clone()).or_default().insert(e.from.clone());
                    followees.entry(e.from.clone()).or_default().insert(e.to.clone());
                }
                EdgeKind::Friend if e.network == corpus.target.as_str() => {
                    friends.entry(e.from.clone()).or_default().insert(e.to.clone());
                    friends.entry(e.to.clone()).or_default().insert(e.from.clone());
                }
                _ => log::debug!("ignoring {:?} edge on {}", e.kind, e.network),
            }
        }

        let mut pages = HashMap::new();
        for (i, p) in corpus.pages.iter().enumerate() {
            if let Some(k) = UrlKey::parse(&p.url) {
                pages.entry(k).or_insert(i);
            }
        }

        Self {
            corpus,
            target_host,
            by_ref,
            target_by_username,
            target_name_tokens,
            target_full_names,
            posts_by_author,
            target_post_text,
            target_post_tokens,
            followers,
            followees,
            friends,
            pages,
        }
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn identity(&self, id: &IdentityRef) -> Option<&Identity> {
        self.by_ref.get(id).map(|&i| &self.corpus.identities[i])
    }

    /// A fresh session with its own clock and limiter.
    pub fn session(&self, policy: RateLimitPolicy) -> FixtureSession<'_> {
        let clock = SimClock::new();
        FixtureSession {
            index: self,
            state: Mutex::new(SessionState {
                clock,
                limiter: RateLimiter::new(policy, &clock),
                requests: 0,
            }),
        }
    }

    fn get(&self, id: &IdentityRef) -> Result<&Identity> {
        self.identity(id).ok_or_else(|| Error::NotFound(id.clone()))
    }

    fn target_profile(&self, key: &UrlKey) -> Option<Option<Identity>> {
        let found = match profile_ref(key, &self.target_host)? {
            ProfileRef::Username(u) => self.target_by_username.get(&u).map(|&i| &self.corpus.identities[i]),
            ProfileRef::UserId(id) => self.identity(&self.corpus.target_ref(&id)),
        };
        Some(found.cloned())
    }

    fn page(&self, key: &UrlKey) -> Option<&PageRecord> {
        self.pages.get(key).map(|&i| &self.corpus.pages[i])
    }

    fn members(&self, user_id: &str, relation: NetworkRelation) -> (Vec<Identity>, u64) {
        let empty = BTreeSet::new();
        let ers = self.followers.get(user_id).unwrap_or(&empty);
        let ees = self.followees.get(user_id).unwrap_or(&empty);
        let pages = |n: usize| n.div_ceil(NETWORK_PAGE_SIZE).max(1) as u64;
        let (ids, cost): (Vec<&String>, u64) = match relation {
            NetworkRelation::Follower => (ers.iter().collect(), pages(ers.len())),
            NetworkRelation::Followee => (ees.iter().collect(), pages(ees.len())),
            NetworkRelation::Friend => (
                ers.intersection(ees).collect(),
                pages(ers.len()) + pages(ees.len()),
            ),
        };
        let members = ids
            .into_iter()
            .filter_map(|u| self.identity(&self.corpus.source_ref(u)).cloned())
            .collect();
        (members, cost)
    }
}

struct SessionState {
    clock: SimClock,
    limiter: RateLimiter,
    requests: u64,
}

/// One client of the fixture network: every call is metered against the
/// session's limiter and advances its simulated clock.
pub struct FixtureSession<'a> {
    index: &'a FixtureIndex,
    state: Mutex<SessionState>,
}

impl FixtureSession<'_> {
    fn charge(&self, n: u64, latency_ms: u64) {
        let mut s = self.state.lock().expect("session lock");
        let SessionState { clock, limiter, requests } = &mut *s;
        for _ in 0..n {
            limiter.acquire(clock);
            clock.advance(latency_ms);
            *requests += 1;
        }
    }

    /// Rate-limit sleeps so far.
    pub fn sleeps(&self) -> u64 {
        self.state.lock().expect("session lock").limiter.sleeps()
    }

    fn fail(url: &str, reason: &str) -> Error {
        Error::ResolutionFailed {
            url: url.into(),
            reason: reason.into(),
        }
    }
}

impl Connector for FixtureSession<'_> {
    fn source_network(&self) -> &NetworkKind {
        &self.index.corpus.source
    }

    fn target_network(&self) -> &NetworkKind {
        &self.index.corpus.target
    }

    fn lookup_identity(&self, id: &IdentityRef) -> Result<Identity> {
        self.charge(1, CALL_LATENCY_MS);
        self.index.get(id).cloned()
    }

    fn search_by_name_location(&self, name: &str, location: Option<&str>, cap: usize) -> Result<Vec<Identity>> {
        self.charge(1, CALL_LATENCY_MS);
        let ix = self.index;
        let mut hits: BTreeSet<usize> = BTreeSet::new();
        if let Some(v) = ix.target_full_names.get(&name_key(name)) {
            hits.extend(v);
        }
        for tok in name.split_whitespace().map(str::to_lowercase) {
            if tok.chars().count() >= nemo_core::similarity::MIN_NAME_TOKEN {
                if let Some(v) = ix.target_name_tokens.get(&tok) {
                    hits.extend(v);
                }
            }
        }
        Ok(hits
            .into_iter()
            .map(|i| &ix.corpus.identities[i])
            .filter(|c| c.searchable && name_match(name, &c.display_name))
            .filter(|c| match location {
                None => true,
                Some(q) => c.location.as_deref().is_some_and(|l| location_matches(q, l)),
            })
            .take(cap)
            .cloned()
            .collect())
    }

    fn search_by_username(&self, username: &str) -> Result<Option<Identity>> {
        self.charge(1, CALL_LATENCY_MS);
        let ix = self.index;
        Ok(ix
            .target_by_username
            .get(&normalize_username(username))
            .map(|&i| &ix.corpus.identities[i])
            .filter(|c| c.searchable)
            .cloned())
    }

    fn search_posts_by_text(&self, text: &str, cap: usize) -> Result<Vec<(Identity, Post)>> {
        self.charge(1, CALL_LATENCY_MS);
        let ix = self.index;
        let query = searchable_text(text);
        if query.is_empty() {
            return Ok(Vec::new());
        }
        // tokens strictly inside the query are whole tokens in any match
        let tokens = tokenize(&query);
        let inner = if tokens.len() > 2 { &tokens[1..tokens.len() - 1] } else { &[][..] };
        let slots: Box<dyn Iterator<Item = usize>> = match inner
            .iter()
            .map(|t| ix.target_post_tokens.get(t).map_or(&[][..], Vec::as_slice))
            .min_by_key(|v| v.len())
        {
            Some(v) => Box::new(v.iter().copied()),
            None => Box::new(0..ix.target_post_text.len()),
        };
        let mut out = Vec::new();
        for slot in slots {
            let (pi, stext) = &ix.target_post_text[slot];
            if !stext.contains(&query) {
                continue;
            }
            let post = &ix.corpus.posts[*pi];
            let Some(author) = ix.identity(&post.author) else { continue };
            if !author.posts_public {
                continue;
            }
            out.push((author.clone(), post.clone()));
            if out.len() >= cap {
                break;
            }
        }
        Ok(out)
    }

    fn fetch_recent_posts(&self, id: &IdentityRef, n: usize) -> Result<Vec<Post>> {
        self.charge(1, CALL_LATENCY_MS);
        let ix = self.index;
        ix.get(id)?;
        Ok(ix
            .posts_by_author
            .get(id)
            .map(|v| v.iter().take(n).map(|&i| ix.corpus.posts[i].clone()).collect())
            .unwrap_or_default())
    }

    fn fetch_network(&self, id: &IdentityRef, relation: NetworkRelation) -> Result<Vec<Identity>> {
        let ix = self.index;
        if id.network != ix.corpus.source {
            return Err(Error::InvalidInput(format!("{id} is not on the source network")));
        }
        ix.get(id)?;
        let (members, cost) = ix.members(&id.user_id, relation);
        self.charge(cost, CALL_LATENCY_MS);
        Ok(members)
    }

    fn fetch_friend_list(&self, id: &IdentityRef) -> Result<Option<Vec<Identity>>> {
        self.charge(1, CALL_LATENCY_MS);
        let ix = self.index;
        let me = ix.get(id)?;
        if !me.friendlist_public || me.entity_class != EntityClass::Person {
            return Ok(None);
        }
        Ok(Some(
            ix.friends
                .get(&id.user_id)
                .into_iter()
                .flatten()
                .filter_map(|f| ix.identity(&ix.corpus.target_ref(f)).cloned())
                .collect(),
        ))
    }

    fn resolve_url(&self, url: &str) -> Result<ResolvedTarget> {
        let ix = self.index;
        let mut key = UrlKey::parse(url).ok_or_else(|| Self::fail(url, "not a URL"))?;
        let mut current = url.trim().to_owned();
        let mut seen = HashSet::new();
        loop {
            if let Some(hit) = ix.target_profile(&key) {
                self.charge(1, CALL_LATENCY_MS);
                return Ok(ResolvedTarget {
                    final_url: current,
                    final_host: key.host,
                    target_identity: hit,
                    via_page_scan: false,
                });
            }
            let page = ix.page(&key).ok_or_else(|| Self::fail(url, "unknown page"))?;
            if let Some(next) = &page.redirects_to {
                self.charge(1, HOP_LATENCY_MS);
                if !seen.insert(key.clone()) {
                    return Err(Self::fail(url, "redirect loop"));
                }
                if seen.len() > MAX_REDIRECTS {
                    return Err(Self::fail(url, "too many redirects"));
                }
                key = UrlKey::parse(next).ok_or_else(|| Self::fail(url, "bad redirect"))?;
                current = next.clone();
                continue;
            }
            self.charge(1, PAGE_SCAN_LATENCY_MS);
            let found = page
                .links
                .iter()
                .filter_map(|l| UrlKey::parse(l))
                .find_map(|k| ix.target_profile(&k).flatten());
            return Ok(ResolvedTarget {
                final_url: current,
                final_host: key.host,
                via_page_scan: found.is_some(),
                target_identity: found,
            });
        }
    }

    fn fetch_image(&self, identity: &Identity) -> Option<Raster> {
        self.index
            .corpus
            .images
            .get(identity.profile_image.as_ref()?)
            .cloned()
    }

    fn now_ms(&self) -> u64 {
        self.state.lock().expect("session lock").clock.now_ms()
    }

    fn requests(&self) -> u64 {
        self.state.lock().expect("session lock").requests
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::EdgeRecord;

    fn person(net: &NetworkKind, id: &str, username: &str, name: &str, loc: Option<&str>) -> Identity {
        Identity {
            network: net.clone(),
            user_id: id.into(),
            username: username.into(),
            display_name: name.into(),
            location: loc.map(Into::into),
            profile_image: None,
            url_field: None,
            searchable: true,
            posts_public: true,
            friendlist_public: true,
            entity_class: EntityClass::Person,
        }
    }

    fn corpus() -> Corpus {
        let mut c = Corpus::empty(NetworkKind::new("source").unwrap(), NetworkKind::new("target").unwrap());
        let (s, t) = (c.source.clone(), c.target.clone());
        c.identities.push(person(&s, "s1", "Alice_W", "Alice Wong", Some("Lakewood")));
        for id in ["a", "b", "c", "d"] {
            c.identities.push(person(&s, id, id, id, None));
        }
        c.identities.push(person(&t, "t1", "alice_w", "Alice Wong", Some("Lakewood, WA")));
        c.identities.push(person(&t, "t2", "alicewong", "Alice Wong", Some("Riverton")));
        let mut hidden = person(&t, "t3", "hidden", "Alice Hidden", Some("Lakewood"));
        hidden.searchable = false;
        hidden.posts_public = false;
        c.identities.push(hidden);
        let mut page = person(&t, "p1", "brand", "Smithsonian Institute", None);
        page.entity_class = EntityClass::Page;
        page.friendlist_public = false;
        c.identities.push(page);
        for i in 0..75 {
            c.identities.push(person(&t, &format!("n{i:02}"), &format!("n{i:02}"), "Bob Stone", None));
        }
        for (from, to) in [("a", "s1"), ("b", "s1"), ("c", "s1"), ("s1", "b"), ("s1", "c"), ("s1", "d")] {
            c.edges.push(EdgeRecord { network: "source".into(), from: from.into(), to: to.into(), kind: EdgeKind::Follow });
        }
        c.edges.push(EdgeRecord { network: "target".into(), from: "t1".into(), to: "t2".into(), kind: EdgeKind::Friend });
        for (author, text, ts) in [
            ("t1", "Be yourself; everyone else is already taken", 3),
            ("t3", "Be yourself; everyone else is already taken", 4),
            ("t2", "be YOURSELF; everyone else is already taken!!", 5),
        ] {
            c.posts.push(Post::new(c.target_ref(author), text, ts, None));
        }
        for ts in 0..250 {
            c.posts.push(Post::new(c.source_ref("s1"), format!("post number {ts}"), ts, None));
        }
        c.pages.push(PageRecord { url: "https://blog.example/alice".into(), redirects_to: None, links: vec!["https://example.org".into(), "https://www.target.net/alice_w/".into()] });
        c.pages.push(PageRecord { url: "http://short.ly/a".into(), redirects_to: Some("http://short.ly/b".into()), links: vec![] });
        c.pages.push(PageRecord { url: "http://short.ly/b".into(), redirects_to: Some("http://short.ly/a".into()), links: vec![] });
        c.pages.push(PageRecord { url: "http://short.ly/ok".into(), redirects_to: Some("https://target.net/profile.php?id=t2".into()), links: vec![] });
        c.pages.push(PageRecord { url: "https://instagram.com/p/x".into(), redirects_to: None, links: vec![] });
        c
    }

    fn ids(v: &[Identity]) -> Vec<&str> {
        v.iter().map(|i| i.user_id.as_str()).collect()
    }

    #[test]
    fn url_keys() {
        let k = UrlKey::parse("target.net/alice/").unwrap();
        assert_eq!((k.host.as_str(), k.path.as_str()), ("target.net", "/alice"));
        let k = UrlKey::parse("HTTPS://WWW.Target.net/profile.php?id=42").unwrap();
        assert_eq!(profile_ref(&k, "target.net"), Some(ProfileRef::UserId("42".into())));
        assert_eq!(profile_ref(&UrlKey::parse("https://target.net/Bob/photos/1").unwrap(), "target.net"), Some(ProfileRef::Username("bob".into())));
        assert_eq!(profile_ref(&UrlKey::parse("https://target.net/").unwrap(), "target.net"), None);
        assert_eq!(profile_ref(&UrlKey::parse("https://other.net/bob").unwrap(), "target.net"), None);
    }

    #[test]
    fn searches() {
        let ix = FixtureIndex::new(corpus());
        let s = ix.session(RateLimitPolicy::default());
        assert_eq!(ids(&s.search_by_name_location("Alice Wong", Some("Lakewood"), 60).unwrap()), ["t1"]);
        assert_eq!(ids(&s.search_by_name_location("Alice Wong", None, 60).unwrap()), ["t1", "t2"]);
        assert!(s.search_by_name_location("Nobody Here", None, 60).unwrap().is_empty());
        assert_eq!(s.search_by_name_location("Bob Stone", None, 60).unwrap().len(), 60);
        assert!(s.search_by_name_location("John Smith", None, 60).unwrap().is_empty());
        assert_eq!(s.search_by_username("@ALICE_W").unwrap().unwrap().user_id, "t1");
        assert!(s.search_by_username("hidden").unwrap().is_none());
        assert!(s.search_by_username("zzz").unwrap().is_none());
        let hits = s.search_posts_by_text("Be yourself; everyone else is already taken", 100).unwrap();
        assert_eq!(ids(&hits.into_iter().map(|(a, _)| a).collect::<Vec<_>>()), ["t1", "t2"]);
        assert_eq!(s.search_posts_by_text("self; everyone else is alr", 1).unwrap().len(), 1);
        assert_eq!(s.requests(), 10);
        assert_eq!(s.now_ms(), 10 * CALL_LATENCY_MS);
    }

    #[test]
    fn posts_and_networks() {
        let ix = FixtureIndex::new(corpus());
        let s = ix.session(RateLimitPolicy::default());
        let me = ix.corpus().source_ref("s1");
        let posts = s.fetch_recent_posts(&me, 100).unwrap();
        assert_eq!(posts.len(), 100);
        assert_eq!(posts[0].timestamp, 249);
        assert!(posts.windows(2).all(|w| w[0].timestamp > w[1].timestamp));
        assert_eq!(ids(&s.fetch_network(&me, NetworkRelation::Follower).unwrap()), ["a", "b", "c"]);
        assert_eq!(ids(&s.fetch_network(&me, NetworkRelation::Followee).unwrap()), ["b", "c", "d"]);
        assert_eq!(ids(&s.fetch_network(&me, NetworkRelation::Friend).unwrap()), ["b", "c"]);
        // 1 posts + 1 + 1 + 2 network pages
        assert_eq!(s.requests(), 5);
        assert!(matches!(s.fetch_recent_posts(&ix.corpus().source_ref("zz"), 5), Err(Error::NotFound(_))));
    }

    #[test]
    fn friend_lists() {
        let ix = FixtureIndex::new(corpus());
        let s = ix.session(RateLimitPolicy::default());
        let c = ix.corpus();
        assert_eq!(ids(&s.fetch_friend_list(&c.target_ref("t1")).unwrap().unwrap()), ["t2"]);
        assert_eq!(ids(&s.fetch_friend_list(&c.target_ref("t2")).unwrap().unwrap()), ["t1"]);
        assert!(s.fetch_friend_list(&c.target_ref("p1")).unwrap().is_none());
        assert!(s.fetch_friend_list(&c.target_ref("nope")).is_err());
    }

    #[test]
    fn resolution() {
        let ix = FixtureIndex::new(corpus());
        let s = ix.session(RateLimitPolicy::default());
        let r = s.resolve_url("target.net/alice_w").unwrap();
        assert_eq!(r.target_identity.unwrap().user_id, "t1");
        assert!(!r.via_page_scan);
        assert_eq!((s.requests(), s.now_ms()), (1, 200));

        let r = s.resolve_url("https://blog.example/alice").unwrap();
        assert_eq!(r.target_identity.unwrap().user_id, "t1");
        assert!(r.via_page_scan);
        assert_eq!(r.final_host, "blog.example");
        assert_eq!((s.requests(), s.now_ms()), (2, 2200));

        let r = s.resolve_url("http://short.ly/ok").unwrap();
        assert_eq!(r.target_identity.unwrap().user_id, "t2");
        assert_eq!(r.final_host, "target.net");
        assert_eq!((s.requests(), s.now_ms()), (4, 3400));

        assert!(matches!(s.resolve_url("http://short.ly/a"), Err(Error::ResolutionFailed { .. })));
        assert!(matches!(s.resolve_url("https://unknown.example/x"), Err(Error::ResolutionFailed { .. })));
        let r = s.resolve_url("https://instagram.com/p/x").unwrap();
        assert!(r.target_identity.is_none());
        assert_eq!(r.final_host, "instagram.com");
    }

    #[test]
    fn sessions_are_independent() {
        let ix = FixtureIndex::new(corpus());
        let a = ix.session(RateLimitPolicy::default());
        a.lookup_identity(&ix.corpus().source_ref("s1")).unwrap();
        let b = ix.session(RateLimitPolicy::default());
        assert_eq!((b.requests(), b.now_ms()), (0, 0));
    }

    #[test]
    fn limiter_applies_to_every_call() {
        let ix = FixtureIndex::new(corpus());
        let s = ix.session(RateLimitPolicy::new(3, 60_000).unwrap());
        for _ in 0..3 {
            s.search_by_username("alice_w").unwrap();
        }
        assert_eq!(s.sleeps(), 0);
        s.search_by_username("alice_w").unwrap();
        assert_eq!(s.sleeps(), 1);
        assert_eq!(s.now_ms(), 60_000 + CALL_LATENCY_MS);
    }
}
