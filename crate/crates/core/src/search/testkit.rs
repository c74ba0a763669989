//! Tiny in-memory connector for unit tests. Mirrors the cost model of the
//! fixture connector closely enough for request-count assertions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::clock::{RateLimitPolicy, RateLimiter, SimClock};
use crate::connector::*;
use crate::error::{Error, Result};
use crate::model::*;
use crate::similarity::{name_match, Raster};
use crate::text::{location_matches, post_matches_query};

pub struct Page {
    redirect: Option<String>,
    links: Vec<String>,
}

struct Meterbox {
    clock: SimClock,
    limiter: RateLimiter,
    requests: u64,
    calls: BTreeMap<&'static str, u64>,
}

pub struct World {
    source: NetworkKind,
    target: NetworkKind,
    identities: BTreeMap<IdentityRef, Identity>,
    posts: Vec<Post>,
    follows: BTreeSet<(String, String)>,
    friends: BTreeSet<(String, String)>,
    pages: BTreeMap<String, Page>,
    images: BTreeMap<ImageKey, Raster>,
    meter: RefCell<Meterbox>,
}

impl World {
    pub fn new() -> Self {
        Self::with_policy(RateLimitPolicy::default())
    }

    pub fn with_policy(policy: RateLimitPolicy) -> Self {
        let clock = SimClock::new();
        Self {
            source: NetworkKind::new("source").unwrap(),
            target: NetworkKind::new("target").unwrap(),
            identities: BTreeMap::new(),
            posts: Vec::new(),
            follows: BTreeSet::new(),
            friends: BTreeSet::new(),
            pages: BTreeMap::new(),
            images: BTreeMap::new(),
            meter: RefCell::new(Meterbox {
                clock,
                limiter: RateLimiter::new(policy, &clock),
                requests: 0,
                calls: BTreeMap::new(),
            }),
        }
    }

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

    pub fn source_person(&self, id: &str, username: &str, name: &str, loc: Option<&str>) -> Identity {
        Self::person(&self.source, id, username, name, loc)
    }

    pub fn target_person(&self, id: &str, username: &str, name: &str, loc: Option<&str>) -> Identity {
        Self::person(&self.target, id, username, name, loc)
    }

    pub fn add_source(&mut self, i: Identity) {
        self.identities.insert(i.id(), i);
    }

    pub fn add_target(&mut self, i: Identity) {
        self.identities.insert(i.id(), i);
    }

    pub fn add_image(&mut self, r: Raster) -> ImageKey {
        let key = ImageKey(format!("img{}", self.images.len()));
        self.images.insert(key.clone(), r);
        key
    }

    pub fn add_page(&mut self, url: &str, redirect: Option<&str>, links: &[&str]) {
        self.pages.insert(
            url.into(),
            Page {
                redirect: redirect.map(Into::into),
                links: links.iter().map(|s| s.to_string()).collect(),
            },
        );
    }

    pub fn add_post(&mut self, author: IdentityRef, text: &str, ts: u64) {
        self.posts.push(Post::new(author, text, ts, None));
    }

    /// `from` follows `to` on the source network.
    pub fn follow(&mut self, from: &str, to: &str) {
        self.follows.insert((from.into(), to.into()));
    }

    /// Mutual friendship on the target network.
    pub fn befriend(&mut self, a: &str, b: &str) {
        self.friends.insert((a.into(), b.into()));
        self.friends.insert((b.into(), a.into()));
    }

    pub fn sref(&self, id: &str) -> IdentityRef {
        IdentityRef::new(self.source.clone(), id)
    }

    pub fn tref(&self, id: &str) -> IdentityRef {
        IdentityRef::new(self.target.clone(), id)
    }

    pub fn calls(&self, kind: &str) -> u64 {
        self.meter.borrow().calls.get(kind).copied().unwrap_or(0)
    }

    pub fn sleeps(&self) -> u64 {
        self.meter.borrow().limiter.sleeps()
    }

    fn charge(&self, kind: &'static str, n: u64, latency_ms: u64) {
        let mut m = self.meter.borrow_mut();
        let Meterbox {
            clock,
            limiter,
            requests,
            calls,
        } = &mut *m;
        for _ in 0..n {
            limiter.acquire(clock);
            clock.advance(latency_ms);
            *requests += 1;
        }
        *calls.entry(kind).or_insert(0) += n;
    }

    fn get(&self, id: &IdentityRef) -> Result<&Identity> {
        self.identities.get(id).ok_or_else(|| Error::NotFound(id.clone()))
    }

    fn targets(&self) -> impl Iterator<Item = &Identity> {
        self.identities.values().filter(move |i| i.network == self.target)
    }

    fn target_profile(&self, url: &str) -> Option<Option<Identity>> {
        let rest = url.split("://").nth(1).unwrap_or(url);
        let (host, path) = rest.split_once('/').unwrap_or((rest, ""));
        let host = host.trim_start_matches("www.");
        if host != self.target.host() {
            return None;
        }
        let name = path.split('/').next().unwrap_or("");
        Some(
            self.targets()
                .find(|i| i.normalized_username() == normalize_username(name))
                .cloned(),
        )
    }

    fn members(&self, id: &str, relation: NetworkRelation) -> Vec<Identity> {
        let followers: BTreeSet<&str> = self
            .follows
            .iter()
            .filter(|(_, to)| to == id)
            .map(|(f, _)| f.as_str())
            .collect();
        let followees: BTreeSet<&str> = self
            .follows
            .iter()
            .filter(|(f, _)| f == id)
            .map(|(_, t)| t.as_str())
            .collect();
        let ids: Vec<&str> = match relation {
            NetworkRelation::Follower => followers.into_iter().collect(),
            NetworkRelation::Followee => followees.into_iter().collect(),
            NetworkRelation::Friend => followers.intersection(&followees).copied().collect(),
        };
        ids.into_iter()
            .filter_map(|u| self.identities.get(&self.sref(u)).cloned())
            .collect()
    }
}

impl Connector for World {
    fn source_network(&self) -> &NetworkKind {
        &self.source
    }

    fn target_network(&self) -> &NetworkKind {
        &self.target
    }

    fn lookup_identity(&self, id: &IdentityRef) -> Result<Identity> {
        self.charge("lookup", 1, CALL_LATENCY_MS);
        self.get(id).cloned()
    }

    fn search_by_name_location(&self, name: &str, location: Option<&str>, cap: usize) -> Result<Vec<Identity>> {
        self.charge("search", 1, CALL_LATENCY_MS);
        Ok(self
            .targets()
            .filter(|i| i.searchable && name_match(name, &i.display_name))
            .filter(|i| match location {
                None => true,
                Some(q) => i.location.as_deref().is_some_and(|l| location_matches(q, l)),
            })
            .take(cap)
            .cloned()
            .collect())
    }

    fn search_by_username(&self, username: &str) -> Result<Option<Identity>> {
        self.charge("search", 1, CALL_LATENCY_MS);
        let u = normalize_username(username);
        Ok(self
            .targets()
            .find(|i| i.searchable && i.normalized_username() == u)
            .cloned())
    }

    fn search_posts_by_text(&self, text: &str, cap: usize) -> Result<Vec<(Identity, Post)>> {
        self.charge("search", 1, CALL_LATENCY_MS);
        Ok(self
            .posts
            .iter()
            .filter(|p| p.author.network == self.target && post_matches_query(&p.text, text))
            .filter_map(|p| {
                let a = self.identities.get(&p.author)?;
                a.posts_public.then(|| (a.clone(), p.clone()))
            })
            .take(cap)
            .collect())
    }

    fn fetch_recent_posts(&self, id: &IdentityRef, n: usize) -> Result<Vec<Post>> {
        self.charge("posts", 1, CALL_LATENCY_MS);
        self.get(id)?;
        let mut ps: Vec<Post> = self.posts.iter().filter(|p| &p.author == id).cloned().collect();
        ps.sort_by(|a, b| b.timestamp.cmp(&a.timestamp));
        ps.truncate(n);
        Ok(ps)
    }

    fn fetch_network(&self, id: &IdentityRef, relation: NetworkRelation) -> Result<Vec<Identity>> {
        self.get(id)?;
        let m = self.members(&id.user_id, relation);
        let pages = m.len().div_ceil(NETWORK_PAGE_SIZE).max(1) as u64;
        self.charge("network", pages, CALL_LATENCY_MS);
        Ok(m)
    }

    fn fetch_friend_list(&self, id: &IdentityRef) -> Result<Option<Vec<Identity>>> {
        self.charge("friends", 1, CALL_LATENCY_MS);
        let me = self.get(id)?;
        if !me.friendlist_public || !me.is_person() {
            return Ok(None);
        }
        Ok(Some(
            self.friends
                .iter()
                .filter(|(a, _)| a == &id.user_id)
                .filter_map(|(_, b)| self.identities.get(&self.tref(b)).cloned())
                .collect(),
        ))
    }

    fn resolve_url(&self, url: &str) -> Result<ResolvedTarget> {
        let mut current = String::from(url);
        let mut seen = BTreeSet::new();
        loop {
            if let Some(hit) = self.target_profile(&current) {
                self.charge("resolve", 1, CALL_LATENCY_MS);
                return Ok(ResolvedTarget {
                    final_host: self.target.host(),
                    final_url: current,
                    target_identity: hit,
                    via_page_scan: false,
                });
            }
            let fail = |reason: &str| Error::ResolutionFailed {
                url: url.into(),
                reason: reason.into(),
            };
            let page = self.pages.get(&current).ok_or_else(|| fail("unknown page"))?;
            if let Some(next) = &page.redirect {
                self.charge("resolve", 1, HOP_LATENCY_MS);
                if !seen.insert(current.clone()) || seen.len() > MAX_REDIRECTS {
                    return Err(fail("redirect loop"));
                }
                current = next.clone();
                continue;
            }
            self.charge("resolve", 1, PAGE_SCAN_LATENCY_MS);
            let found = page
                .links
                .iter()
                .find_map(|l| self.target_profile(l).flatten());
            return Ok(ResolvedTarget {
                final_host: current.split("://").nth(1).unwrap_or("").split('/').next().unwrap_or("").into(),
                via_page_scan: found.is_some(),
                target_identity: found,
                final_url: current,
            });
        }
    }

    fn fetch_image(&self, identity: &Identity) -> Option<Raster> {
        self.images.get(identity.profile_image.as_ref()?).cloned()
    }

    fn now_ms(&self) -> u64 {
        self.meter.borrow().clock.now_ms()
    }

    fn requests(&self) -> u64 {
        self.meter.borrow().requests
    }
}
