//! Re-derives the leak labels of every ground-truth pair straight from the
//! corpus records, without going through the connector or the algorithms.
//! A label holds exactly when the corresponding channel exposes the true
//! target account.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use nemo_core::evaluation::networks_of;
use nemo_core::similarity::{jaro, name_match};
use nemo_core::text::{location_matches, post_query, searchable_text};
use nemo_core::{normalize_username, EntityClass, Identity, Post};

use crate::corpus::{Corpus, EdgeKind, PageRecord};
use crate::fixture::{profile_ref, ProfileRef, UrlKey};
use crate::generate::labels::*;
use crate::generate::{NAME_LOCATION_CAP, SIMILAR_JARO};

const RECENT_POSTS: usize = 100;
const MAX_HOPS: usize = 5;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub pairs: usize,
    pub label_counts: BTreeMap<String, u64>,
    pub domain_counts: BTreeMap<String, u64>,
    pub mismatches: Vec<String>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn summary(&self) -> String {
        let mut s = format!("{} mismatches", self.mismatches.len());
        for m in self.mismatches.iter().take(5) {
            s.push_str("; ");
            s.push_str(m);
        }
        s
    }
}

struct View<'a> {
    c: &'a Corpus,
    source: HashMap<&'a str, &'a Identity>,
    target: HashMap<&'a str, &'a Identity>,
    target_by_name: HashMap<String, &'a Identity>,
    posts: HashMap<(&'a str, &'a str), Vec<&'a Post>>,
    follows: HashMap<&'a str, BTreeSet<&'a str>>,
    friends: HashMap<&'a str, BTreeSet<&'a str>>,
    pages: HashMap<UrlKey, &'a PageRecord>,
}

/// Where a URL lands: final host and the target account it denotes.
struct Landing<'a> {
    host: String,
    account: Option<&'a Identity>,
    via_page: bool,
}

impl<'a> View<'a> {
    fn new(c: &'a Corpus) -> Self {
        let mut source = HashMap::new();
        let mut target = HashMap::new();
        let mut target_by_name = HashMap::new();
        for i in &c.identities {
            if i.network == c.source {
                source.insert(i.user_id.as_str(), i);
            } else if i.network == c.target {
                target.insert(i.user_id.as_str(), i);
                target_by_name.entry(normalize_username(&i.username)).or_insert(i);
            }
        }
        let mut posts: HashMap<(&str, &str), Vec<&Post>> = HashMap::new();
        for p in &c.posts {
            posts
                .entry((p.author.network.as_str(), p.author.user_id.as_str()))
                .or_default()
                .push(p);
        }
        for v in posts.values_mut() {
            v.sort_by(|a, b| b.timestamp.cmp(&a.timestamp));
        }
        let mut follows: HashMap<&str, BTreeSet<&str>> = HashMap::new();
        let mut friends: HashMap<&str, BTreeSet<&str>> = HashMap::new();
        for e in &c.edges {
            match e.kind {
                EdgeKind::Follow if e.network == c.source.as_str() => {
                    follows.entry(e.from.as_str()).or_default().insert(e.to.as_str());
                    follows.entry(e.to.as_str()).or_default().insert(e.from.as_str());
                }
                EdgeKind::Friend if e.network == c.target.as_str() => {
                    friends.entry(e.from.as_str()).or_default().insert(e.to.as_str());
                    friends.entry(e.to.as_str()).or_default().insert(e.from.as_str());
                }
                _ => {}
            }
        }
        let mut pages = HashMap::new();
        for p in &c.pages {
            if let Some(k) = UrlKey::parse(&p.url) {
                pages.entry(k).or_insert(p);
            }
        }
        Self {
            c,
            source,
            target,
            target_by_name,
            posts,
            follows,
            friends,
            pages,
        }
    }

    fn account(&self, key: &UrlKey) -> Option<Option<&'a Identity>> {
        Some(match profile_ref(key, &self.c.target.host())? {
            ProfileRef::Username(u) => self.target_by_name.get(&u).copied(),
            ProfileRef::UserId(id) => self.target.get(id.as_str()).copied(),
        })
    }

    fn land(&self, url: &str) -> Option<Landing<'a>> {
        let mut key = UrlKey::parse(url)?;
        for _ in 0..=MAX_HOPS {
            if let Some(account) = self.account(&key) {
                return Some(Landing { host: key.host, account, via_page: false });
            }
            let page = self.pages.get(&key)?;
            match &page.redirects_to {
                Some(next) => key = UrlKey::parse(next)?,
                None => {
                    let account = page
                        .links
                        .iter()
                        .filter_map(|l| UrlKey::parse(l))
                        .find_map(|k| self.account(&k).flatten());
                    return Some(Landing { host: key.host, account, via_page: account.is_some() });
                }
            }
        }
        None
    }

    fn recent(&self, who: &'a Identity) -> &[&'a Post] {
        let v = self.posts.get(&(who.network.as_str(), who.user_id.as_str()));
        let v = v.map_or(&[][..], Vec::as_slice);
        &v[..v.len().min(RECENT_POSTS)]
    }

    fn name_location_hits(&self, me: &Identity) -> Vec<&'a Identity> {
        self.c
            .identities
            .iter()
            .filter(|t| t.network == self.c.target && t.searchable)
            .filter(|t| name_match(&me.display_name, &t.display_name))
            .filter(|t| match &me.location {
                None => true,
                Some(q) => t.location.as_deref().is_some_and(|l| location_matches(q, l)),
            })
            .take(NAME_LOCATION_CAP)
            .collect()
    }

    fn labels(&self, me: &'a Identity, truth: &'a Identity) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut put = |l: &str| {
            out.insert(l.to_string());
        };
        let is_truth = |i: &Identity| i.user_id == truth.user_id;

        if let Some(landing) = me.url_field.as_deref().and_then(|u| self.land(u)) {
            if landing.account.is_some_and(is_truth) {
                put(if landing.via_page { URL_INDIRECT } else { URL_DIRECT });
            }
        }
        let (mine, theirs) = (normalize_username(&me.username), normalize_username(&truth.username));
        if mine == theirs && truth.searchable {
            put(SAME_USERNAME);
        }
        let j = jaro(&mine, &theirs);
        if mine != theirs && (SIMILAR_JARO.0..=SIMILAR_JARO.1).contains(&j) {
            put(SIMILAR_USERNAME);
        }
        if self.name_location_hits(me).into_iter().any(is_truth) {
            put(NAME_LOCATION);
        }
        if me.profile_image.is_some() && me.profile_image == truth.profile_image {
            put(IMAGE_REUSE);
        }

        let recent = self.recent(me);
        if truth.posts_public {
            let theirs: Vec<String> = self
                .posts
                .get(&(truth.network.as_str(), truth.user_id.as_str()))
                .into_iter()
                .flatten()
                .map(|p| searchable_text(&p.text))
                .collect();
            let shared = recent
                .iter()
                .filter_map(|p| post_query(&p.text))
                .any(|q| {
                    let q = searchable_text(&q);
                    theirs.iter().any(|t| t.contains(&q))
                });
            if shared {
                put(CROSS_POST);
            }
        }
        let mentioned = recent
            .iter()
            .flat_map(|p| p.urls.iter())
            .filter_map(|u| self.land(u))
            .any(|l| l.account.is_some_and(|a| is_truth(a) && a.entity_class == EntityClass::Person));
        if mentioned {
            put(SELF_MENTION);
        }
        if self.network_reaches(me, truth) {
            put(NETWORK);
        }
        out
    }

    /// Some member of `me`'s source network names, in its profile URL, a
    /// target person with a public friend list containing `truth`, and
    /// `truth` carries `me`'s name.
    fn network_reaches(&self, me: &Identity, truth: &Identity) -> bool {
        if !name_match(&me.display_name, &truth.display_name) {
            return false;
        }
        let members = self.follows.get(me.user_id.as_str()).into_iter().flatten();
        members
            .filter_map(|m| self.source.get(m))
            .filter_map(|m| self.land(m.url_field.as_deref()?))
            .filter_map(|l| l.account)
            .filter(|a| a.entity_class == EntityClass::Person && a.friendlist_public)
            .any(|a| {
                self.friends
                    .get(a.user_id.as_str())
                    .is_some_and(|f| f.contains(truth.user_id.as_str()))
            })
    }

    fn domains(&self, me: &'a Identity) -> BTreeSet<String> {
        let hosts: BTreeSet<String> = self
            .recent(me)
            .iter()
            .flat_map(|p| p.urls.iter())
            .filter_map(|u| self.land(u))
            .map(|l| l.host)
            .collect();
        networks_of(&hosts, None)
    }
}

pub fn audit(c: &Corpus) -> AuditReport {
    let v = View::new(c);
    let mut r = AuditReport {
        pairs: c.groundtruth.len(),
        ..Default::default()
    };
    for g in &c.groundtruth {
        let (Some(me), Some(truth)) = (v.source.get(g.source_id.as_str()), v.target.get(g.target_id.as_str())) else {
            r.mismatches.push(format!("pair {} -> {} references a missing identity", g.source_id, g.target_id));
            continue;
        };
        let derived = v.labels(me, truth);
        for l in &derived {
            *r.label_counts.entry(l.clone()).or_insert(0) += 1;
        }
        if derived != g.leak_labels {
            r.mismatches.push(format!(
                "pair {} -> {}: planted {:?}, derived {:?}",
                g.source_id, g.target_id, g.leak_labels, derived
            ));
        }
        for d in v.domains(me) {
            *r.domain_counts.entry(d).or_insert(0) += 1;
        }
    }
    for (key, &planted) in &c.planted {
        if let Some(name) = key.strip_prefix("domain:") {
            let got = r.domain_counts.get(name).copied().unwrap_or(0);
            if got != planted {
                r.mismatches.push(format!("domain {name}: planted {planted}, derived {got}"));
            }
        }
    }
    r
}
