//! Synthetic two-network corpora with ground-truth pairs and controlled
//! identity leaks.
//!
//! Every pair of identities (one source account, one target account owned by
//! the same synthetic user) gets a set of leak channels. Channels are either
//! drawn independently per pair from the configured probabilities, or
//! assigned as exact cohorts (see [`Cohorts`]). After building, the corpus
//! is audited and generation fails if any re-derived label disagrees with
//! the planted one.

pub mod pools;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use nemo_core::evaluation::KNOWN_NETWORKS;
use nemo_core::similarity::{jaro, name_match, Raster};
use nemo_core::{normalize_username, EntityClass, Identity, ImageKey, NetworkKind, Post};
use rand::seq::{index, IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::audit::{audit, AuditReport};
use crate::corpus::{Corpus, CorpusError, EdgeKind, EdgeRecord, GroundTruthRecord, PageRecord};
use pools::*;

/// Leak labels recorded per ground-truth pair.
pub mod labels {
    pub const URL_DIRECT: &str = "url_direct";
    pub const URL_INDIRECT: &str = "url_indirect";
    pub const SAME_USERNAME: &str = "same_username";
    pub const SIMILAR_USERNAME: &str = "similar_username";
    pub const NAME_LOCATION: &str = "name_location";
    pub const IMAGE_REUSE: &str = "image_reuse";
    pub const CROSS_POST: &str = "cross_post";
    pub const SELF_MENTION: &str = "self_mention";
    pub const NETWORK: &str = "network";

    pub const ALL: [&str; 9] = [
        URL_DIRECT,
        URL_INDIRECT,
        SAME_USERNAME,
        SIMILAR_USERNAME,
        NAME_LOCATION,
        IMAGE_REUSE,
        CROSS_POST,
        SELF_MENTION,
        NETWORK,
    ];
}

/// Name-location search cap the corpus is generated against.
pub const NAME_LOCATION_CAP: usize = 60;

/// Jaro range of "similar" usernames.
pub const SIMILAR_JARO: (f64, f64) = (0.75, 0.95);
/// Upper bound on the Jaro similarity of "unrelated" usernames.
pub const UNRELATED_JARO: f64 = 0.6;

#[derive(Debug, thiserror::Error)]
pub enum GenerateError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("generated corpus disagrees with its labels: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// Exact channel counts, overriding the per-pair draws for the profile,
/// self-mention, content and network channels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cohorts {
    /// Pairs found by exactly the profile sub-methods in bitmask `i`
    /// (URL = 1, SU = 2, NL = 4). Entry 0 is ignored; the remaining pairs
    /// get no profile leak.
    pub profile_regions: [usize; 8],
    /// Self-mention pairs inside / outside the profile-found set.
    pub self_mention: (usize, usize),
    pub content: (usize, usize),
    pub network: (usize, usize),
}

impl Cohorts {
    fn profile_total(&self) -> usize {
        self.profile_regions[1..].iter().sum()
    }
}

/// Users linking a known social network in their posts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSeed {
    pub network: String,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    pub n_users: usize,
    pub p_self_id_direct: f64,
    pub p_self_id_indirect: f64,
    pub p_same_username: f64,
    pub p_similar_username: f64,
    pub p_name_location_findable: f64,
    pub p_image_reuse: f64,
    pub p_cross_post: f64,
    pub p_self_mention: f64,
    pub p_network_leak: f64,
    pub p_friendlist_public: f64,
    pub p_posts_public: f64,
    pub p_searchable: f64,
    pub n_quote_sharers: usize,
    pub seed: u64,
    /// Share of name-noise decoys that copy a user's full name and city
    /// rather than one name token.
    #[serde(default)]
    pub p_namesake: f64,
    #[serde(default)]
    pub cohorts: Option<Cohorts>,
    #[serde(default)]
    pub domain_shares: Vec<DomainSeed>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// 543 pairs with the sub-method overlaps and per-algorithm counts of
    /// the original study planted exactly.
    Paper,
    /// Many leaks, identical profile pictures, heavy name noise.
    Dense,
    /// Few leaks.
    Sparse,
}

fn table4() -> Vec<DomainSeed> {
    [
        ("instagram", 0.366),
        ("youtube", 0.297),
        ("foursquare", 0.061),
        ("tumblr", 0.060),
        ("yfrog", 0.040),
    ]
    .into_iter()
    .map(|(n, f)| DomainSeed {
        network: n.into(),
        fraction: f,
    })
    .collect()
}

impl Preset {
    pub fn config(self) -> CorpusConfig {
        match self {
            Preset::Paper => CorpusConfig {
                n_users: 543,
                p_self_id_direct: 0.18,
                p_self_id_indirect: 0.072,
                p_same_username: 0.151,
                p_similar_username: 0.5,
                p_name_location_findable: 0.265,
                p_image_reuse: 0.6,
                p_cross_post: 0.0055,
                p_self_mention: 0.057,
                p_network_leak: 0.002,
                p_friendlist_public: 0.5,
                p_posts_public: 0.6,
                p_searchable: 0.7,
                n_quote_sharers: 20,
                seed: 543,
                p_namesake: 0.3,
                cohorts: Some(Cohorts {
                    profile_regions: [0, 56, 5, 0, 30, 37, 33, 44],
                    self_mention: (18, 13),
                    content: (2, 1),
                    network: (0, 1),
                }),
                domain_shares: table4(),
            },
            Preset::Dense => CorpusConfig {
                n_users: 300,
                p_self_id_direct: 0.2,
                p_self_id_indirect: 0.1,
                p_same_username: 0.3,
                p_similar_username: 0.4,
                p_name_location_findable: 0.8,
                p_image_reuse: 1.0,
                p_cross_post: 0.2,
                p_self_mention: 0.3,
                p_network_leak: 0.1,
                p_friendlist_public: 0.6,
                p_posts_public: 0.8,
                p_searchable: 0.9,
                n_quote_sharers: 30,
                seed: 7,
                p_namesake: 0.8,
                cohorts: None,
                domain_shares: table4(),
            },
            Preset::Sparse => CorpusConfig {
                n_users: 400,
                p_self_id_direct: 0.03,
                p_self_id_indirect: 0.01,
                p_same_username: 0.05,
                p_similar_username: 0.2,
                p_name_location_findable: 0.1,
                p_image_reuse: 0.3,
                p_cross_post: 0.01,
                p_self_mention: 0.02,
                p_network_leak: 0.01,
                p_friendlist_public: 0.3,
                p_posts_public: 0.4,
                p_searchable: 0.5,
                n_quote_sharers: 10,
                seed: 11,
                p_namesake: 0.1,
                cohorts: None,
                domain_shares: Vec::new(),
            },
        }
    }
}

impl CorpusConfig {
    /// No leaks of any kind.
    pub fn zero(n_users: usize, seed: u64) -> Self {
        CorpusConfig {
            n_users,
            p_self_id_direct: 0.0,
            p_self_id_indirect: 0.0,
            p_same_username: 0.0,
            p_similar_username: 0.0,
            p_name_location_findable: 0.0,
            p_image_reuse: 0.0,
            p_cross_post: 0.0,
            p_self_mention: 0.0,
            p_network_leak: 0.0,
            p_friendlist_public: 0.0,
            p_posts_public: 0.0,
            p_searchable: 0.0,
            n_quote_sharers: 0,
            seed,
            p_namesake: 0.0,
            cohorts: None,
            domain_shares: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), GenerateError> {
        let bad = |m: String| Err(GenerateError::Config(m));
        if self.n_users == 0 {
            return bad("n_users must be at least 1".into());
        }
        let probs = [
            ("p_self_id_direct", self.p_self_id_direct),
            ("p_self_id_indirect", self.p_self_id_indirect),
            ("p_same_username", self.p_same_username),
            ("p_similar_username", self.p_similar_username),
            ("p_name_location_findable", self.p_name_location_findable),
            ("p_image_reuse", self.p_image_reuse),
            ("p_cross_post", self.p_cross_post),
            ("p_self_mention", self.p_self_mention),
            ("p_network_leak", self.p_network_leak),
            ("p_friendlist_public", self.p_friendlist_public),
            ("p_posts_public", self.p_posts_public),
            ("p_searchable", self.p_searchable),
            ("p_namesake", self.p_namesake),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is not a probability"));
            }
        }
        if self.p_self_id_direct + self.p_self_id_indirect > 1.0 {
            return bad("p_self_id_direct + p_self_id_indirect exceeds 1".into());
        }
        if self.p_same_username + self.p_similar_username > 1.0 {
            return bad("p_same_username + p_similar_username exceeds 1".into());
        }
        for d in &self.domain_shares {
            if !(0.0..=1.0).contains(&d.fraction) {
                return bad(format!("domain fraction {} is not a probability", d.fraction));
            }
            if !KNOWN_NETWORKS.iter().any(|k| k.name == d.network) {
                return bad(format!("unknown domain network {:?}", d.network));
            }
        }
        if let Some(c) = &self.cohorts {
            let inside = c.profile_total();
            let outside = self.n_users.saturating_sub(inside);
            if inside > self.n_users {
                return bad(format!("profile cohorts ({inside}) exceed n_users"));
            }
            for (name, (i, _)) in [("self_mention", c.self_mention), ("content", c.content), ("network", c.network)] {
                if i > inside {
                    return bad(format!("{name} inside cohort exceeds the profile-found set"));
                }
            }
            if c.self_mention.1 + c.content.1 + c.network.1 > outside {
                return bad("outside cohorts exceed the pairs without profile leaks".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum UrlLeak {
    Direct,
    Indirect,
}

#[derive(Debug, Clone, Default)]
struct Plan {
    url: Option<UrlLeak>,
    same_username: bool,
    similar_username: bool,
    name_location: bool,
    image_reuse: bool,
    cross_post: bool,
    self_mention: bool,
    network: bool,
}

impl Plan {
    fn labels(&self) -> BTreeSet<String> {
        use labels::*;
        let flags = [
            (self.url == Some(UrlLeak::Direct), URL_DIRECT),
            (self.url == Some(UrlLeak::Indirect), URL_INDIRECT),
            (self.same_username, SAME_USERNAME),
            (self.similar_username, SIMILAR_USERNAME),
            (self.name_location, NAME_LOCATION),
            (self.image_reuse, IMAGE_REUSE),
            (self.cross_post, CROSS_POST),
            (self.self_mention, SELF_MENTION),
            (self.network, NETWORK),
        ];
        flags
            .into_iter()
            .filter(|(on, _)| *on)
            .map(|(_, l)| l.to_string())
            .collect()
    }
}

/// Builds the corpus described by `cfg`. Pure in `cfg`.
pub fn generate(cfg: &CorpusConfig) -> Result<Corpus, GenerateError> {
    cfg.validate()?;
    let mut g = Gen::new(cfg);
    let plans = g.plans();
    g.build(&plans);
    let corpus = g.finish(&plans);
    let report = audit(&corpus);
    if !report.is_clean() {
        return Err(GenerateError::Inconsistent(report.summary()));
    }
    Ok(corpus)
}

/// [`generate`] and write to `dir`.
pub fn generate_to(cfg: &CorpusConfig, dir: &Path) -> Result<(Corpus, AuditReport), GenerateError> {
    let corpus = generate(cfg)?;
    corpus.write(dir)?;
    let report = audit(&corpus);
    Ok((corpus, report))
}

struct Pair {
    source: usize,
    target: usize,
}

struct Gen<'a> {
    cfg: &'a CorpusConfig,
    rng: ChaCha8Rng,
    corpus: Corpus,
    source_ids: HashSet<String>,
    target_ids: HashSet<String>,
    source_names: HashSet<String>,
    target_names: HashSet<String>,
    sentences: HashSet<String>,
    image_keys: HashSet<ImageKey>,
    next_code: u64,
    pairs: Vec<Pair>,
    source_fillers: Vec<usize>,
    target_fillers: Vec<usize>,
    edges: BTreeSet<EdgeRecord>,
}

const EPOCH: u64 = 1_330_000_000;
const SPAN: u64 = 30_000_000;

impl<'a> Gen<'a> {
    fn new(cfg: &'a CorpusConfig) -> Self {
        Self {
            cfg,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            corpus: Corpus::empty(
                NetworkKind::new("source").expect("non-empty"),
                NetworkKind::new("target").expect("non-empty"),
            ),
            source_ids: HashSet::new(),
            target_ids: HashSet::new(),
            source_names: HashSet::new(),
            target_names: HashSet::new(),
            sentences: HashSet::new(),
            image_keys: HashSet::new(),
            next_code: 1,
            pairs: Vec::new(),
            source_fillers: Vec::new(),
            target_fillers: Vec::new(),
            edges: BTreeSet::new(),
        }
    }

    fn bool(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    fn pick<T: Copy>(&mut self, xs: &[T]) -> T {
        *xs.choose(&mut self.rng).expect("non-empty pool")
    }

    fn code(&mut self) -> String {
        let n = self.next_code;
        self.next_code += 1;
        let salt: u32 = self.rng.random_range(0..36 * 36);
        format!("{n:x}{}", radix36(salt))
    }

    // ---- plans -------------------------------------------------------

    fn plans(&mut self) -> Vec<Plan> {
        let n = self.cfg.n_users;
        let mut plans = vec![Plan::default(); n];
        match self.cfg.cohorts.clone() {
            Some(c) => self.cohort_plans(&c, &mut plans),
            None => {
                for p in plans.iter_mut() {
                    self.draw_profile(p);
                    p.self_mention = self.bool(self.cfg.p_self_mention);
                    p.cross_post = self.bool(self.cfg.p_cross_post);
                    p.network = self.bool(self.cfg.p_network_leak);
                }
            }
        }
        for p in plans.iter_mut() {
            if !p.same_username {
                let rest = 1.0 - self.cfg.p_same_username;
                let share = if rest > 0.0 { self.cfg.p_similar_username / rest } else { 0.0 };
                p.similar_username = self.bool(share.min(1.0));
            }
            p.image_reuse = self.bool(self.cfg.p_image_reuse);
        }
        plans
    }

    fn draw_profile(&mut self, p: &mut Plan) {
        let u: f64 = self.rng.random();
        p.url = if u < self.cfg.p_self_id_direct {
            Some(UrlLeak::Direct)
        } else if u < self.cfg.p_self_id_direct + self.cfg.p_self_id_indirect {
            Some(UrlLeak::Indirect)
        } else {
            None
        };
        p.same_username = self.bool(self.cfg.p_same_username);
        p.name_location = self.bool(self.cfg.p_name_location_findable);
    }

    fn url_kind(&mut self) -> UrlLeak {
        let total = self.cfg.p_self_id_direct + self.cfg.p_self_id_indirect;
        let indirect = if total > 0.0 { self.cfg.p_self_id_indirect / total } else { 0.0 };
        if self.bool(indirect) {
            UrlLeak::Indirect
        } else {
            UrlLeak::Direct
        }
    }

    fn cohort_plans(&mut self, c: &Cohorts, plans: &mut [Plan]) {
        let n = plans.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut self.rng);
        let mut it = order.into_iter();
        let mut inside = Vec::new();
        for (mask, &count) in c.profile_regions.iter().enumerate().skip(1) {
            for i in it.by_ref().take(count) {
                if mask & 1 != 0 {
                    plans[i].url = Some(self.url_kind());
                }
                plans[i].same_username = mask & 2 != 0;
                plans[i].name_location = mask & 4 != 0;
                inside.push(i);
            }
        }
        let outside: Vec<usize> = it.collect();

        let choose_inside = |g: &mut Self, k: usize| -> Vec<usize> {
            index::sample(&mut g.rng, inside.len(), k).into_iter().map(|j| inside[j]).collect()
        };
        for i in choose_inside(self, c.self_mention.0) {
            plans[i].self_mention = true;
        }
        for i in choose_inside(self, c.content.0) {
            plans[i].cross_post = true;
        }
        for i in choose_inside(self, c.network.0) {
            plans[i].network = true;
        }
        let k = c.self_mention.1 + c.content.1 + c.network.1;
        let picked: Vec<usize> = index::sample(&mut self.rng, outside.len(), k)
            .into_iter()
            .map(|j| outside[j])
            .collect();
        let (sm, rest) = picked.split_at(c.self_mention.1);
        let (ct, nw) = rest.split_at(c.content.1);
        sm.iter().for_each(|&i| plans[i].self_mention = true);
        ct.iter().for_each(|&i| plans[i].cross_post = true);
        nw.iter().for_each(|&i| plans[i].network = true);
    }

    // ---- identities --------------------------------------------------

    fn fresh_id(&mut self, target: bool) -> String {
        loop {
            let id = if target {
                format!("1000{:011}", self.rng.random_range(0..100_000_000_000u64))
            } else {
                format!("{}", self.rng.random_range(10_000_000..1_000_000_000u64))
            };
            let set = if target { &mut self.target_ids } else { &mut self.source_ids };
            if set.insert(id.clone()) {
                return id;
            }
        }
    }

    fn claim_username(&mut self, target: bool, name: &str) -> bool {
        let set = if target { &mut self.target_names } else { &mut self.source_names };
        set.insert(normalize_username(name))
    }

    fn handle(&mut self, target: bool) -> String {
        loop {
            let a = self.pick(HANDLE_WORDS);
            let b = self.pick(HANDLE_WORDS);
            let n: u32 = self.rng.random_range(0..1000);
            let h = match self.rng.random_range(0..3) {
                0 => format!("{a}{b}{n}"),
                1 => format!("{a}_{b}"),
                _ => format!("{a}{n}"),
            };
            if self.claim_username(target, &h) {
                return h;
            }
        }
    }

    fn person_username(&mut self, first: &str, last: &str) -> String {
        let (f, l) = (first.to_lowercase(), last.to_lowercase());
        loop {
            let n: u32 = self.rng.random_range(1..100);
            let u = match self.rng.random_range(0..6) {
                0 => format!("{f}{l}"),
                1 => format!("{f}_{l}"),
                2 => format!("{}{l}{n}", &f[..1]),
                3 => format!("{f}{n}"),
                4 => format!("{}_{}", capitalize(&f), capitalize(&l)),
                _ => format!("the{l}{n}"),
            };
            if !self.target_names.contains(&normalize_username(&u)) && self.claim_username(false, &u) {
                return u;
            }
        }
    }

    fn similar_username(&mut self, source: &str) -> String {
        let base = normalize_username(source);
        for _ in 0..200 {
            let mut v = base.clone();
            for _ in 0..self.rng.random_range(1..=3) {
                v = match self.rng.random_range(0..4) {
                    0 => format!("{v}{}", self.rng.random_range(0..100)),
                    1 if v.contains('_') => v.replacen('_', "", 1),
                    1 => {
                        let at = self.rng.random_range(1..v.len().max(2));
                        format!("{}_{}", &v[..at.min(v.len())], &v[at.min(v.len())..])
                    }
                    2 => {
                        let keep = (v.len() * 3 / 4).max(2).min(v.len());
                        format!("{}{}", &v[..keep], self.rng.random_range(0..10))
                    }
                    _ => format!("{v}_fb"),
                };
            }
            let j = jaro(&base, &v);
            if v != base && (SIMILAR_JARO.0..=SIMILAR_JARO.1).contains(&j)
                && !self.source_names.contains(&v)
                && self.claim_username(true, &v)
            {
                return v;
            }
        }
        self.unrelated_username(source)
    }

    fn unrelated_username(&mut self, source: &str) -> String {
        let base = normalize_username(source);
        loop {
            let h = self.handle(true);
            if jaro(&base, &h) < UNRELATED_JARO && !self.source_names.contains(&h) {
                return h;
            }
            self.target_names.remove(&h);
        }
    }

    fn image(&mut self) -> ImageKey {
        loop {
            let colors: Vec<[u8; 3]> = (0..4).map(|_| self.rng.random()).collect();
            let split: u32 = self.rng.random_range(2..7);
            let raster = Raster::from_fn(8, 8, |x, y| colors[(x >= split) as usize + 2 * (y >= 4) as usize])
                .expect("8x8 raster");
            let key = crate::corpus::image_key(&raster);
            if self.image_keys.insert(key.clone()) {
                self.corpus.images.insert(key.clone(), raster);
                return key;
            }
        }
    }

    fn push_identity(&mut self, ident: Identity) -> usize {
        self.corpus.identities.push(ident);
        self.corpus.identities.len() - 1
    }

    fn blank(&mut self, target: bool, username: String, name: String, location: Option<String>) -> Identity {
        let network = if target { self.corpus.target.clone() } else { self.corpus.source.clone() };
        let user_id = self.fresh_id(target);
        Identity {
            network,
            user_id,
            username,
            display_name: name,
            location,
            profile_image: None,
            url_field: None,
            searchable: true,
            posts_public: true,
            friendlist_public: false,
            entity_class: EntityClass::Person,
        }
    }

    fn city(&mut self) -> String {
        self.pick(CITIES).to_string()
    }

    fn other_city(&mut self, not: &str) -> String {
        loop {
            let c = self.city();
            if c != not {
                return c;
            }
        }
    }

    /// A display name for which `name_match(queried, _)` holds.
    fn matching_name(&mut self, first: &str, last: &str) -> String {
        match self.rng.random_range(0..20) {
            0..=13 => format!("{first} {last}"),
            14..=16 => format!("{} {}", first.to_lowercase(), last.to_lowercase()),
            _ => {
                let mid = (b'A' + self.rng.random_range(0..26u8)) as char;
                format!("{first} {mid}. {last}")
            }
        }
    }

    /// A person name sharing no token with `first last`.
    fn foreign_name(&mut self, first: &str, last: &str) -> String {
        loop {
            let (f, l) = (self.pick(FIRST_NAMES), self.pick(LAST_NAMES));
            let name = format!("{f} {l}");
            if f != first && l != last && !name_match(&format!("{first} {last}"), &name) {
                return name;
            }
        }
    }

    fn build_pair(&mut self, plan: &Plan) -> Pair {
        let first = self.pick(FIRST_NAMES);
        let last = self.pick(LAST_NAMES);
        let username = self.person_username(first, last);

        let keep_name = plan.network && !plan.name_location;
        let location = if !keep_name && self.bool(0.15) { None } else { Some(self.city()) };
        let mut src = self.blank(false, username.clone(), format!("{first} {last}"), location.clone());
        src.profile_image = Some(self.image());

        let searchable = plan.same_username || plan.name_location || self.bool(self.cfg.p_searchable);
        let t_username = if plan.same_username {
            let u = if self.bool(0.5) { username.to_lowercase() } else { username.clone() };
            self.target_names.insert(normalize_username(&u));
            u
        } else if plan.similar_username {
            self.similar_username(&username)
        } else {
            self.unrelated_username(&username)
        };

        let (t_name, t_loc) = if plan.name_location {
            let loc = match &location {
                Some(c) if self.bool(0.3) => format!("{c}, {}", self.pick(REGIONS)),
                Some(c) => c.clone(),
                None => self.city(),
            };
            (self.matching_name(first, last), Some(loc))
        } else if !searchable {
            (self.matching_name(first, last), Some(self.city()))
        } else {
            match &location {
                Some(c) if keep_name || self.bool(0.5) => {
                    let c = c.clone();
                    let loc = if self.bool(0.8) { Some(self.other_city(&c)) } else { None };
                    (self.matching_name(first, last), loc)
                }
                _ => (self.foreign_name(first, last), Some(self.city())),
            }
        };
        let mut tgt = self.blank(true, t_username, t_name, t_loc);
        tgt.searchable = searchable;
        tgt.posts_public = plan.cross_post || self.bool(self.cfg.p_posts_public);
        tgt.friendlist_public = self.bool(self.cfg.p_friendlist_public);
        tgt.profile_image = if plan.image_reuse {
            src.profile_image.clone()
        } else if self.bool(0.9) {
            Some(self.image())
        } else {
            None
        };

        src.url_field = self.url_field(plan.url, &src, &tgt);
        Pair {
            source: self.push_identity(src),
            target: self.push_identity(tgt),
        }
    }

    fn page(&mut self, url: String, redirects_to: Option<String>, links: Vec<String>) {
        self.corpus.pages.push(PageRecord {
            url,
            redirects_to,
            links,
        });
    }

    fn shortener(&mut self, to: String) -> String {
        let url = format!("https://short.ly/{}", self.code());
        self.page(url.clone(), Some(to), Vec::new());
        url
    }

    fn news_link(&mut self) -> String {
        let url = format!("https://news.example.org/story/{}", self.code());
        self.page(url.clone(), None, Vec::new());
        url
    }

    fn profile_url(&mut self, tgt: &Identity) -> String {
        match self.rng.random_range(0..5) {
            0 => format!("https://www.{}/profile.php?id={}", self.corpus.target.host(), tgt.user_id),
            1 => format!("{}/{}", self.corpus.target.host(), tgt.username),
            _ => self.corpus.target.profile_url(&tgt.username),
        }
    }

    fn url_field(&mut self, leak: Option<UrlLeak>, src: &Identity, tgt: &Identity) -> Option<String> {
        let slug = src.username.to_lowercase();
        match leak {
            Some(UrlLeak::Direct) => {
                let url = self.profile_url(tgt);
                Some(if self.bool(0.2) { self.shortener(url) } else { url })
            }
            Some(UrlLeak::Indirect) => {
                let blog = format!("https://blog.example/{slug}");
                let profile = self.profile_url(tgt);
                let news = self.news_link();
                self.page(blog.clone(), None, vec![news, profile]);
                Some(if self.bool(0.2) { self.shortener(blog) } else { blog })
            }
            None => match self.rng.random_range(0..20) {
                0..=10 => None,
                11..=15 => {
                    let home = format!("https://home.example/{slug}");
                    let news = self.news_link();
                    self.page(home.clone(), None, vec![news]);
                    Some(home)
                }
                16..=17 => {
                    let a = format!("https://short.ly/{}", self.code());
                    let b = format!("https://short.ly/{}", self.code());
                    self.page(a.clone(), Some(b.clone()), Vec::new());
                    self.page(b, Some(a.clone()), Vec::new());
                    Some(a)
                }
                _ => Some(format!("https://gone.example/{slug}")),
            },
        }
    }

    fn decoys(&mut self) {
        let n = self.cfg.n_users;
        let brands = n / 10;
        // name noise: namesakes and token-sharers of real users
        for _ in 0..n {
            let p = self.rng.random_range(0..self.pairs.len());
            let src = &self.corpus.identities[self.pairs[p].source];
            let (name, loc) = (src.display_name.clone(), src.location.clone());
            let (name, loc) = if self.bool(self.cfg.p_namesake) {
                (name, loc.or_else(|| Some(self.city())))
            } else {
                let tokens: Vec<&str> = name.split_whitespace().collect();
                let (f, l) = (tokens[0].to_string(), tokens[tokens.len() - 1].to_string());
                let name = if self.bool(0.5) {
                    format!("{f} {}", self.pick(LAST_NAMES))
                } else {
                    format!("{} {l}", self.pick(FIRST_NAMES))
                };
                (name, Some(self.city()))
            };
            let username = self.handle(true);
            let mut d = self.blank(true, username, name, loc);
            d.searchable = self.bool(self.cfg.p_searchable.max(0.5));
            d.posts_public = self.bool(self.cfg.p_posts_public);
            d.friendlist_public = self.bool(self.cfg.p_friendlist_public);
            d.profile_image = if self.bool(0.8) { Some(self.image()) } else { None };
            let i = self.push_identity(d);
            let k = self.rng.random_range(0..3);
            for _ in 0..k {
                self.own_post(i);
            }
        }
        for b in 0..brands {
            let name = BRANDS[b % BRANDS.len()].to_string();
            let username = self.handle(true);
            let loc = Some(self.city());
            let mut d = self.blank(true, username, name, loc);
            d.entity_class = EntityClass::Page;
            d.profile_image = Some(self.image());
            self.push_identity(d);
        }
        for _ in 0..n - brands {
            let name = format!("{} {}", self.pick(FILLER_FIRST), self.pick(FILLER_LAST));
            let username = self.handle(true);
            let loc = Some(self.city());
            let mut d = self.blank(true, username, name, loc);
            d.searchable = self.bool(self.cfg.p_searchable);
            d.posts_public = self.bool(self.cfg.p_posts_public);
            d.friendlist_public = self.bool(self.cfg.p_friendlist_public);
            d.profile_image = if self.bool(0.7) { Some(self.image()) } else { None };
            let i = self.push_identity(d);
            self.target_fillers.push(i);
            if self.bool(0.5) {
                self.own_post(i);
            }
        }
        for _ in 0..n {
            let i = self.source_filler();
            self.source_fillers.push(i);
        }
    }

    fn source_filler(&mut self) -> usize {
        let name = format!("{} {}", self.pick(FILLER_FIRST), self.pick(FILLER_LAST));
        let username = self.handle(false);
        let loc = Some(self.city());
        let mut d = self.blank(false, username, name, loc);
        d.profile_image = if self.bool(0.6) { Some(self.image()) } else { None };
        let i = self.push_identity(d);
        for _ in 0..self.rng.random_range(1..4) {
            self.own_post(i);
        }
        i
    }

    fn target_filler(&mut self) -> usize {
        let name = format!("{} {}", self.pick(FILLER_FIRST), self.pick(FILLER_LAST));
        let username = self.handle(true);
        let d = self.blank(true, username, name, None);
        self.push_identity(d)
    }

    // ---- content -----------------------------------------------------

    fn sentence(&mut self) -> String {
        loop {
            let k = self.rng.random_range(6..=14);
            let words: Vec<&str> = (0..k).map(|_| self.pick(WORDS)).collect();
            let mut s = capitalize(&words.join(" "));
            s.push_str(self.pick(&["", ".", "!", "!!", "?", " :)"]));
            if self.bool(0.1) {
                s.push_str(self.pick(&[" \u{1F600}", " \u{2615}", " \u{2764}"]));
            }
            if self.sentences.insert(s.clone()) {
                return s;
            }
        }
    }

    fn timestamp(&mut self) -> u64 {
        EPOCH + self.rng.random_range(0..SPAN)
    }

    fn post(&mut self, author: usize, text: String) {
        let ts = self.timestamp();
        let app = self.bool(0.7).then(|| self.pick(APPS).to_string());
        let author = self.corpus.identities[author].id();
        self.corpus.posts.push(Post::new(author, text, ts, app));
    }

    fn own_post(&mut self, author: usize) -> String {
        let s = self.sentence();
        self.post(author, s.clone());
        s
    }

    fn self_mention_url(&mut self, tgt: &Identity) -> String {
        let host = self.corpus.target.host();
        let n: u32 = self.rng.random_range(1..10_000);
        let url = match self.rng.random_range(0..4) {
            0 => format!("https://{host}/{}/photos/{n}", tgt.username),
            1 => format!("https://{host}/{}/posts/{n}", tgt.username),
            2 => format!("https://www.{host}/profile.php?id={}", tgt.user_id),
            _ => self.corpus.target.profile_url(&tgt.username),
        };
        if self.bool(0.3) {
            self.shortener(url)
        } else {
            url
        }
    }

    fn domain_url(&mut self, network: &str, slug: &str) -> String {
        let code = self.code();
        let url = match network {
            "instagram" if self.bool(0.8) => format!("https://instagram.com/p/{code}"),
            "instagram" => format!("http://instagr.am/p/{code}"),
            "youtube" if self.bool(0.6) => format!("https://www.youtube.com/watch?v={code}"),
            "youtube" => format!("https://youtu.be/{code}"),
            "foursquare" if self.bool(0.5) => format!("https://foursquare.com/v/{code}"),
            "foursquare" => format!("http://4sq.com/{code}"),
            "tumblr" => format!("https://{slug}.tumblr.com/post/{code}"),
            _ => format!("http://yfrog.com/{code}"),
        };
        self.page(url.clone(), None, Vec::new());
        if self.bool(0.2) {
            self.shortener(url)
        } else {
            url
        }
    }

    fn build(&mut self, plans: &[Plan]) {
        for plan in plans {
            let pair = self.build_pair(plan);
            self.pairs.push(pair);
        }
        self.decoys();

        // the user's own timeline
        let mut mine: Vec<Vec<String>> = Vec::with_capacity(plans.len());
        for p in 0..plans.len() {
            let src = self.pairs[p].source;
            let k = self.rng.random_range(3..=12);
            mine.push((0..k).map(|_| self.own_post(src)).collect());
            if self.bool(0.3) {
                let q = self.pick(QUOTES).to_string();
                self.post(src, q);
            }
            if self.bool(0.2) {
                let text = format!("{} {}", self.sentence(), self.news_link());
                self.post(src, text);
            }
            let tgt = self.pairs[p].target;
            for _ in 0..self.rng.random_range(2..=6) {
                self.own_post(tgt);
            }
        }

        for (p, plan) in plans.iter().enumerate() {
            let Pair { source, target } = self.pairs[p];
            let truth = self.corpus.identities[target].clone();
            if plan.self_mention {
                for _ in 0..self.rng.random_range(1..=3) {
                    let url = self.self_mention_url(&truth);
                    let text = format!("{} {url}", self.sentence());
                    self.post(source, text);
                }
            }
            if plan.cross_post {
                let k = self.rng.random_range(1..=2.min(mine[p].len()));
                for text in mine[p].clone().into_iter().take(k) {
                    self.post(target, text);
                }
            }
            if plan.network {
                for _ in 0..2 {
                    let helper_src = self.source_filler();
                    let helper_tgt = self.target_filler();
                    let t = &mut self.corpus.identities[helper_tgt];
                    t.friendlist_public = true;
                    let url = self.corpus.target.profile_url(&t.username);
                    self.corpus.identities[helper_src].url_field = Some(url);
                    self.follow(helper_src, source);
                    if self.bool(0.5) {
                        self.follow(source, helper_src);
                    }
                    self.befriend(helper_tgt, target);
                }
            }
        }

        for seed in self.cfg.domain_shares.clone() {
            let k = (seed.fraction * plans.len() as f64).round() as usize;
            let chosen = index::sample(&mut self.rng, plans.len(), k).into_vec();
            for p in chosen {
                let src = self.pairs[p].source;
                let slug = self.corpus.identities[src].username.to_lowercase().replace('_', "-");
                let url = self.domain_url(&seed.network, &slug);
                let text = format!("{} {url}", self.sentence());
                self.post(src, text);
            }
            self.corpus.planted.insert(format!("domain:{}", seed.network), k as u64);
        }

        self.quotes();
        self.social_graph();
    }

    fn quotes(&mut self) {
        if self.target_fillers.is_empty() {
            return;
        }
        for q in QUOTES {
            let k = self.cfg.n_quote_sharers.min(self.target_fillers.len());
            let chosen = index::sample(&mut self.rng, self.target_fillers.len(), k).into_vec();
            for j in chosen {
                let i = self.target_fillers[j];
                self.corpus.identities[i].posts_public = true;
                let text = if self.bool(0.3) { format!("RT {q}") } else { q.to_string() };
                self.post(i, text);
            }
        }
    }

    fn follow(&mut self, from: usize, to: usize) {
        let ids = &self.corpus.identities;
        self.edges.insert(EdgeRecord {
            network: self.corpus.source.as_str().into(),
            from: ids[from].user_id.clone(),
            to: ids[to].user_id.clone(),
            kind: EdgeKind::Follow,
        });
    }

    fn befriend(&mut self, a: usize, b: usize) {
        let ids = &self.corpus.identities;
        let (a, b) = (&ids[a].user_id, &ids[b].user_id);
        let (from, to) = if a <= b { (a, b) } else { (b, a) };
        self.edges.insert(EdgeRecord {
            network: self.corpus.target.as_str().into(),
            from: from.clone(),
            to: to.clone(),
            kind: EdgeKind::Friend,
        });
    }

    fn social_graph(&mut self) {
        let sf = self.source_fillers.clone();
        let tf = self.target_fillers.clone();
        for p in 0..self.pairs.len() {
            let Pair { source, target } = self.pairs[p];
            if !sf.is_empty() {
                for _ in 0..self.rng.random_range(1..=8) {
                    let f = self.pick(&sf);
                    self.follow(f, source);
                }
                for _ in 0..self.rng.random_range(1..=8) {
                    let f = self.pick(&sf);
                    self.follow(source, f);
                }
            }
            if self.bool(0.3) {
                let other = self.rng.random_range(0..self.pairs.len());
                if other != p {
                    let o = self.pairs[other].source;
                    self.follow(source, o);
                }
            }
            if !tf.is_empty() {
                for _ in 0..self.rng.random_range(1..=6) {
                    let f = self.pick(&tf);
                    self.befriend(f, target);
                }
            }
        }
    }

    fn finish(mut self, plans: &[Plan]) -> Corpus {
        let mut c = std::mem::replace(
            &mut self.corpus,
            Corpus::empty(NetworkKind::new("source").expect("non-empty"), NetworkKind::new("target").expect("non-empty")),
        );
        c.groundtruth = self
            .pairs
            .iter()
            .zip(plans)
            .map(|(pair, plan)| GroundTruthRecord {
                source_id: c.identities[pair.source].user_id.clone(),
                target_id: c.identities[pair.target].user_id.clone(),
                leak_labels: plan.labels(),
            })
            .collect();
        let mut counts: BTreeMap<String, u64> = labels::ALL.iter().map(|l| (l.to_string(), 0)).collect();
        for g in &c.groundtruth {
            for l in &g.leak_labels {
                *counts.entry(l.clone()).or_insert(0) += 1;
            }
        }
        counts.insert("pairs".into(), c.groundtruth.len() as u64);
        c.planted.extend(counts);

        let (mut src, mut tgt): (Vec<Identity>, Vec<Identity>) =
            c.identities.drain(..).partition(|i| i.network == c.source);
        src.shuffle(&mut self.rng);
        tgt.shuffle(&mut self.rng);
        c.identities = src.into_iter().chain(tgt).collect();
        c.posts.sort_by(|a, b| {
            (a.author.network.as_str(), &a.author.user_id, a.timestamp, &a.text)
                .cmp(&(b.author.network.as_str(), &b.author.user_id, b.timestamp, &b.text))
        });
        c.edges = std::mem::take(&mut self.edges).into_iter().collect();
        c.pages.sort_by(|a, b| a.url.cmp(&b.url));
        c.config = Some(self.cfg.clone());
        c
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn radix36(mut n: u32) -> String {
    const DIGITS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";
    let mut out = vec![DIGITS[(n % 36) as usize]];
    n /= 36;
    out.push(DIGITS[(n % 36) as usize]);
    String::from_utf8(out).expect("ascii")
}
