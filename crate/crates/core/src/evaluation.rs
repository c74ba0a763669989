//! Metrics over many queries with known answers: accuracy, candidate set
//! size, rank of the correct identity, simulated search time, profile
//! sub-method attribution and URL domain shares.
//!
//! Every aggregate is a sum of per-query counts, so reports merge in any
//! order to the same value.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::connector::Connector;
use crate::error::{Error, Result};
use crate::model::{Algorithm, Candidate, IdentityRef, ProfileSubMethod, SearchResult};
use crate::orchestrator::{find_nemo, run_stage, OrchestrationPolicy};
use crate::search::SearchSuite;

/// Report key of the integrated system.
pub const INTEGRATED: &str = "integrated";

/// 1-based position of `truth` in `candidates`.
pub fn rank_of_correct(candidates: &[Candidate], truth: &IdentityRef) -> Option<u32> {
    candidates
        .iter()
        .position(|c| &c.identity == truth)
        .map(|i| i as u32 + 1)
}

fn position_of(ids: &[IdentityRef], truth: &IdentityRef) -> Option<u32> {
    ids.iter().position(|c| c == truth).map(|i| i as u32 + 1)
}

/// Counts per half-open bucket `[bounds[i], bounds[i+1])`, the last bucket
/// unbounded.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Buckets {
    pub bounds: Vec<u64>,
    pub counts: Vec<u64>,
}

impl Buckets {
    pub fn new(bounds: &[u64]) -> Self {
        debug_assert!(bounds.windows(2).all(|w| w[0] < w[1]));
        Self {
            bounds: bounds.to_vec(),
            counts: alloc::vec![0; bounds.len()],
        }
    }

    /// Candidate set sizes.
    pub fn sizes() -> Self {
        Self::new(&[0, 1, 2, 6, 11, 31, 61])
    }

    /// Ranks of the correct identity.
    pub fn ranks() -> Self {
        Self::new(&[1, 2, 4, 6, 11, 21])
    }

    /// Search time in simulated seconds.
    pub fn seconds() -> Self {
        Self::new(&[0, 1, 10, 60, 600, 3600])
    }

    pub fn add(&mut self, value: u64) {
        if let Some(i) = self.bounds.iter().rposition(|&b| b <= value) {
            self.counts[i] += 1;
        }
    }

    pub fn merge(&mut self, other: &Buckets) {
        debug_assert_eq!(self.bounds, other.bounds);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn label(&self, i: usize) -> String {
        let lo = self.bounds[i];
        match self.bounds.get(i + 1) {
            Some(&hi) if hi == lo + 1 => format!("{lo}"),
            Some(&hi) => format!("{lo}-{}", hi - 1),
            None => format!("{lo}+"),
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// One algorithm (or the integrated system) on one query.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryRecord {
    pub identified: bool,
    pub rank: Option<u32>,
    pub candidate_count: usize,
    pub confirmed: Option<IdentityRef>,
    pub requests: u64,
    pub elapsed_ms: u64,
    pub errored: bool,
}

impl QueryRecord {
    fn new(
        candidates: &[Candidate],
        confirmed: Option<&IdentityRef>,
        truth: &IdentityRef,
        requests: u64,
        elapsed_ms: u64,
        errored: bool,
    ) -> Self {
        let rank = rank_of_correct(candidates, truth);
        Self {
            identified: rank.is_some(),
            rank,
            candidate_count: candidates.len(),
            confirmed: confirmed.cloned(),
            requests,
            elapsed_ms,
            errored,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct AlgorithmStats {
    pub queried: u64,
    pub identified: u64,
    /// `identified / queried`, exact division of the two counts.
    pub accuracy: f64,
    pub confirmed: u64,
    pub confirmed_correct: u64,
    pub errors: u64,
    pub total_requests: u64,
    pub total_elapsed_ms: u64,
    pub max_rank: Option<u32>,
    pub candidate_sizes: Buckets,
    pub ranks: Buckets,
    pub search_seconds: Buckets,
}

impl Default for AlgorithmStats {
    fn default() -> Self {
        Self {
            queried: 0,
            identified: 0,
            accuracy: 0.0,
            confirmed: 0,
            confirmed_correct: 0,
            errors: 0,
            total_requests: 0,
            total_elapsed_ms: 0,
            max_rank: None,
            candidate_sizes: Buckets::sizes(),
            ranks: Buckets::ranks(),
            search_seconds: Buckets::seconds(),
        }
    }
}

impl AlgorithmStats {
    pub fn add(&mut self, r: &QueryRecord, truth: &IdentityRef) {
        self.queried += 1;
        self.identified += r.identified as u64;
        if let Some(c) = &r.confirmed {
            self.confirmed += 1;
            self.confirmed_correct += (c == truth) as u64;
        }
        self.errors += r.errored as u64;
        self.total_requests += r.requests;
        self.total_elapsed_ms += r.elapsed_ms;
        self.candidate_sizes.add(r.candidate_count as u64);
        if let Some(rank) = r.rank {
            self.ranks.add(rank as u64);
            self.max_rank = self.max_rank.max(Some(rank));
        }
        self.search_seconds.add(r.elapsed_ms / 1000);
        self.refresh();
    }

    pub fn merge(&mut self, o: &AlgorithmStats) {
        self.queried += o.queried;
        self.identified += o.identified;
        self.confirmed += o.confirmed;
        self.confirmed_correct += o.confirmed_correct;
        self.errors += o.errors;
        self.total_requests += o.total_requests;
        self.total_elapsed_ms += o.total_elapsed_ms;
        self.max_rank = self.max_rank.max(o.max_rank);
        self.candidate_sizes.merge(&o.candidate_sizes);
        self.ranks.merge(&o.ranks);
        self.search_seconds.merge(&o.search_seconds);
        self.refresh();
    }

    fn refresh(&mut self) {
        self.accuracy = if self.queried == 0 {
            0.0
        } else {
            self.identified as f64 / self.queried as f64
        };
    }

    pub fn mean_elapsed_secs(&self) -> f64 {
        if self.queried == 0 {
            0.0
        } else {
            self.total_elapsed_ms as f64 / 1000.0 / self.queried as f64
        }
    }
}

/// Users found per combination of profile sub-methods. `regions[m]` counts
/// users found by exactly the sub-methods in bitmask `m` (URL = 1, SU = 2,
/// NL = 4); `regions[0]` is users found by none.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SubMethodTable {
    pub regions: [u64; 8],
}

impl SubMethodTable {
    fn bit(m: ProfileSubMethod) -> usize {
        match m {
            ProfileSubMethod::Url => 1,
            ProfileSubMethod::SameUsername => 2,
            ProfileSubMethod::NameLocation => 4,
        }
    }

    pub fn mask(found: &BTreeSet<ProfileSubMethod>) -> usize {
        found.iter().fold(0, |m, s| m | Self::bit(*s))
    }

    pub fn add(&mut self, found: &BTreeSet<ProfileSubMethod>) {
        self.regions[Self::mask(found)] += 1;
    }

    pub fn merge(&mut self, o: &SubMethodTable) {
        for (a, b) in self.regions.iter_mut().zip(o.regions) {
            *a += b;
        }
    }

    /// Users found by at least one of `methods`.
    pub fn union(&self, methods: &[ProfileSubMethod]) -> u64 {
        let want = methods.iter().fold(0, |m, s| m | Self::bit(*s));
        (1..8).filter(|m| m & want != 0).map(|m| self.regions[m]).sum()
    }

    /// Users found by all of `methods`.
    pub fn intersection(&self, methods: &[ProfileSubMethod]) -> u64 {
        let want = methods.iter().fold(0, |m, s| m | Self::bit(*s));
        (1..8).filter(|m| m & want == want).map(|m| self.regions[m]).sum()
    }

    /// Rows `(label, users)` for every non-empty combination of sub-methods.
    pub fn rows(&self) -> Vec<(String, u64)> {
        use ProfileSubMethod::*;
        let combos: [&[ProfileSubMethod]; 7] = [
            &[Url],
            &[SameUsername],
            &[NameLocation],
            &[Url, SameUsername],
            &[Url, NameLocation],
            &[SameUsername, NameLocation],
            &[Url, SameUsername, NameLocation],
        ];
        combos
            .iter()
            .map(|c| {
                let label = c.iter().map(|m| m.tag()).collect::<Vec<_>>().join(" + ");
                (label, self.union(c))
            })
            .collect()
    }

    /// Every union equals its inclusion–exclusion expansion.
    pub fn inclusion_exclusion_holds(&self) -> bool {
        use ProfileSubMethod::*;
        let all = [Url, SameUsername, NameLocation];
        for mask in 1usize..8 {
            let set: Vec<ProfileSubMethod> =
                (0..3).filter(|i| mask >> i & 1 == 1).map(|i| all[i]).collect();
            let mut expanded: i64 = 0;
            for sub in 1usize..8 {
                if sub & mask != sub {
                    continue;
                }
                let part: Vec<ProfileSubMethod> =
                    (0..3).filter(|i| sub >> i & 1 == 1).map(|i| all[i]).collect();
                let sign = if part.len() % 2 == 1 { 1 } else { -1 };
                expanded += sign * self.intersection(&part) as i64;
            }
            if expanded != self.union(&set) as i64 {
                return false;
            }
        }
        true
    }
}

/// Rank of the correct identity in the ranked list versus the order the
/// target network returned candidates in.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RankingAnalysis {
    pub identified: u64,
    pub ranked_rank_sum: u64,
    pub unranked_rank_sum: u64,
    pub ranked_top5: u64,
    pub ranked_top10: u64,
    pub unranked_top5: u64,
    pub unranked_top10: u64,
    pub mean_rank_ranked: f64,
    pub mean_rank_unranked: f64,
}

impl RankingAnalysis {
    pub fn add(&mut self, ranked: u32, unranked: u32) {
        self.identified += 1;
        self.ranked_rank_sum += ranked as u64;
        self.unranked_rank_sum += unranked as u64;
        self.ranked_top5 += (ranked <= 5) as u64;
        self.ranked_top10 += (ranked <= 10) as u64;
        self.unranked_top5 += (unranked <= 5) as u64;
        self.unranked_top10 += (unranked <= 10) as u64;
        self.refresh();
    }

    pub fn merge(&mut self, o: &RankingAnalysis) {
        self.identified += o.identified;
        self.ranked_rank_sum += o.ranked_rank_sum;
        self.unranked_rank_sum += o.unranked_rank_sum;
        self.ranked_top5 += o.ranked_top5;
        self.ranked_top10 += o.ranked_top10;
        self.unranked_top5 += o.unranked_top5;
        self.unranked_top10 += o.unranked_top10;
        self.refresh();
    }

    fn refresh(&mut self) {
        let n = self.identified.max(1) as f64;
        self.mean_rank_ranked = self.ranked_rank_sum as f64 / n;
        self.mean_rank_unranked = self.unranked_rank_sum as f64 / n;
    }

    pub fn ranked_top10_share(&self) -> f64 {
        share(self.ranked_top10, self.identified)
    }

    pub fn unranked_top5_share(&self) -> f64 {
        share(self.unranked_top5, self.identified)
    }
}

fn share(part: u64, whole: u64) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64
    }
}

/// Hosts belonging to one known social network.
#[derive(Debug, Clone, Copy)]
pub struct DomainPattern {
    pub name: &'static str,
    pub hosts: &'static [&'static str],
}

pub const KNOWN_NETWORKS: [DomainPattern; 5] = [
    DomainPattern { name: "instagram", hosts: &["instagram.com", "instagr.am"] },
    DomainPattern { name: "youtube", hosts: &["youtube.com", "youtu.be"] },
    DomainPattern { name: "foursquare", hosts: &["foursquare.com", "4sq.com"] },
    DomainPattern { name: "tumblr", hosts: &["tumblr.com"] },
    DomainPattern { name: "yfrog", hosts: &["yfrog.com"] },
];

fn host_matches(host: &str, pattern: &str) -> bool {
    let host = host.strip_prefix("www.").unwrap_or(host);
    host == pattern
        || host
            .strip_suffix(pattern)
            .is_some_and(|rest| rest.ends_with('.'))
}

/// Known networks the given landing hosts belong to. `extra` adds one more
/// `(name, host)` pattern, normally the target network.
pub fn networks_of(hosts: &BTreeSet<String>, extra: Option<(&str, &str)>) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for h in hosts {
        for p in &KNOWN_NETWORKS {
            if p.hosts.iter().any(|pat| host_matches(h, pat)) {
                out.insert(p.name.to_string());
            }
        }
        if let Some((name, host)) = extra {
            if host_matches(h, host) {
                out.insert(name.to_string());
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct DomainShare {
    pub domain: String,
    pub users: u64,
    /// Percentage of queried users, 0..=100.
    pub percent: f64,
}

/// Per-network user counts, turned into a descending share table over
/// `queried` users. Zero rows are dropped; ties order by name.
pub fn domain_frequency_report(counts: &BTreeMap<String, u64>, queried: u64) -> Vec<DomainShare> {
    let mut rows: Vec<DomainShare> = counts
        .iter()
        .filter(|(_, &n)| n > 0)
        .map(|(d, &n)| DomainShare {
            domain: d.clone(),
            users: n,
            percent: 100.0 * share(n, queried),
        })
        .collect();
    rows.sort_by(|a, b| b.users.cmp(&a.users).then_with(|| a.domain.cmp(&b.domain)));
    rows
}

/// What to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmSelector {
    Single(Algorithm),
    Integrated,
    All,
}

impl AlgorithmSelector {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "all" => Some(Self::All),
            INTEGRATED => Some(Self::Integrated),
            _ => Algorithm::parse(s).map(Self::Single),
        }
    }

    fn singles(self) -> Vec<Algorithm> {
        match self {
            Self::Single(a) => alloc::vec![a],
            Self::Integrated => Vec::new(),
            Self::All => Algorithm::ALL.to_vec(),
        }
    }

    fn integrated(self) -> bool {
        matches!(self, Self::Integrated | Self::All)
    }
}

/// Everything measured for one ground-truth pair.
#[derive(Debug, Clone)]
pub struct QueryEval {
    pub source: IdentityRef,
    pub truth: IdentityRef,
    pub records: BTreeMap<String, QueryRecord>,
    pub sub_methods: Option<BTreeSet<ProfileSubMethod>>,
    /// (ranked, unranked) positions of the truth in profile search.
    pub profile_positions: Option<(u32, u32)>,
    pub networks: Option<BTreeSet<String>>,
    pub integrated: Option<SearchResult>,
}

/// Evaluates one pair. `session` hands out a fresh connector per run, so
/// each measurement starts from an idle clock and an empty rate window.
pub fn evaluate_query<C, F>(
    session: F,
    suite: &SearchSuite,
    policy: &OrchestrationPolicy,
    which: AlgorithmSelector,
    source: &IdentityRef,
    truth: &IdentityRef,
) -> Result<QueryEval>
where
    C: Connector,
    F: Fn() -> C,
{
    let mut q = QueryEval {
        source: source.clone(),
        truth: truth.clone(),
        records: BTreeMap::new(),
        sub_methods: None,
        profile_positions: None,
        networks: None,
        integrated: None,
    };

    for alg in which.singles() {
        let c = session();
        let o = run_stage(&c, suite, alg, source)?;
        let rec = QueryRecord::new(
            &o.candidates,
            o.confirmed.as_ref().map(|c| &c.identity),
            truth,
            o.requests_used,
            o.elapsed_ms,
            o.error.is_some(),
        );
        match alg {
            Algorithm::Profile => {
                if let Some(r) = rec.rank {
                    let u = position_of(&o.unranked, truth).unwrap_or(r);
                    q.profile_positions = Some((r, u));
                }
                let hits = suite.profile.attribute(&session(), source)?;
                q.sub_methods = Some(hits.found_by(truth));
            }
            Algorithm::SelfMention => {
                let c = session();
                let hosts = suite.self_mention.resolved_hosts(&c, source)?;
                let target = c.target_network();
                q.networks = Some(networks_of(
                    &hosts,
                    Some((target.as_str(), target.host().as_str())),
                ));
            }
            _ => {}
        }
        q.records.insert(alg.name().to_string(), rec);
    }

    if which.integrated() {
        let c = session();
        let res = find_nemo(&c, suite, source, policy)?;
        let rec = QueryRecord::new(
            &res.merged_candidates,
            res.confirmed_identity(),
            truth,
            res.total_requests,
            res.total_elapsed_ms,
            res.outcomes.values().any(|o| o.error.is_some()),
        );
        q.records.insert(INTEGRATED.to_string(), rec);
        q.integrated = Some(res);
    }
    Ok(q)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct EvalReport {
    pub corpus_id: String,
    pub queried: u64,
    pub algorithms: BTreeMap<String, AlgorithmStats>,
    pub sub_methods: Option<SubMethodTable>,
    pub profile_ranking: Option<RankingAnalysis>,
    pub domain_counts: BTreeMap<String, u64>,
    pub domains: Vec<DomainShare>,
}

impl EvalReport {
    pub fn new(corpus_id: impl Into<String>) -> Self {
        Self {
            corpus_id: corpus_id.into(),
            queried: 0,
            algorithms: BTreeMap::new(),
            sub_methods: None,
            profile_ranking: None,
            domain_counts: BTreeMap::new(),
            domains: Vec::new(),
        }
    }

    pub fn add(&mut self, q: &QueryEval) {
        self.queried += 1;
        for (name, rec) in &q.records {
            self.algorithms
                .entry(name.clone())
                .or_default()
                .add(rec, &q.truth);
        }
        if let Some(found) = &q.sub_methods {
            self.sub_methods.get_or_insert_with(Default::default).add(found);
        }
        if q.records.contains_key(Algorithm::Profile.name()) {
            let ranking = self.profile_ranking.get_or_insert_with(Default::default);
            if let Some((r, u)) = q.profile_positions {
                ranking.add(r, u);
            }
        }
        if let Some(nets) = &q.networks {
            for n in nets {
                *self.domain_counts.entry(n.clone()).or_insert(0) += 1;
            }
        }
        self.refresh();
    }

    pub fn merge(&mut self, o: &EvalReport) {
        self.queried += o.queried;
        for (name, s) in &o.algorithms {
            self.algorithms.entry(name.clone()).or_default().merge(s);
        }
        if let Some(t) = &o.sub_methods {
            self.sub_methods.get_or_insert_with(Default::default).merge(t);
        }
        if let Some(r) = &o.profile_ranking {
            self.profile_ranking.get_or_insert_with(Default::default).merge(r);
        }
        for (d, n) in &o.domain_counts {
            *self.domain_counts.entry(d.clone()).or_insert(0) += n;
        }
        self.refresh();
    }

    fn refresh(&mut self) {
        self.domains = domain_frequency_report(&self.domain_counts, self.queried);
    }

    pub fn stats(&self, name: &str) -> Option<&AlgorithmStats> {
        self.algorithms.get(name)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MetricDelta {
    pub algorithm: String,
    pub metric: String,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
}

/// `b - a` for every shared metric of two runs over the same corpus.
pub fn compare_runs(a: &EvalReport, b: &EvalReport) -> Result<Vec<MetricDelta>> {
    if a.corpus_id != b.corpus_id {
        return Err(Error::InvalidInput(format!(
            "reports are over different corpora: {} vs {}",
            a.corpus_id, b.corpus_id
        )));
    }
    let mut out = Vec::new();
    for (name, sa) in &a.algorithms {
        let Some(sb) = b.algorithms.get(name) else {
            continue;
        };
        let metrics: [(&str, f64, f64); 6] = [
            ("identified", sa.identified as f64, sb.identified as f64),
            ("accuracy", sa.accuracy, sb.accuracy),
            ("confirmed", sa.confirmed as f64, sb.confirmed as f64),
            ("requests", sa.total_requests as f64, sb.total_requests as f64),
            ("elapsed_s", sa.total_elapsed_ms as f64 / 1000.0, sb.total_elapsed_ms as f64 / 1000.0),
            ("mean_elapsed_s", sa.mean_elapsed_secs(), sb.mean_elapsed_secs()),
        ];
        for (metric, x, y) in metrics {
            out.push(MetricDelta {
                algorithm: name.clone(),
                metric: metric.into(),
                a: x,
                b: y,
                delta: y - x,
            });
        }
    }
    Ok(out)
}
