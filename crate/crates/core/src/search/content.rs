use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::connector::{Connector, Meter};
use crate::error::Result;
use crate::model::{rank_by_score, Algorithm, AlgorithmOutcome, Candidate, IdentityRef};
use crate::similarity::cosine_text;
use crate::text::post_query;

/// Content search: look for target accounts that posted the same text.
///
/// Never confirms anything on its own; popular quotes make content matches
/// too noisy.
#[derive(Debug, Clone)]
pub struct ContentSearch {
    /// Most recent posts of the user to query with.
    pub max_posts: usize,
    /// Results requested per query.
    pub results_per_query: usize,
}

impl Default for ContentSearch {
    fn default() -> Self {
        Self {
            max_posts: 100,
            results_per_query: 100,
        }
    }
}

impl ContentSearch {
    pub fn search<C: Connector + ?Sized>(
        &self,
        c: &C,
        nemo: &IdentityRef,
    ) -> Result<AlgorithmOutcome> {
        let meter = Meter::start(c);
        let posts = c.fetch_recent_posts(nemo, self.max_posts)?;

        let mut by_id: BTreeMap<IdentityRef, usize> = BTreeMap::new();
        let mut cands: Vec<Candidate> = Vec::new();
        let mut asked: BTreeSet<String> = BTreeSet::new();

        for post in &posts {
            let Some(query) = post_query(&post.text) else {
                continue;
            };
            if !asked.insert(query.clone()) {
                continue;
            }
            for (author, hit) in c.search_posts_by_text(&query, self.results_per_query)? {
                if &author.network != c.target_network() {
                    continue;
                }
                let score = cosine_text(&post.text, &hit.text);
                let idx = *by_id.entry(author.id()).or_insert_with(|| {
                    cands.push(Candidate::new(&author, Algorithm::Content));
                    cands.len() - 1
                });
                let cand = &mut cands[idx];
                if cand.score(Algorithm::Content).map_or(true, |s| score > s) {
                    cand.set_score(Algorithm::Content, score);
                }
            }
        }

        let mut out = AlgorithmOutcome::empty(Algorithm::Content);
        out.unranked = cands.iter().map(|c| c.identity.clone()).collect();
        rank_by_score(&mut cands, Algorithm::Content);
        out.candidates = cands;
        (out.requests_used, out.elapsed_ms) = meter.stop(c);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::testkit::World;
    use alloc::format;

    fn world() -> World {
        let mut w = World::new();
        w.add_source(w.source_person("s-me", "me", "Mia Ross", None));
        w
    }

    #[test]
    fn exact_cross_post_scores_one() {
        let mut w = world();
        w.add_target(w.target_person("t-me", "mia", "Mia Ross", None));
        let text = "Sunrise over the harbour today, coffee in hand!!";
        w.add_post(w.sref("s-me"), text, 10);
        w.add_post(w.tref("t-me"), text, 11);
        let out = ContentSearch::default().search(&w, &w.sref("s-me")).unwrap();
        assert_eq!(out.candidates.len(), 1);
        assert!((out.candidates[0].score(Algorithm::Content).unwrap() - 1.0).abs() < 1e-12);
        assert!(out.confirmed.is_none());
    }

    #[test]
    fn long_posts_query_with_first_75_chars() {
        let mut w = world();
        w.add_target(w.target_person("t-me", "mia", "Mia Ross", None));
        let long: String = (0..20).map(|i| format!("word{i} ")).collect();
        assert!(long.len() > 120);
        w.add_post(w.sref("s-me"), &long, 10);
        // target only has the first 80 characters; found through the prefix
        w.add_post(w.tref("t-me"), &long[..80], 11);
        let out = ContentSearch::default().search(&w, &w.sref("s-me")).unwrap();
        assert_eq!(out.candidates.len(), 1);
    }

    #[test]
    fn private_authors_and_short_posts_are_skipped() {
        let mut w = world();
        let mut hidden = w.target_person("t-hidden", "h", "Mia Ross", None);
        hidden.posts_public = false;
        w.add_target(hidden);
        w.add_post(w.sref("s-me"), "a quiet walk in the park", 10);
        w.add_post(w.tref("t-hidden"), "a quiet walk in the park", 11);
        w.add_post(w.sref("s-me"), "ok \u{1F44D}", 12);
        let out = ContentSearch::default().search(&w, &w.sref("s-me")).unwrap();
        assert!(out.candidates.is_empty());
        // only the long post was sent as a query
        assert_eq!(w.calls("search"), 1);
    }

    #[test]
    fn popular_quote_returns_all_sharers() {
        let mut w = world();
        let quote = "Be yourself; everyone else is already taken.";
        w.add_post(w.sref("s-me"), quote, 1);
        for i in 0..20 {
            let id = format!("t-q{i:02}");
            w.add_target(w.target_person(&id, &id, "Someone Else", None));
            w.add_post(w.tref(&id), quote, 2 + i);
        }
        let out = ContentSearch::default().search(&w, &w.sref("s-me")).unwrap();
        assert_eq!(out.candidates.len(), 20);
        // all tie at 1.0, so ids ascend
        assert_eq!(out.candidates[0].identity.user_id, "t-q00");
    }

    #[test]
    fn no_posts_is_empty_not_error() {
        let w = world();
        let out = ContentSearch::default().search(&w, &w.sref("s-me")).unwrap();
        assert!(out.candidates.is_empty());
    }
}
