use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::connector::{Connector, Meter, ResolvedTarget};
use crate::error::Result;
use crate::model::{
    normalize_username, rank_by_score, Algorithm, AlgorithmOutcome, Candidate, ConfirmRule,
    Confirmation, Identity, IdentityRef,
};
use crate::similarity::jaro;

/// Self-mention search: URLs in the user's own posts that lead to a target
/// account (its profile, or a photo/post under it).
#[derive(Debug, Clone)]
pub struct SelfMentionSearch {
    pub max_posts: usize,
}

impl Default for SelfMentionSearch {
    fn default() -> Self {
        Self { max_posts: 100 }
    }
}

impl SelfMentionSearch {
    pub fn search<C: Connector + ?Sized>(
        &self,
        c: &C,
        nemo: &IdentityRef,
    ) -> Result<AlgorithmOutcome> {
        let meter = Meter::start(c);
        let me = c.lookup_identity(nemo)?;
        let posts = c.fetch_recent_posts(nemo, self.max_posts)?;

        let mut resolved: BTreeMap<String, Option<ResolvedTarget>> = BTreeMap::new();
        let mut order: Vec<IdentityRef> = Vec::new();
        let mut found: BTreeMap<IdentityRef, (Identity, u32)> = BTreeMap::new();

        for post in posts.iter().filter(|p| !p.urls.is_empty()) {
            let mut in_this_post: BTreeSet<IdentityRef> = BTreeSet::new();
            for url in &post.urls {
                let r = resolved
                    .entry(url.clone())
                    .or_insert_with(|| match c.resolve_url(url) {
                        Ok(r) => Some(r),
                        Err(e) => {
                            log::debug!("self-mention: {e}");
                            None
                        }
                    });
                let Some(target) = r.as_ref().and_then(|r| r.target_identity.as_ref()) else {
                    continue;
                };
                if !target.is_person() || &target.network != c.target_network() {
                    continue;
                }
                let id = target.id();
                if in_this_post.insert(id.clone()) {
                    let slot = found.entry(id.clone()).or_insert_with(|| {
                        order.push(id.clone());
                        (target.clone(), 0)
                    });
                    slot.1 += 1;
                }
            }
        }

        let my_name = normalize_username(&me.username);
        let mut cands: Vec<Candidate> = order
            .iter()
            .map(|id| {
                let (identity, mentions) = &found[id];
                let mut cand = Candidate::new(identity, Algorithm::SelfMention);
                cand.mention_count = *mentions;
                cand.set_score(
                    Algorithm::SelfMention,
                    jaro(&my_name, &identity.normalized_username()),
                );
                cand
            })
            .collect();

        let mut out = AlgorithmOutcome::empty(Algorithm::SelfMention);
        out.unranked = order;
        rank_by_score(&mut cands, Algorithm::SelfMention);

        let most_referred = cands
            .iter()
            .max_by(|a, b| {
                a.mention_count
                    .cmp(&b.mention_count)
                    .then_with(|| b.identity.user_id.cmp(&a.identity.user_id))
            })
            .map(|c| c.identity.clone());
        if let (Some(top), Some(most)) = (cands.first(), most_referred) {
            if top.identity == most {
                out.confirmed = Some(Confirmation {
                    identity: most,
                    rule: ConfirmRule::SelfMention {
                        mentions: top.mention_count,
                    },
                });
            }
        }
        out.candidates = cands;
        (out.requests_used, out.elapsed_ms) = meter.stop(c);
        Ok(out)
    }

    /// Hosts that the user's posted URLs finally land on, one entry per
    /// host. Unresolvable URLs are skipped.
    pub fn resolved_hosts<C: Connector + ?Sized>(
        &self,
        c: &C,
        nemo: &IdentityRef,
    ) -> Result<BTreeSet<String>> {
        let posts = c.fetch_recent_posts(nemo, self.max_posts)?;
        let urls: BTreeSet<&String> = posts.iter().flat_map(|p| p.urls.iter()).collect();
        Ok(urls
            .into_iter()
            .filter_map(|u| c.resolve_url(u).ok())
            .map(|r| r.final_host)
            .collect())
    }
}
