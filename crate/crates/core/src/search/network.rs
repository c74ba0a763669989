use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::connector::{Connector, Meter, NetworkRelation};
use crate::error::Result;
use crate::model::{
    rank_by_score, Algorithm, AlgorithmOutcome, Candidate, ConfirmRule, Confirmation, Identity,
    IdentityRef,
};
use crate::similarity::name_match;

/// Network search: members of the user's source network who self-identify
/// on the target network, and the name-matched friends they have in common.
#[derive(Debug, Clone)]
pub struct NetworkSearch {
    /// Relations walked, in order.
    pub relations: Vec<NetworkRelation>,
    /// Distinct mapped members that must list an identity to confirm it.
    pub threshold: u32,
    /// Stop walking as soon as some identity reaches `threshold`.
    pub early_exit: bool,
}

impl Default for NetworkSearch {
    fn default() -> Self {
        Self {
            relations: NetworkRelation::ALL.to_vec(),
            threshold: 2,
            early_exit: true,
        }
    }
}

impl NetworkSearch {
    pub fn search<C: Connector + ?Sized>(
        &self,
        c: &C,
        nemo: &IdentityRef,
    ) -> Result<AlgorithmOutcome> {
        let meter = Meter::start(c);
        let me = c.lookup_identity(nemo)?;

        let mut seen_members: BTreeSet<IdentityRef> = BTreeSet::new();
        let mut mapped: BTreeSet<IdentityRef> = BTreeSet::new();
        // candidate -> distinct mapped identities listing it
        let mut listed_by: BTreeMap<IdentityRef, BTreeSet<IdentityRef>> = BTreeMap::new();
        let mut order: Vec<Identity> = Vec::new();

        'walk: for &relation in &self.relations {
            for member in c.fetch_network(nemo, relation)? {
                if !seen_members.insert(member.id()) {
                    continue;
                }
                let Some(target) = self.map_member(c, &member) else {
                    continue;
                };
                if !mapped.insert(target.id()) {
                    continue;
                }
                let friends = match c.fetch_friend_list(&target.id()) {
                    Ok(Some(f)) => f,
                    Ok(None) => continue,
                    Err(e) => {
                        log::debug!("network: {e}");
                        continue;
                    }
                };
                let mut reached = false;
                for friend in friends {
                    if friend.network != *c.target_network()
                        || !name_match(&me.display_name, &friend.display_name)
                    {
                        continue;
                    }
                    let by = listed_by.entry(friend.id()).or_insert_with(|| {
                        order.push(friend.clone());
                        BTreeSet::new()
                    });
                    by.insert(target.id());
                    reached |= by.len() as u32 >= self.threshold;
                }
                if reached && self.early_exit {
                    break 'walk;
                }
            }
        }

        let max_tally = listed_by.values().map(BTreeSet::len).max().unwrap_or(0);
        let mut cands: Vec<Candidate> = order
            .iter()
            .map(|identity| {
                let tally = listed_by[&identity.id()].len();
                let mut cand = Candidate::new(identity, Algorithm::Network);
                cand.set_score(Algorithm::Network, tally as f64 / max_tally as f64);
                cand
            })
            .collect();

        let mut out = AlgorithmOutcome::empty(Algorithm::Network);
        out.unranked = order.iter().map(Identity::id).collect();
        rank_by_score(&mut cands, Algorithm::Network);
        if let Some(top) = cands.first() {
            let tally = listed_by[&top.identity].len() as u32;
            if tally >= self.threshold {
                out.confirmed = Some(Confirmation {
                    identity: top.identity.clone(),
                    rule: ConfirmRule::NetworkTally { tally },
                });
            }
        }
        out.candidates = cands;
        (out.requests_used, out.elapsed_ms) = meter.stop(c);
        Ok(out)
    }

    /// Target person a network member self-identifies as, if any.
    fn map_member<C: Connector + ?Sized>(&self, c: &C, member: &Identity) -> Option<Identity> {
        let url = member.url_field.as_deref()?;
        let target = c.resolve_url(url).ok()?.target_identity?;
        (target.is_person() && target.network == *c.target_network()).then_some(target)
    }
}
