use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::connector::{Connector, Meter};
use crate::error::Result;
use crate::model::{
    dedupe_candidates, rank_by_score, Algorithm, AlgorithmOutcome, Candidate,
    ConfirmRule, Confirmation, Identity, IdentityRef, ProfileSubMethod,
};
use crate::similarity::{compare_images, ImageScore};

/// Profile search: self-identification through the profile URL, then same
/// username and name + location searches, ranked by profile picture.
#[derive(Debug, Clone)]
pub struct ProfileSearch {
    /// Maximum candidates requested from the name + location search.
    pub name_location_cap: usize,
}

impl Default for ProfileSearch {
    fn default() -> Self {
        Self {
            name_location_cap: 60,
        }
    }
}

/// A target account named by the user's own profile URL.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfIdentification {
    pub identity: Identity,
    pub via_page: bool,
}

/// What each sub-method returned for one user, all three always run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubMethodHits {
    pub url: Option<IdentityRef>,
    pub same_username: Option<IdentityRef>,
    pub name_location: Vec<IdentityRef>,
}

impl SubMethodHits {
    /// Sub-methods whose results contain `truth`.
    pub fn found_by(&self, truth: &IdentityRef) -> BTreeSet<ProfileSubMethod> {
        let mut out = BTreeSet::new();
        if self.url.as_ref() == Some(truth) {
            out.insert(ProfileSubMethod::Url);
        }
        if self.same_username.as_ref() == Some(truth) {
            out.insert(ProfileSubMethod::SameUsername);
        }
        if self.name_location.contains(truth) {
            out.insert(ProfileSubMethod::NameLocation);
        }
        out
    }
}

impl ProfileSearch {
    pub fn search<C: Connector + ?Sized>(
        &self,
        c: &C,
        nemo: &IdentityRef,
    ) -> Result<AlgorithmOutcome> {
        let meter = Meter::start(c);
        let me = c.lookup_identity(nemo)?;
        let mut out = AlgorithmOutcome::empty(Algorithm::Profile);

        if let Some(found) = self.self_identification(c, &me) {
            let mut cand = Candidate::new(&found.identity, Algorithm::Profile);
            cand.sub_methods.insert(ProfileSubMethod::Url);
            cand.set_score(Algorithm::Profile, 1.0);
            cand.rank = Some(1);
            out.confirmed = Some(Confirmation {
                identity: cand.identity.clone(),
                rule: ConfirmRule::SelfIdentification {
                    via_page: found.via_page,
                },
            });
            out.unranked = vec![cand.identity.clone()];
            out.candidates = vec![cand];
            (out.requests_used, out.elapsed_ms) = meter.stop(c);
            return Ok(out);
        }

        let mut found: Vec<(Identity, ProfileSubMethod)> = Vec::new();
        if let Some(hit) = self.same_username(c, &me)? {
            found.push((hit, ProfileSubMethod::SameUsername));
        }
        for hit in self.name_location(c, &me)? {
            found.push((hit, ProfileSubMethod::NameLocation));
        }

        let my_image = c.fetch_image(&me);
        let mut cands = Vec::with_capacity(found.len());
        for (identity, method) in &found {
            let mut cand = Candidate::new(identity, Algorithm::Profile);
            cand.sub_methods.insert(*method);
            match compare_images(my_image.as_ref(), c.fetch_image(identity).as_ref()) {
                ImageScore::Scored(s) => cand.set_score(Algorithm::Profile, s),
                ImageScore::NoImage => {}
            }
            cands.push(cand);
        }
        let mut cands = dedupe_candidates(cands);
        out.unranked = cands.iter().map(|c| c.identity.clone()).collect();
        rank_by_score(&mut cands, Algorithm::Profile);
        out.candidates = cands;
        (out.requests_used, out.elapsed_ms) = meter.stop(c);
        Ok(out)
    }

    /// Runs URL, same-username and name + location lookups without the
    /// self-identification shortcut, for per-sub-method accounting.
    pub fn attribute<C: Connector + ?Sized>(
        &self,
        c: &C,
        nemo: &IdentityRef,
    ) -> Result<SubMethodHits> {
        let me = c.lookup_identity(nemo)?;
        Ok(SubMethodHits {
            url: self.self_identification(c, &me).map(|s| s.identity.id()),
            same_username: self.same_username(c, &me)?.map(|i| i.id()),
            name_location: self
                .name_location(c, &me)?
                .iter()
                .map(Identity::id)
                .collect(),
        })
    }

    /// Target account behind the profile URL field, if it names one.
    /// Resolution failures mean "no self-identification".
    pub fn self_identification<C: Connector + ?Sized>(
        &self,
        c: &C,
        me: &Identity,
    ) -> Option<SelfIdentification> {
        let url = me.url_field.as_deref()?.trim();
        if url.is_empty() {
            return None;
        }
        match c.resolve_url(url) {
            Ok(resolved) => resolved
                .target_identity
                .filter(|t| &t.network == c.target_network())
                .map(|identity| SelfIdentification {
                    identity,
                    via_page: resolved.via_page_scan,
                }),
            Err(e) => {
                log::debug!("profile url of {} did not resolve: {e}", me.id());
                None
            }
        }
    }

    fn same_username<C: Connector + ?Sized>(&self, c: &C, me: &Identity) -> Result<Option<Identity>> {
        if me.normalized_username().is_empty() {
            return Ok(None);
        }
        c.search_by_username(&me.username)
    }

    fn name_location<C: Connector + ?Sized>(&self, c: &C, me: &Identity) -> Result<Vec<Identity>> {
        if me.display_name.trim().is_empty() {
            return Ok(Vec::new());
        }
        c.search_by_name_location(&me.display_name, me.location.as_deref(), self.name_location_cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::testkit::*;
    use crate::similarity::Raster;

    #[test]
    fn direct_url_confirms_without_searches() {
        let mut w = World::new();
        let alice_t = w.target_person("t-alice", "alice", "Alice Wong", Some("Springfield"));
        let mut me = w.source_person("s-alice", "alice", "Alice Wong", Some("Springfield"));
        me.url_field = Some("target.net/alice".into());
        w.add_source(me);
        w.add_target(alice_t);

        let out = ProfileSearch::default().search(&w, &w.sref("s-alice")).unwrap();
        assert_eq!(out.candidates.len(), 1);
        let conf = out.confirmed.unwrap();
        assert_eq!(conf.identity, w.tref("t-alice"));
        assert_eq!(conf.rule, ConfirmRule::SelfIdentification { via_page: false });
        // lookup + one resolution call, no searches
        assert_eq!(out.requests_used, 2);
        assert_eq!(w.calls("search"), 0);
    }

    #[test]
    fn blog_page_is_indirect_self_identification() {
        let mut w = World::new();
        w.add_target(w.target_person("t-alice", "alice.w", "Alice Wong", None));
        let mut me = w.source_person("s-alice", "alice", "Alice Wong", None);
        me.url_field = Some("https://blog.example/alice".into());
        w.add_source(me);
        w.add_page("https://blog.example/alice", None, &["https://target.net/alice.w"]);

        let out = ProfileSearch::default().search(&w, &w.sref("s-alice")).unwrap();
        let conf = out.confirmed.unwrap();
        assert_eq!(conf.rule, ConfirmRule::SelfIdentification { via_page: true });
    }

    #[test]
    fn failed_resolution_falls_back_to_searches() {
        let mut w = World::new();
        w.add_target(w.target_person("t-bob", "bob", "Bob Stone", Some("Riverton")));
        let mut me = w.source_person("s-bob", "bob", "Bob Stone", Some("Riverton"));
        me.url_field = Some("https://short.ly/loop".into());
        w.add_source(me);
        w.add_page("https://short.ly/loop", Some("https://short.ly/loop"), &[]);

        let out = ProfileSearch::default().search(&w, &w.sref("s-bob")).unwrap();
        assert!(out.confirmed.is_none());
        assert_eq!(out.candidates.len(), 1);
        let c = &out.candidates[0];
        assert!(c.sub_methods.contains(&ProfileSubMethod::SameUsername));
        assert!(c.sub_methods.contains(&ProfileSubMethod::NameLocation));
    }

    #[test]
    fn identical_picture_ranks_first() {
        let mut w = World::new();
        let me_img = Raster::from_fn(4, 4, |x, _| if x < 2 { [200, 10, 10] } else { [10, 200, 10] }).unwrap();
        let mut me = w.source_person("s-ann", "ann_k", "Ann Kim", Some("Lakewood"));
        me.profile_image = Some(w.add_image(me_img.clone()));
        w.add_source(me);
        // 40 name-matched decoys with other pictures, truth in the middle by id
        for i in 0..40u8 {
            let id = alloc::format!("t-{:02}", i);
            let mut d = w.target_person(&id, &alloc::format!("kim{i}"), "Ann Kim", Some("Lakewood"));
            let img = Raster::from_fn(4, 4, |x, y| [i * 6, (x * 40) as u8, (y * 50) as u8]).unwrap();
            d.profile_image = Some(w.add_image(img));
            w.add_target(d);
        }
        let mut truth = w.target_person("t-20x", "annkim", "Ann Kim", Some("Lakewood"));
        truth.profile_image = Some(w.add_image(me_img));
        w.add_target(truth);

        let out = ProfileSearch::default().search(&w, &w.sref("s-ann")).unwrap();
        assert_eq!(out.candidates.len(), 41);
        assert_eq!(out.candidates[0].identity, w.tref("t-20x"));
        assert_eq!(out.candidates[0].score(Algorithm::Profile), Some(1.0));
        assert!(out.unranked.iter().position(|i| i == &w.tref("t-20x")).unwrap() > 0);
    }

    #[test]
    fn unimaged_candidates_keep_retrieval_order_at_the_bottom() {
        let mut w = World::new();
        let img = Raster::from_fn(2, 2, |_, _| [1, 2, 3]).unwrap();
        let mut me = w.source_person("s-x", "xx", "Lee Park", Some("Ashford"));
        me.profile_image = Some(w.add_image(img.clone()));
        w.add_source(me);
        w.add_target(w.target_person("t-c", "c1", "Lee Park", Some("Ashford")));
        w.add_target(w.target_person("t-a", "a1", "Lee Park", Some("Ashford")));
        let mut scored = w.target_person("t-z", "z1", "Lee Park", Some("Ashford"));
        scored.profile_image = Some(w.add_image(Raster::from_fn(2, 2, |_, _| [250, 250, 250]).unwrap()));
        w.add_target(scored);

        let out = ProfileSearch::default().search(&w, &w.sref("s-x")).unwrap();
        let ids: Vec<_> = out.candidates.iter().map(|c| c.identity.user_id.as_str()).collect();
        // t-z has a picture (score 0), the rest keep search order (by id)
        assert_eq!(ids, ["t-z", "t-a", "t-c"]);
    }

    #[test]
    fn non_searchable_truth_is_invisible() {
        let mut w = World::new();
        let mut t = w.target_person("t-bob", "bob", "Bob Stone", Some("Riverton"));
        t.searchable = false;
        w.add_target(t);
        w.add_source(w.source_person("s-bob", "bob", "Bob Stone", Some("Riverton")));
        let out = ProfileSearch::default().search(&w, &w.sref("s-bob")).unwrap();
        assert!(out.candidates.is_empty());
    }

    #[test]
    fn attribution_runs_every_sub_method() {
        let mut w = World::new();
        w.add_target(w.target_person("t-alice", "alice", "Alice Wong", Some("Springfield")));
        let mut me = w.source_person("s-alice", "alice", "Alice Wong", Some("Springfield"));
        me.url_field = Some("https://target.net/alice".into());
        w.add_source(me);
        let hits = ProfileSearch::default().attribute(&w, &w.sref("s-alice")).unwrap();
        let found = hits.found_by(&w.tref("t-alice"));
        assert_eq!(found.len(), 3);
    }

    #[test]
    fn unknown_user_is_not_found() {
        let w = World::new();
        let err = ProfileSearch::default().search(&w, &w.sref("nobody")).unwrap_err();
        assert!(matches!(err, crate::Error::NotFound(_)));
    }
}
