use nemo_core::model::rank_by_score;
use nemo_core::similarity::{cosine_text, histogram_similarity, jaro, name_match, Raster};
use nemo_core::{Algorithm, Candidate, EntityClass, Identity, NetworkKind, RateLimitPolicy, RateLimiter, SimClock};
use proptest::prelude::*;

fn identity(id: u32) -> Identity {
    Identity {
        network: NetworkKind::new("target").unwrap(),
        user_id: format!("{id:04}"),
        username: format!("u{id}"),
        display_name: "Some One".into(),
        location: None,
        profile_image: None,
        url_field: None,
        searchable: true,
        posts_public: true,
        friendlist_public: false,
        entity_class: EntityClass::Person,
    }
}

fn raster() -> impl Strategy<Value = Raster> {
    (1u32..4, 1u32..4).prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<[u8; 3]>(), (w * h) as usize)
            .prop_map(move |px| Raster::new(w, h, px).unwrap())
    })
}

proptest! {
    #[test]
    fn jaro_is_a_bounded_symmetric_similarity(a in "[a-d_é]{0,10}", b in "[a-d_é]{0,10}") {
        let x = jaro(&a, &b);
        prop_assert!((0.0..=1.0).contains(&x));
        prop_assert!((x - jaro(&b, &a)).abs() < 1e-12);
        prop_assert_eq!(jaro(&a, &a), 1.0);
    }

    #[test]
    fn cosine_is_bounded_and_symmetric(a in "[a-c ]{0,20}", b in "[a-c ]{0,20}") {
        let x = cosine_text(&a, &b);
        prop_assert!((0.0..=1.0).contains(&x));
        prop_assert!((x - cosine_text(&b, &a)).abs() < 1e-12);
    }

    #[test]
    fn histogram_intersection_properties(a in raster(), b in raster()) {
        let x = histogram_similarity(&a, &b);
        prop_assert!((0.0..=1.0).contains(&x));
        prop_assert!((x - histogram_similarity(&b, &a)).abs() < 1e-12);
        prop_assert!((histogram_similarity(&a, &a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_name_always_matches_itself(first in "[A-Z][a-z]{2,6}", last in "[A-Z][a-z]{2,6}") {
        let name = format!("{first} {last}");
        prop_assert!(name_match(&name, &name));
        let middle = [first.to_lowercase(), "X.".into(), last].join(" ");
        prop_assert!(name_match(&name, &middle));
    }

    #[test]
    fn limiter_never_exceeds_budget(
        max in 1u32..20,
        window in 1u64..5_000,
        steps in prop::collection::vec(0u64..3_000, 1..200),
    ) {
        let policy = RateLimitPolicy::new(max, window).unwrap();
        let mut clock = SimClock::new();
        let mut lim = RateLimiter::new(policy, &clock);
        let mut grants = Vec::new();
        for gap in steps {
            clock.advance(gap);
            lim.acquire(&mut clock);
            grants.push(clock.now_ms());
        }
        prop_assert!(grants.windows(2).all(|w| w[0] <= w[1]));
        // windows are aligned to multiples of the window length
        let mut per_window = std::collections::BTreeMap::new();
        for t in &grants {
            *per_window.entry(t / window).or_insert(0u32) += 1;
        }
        prop_assert!(per_window.values().all(|&n| n <= max));
    }

    #[test]
    fn ranking_orders_scores_then_ids(scores in prop::collection::vec(prop::option::of(0u8..4), 0..30)) {
        let mut cands: Vec<Candidate> = scores
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut c = Candidate::new(&identity(1000 - i as u32), Algorithm::Profile);
                if let Some(s) = s {
                    c.set_score(Algorithm::Profile, *s as f64 / 4.0);
                }
                c
            })
            .collect();
        let unscored_before: Vec<String> = cands
            .iter()
            .filter(|c| c.score(Algorithm::Profile).is_none())
            .map(|c| c.identity.user_id.clone())
            .collect();
        rank_by_score(&mut cands, Algorithm::Profile);
        let scored: Vec<(f64, String)> = cands
            .iter()
            .filter_map(|c| c.score(Algorithm::Profile).map(|s| (s, c.identity.user_id.clone())))
            .collect();
        for w in scored.windows(2) {
            prop_assert!(w[0].0 > w[1].0 || (w[0].0 == w[1].0 && w[0].1 < w[1].1));
        }
        let tail: Vec<String> = cands[scored.len()..].iter().map(|c| c.identity.user_id.clone()).collect();
        prop_assert_eq!(tail, unscored_before);
        for (i, c) in cands.iter().enumerate() {
            prop_assert_eq!(c.rank, Some(i as u32 + 1));
        }
    }
}
