//! Batch evaluation over a corpus and the concurrent variant of the
//! integrated search.

use std::sync::mpsc;
use std::thread;

use nemo_core::error::{Error, Result};
use nemo_core::evaluation::{evaluate_query, AlgorithmSelector, EvalReport, QueryEval};
use nemo_core::orchestrator::{run_stage, Integrator};
use nemo_core::{Connector, IdentityRef, OrchestrationPolicy, RateLimitPolicy, SearchResult, SearchSuite};
use rayon::prelude::*;

use crate::fixture::FixtureIndex;

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub suite: SearchSuite,
    pub policy: OrchestrationPolicy,
    pub which: AlgorithmSelector,
    pub rate_limit: RateLimitPolicy,
    /// Worker threads; 0 and 1 both mean serial.
    pub jobs: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            suite: SearchSuite::default(),
            policy: OrchestrationPolicy::default(),
            which: AlgorithmSelector::All,
            rate_limit: RateLimitPolicy::default(),
            jobs: 1,
        }
    }
}

/// Every ground-truth pair, in ground-truth order.
pub fn evaluate_queries(index: &FixtureIndex, opts: &EvalOptions) -> Result<Vec<QueryEval>> {
    let pairs = index.corpus().pairs();
    if pairs.is_empty() {
        return Err(Error::Config("corpus has no ground truth".into()));
    }
    let one = |(source, truth): &(IdentityRef, IdentityRef)| {
        evaluate_query(
            || index.session(opts.rate_limit),
            &opts.suite,
            &opts.policy,
            opts.which,
            source,
            truth,
        )
    };
    if opts.jobs <= 1 {
        return pairs.iter().map(one).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| pairs.par_iter().map(one).collect())
}

pub fn evaluate(index: &FixtureIndex, opts: &EvalOptions) -> Result<EvalReport> {
    let mut report = EvalReport::new(index.corpus().fingerprint());
    for q in evaluate_queries(index, opts)? {
        report.add(&q);
    }
    Ok(report)
}

/// All four algorithms at once against one shared connector. Outcomes are
/// integrated in the order they finish, so the confirmation may come from
/// any stage; all stages always run.
pub fn find_nemo_concurrent<C: Connector + Sync>(
    c: &C,
    suite: &SearchSuite,
    nemo: &IdentityRef,
    policy: &OrchestrationPolicy,
) -> Result<SearchResult> {
    let (tx, rx) = mpsc::channel();
    thread::scope(|s| {
        for &alg in policy.order() {
            let tx = tx.clone();
            s.spawn(move || {
                // the receiver outlives every sender
                let _ = tx.send(run_stage(c, suite, alg, nemo));
            });
        }
        drop(tx);
        let mut acc = Integrator::new(nemo.clone());
        for outcome in rx {
            acc.push(outcome?);
        }
        Ok(acc.finish())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, CorpusConfig, Preset};
    use nemo_core::evaluation::INTEGRATED;
    use nemo_core::{find_nemo, Algorithm, ConfirmRule};

    fn small(n: usize) -> FixtureIndex {
        let cfg = CorpusConfig { n_users: n, ..Preset::Dense.config() };
        FixtureIndex::new(generate(&cfg).unwrap())
    }

    #[test]
    fn parallel_report_equals_serial() {
        let ix = small(40);
        let serial = evaluate(&ix, &EvalOptions::default()).unwrap();
        let parallel = evaluate(&ix, &EvalOptions { jobs: 4, ..Default::default() }).unwrap();
        assert_eq!(serial, parallel);
        assert_eq!(serial.queried, 40);
    }

    #[test]
    fn no_ground_truth_is_a_config_error() {
        let mut c = generate(&CorpusConfig::zero(3, 1)).unwrap();
        c.groundtruth.clear();
        let err = evaluate(&FixtureIndex::new(c), &EvalOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn single_algorithm_selection() {
        let ix = small(20);
        let opts = EvalOptions {
            which: AlgorithmSelector::Single(Algorithm::Profile),
            ..Default::default()
        };
        let r = evaluate(&ix, &opts).unwrap();
        assert_eq!(r.algorithms.keys().collect::<Vec<_>>(), vec!["profile"]);
        assert!(r.stats(INTEGRATED).is_none());
    }

    #[test]
    fn concurrent_agrees_when_profile_self_identifies() {
        let ix = small(60);
        let policy = OrchestrationPolicy::default();
        let suite = SearchSuite::default();
        let mut checked = 0;
        for (src, _) in ix.corpus().pairs() {
            let serial = find_nemo(&ix.session(RateLimitPolicy::default()), &suite, &src, &policy).unwrap();
            let Some(conf) = &serial.confirmed else { continue };
            if conf.stage != Algorithm::Profile
                || !matches!(conf.confirmation.rule, ConfirmRule::SelfIdentification { .. })
            {
                continue;
            }
            let session = ix.session(RateLimitPolicy::default());
            let conc = find_nemo_concurrent(&session, &suite, &src, &policy).unwrap();
            assert_eq!(conc.confirmed_identity(), serial.confirmed_identity());
            assert_eq!(conc.stages.len(), 4);
            checked += 1;
        }
        assert!(checked > 0);
    }
}
