//! Integrated search: the four algorithms run in sequence, candidates are
//! OR-merged, and the run halts once an identity is confirmed.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use crate::connector::{Connector, Meter};
use crate::error::{Error, Result};
use crate::model::{
    dedupe_candidates, assign_ranks, Algorithm, AlgorithmOutcome, Candidate, ConfirmRule,
    Confirmation, IdentityRef, SearchResult, StageConfirmation,
};
use crate::search::SearchSuite;

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrchestrationPolicy {
    order: Vec<Algorithm>,
    pub early_exit: bool,
}

impl Default for OrchestrationPolicy {
    fn default() -> Self {
        Self {
            order: Algorithm::ALL.to_vec(),
            early_exit: true,
        }
    }
}

impl OrchestrationPolicy {
    /// `order` must list each algorithm exactly once.
    pub fn new(order: Vec<Algorithm>, early_exit: bool) -> Result<Self> {
        let distinct: BTreeSet<_> = order.iter().collect();
        if order.len() != Algorithm::ALL.len() || distinct.len() != order.len() {
            return Err(Error::Config(format!(
                "order must be a permutation of the four algorithms, got {order:?}"
            )));
        }
        Ok(Self { order, early_exit })
    }

    pub fn order(&self) -> &[Algorithm] {
        &self.order
    }

    pub fn with_early_exit(mut self, early_exit: bool) -> Self {
        self.early_exit = early_exit;
        self
    }
}

/// Accumulates stage outcomes and applies the confirmation rules.
///
/// Rule (a), an algorithm's own confirmation, is checked before rule (b),
/// two or more algorithms agreeing. Only the first confirmation is kept.
#[derive(Debug, Clone)]
pub struct Integrator {
    query: IdentityRef,
    stages: Vec<Algorithm>,
    outcomes: BTreeMap<Algorithm, AlgorithmOutcome>,
    confirmed: Option<StageConfirmation>,
}

impl Integrator {
    pub fn new(query: IdentityRef) -> Self {
        Self {
            query,
            stages: Vec::new(),
            outcomes: BTreeMap::new(),
            confirmed: None,
        }
    }

    /// Adds a finished stage. Returns whether an identity is confirmed
    /// after it (now or earlier).
    pub fn push(&mut self, outcome: AlgorithmOutcome) -> bool {
        let stage = outcome.algorithm;
        self.stages.push(stage);
        self.outcomes.insert(stage, outcome);
        if self.confirmed.is_some() {
            return true;
        }
        let confirmation = self.outcomes[&stage]
            .confirmed
            .clone()
            .or_else(|| self.multi_algorithm());
        self.confirmed = confirmation.map(|confirmation| StageConfirmation {
            stage,
            confirmation,
        });
        self.confirmed.is_some()
    }

    pub fn is_confirmed(&self) -> bool {
        self.confirmed.is_some()
    }

    fn merged(&self) -> Vec<Candidate> {
        dedupe_candidates(
            self.stages
                .iter()
                .flat_map(|s| self.outcomes[s].candidates.iter().cloned())
                .collect(),
        )
    }

    fn multi_algorithm(&self) -> Option<Confirmation> {
        self.merged()
            .into_iter()
            .find(|c| c.provenance.len() >= 2)
            .map(|c| Confirmation {
                identity: c.identity,
                rule: ConfirmRule::MultiAlgorithm {
                    algorithms: c.provenance,
                },
            })
    }

    pub fn finish(self) -> SearchResult {
        let mut merged = self.merged();
        if let Some(conf) = &self.confirmed {
            if let Some(pos) = merged
                .iter()
                .position(|c| c.identity == conf.confirmation.identity)
            {
                let top = merged.remove(pos);
                merged.insert(0, top);
            }
        }
        assign_ranks(&mut merged);
        let total_elapsed_ms = self.outcomes.values().map(|o| o.elapsed_ms).sum();
        let total_requests = self.outcomes.values().map(|o| o.requests_used).sum();
        SearchResult {
            query: self.query,
            stages: self.stages,
            outcomes: self.outcomes,
            merged_candidates: merged,
            confirmed: self.confirmed,
            total_elapsed_ms,
            total_requests,
        }
    }
}

/// Runs one algorithm, degrading any failure other than the queried user
/// being unknown to an empty outcome that still carries the cost spent.
pub fn run_stage<C: Connector + ?Sized>(
    c: &C,
    suite: &SearchSuite,
    algorithm: Algorithm,
    nemo: &IdentityRef,
) -> Result<AlgorithmOutcome> {
    let meter = Meter::start(c);
    match suite.run(algorithm, c, nemo) {
        Ok(o) => Ok(o),
        Err(Error::NotFound(id)) if &id == nemo => Err(Error::NotFound(id)),
        Err(e) => {
            log::warn!("{algorithm} failed for {nemo}: {e}");
            let mut o = AlgorithmOutcome::empty(algorithm);
            o.error = Some(e.to_string());
            (o.requests_used, o.elapsed_ms) = meter.stop(c);
            Ok(o)
        }
    }
}

/// The integrated search, serial in `policy.order()`.
pub fn find_nemo<C: Connector + ?Sized>(
    c: &C,
    suite: &SearchSuite,
    nemo: &IdentityRef,
    policy: &OrchestrationPolicy,
) -> Result<SearchResult> {
    let mut acc = Integrator::new(nemo.clone());
    for &algorithm in policy.order() {
        let confirmed = acc.push(run_stage(c, suite, algorithm, nemo)?);
        if confirmed && policy.early_exit {
            break;
        }
    }
    Ok(acc.finish())
}

/// Human-readable account of a [`SearchResult`].
pub struct Explanation<'a>(&'a SearchResult);

pub fn explain(result: &SearchResult) -> Explanation<'_> {
    Explanation(result)
}

impl fmt::Display for Explanation<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.0;
        writeln!(f, "query: {}", r.query)?;
        match &r.confirmed {
            Some(c) => writeln!(
                f,
                "confirmed: {} at {} stage, rule: {}",
                c.confirmation.identity, c.stage, c.confirmation.rule
            )?,
            None => writeln!(f, "confirmed: none")?,
        }
        writeln!(f, "stages:")?;
        for stage in &r.stages {
            let o = &r.outcomes[stage];
            write!(
                f,
                "  {:<12} {:>4} candidates {:>6} requests {:>10.1} s",
                stage.name(),
                o.candidates.len(),
                o.requests_used,
                o.elapsed_secs()
            )?;
            if let Some(e) = &o.error {
                write!(f, "  error: {e}")?;
            }
            writeln!(f)?;
        }
        writeln!(
            f,
            "total: {} requests, {:.1} s",
            r.total_requests,
            r.total_elapsed_ms as f64 / 1000.0
        )?;
        if r.merged_candidates.is_empty() {
            return writeln!(f, "no candidates");
        }
        writeln!(f, "candidates:")?;
        for c in &r.merged_candidates {
            write!(f, "  {:>3}. {}  via ", c.rank.unwrap_or(0), c)?;
            for (i, a) in c.provenance.iter().enumerate() {
                if i > 0 {
                    f.write_str("+")?;
                }
                f.write_str(a.name())?;
            }
            if !c.sub_methods.is_empty() {
                f.write_str(" [")?;
                for (i, m) in c.sub_methods.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str(m.tag())?;
                }
                f.write_str("]")?;
            }
            for (a, s) in &c.scores {
                write!(f, " {}={:.3}", a.name(), s)?;
            }
            if c.mention_count > 0 {
                write!(f, " mentions={}", c.mention_count)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
