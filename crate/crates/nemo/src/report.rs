//! Text renderings of evaluation reports: one JSON document, an aligned
//! table for people, and CSV.

use std::fmt::Write as _;

use nemo_core::evaluation::{AlgorithmStats, Buckets, EvalReport, INTEGRATED};
use nemo_core::Algorithm;

/// Row order: the four algorithms in their default order, then the
/// integrated system.
fn ordered(r: &EvalReport) -> Vec<(&str, &AlgorithmStats)> {
    Algorithm::ALL
        .iter()
        .map(|a| a.name())
        .chain([INTEGRATED])
        .filter_map(|n| r.algorithms.get(n).map(|s| (n, s)))
        .collect()
}

pub fn to_json(r: &EvalReport) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serializes");
    s.push('\n');
    s
}

fn pct(x: f64) -> String {
    format!("{:.1}%", 100.0 * x)
}

fn histogram(out: &mut String, title: &str, rows: &[(&str, &Buckets)]) {
    let Some((_, first)) = rows.first() else { return };
    let _ = writeln!(out, "\n{title}");
    let _ = write!(out, "  {:<14}", "");
    for i in 0..first.bounds.len() {
        let _ = write!(out, "{:>9}", first.label(i));
    }
    out.push('\n');
    for (name, b) in rows {
        let _ = write!(out, "  {name:<14}");
        for c in &b.counts {
            let _ = write!(out, "{c:>9}");
        }
        out.push('\n');
    }
}

pub fn to_table(r: &EvalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "corpus {}  queried {}", r.corpus_id, r.queried);
    let _ = writeln!(
        out,
        "\n  {:<14}{:>11}{:>10}{:>11}{:>11}{:>9}{:>12}{:>11}",
        "algorithm", "identified", "accuracy", "confirmed", "requests", "errors", "mean time", "max rank"
    );
    let rows = ordered(r);
    for (name, s) in &rows {
        let _ = writeln!(
            out,
            "  {:<14}{:>11}{:>10}{:>11}{:>11}{:>9}{:>11.1}s{:>11}",
            name,
            s.identified,
            pct(s.accuracy),
            s.confirmed,
            s.total_requests,
            s.errors,
            s.mean_elapsed_secs(),
            s.max_rank.map_or("-".into(), |r| r.to_string()),
        );
    }
    let pick = |f: fn(&AlgorithmStats) -> &Buckets| -> Vec<(&str, &Buckets)> {
        rows.iter().map(|(n, s)| (*n, f(s))).collect()
    };
    histogram(&mut out, "candidate set size", &pick(|s| &s.candidate_sizes));
    histogram(&mut out, "rank of correct identity", &pick(|s| &s.ranks));
    histogram(&mut out, "search time (simulated s)", &pick(|s| &s.search_seconds));

    if let Some(t) = &r.sub_methods {
        let _ = writeln!(out, "\nprofile sub-methods");
        for (label, n) in t.rows() {
            let _ = writeln!(out, "  {label:<16}{n:>6}  {:>6}", pct(n as f64 / r.queried.max(1) as f64));
        }
    }
    if let Some(k) = &r.profile_ranking {
        let _ = writeln!(out, "\nprofile ranking ({} identified)", k.identified);
        let _ = writeln!(out, "  {:<10}{:>8}{:>8}{:>11}", "", "top-5", "top-10", "mean rank");
        let _ = writeln!(
            out,
            "  {:<10}{:>8}{:>8}{:>11.2}",
            "ranked", k.ranked_top5, k.ranked_top10, k.mean_rank_ranked
        );
        let _ = writeln!(
            out,
            "  {:<10}{:>8}{:>8}{:>11.2}",
            "unranked", k.unranked_top5, k.unranked_top10, k.mean_rank_unranked
        );
    }
    if !r.domains.is_empty() {
        let _ = writeln!(out, "\nnetworks linked in posts");
        for d in &r.domains {
            let _ = writeln!(out, "  {:<14}{:>6}{:>8.1}%", d.domain, d.users, d.percent);
        }
    }
    out
}

/// Long format: `section,name,metric,value`.
pub fn to_csv(r: &EvalReport) -> String {
    let mut out = String::from("section,name,metric,value\n");
    let mut row = |section: &str, name: &str, metric: &str, value: String| {
        let _ = writeln!(out, "{section},{name},{metric},{value}");
    };
    row("corpus", &r.corpus_id, "queried", r.queried.to_string());
    for (name, s) in ordered(r) {
        row("algorithm", name, "identified", s.identified.to_string());
        row("algorithm", name, "accuracy", s.accuracy.to_string());
        row("algorithm", name, "confirmed", s.confirmed.to_string());
        row("algorithm", name, "confirmed_correct", s.confirmed_correct.to_string());
        row("algorithm", name, "errors", s.errors.to_string());
        row("algorithm", name, "requests", s.total_requests.to_string());
        row("algorithm", name, "elapsed_ms", s.total_elapsed_ms.to_string());
        for (tag, b) in [("size", &s.candidate_sizes), ("rank", &s.ranks), ("seconds", &s.search_seconds)] {
            for (i, c) in b.counts.iter().enumerate() {
                row("histogram", name, &format!("{tag}:{}", b.label(i)), c.to_string());
            }
        }
    }
    if let Some(t) = &r.sub_methods {
        for (label, n) in t.rows() {
            row("sub_method", &label.replace(' ', ""), "users", n.to_string());
        }
    }
    if let Some(k) = &r.profile_ranking {
        row("ranking", "ranked", "mean_rank", k.mean_rank_ranked.to_string());
        row("ranking", "unranked", "mean_rank", k.mean_rank_unranked.to_string());
        row("ranking", "ranked", "top10", k.ranked_top10.to_string());
        row("ranking", "unranked", "top5", k.unranked_top5.to_string());
    }
    for d in &r.domains {
        row("domain", &d.domain, "users", d.users.to_string());
        row("domain", &d.domain, "percent", d.percent.to_string());
    }
    out
}
