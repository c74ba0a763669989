use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use nemo::corpus::Corpus;
use nemo::fixture::FixtureIndex;
use nemo::generate::{generate_to, CorpusConfig, Preset};
use nemo::report;
use nemo::runner::{evaluate, find_nemo_concurrent, EvalOptions};
use nemo_core::evaluation::AlgorithmSelector;
use nemo_core::orchestrator::explain;
use nemo_core::{find_nemo, Algorithm, Error, OrchestrationPolicy, RateLimitPolicy, SearchSuite};

/// Finds the accounts a user holds on a target network, given their
/// account on a source network, over a corpus on disk.
#[derive(Parser)]
#[command(name = "nemo", version)]
struct Cli {
    /// More logging on stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic corpus.
    Generate(GenerateArgs),
    /// Search one source user and explain the result.
    Search(SearchArgs),
    /// Evaluate every ground-truth pair of a corpus.
    Eval(EvalArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "paper", conflicts_with = "config")]
    preset: Preset,
    /// JSON corpus config, instead of a preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Args)]
struct PolicyArgs {
    /// Comma-separated algorithm order.
    #[arg(long, default_value = "profile,self-mention,content,network")]
    order: String,
    /// Run every stage even after a confirmation.
    #[arg(long)]
    no_early_exit: bool,
    /// Request budget as REQUESTS/WINDOW, window in ms, s, m or h
    /// (bare numbers are seconds).
    #[arg(long, default_value = "350/1h")]
    rate_limit: String,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Source-network user id.
    user_id: String,
    #[command(flatten)]
    policy: PolicyArgs,
    /// Run the four algorithms at once and integrate in completion order.
    #[arg(long)]
    concurrent: bool,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// `all`, `integrated`, or one algorithm name.
    #[arg(long, default_value = "all")]
    algorithm: String,
    #[command(flatten)]
    policy: PolicyArgs,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
    Csv,
}

/// Exit 2: the input is at fault. Everything else exits 1.
#[derive(Debug)]
struct BadInput(String);

impl std::fmt::Display for BadInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for BadInput {}

fn bad(msg: impl Into<String>) -> anyhow::Error {
    BadInput(msg.into()).into()
}

fn parse_window(s: &str) -> Option<u64> {
    let s = s.trim();
    let (num, unit) = match s.find(|c: char| !c.is_ascii_digit()) {
        Some(i) => s.split_at(i),
        None => (s, "s"),
    };
    let n: u64 = num.parse().ok()?;
    let scale = match unit {
        "ms" => 1,
        "s" => 1_000,
        "m" => 60_000,
        "h" => 3_600_000,
        _ => return None,
    };
    n.checked_mul(scale)
}

impl PolicyArgs {
    fn policy(&self) -> anyhow::Result<OrchestrationPolicy> {
        let order = self
            .order
            .split(',')
            .map(|s| Algorithm::parse(s).ok_or_else(|| bad(format!("unknown algorithm {s:?} in --order"))))
            .collect::<anyhow::Result<Vec<_>>>()?;
        OrchestrationPolicy::new(order, !self.no_early_exit).map_err(|e| bad(e.to_string()))
    }

    fn rate_limit(&self) -> anyhow::Result<RateLimitPolicy> {
        let err = || bad(format!("--rate-limit {:?} is not REQUESTS/WINDOW", self.rate_limit));
        let (r, w) = self.rate_limit.split_once('/').ok_or_else(err)?;
        let r: u32 = r.trim().parse().map_err(|_| err())?;
        let w = parse_window(w).ok_or_else(err)?;
        RateLimitPolicy::new(r, w).map_err(|e| bad(e.to_string()))
    }
}

fn load(dir: &Path) -> anyhow::Result<FixtureIndex> {
    if !dir.is_dir() {
        return Err(bad(format!("corpus directory {} does not exist", dir.display())));
    }
    let corpus = Corpus::load(dir).map_err(|e| bad(format!("cannot load corpus {}: {e}", dir.display())))?;
    Ok(FixtureIndex::new(corpus))
}

fn core_error(e: Error) -> anyhow::Error {
    match e {
        Error::NotFound(_) | Error::InvalidInput(_) | Error::Config(_) => bad(e.to_string()),
        e => anyhow::Error::new(e),
    }
}

fn cmd_generate(a: GenerateArgs) -> anyhow::Result<String> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| bad(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str::<CorpusConfig>(&text).map_err(|e| bad(format!("bad config {}: {e}", p.display())))?
        }
        None => a.preset.config(),
    };
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    cfg.validate().map_err(|e| bad(e.to_string()))?;
    let (corpus, audit) = generate_to(&cfg, &a.out).with_context(|| format!("generating into {}", a.out.display()))?;
    let manifest = corpus.manifest();
    Ok(match a.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&manifest)?;
            s.push('\n');
            s
        }
        _ => {
            let mut s = format!(
                "corpus {} written to {}\n{} pairs, {} identities, {} posts, {} edges, {} pages, {} images\n",
                manifest.corpus_id,
                a.out.display(),
                corpus.groundtruth.len(),
                corpus.identities.len(),
                corpus.posts.len(),
                corpus.edges.len(),
                corpus.pages.len(),
                corpus.images.len(),
            );
            for (k, v) in &manifest.planted {
                s.push_str(&format!("  {k:<22}{v:>6}\n"));
            }
            s.push_str(&format!("audit: {}\n", if audit.is_clean() { "clean".into() } else { audit.summary() }));
            s
        }
    })
}

fn cmd_search(a: SearchArgs) -> anyhow::Result<String> {
    let policy = a.policy.policy()?;
    let limit = a.policy.rate_limit()?;
    if a.format == Format::Csv {
        return Err(bad("search output is json or table"));
    }
    let ix = load(&a.corpus)?;
    let id = a.user_id.strip_prefix("source:").unwrap_or(&a.user_id);
    let nemo = ix.corpus().source_ref(id);
    let suite = SearchSuite::default();
    let session = ix.session(limit);
    let result = if a.concurrent {
        find_nemo_concurrent(&session, &suite, &nemo, &policy)
    } else {
        find_nemo(&session, &suite, &nemo, &policy)
    }
    .map_err(core_error)?;
    Ok(match a.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&result)?;
            s.push('\n');
            s
        }
        _ => explain(&result).to_string(),
    })
}

fn cmd_eval(a: EvalArgs) -> anyhow::Result<String> {
    let which = AlgorithmSelector::parse(&a.algorithm)
        .ok_or_else(|| bad(format!("unknown --algorithm {:?}", a.algorithm)))?;
    if a.jobs == 0 {
        return Err(bad("--jobs must be at least 1"));
    }
    let opts = EvalOptions {
        suite: SearchSuite::default(),
        policy: a.policy.policy()?,
        which,
        rate_limit: a.policy.rate_limit()?,
        jobs: a.jobs,
    };
    let ix = load(&a.corpus)?;
    let r = evaluate(&ix, &opts).map_err(core_error)?;
    if let Some(p) = &a.out {
        fs::write(p, report::to_json(&r)).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(match a.format {
        Format::Json => report::to_json(&r),
        Format::Table => report::to_table(&r),
        Format::Csv => report::to_csv(&r),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();
    let out = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Search(a) => cmd_search(a),
        Command::Eval(a) => cmd_eval(a),
    };
    match out {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<BadInput>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows() {
        assert_eq!(parse_window("3600"), Some(3_600_000));
        assert_eq!(parse_window("1h"), Some(3_600_000));
        assert_eq!(parse_window("90m"), Some(5_400_000));
        assert_eq!(parse_window("250ms"), Some(250));
        assert_eq!(parse_window("1d"), None);
        assert_eq!(parse_window("h"), None);
    }
}
