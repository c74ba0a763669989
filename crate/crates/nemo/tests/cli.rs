use std::path::Path;
use std::process::{Command, Output};

use nemo::corpus::Corpus;
use nemo::generate::{generate_to, labels, CorpusConfig, Preset};

fn nemo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nemo")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn small(dir: &Path) -> Corpus {
    let cfg = CorpusConfig { n_users: 40, seed: 11, ..Preset::Dense.config() };
    generate_to(&cfg, dir).unwrap().0
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_writes_a_loadable_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let o = nemo(&["generate", "--preset", "sparse", "--seed", "3", "--out", arg(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("audit: clean"));
    let c = Corpus::load(&out).unwrap();
    assert!(!c.groundtruth.is_empty());
}

#[test]
fn missing_out_is_a_usage_error() {
    assert_eq!(nemo(&["generate", "--preset", "paper"]).status.code(), Some(2));
}

#[test]
fn bad_config_and_flags_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n_users": 0}"#).unwrap();
    let o = nemo(&["generate", "--config", arg(&cfg), "--out", arg(&dir.path().join("x"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));

    let corpus = dir.path().join("c");
    small(&corpus);
    for extra in [["--rate-limit", "many/1h"], ["--order", "profile,bogus"], ["--algorithm", "bogus"]] {
        let mut a = vec!["eval", "--corpus", arg(&corpus)];
        a.extend(extra);
        assert_eq!(nemo(&a).status.code(), Some(2), "{extra:?}");
    }
}

#[test]
fn search_explains_a_self_identified_user() {
    let dir = tempfile::tempdir().unwrap();
    let c = small(dir.path());
    let g = c
        .groundtruth
        .iter()
        .find(|g| g.leak_labels.contains(labels::URL_DIRECT))
        .expect("dense corpus has direct self-identification");
    let o = nemo(&["search", "--corpus", arg(dir.path()), &g.source_id]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("self-identification"), "{text}");
    assert!(text.contains(&g.target_id), "{text}");

    let again = nemo(&["search", "--corpus", arg(dir.path()), &g.source_id]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn search_without_early_exit_runs_every_stage() {
    let dir = tempfile::tempdir().unwrap();
    let c = small(dir.path());
    let id = &c.groundtruth[0].source_id;
    let o = nemo(&["search", "--corpus", arg(dir.path()), id, "--no-early-exit", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["stages"].as_array().unwrap().len(), 4);
}

#[test]
fn unknown_user_and_missing_corpus_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    small(dir.path());
    assert_eq!(nemo(&["search", "--corpus", arg(dir.path()), "nobody-here"]).status.code(), Some(2));
    let missing = dir.path().join("missing");
    assert_eq!(nemo(&["eval", "--corpus", arg(&missing)]).status.code(), Some(2));
}

#[test]
fn single_algorithm_eval_reports_only_that_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    small(dir.path());
    let o = nemo(&["eval", "--corpus", arg(dir.path()), "--algorithm", "profile", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&String> = v["algorithms"].as_object().unwrap().keys().collect();
    assert_eq!(names, ["profile"]);
}

#[test]
fn eval_writes_json_alongside_csv() {
    let dir = tempfile::tempdir().unwrap();
    small(dir.path().join("c").as_path());
    let json = dir.path().join("r.json");
    let o = nemo(&["eval", "--corpus", arg(&dir.path().join("c")), "--format", "csv", "--jobs", "3", "--out", arg(&json)]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("section,name,metric,value\n"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(v["algorithms"]["integrated"]["identified"].as_u64().unwrap() > 0);
}

#[test]
fn leak_free_corpus_scores_zero_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    generate_to(&CorpusConfig::zero(25, 5), dir.path()).unwrap();
    let o = nemo(&["eval", "--corpus", arg(dir.path()), "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for (name, s) in v["algorithms"].as_object().unwrap() {
        assert_eq!(s["identified"], 0, "{name}");
        assert_eq!(s["accuracy"].as_f64(), Some(0.0), "{name}");
    }
}
