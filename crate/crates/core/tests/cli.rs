//! End-to-end runs of the binary over the corpus bundles.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpcomplete")).args(args).output().expect("binary runs")
}

fn bundle(rel: &str) -> String {
    corpus_dir().join(rel).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("lpcomplete-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn exit_codes_follow_the_combined_verdict() {
    assert_eq!(bin(&["check", &bundle("split/split.toml")]).status.code(), Some(0));
    assert_eq!(bin(&["check", &bundle("append/append.toml")]).status.code(), Some(1));
    assert_eq!(bin(&["check", &bundle("graph/graph.toml")]).status.code(), Some(2));
}

#[test]
fn missing_spec_file_is_a_usage_error() {
    let d = scratch("missing");
    std::fs::copy(corpus_dir().join("append/append.pl"), d.join("append.pl")).unwrap();
    std::fs::write(d.join("c.toml"), "program = \"append.pl\"\nspecs = [\"absent.spec\"]\n[[checks]]\nkind = \"correctness\"\nspec = \"s\"\n").unwrap();
    let o = bin(&["check", &d.join("c.toml").display().to_string()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("absent.spec"));
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(bin(&["check"]).status.code(), Some(3));
    assert_eq!(bin(&["run", &bundle("append/append.pl"), "app(X,"]).status.code(), Some(3));
    let d = scratch("unknown-field");
    std::fs::write(d.join("c.toml"), "program = \"p.pl\"\nbogus = 1\n").unwrap();
    assert_eq!(bin(&["check", &d.join("c.toml").display().to_string()]).status.code(), Some(3));
}

#[test]
fn manifest_is_reproducible() {
    let d = scratch("manifest");
    let (m1, m2) = (d.join("m1.json"), d.join("m2.json"));
    let cfg = bundle("nop/nop.toml");
    let a = bin(&["--format", "structured", "check", &cfg, "--manifest", &m1.display().to_string()]);
    let b = bin(&["--format", "structured", "check", &cfg, "--manifest", &m2.display().to_string()]);
    assert_eq!(a.stdout, b.stdout);
    let (t1, t2) = (std::fs::read(&m1).unwrap(), std::fs::read(&m2).unwrap());
    assert_eq!(t1, t2);
    let m: Value = serde_json::from_slice(&t1).unwrap();
    assert_eq!(m["exit_code"], 1);
    assert_eq!(m["inputs"].as_array().unwrap().len(), 3);
    assert!(m["inputs"].as_array().unwrap().iter().all(|i| i["sha256"].as_str().unwrap().len() == 64));
    assert_eq!(m["config"]["bounds"]["fresh_consts"], 1);
}

#[test]
fn overrides_reach_the_resolved_config() {
    let o = bin(&["--format", "structured", "--depth", "2", "--budget", "500", "check", &bundle("append/append.toml")]);
    let m: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(m["config"]["bounds"]["depth"], 2);
    assert_eq!(m["checks"][0]["report"]["bound"]["budget"], 500);
}

#[test]
fn config_dir_resolves_relative_paths() {
    let o = Command::new(env!("CARGO_BIN_EXE_lpcomplete"))
        .args(["check", "split/split.toml"])
        .env("LPCOMPLETE_CONFIG_DIR", corpus_dir())
        .current_dir(std::env::temp_dir())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

/// Every check of every bundle reaches the verdict its config expects.
#[test]
fn bundles_meet_their_expectations() {
    let mut configs: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .flat_map(|d| std::fs::read_dir(d.unwrap().path()).unwrap())
        .map(|f| f.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    configs.sort();
    assert!(configs.len() >= 9);
    for cfg in &configs {
        let o = bin(&["--format", "structured", "check", &cfg.display().to_string()]);
        let m: Value = serde_json::from_slice(&o.stdout)
            .unwrap_or_else(|_| panic!("{}: {}", cfg.display(), String::from_utf8_lossy(&o.stderr)));
        for c in m["checks"].as_array().unwrap() {
            assert_eq!(c["as_expected"], true, "{} / {}: got {}", name(cfg), c["name"], c["report"]["verdict"]);
        }
        assert_eq!(o.status.code(), m["exit_code"].as_i64().map(|c| c as i32));
    }
}

fn name(p: &Path) -> String {
    p.file_name().unwrap().to_string_lossy().into_owned()
}

#[test]
fn run_prints_answers() {
    let o = bin(&["run", &bundle("append/append.pl"), "app(X,Y,[a])"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().collect::<Vec<_>>(), ["app([a],[],[a])", "app([],[a],[a])"]);

    let o = bin(&["run", "--engine=pruned-ld", &bundle("nop/nop.pl"), "nop(adam,Y)"]);
    assert_eq!(stdout(&o).trim(), "nop(adam,0)");

    let o = bin(&["run", "--engine=cssld", "--rule=alternating", &bundle("ex4-split/ex4.pl"), "q(s(s(s(0))))"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "no answers");
}

#[test]
fn run_structured_includes_the_tree() {
    let o = bin(&["--format=structured", "run", "--tree", &bundle("append/append.pl"), "app(X,Y,[a])"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["answers"].as_array().unwrap().len(), 2);
    assert_eq!(v["finite"], true);
    assert!(v["tree"].is_object());
}

#[test]
fn diagnose_lists_culprits() {
    let o = bin(&["--format=structured", "diagnose", &bundle("included/included.toml")]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let ds = v["diagnoses"].as_array().unwrap();
    assert_eq!(ds.len(), 2);
    assert_eq!(ds[0]["kind"], "incompleteness");
    assert!(ds[0]["culprits"].as_object().unwrap().is_empty());
    assert_eq!(ds[1]["kind"], "incorrectness");
    assert!(ds[1]["culprits"]["included/2"].is_array());

    let o = bin(&["diagnose", &bundle("split/split.toml")]);
    assert_eq!(o.status.code(), Some(3));
}
