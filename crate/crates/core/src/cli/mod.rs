//! Command-line interface: `check`, `run` and `diagnose`.
//!
//! Exit codes: 0 when every check is verified up to the bound, 1 when any
//! is refuted, 2 when some are inconclusive and none refuted, 3 on usage,
//! configuration or input errors.

pub mod config;
pub mod session;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::diagnose::{diagnose_incompleteness, diagnose_incorrectness, Diagnosis};
use crate::engine::{answers, build_cssld_tree, build_pruned_ld_tree, build_sld_tree, SldTree};
use crate::parser::{parse_program_lenient, parse_query};
use crate::term::Program;
use crate::verify::{Report, Verdict, VerifyError, FORMAT_VERSION};
use config::{Config, Expectation};
use session::{c_rule, read_input, sld_rule, Session};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(String, String),
    #[error("{0}: {1}")]
    Parse(String, String),
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Sld,
    Ld,
    Cssld,
    PrunedLd,
}

#[derive(Debug, Parser)]
#[command(name = "lpcomplete", version, about = "Bounded correctness and completeness checks for logic programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Directory searched for configuration files given by relative path.
    #[arg(long, global = true, env = "LPCOMPLETE_CONFIG_DIR")]
    pub config_dir: Option<PathBuf>,
}

/// Bounds given on the command line; they replace configured values.
#[derive(Debug, Default, clap::Args)]
pub struct Overrides {
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Extra depth allowed for body atoms when checking coverage.
    #[arg(long, global = true)]
    pub delta: Option<usize>,
    #[arg(long, global = true)]
    pub fresh_consts: Option<usize>,
    #[arg(long, global = true)]
    pub witness_cap: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, c: &mut Config) {
        let b = &mut c.bounds;
        b.depth = self.depth.unwrap_or(b.depth);
        b.budget = self.budget.unwrap_or(b.budget);
        b.delta = self.delta.unwrap_or(b.delta);
        b.fresh_consts = self.fresh_consts.unwrap_or(b.fresh_consts);
        b.witness_cap = self.witness_cap.unwrap_or(b.witness_cap);
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the checks of a configuration and print the run manifest.
    Check {
        config: PathBuf,
        /// Also write the structured manifest to this file.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Build a tree for a query and print its answers.
    Run {
        program: PathBuf,
        query: String,
        #[arg(long, value_enum, default_value = "sld")]
        engine: Engine,
        /// Selection rule (sld: leftmost, rightmost) or c-selection rule
        /// (cssld: alternating[:i,j,..], fixed:i, first-unifiable).
        #[arg(long)]
        rule: Option<String>,
        /// Print the tree as well.
        #[arg(long)]
        tree: bool,
    },
    /// List uncovered atoms and incorrect clause instances.
    Diagnose { config: PathBuf },
}

/// Parses `args` (program name first) and runs the command, writing to
/// `out` and `err`; returns the exit code.
pub fn main_with(args: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
            } else {
                let _ = write!(out, "{}", e.render());
            }
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn resolve(path: &Path, dir: Option<&Path>) -> PathBuf {
    match dir {
        Some(d) if path.is_relative() && !path.exists() => d.join(path),
        _ => path.to_path_buf(),
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let dir = cli.config_dir.as_deref();
    match &cli.command {
        Command::Check { config, manifest } => {
            let session = Session::open(&resolve(config, dir), &cli.overrides)?;
            let (m, runs, code) = run_checks(&session)?;
            if let Some(path) = manifest {
                let text = serde_json::to_string_pretty(&m).expect("manifest serializes");
                std::fs::write(path, text + "\n").map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?;
            }
            match cli.format {
                Format::Structured => write_json(out, &m),
                Format::Text => {
                    let overall = runs.iter().fold(Verdict::VerifiedUpToBound, |v, r| v.combine(r.report.verdict));
                    write_check_text(out, &runs, overall)
                }
            }
            Ok(code)
        }
        Command::Run { program, query, engine, rule, tree } => {
            let src = read_input(program.parent().unwrap_or(Path::new(".")), &file_name(program))?;
            let sp = parse_program_lenient(&src.text).map_err(|e| CliError::Parse(src.path.clone(), e.to_string()))?;
            let q = parse_query(query).map_err(|e| CliError::Parse(query.clone(), e.to_string()))?;
            let budget = cli.overrides.budget.unwrap_or(10_000);
            let t = build_tree(&sp.program, &sp.parts, &q, *engine, rule.as_deref(), budget)?;
            write_run(out, cli.format, &t, *engine, query, *tree);
            Ok(EXIT_OK)
        }
        Command::Diagnose { config } => {
            let session = Session::open(&resolve(config, dir), &cli.overrides)?;
            let ds = run_diagnosis(&session)?;
            let clean = ds.iter().all(Diagnosis::is_empty);
            match cli.format {
                Format::Structured => {
                    let items: Vec<Value> = ds.iter().map(Diagnosis::to_json).collect();
                    write_json(out, &json!({"format_version": FORMAT_VERSION, "diagnoses": items}));
                }
                Format::Text => ds.iter().for_each(|d| {
                    let _ = write!(out, "{}", d.to_text());
                }),
            }
            Ok(if clean { EXIT_OK } else { EXIT_REFUTED })
        }
    }
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default()
}

fn build_tree(
    p: &Program,
    parts: &[(String, Vec<usize>)],
    q: &[crate::term::Atom],
    engine: Engine,
    rule: Option<&str>,
    budget: usize,
) -> Result<SldTree, CliError> {
    Ok(match engine {
        Engine::Sld => build_sld_tree(p, q, sld_rule(rule)?.as_ref(), budget),
        Engine::Ld => build_sld_tree(p, q, sld_rule(Some("leftmost"))?.as_ref(), budget),
        Engine::PrunedLd => build_pruned_ld_tree(p, q, budget),
        Engine::Cssld => {
            if parts.is_empty() {
                return Err(CliError::Config("the cssld engine needs part/2 directives in the program".into()));
            }
            let programs: Vec<Program> = parts
                .iter()
                .map(|(_, c)| Program::definite(p.select(c).expect("parts are checked by the parser").clauses().to_vec()))
                .collect();
            let r = c_rule(rule.unwrap_or("alternating"), &programs, Vec::new())?;
            build_cssld_tree(&programs, q, r.as_ref(), budget).map_err(|e| CliError::Verify(e.into()))?
        }
    })
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::VerifiedUpToBound => EXIT_OK,
        Verdict::Refuted => EXIT_REFUTED,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn expectation_met(e: Expectation, v: Verdict) -> bool {
    matches!(
        (e, v),
        (Expectation::Verified, Verdict::VerifiedUpToBound)
            | (Expectation::Refuted, Verdict::Refuted)
            | (Expectation::Inconclusive, Verdict::Inconclusive)
    )
}

pub struct CheckRun {
    pub name: String,
    pub expect: Option<Expectation>,
    pub report: Report,
}

impl CheckRun {
    pub fn as_expected(&self) -> Option<bool> {
        self.expect.map(|e| expectation_met(e, self.report.verdict))
    }
}

/// Runs every configured check and builds the manifest. The manifest holds
/// no timestamps, so equal inputs give equal manifests.
pub fn run_checks(s: &Session) -> Result<(Value, Vec<CheckRun>, i32), CliError> {
    if s.config.checks.is_empty() {
        return Err(CliError::Config("no checks configured".into()));
    }
    let mut overall = Verdict::VerifiedUpToBound;
    let mut runs = Vec::new();
    let mut checks = Vec::new();
    for (i, c) in s.config.checks.iter().enumerate() {
        let report: Report = s.run_check(c)?;
        overall = overall.combine(report.verdict);
        let name = c.name.clone().unwrap_or_else(|| format!("{}-{}", i + 1, report.check));
        let run = CheckRun { name, expect: c.expect, report };
        checks.push(json!({
            "name": run.name,
            "kind": c.kind,
            "expect": c.expect,
            "as_expected": run.as_expected(),
            "report": run.report.to_json(),
        }));
        runs.push(run);
    }
    let inputs: Vec<Value> = s.inputs.iter().map(|i| json!({"path": i.path, "sha256": i.sha256})).collect();
    let code = verdict_code(overall);
    let m = json!({
        "format_version": FORMAT_VERSION,
        "tool": {"name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION")},
        "config": s.resolved(),
        "inputs": inputs,
        "checks": checks,
        "verdict": overall,
        "exit_code": code,
    });
    Ok((m, runs, code))
}

pub fn run_diagnosis(s: &Session) -> Result<Vec<Diagnosis>, CliError> {
    let d = s.config.diagnose.as_ref().ok_or_else(|| CliError::Config("no [diagnose] section".into()))?;
    if d.compl.is_none() && d.corr.is_none() {
        return Err(CliError::Config("[diagnose] names neither compl nor corr".into()));
    }
    let ctx = s.ctx(None);
    let cap = s.config.bounds.witness_cap;
    let p = &s.loaded.program;
    let mut out = Vec::new();
    if let Some(n) = &d.compl {
        out.push(diagnose_incompleteness(p, &s.spec(n)?, &ctx, cap)?);
    }
    if let Some(n) = &d.corr {
        out.push(diagnose_incorrectness(p, &s.spec(n)?, &ctx, cap)?);
    }
    Ok(out)
}

fn write_json(out: &mut dyn Write, v: &Value) {
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json serializes"));
}

fn write_check_text(out: &mut dyn Write, runs: &[CheckRun], overall: Verdict) {
    for run in runs {
        let r = &run.report;
        let flag = if run.as_expected() == Some(false) { " (unexpected)" } else { "" };
        let _ = writeln!(out, "{}: {}{flag}", run.name, r.verdict);
        let _ = writeln!(out, "  {}", r.claim);
        if let Some(w) = &r.witness {
            let _ = writeln!(out, "  witness ({}): {w}", w.kind());
        }
        if let Some(why) = &r.reason {
            let _ = writeln!(out, "  reason: {why}");
        }
    }
    let _ = writeln!(out, "overall: {overall}");
}

fn write_run(out: &mut dyn Write, format: Format, t: &SldTree, engine: Engine, query: &str, tree: bool) {
    let ans = answers(t);
    match format {
        Format::Structured => {
            let items: Vec<Value> = ans
                .iter()
                .map(|a| json!(a.atoms.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")))
                .collect();
            let mut v = json!({
                "format_version": FORMAT_VERSION,
                "engine": format!("{engine:?}").to_lowercase(),
                "query": query,
                "answers": items,
                "finite": t.is_finite(),
                "nodes": t.nodes.len(),
            });
            if tree {
                v["tree"] = t.to_json();
            }
            write_json(out, &v);
        }
        Format::Text => {
            if ans.is_empty() {
                let _ = writeln!(out, "no answers");
            }
            for a in &ans {
                let _ = writeln!(out, "{}", a.atoms.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "));
            }
            if !t.is_finite() {
                let _ = writeln!(out, "(the tree exceeds the node budget; answers found so far)");
            }
            if tree {
                let _ = write!(out, "{}", t.dump_text());
            }
        }
    }
}
