//! A loaded configuration: sources, universe, named specifications,
//! mappings, call-success specifications and splits, and the dispatch of
//! configured checks onto the verifier.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::config::{CheckConfig, CheckKind, Config, EvidenceKind};
use super::{CliError, Overrides};
use crate::engine::{
    build_cssld_tree, build_pruned_ld_tree, build_sld_tree, AlternatingRule, CSelectionRule, Choice, FirstUnifiableRule,
    FixedRule, Leftmost, Rightmost, SelectionRule, SldTree, TableRule,
};
use crate::level::LevelMapping;
use crate::load::{load, Loaded};
use crate::parser::{parse_atom, parse_callsucc, parse_level_mapping, parse_query, parse_term};
use crate::spec::callsucc::CallSuccessSpec;
use crate::spec::Spec;
use crate::term::{Atom, Program, Term};
use crate::verify::{self, Bounds, CsEvidence, Ctx, Evidence, Report, Split};

/// An input file with the digest of its contents.
pub struct Input {
    /// As written in the configuration.
    pub path: String,
    pub sha256: String,
    pub text: String,
}

pub fn read_input(base: &Path, rel: &str) -> Result<Input, CliError> {
    let p = base.join(rel);
    let text = std::fs::read_to_string(&p).map_err(|e| CliError::Io(p.display().to_string(), e.to_string()))?;
    Ok(Input { path: rel.to_string(), sha256: hex::encode(Sha256::digest(text.as_bytes())), text })
}

pub struct Session {
    pub config: Config,
    pub inputs: Vec<Input>,
    pub loaded: Loaded,
    pub mappings: BTreeMap<String, LevelMapping>,
    pub callsucc: BTreeMap<String, CallSuccessSpec>,
    pub splits: BTreeMap<String, Split>,
    pub bounds: Bounds,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl Session {
    /// Reads the configuration at `path` and everything it names; the
    /// overrides replace configured bounds.
    pub fn open(path: &Path, overrides: &Overrides) -> Result<Session, CliError> {
        let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        let cfg_input = read_input(&base, &file_name(path))?;
        let mut config: Config =
            toml::from_str(&cfg_input.text).map_err(|e| CliError::Parse(cfg_input.path.clone(), e.to_string()))?;
        overrides.apply(&mut config);
        let mut inputs = vec![cfg_input];
        let program = read_input(&base, &config.program)?;
        let mut spec_text = String::new();
        let mut spec_inputs = Vec::new();
        for s in &config.specs {
            let i = read_input(&base, s)?;
            spec_text.push_str(&i.text);
            spec_text.push('\n');
            spec_inputs.push(i);
        }
        let mut mappings = BTreeMap::new();
        let mut lm_inputs = Vec::new();
        for (name, f) in &config.mappings {
            let i = read_input(&base, f)?;
            let lm = parse_level_mapping(&i.text).map_err(|e| CliError::Parse(f.clone(), e.to_string()))?;
            mappings.insert(name.clone(), lm);
            lm_inputs.push(i);
        }
        let mut callsucc = BTreeMap::new();
        let mut cs_inputs = Vec::new();
        let mut extras: Vec<Term> = Vec::new();
        for (name, f) in &config.callsucc {
            let i = read_input(&base, f)?;
            let cs = parse_callsucc(&i.text).map_err(|e| CliError::Parse(f.clone(), e.to_string()))?;
            for p in cs.pre.iter().chain(&cs.post) {
                extras.extend(p.pattern.args.iter().cloned());
            }
            callsucc.insert(name.clone(), cs);
            cs_inputs.push(i);
        }
        for t in &config.signature {
            extras.push(parse_term(t).map_err(|e| CliError::Parse("signature".into(), e.to_string()))?);
        }
        let b = &config.bounds;
        if b.depth == 0 || b.budget == 0 || b.witness_cap == 0 {
            return Err(config_err("depth, budget and witness_cap must be positive"));
        }
        let loaded = load(&program.text, &spec_text, &extras, b.fresh_consts).map_err(|e| match e {
            crate::load::LoadError::Program(e) => CliError::Parse(config.program.clone(), e.to_string()),
            e => CliError::Parse(config.specs.join(", "), e.to_string()),
        })?;
        inputs.push(program);
        inputs.extend(spec_inputs);
        inputs.extend(lm_inputs);
        inputs.extend(cs_inputs);
        let bounds = Bounds { depth: b.depth, delta: b.delta, budget: b.budget };
        let mut s = Session { config, inputs, loaded, mappings, callsucc, splits: BTreeMap::new(), bounds };
        s.build_splits()?;
        Ok(s)
    }

    fn build_splits(&mut self) -> Result<(), CliError> {
        for sc in &self.config.splits {
            let mut parts = Vec::new();
            for pc in &sc.parts {
                let clauses = match &pc.clauses {
                    Some(c) => c.clone(),
                    None => self
                        .loaded
                        .parts
                        .iter()
                        .find(|(n, _)| *n == pc.name)
                        .map(|(_, c)| c.clone())
                        .ok_or_else(|| config_err(format!("part {} has no clauses and no part/2 directive", pc.name)))?,
                };
                parts.push((pc.name.clone(), clauses, self.spec(&pc.spec)?));
            }
            let s = sc.spec.as_deref().map(|n| self.spec(n)).transpose()?;
            let split = Split::new(&self.loaded.program, parts, s).map_err(|e| config_err(e.to_string()))?;
            self.splits.insert(sc.name.clone(), split);
        }
        Ok(())
    }

    pub fn spec(&self, name: &str) -> Result<Spec, CliError> {
        self.loaded.specs.get(name).cloned().map_err(|e| config_err(e.to_string()))
    }

    pub fn ctx(&self, depth: Option<usize>) -> Ctx {
        let c = Ctx::new(self.loaded.universe.clone(), self.bounds.clone());
        match depth {
            Some(d) => c.with_depth(d),
            None => c,
        }
    }

    /// Resolved configuration as recorded in the manifest.
    pub fn resolved(&self) -> Value {
        let mut cfg = serde_json::to_value(&self.config).expect("config serializes");
        cfg["bounds"]["depth"] = json!(self.bounds.depth);
        cfg["bounds"]["delta"] = json!(self.bounds.delta);
        cfg["bounds"]["budget"] = json!(self.bounds.budget);
        cfg
    }

    pub fn run_check(&self, c: &CheckConfig) -> Result<Report, CliError> {
        let ctx = self.ctx(c.depth);
        let p = match &c.clauses {
            Some(cl) => self
                .loaded
                .program
                .select(cl)
                .ok_or_else(|| config_err(format!("clause list {cl:?} is out of range")))?,
            None => self.loaded.program.clone(),
        };
        let need = |v: &Option<String>, what: &str| {
            v.clone().ok_or_else(|| config_err(format!("{:?} check needs `{what}`", c.kind)))
        };
        let spec = || self.spec(&need(&c.spec, "spec")?);
        let mapping = || -> Result<&LevelMapping, CliError> {
            let n = need(&c.mapping, "mapping")?;
            self.mappings.get(&n).ok_or_else(|| config_err(format!("unknown mapping {n}")))
        };
        let cs = || -> Result<&CallSuccessSpec, CliError> {
            let n = need(&c.callsucc, "callsucc")?;
            self.callsucc.get(&n).ok_or_else(|| config_err(format!("unknown call-success specification {n}")))
        };
        let split = || -> Result<&Split, CliError> {
            let n = need(&c.split, "split")?;
            self.splits.get(&n).ok_or_else(|| config_err(format!("unknown split {n}")))
        };
        let atoms = || -> Result<Vec<Atom>, CliError> {
            c.queries.iter().map(|q| parse_atom(q).map_err(|e| CliError::Parse(q.clone(), e.to_string()))).collect()
        };
        let v = |r: Result<Report, verify::VerifyError>| r.map_err(CliError::Verify);
        use CheckKind::*;
        match c.kind {
            Correctness => v(verify::check_correctness(&p, &spec()?, &ctx)),
            Covered => v(verify::check_covered(&p, &spec()?, &ctx)),
            SemiCompleteness => v(verify::check_semi_completeness(&p, &spec()?, &ctx)),
            LeastModel => v(verify::check_least_model(&p, &spec()?, &ctx)),
            RecurrentlyCovered => v(verify::check_recurrently_covered(&p, &spec()?, mapping()?, &ctx)),
            Recurrent => v(verify::check_recurrent(&p, mapping()?, &ctx)),
            Acceptable => v(verify::check_acceptable(&p, mapping()?, &self.spec(&need(&c.prefix_spec, "prefix_spec")?)?, &ctx)),
            SpecInclusion => v(verify::check_spec_inclusion(&spec()?, &self.spec(&need(&c.support, "support")?)?, &ctx)),
            Completeness => {
                let s = spec()?;
                let prefix;
                let rule = Leftmost;
                let queries = atoms()?;
                let ev = match c.evidence.unwrap_or(EvidenceKind::FiniteTrees) {
                    EvidenceKind::FiniteTrees | EvidenceKind::FiniteTree => Evidence::FiniteTrees { queries, rule: &rule },
                    EvidenceKind::Recurrent => Evidence::Recurrent(mapping()?),
                    EvidenceKind::Acceptable => {
                        prefix = self.spec(&need(&c.prefix_spec, "prefix_spec")?)?;
                        Evidence::Acceptable(mapping()?, &prefix)
                    }
                };
                match &c.support {
                    Some(sup) => v(verify::check_completeness_via(&p, &s, &self.spec(sup)?, &ev, &ctx)),
                    None => v(verify::check_completeness(&p, &s, &ev, &ctx)),
                }
            }
            Suitable => {
                let sp = split()?;
                let i = c.part.filter(|&i| i >= 1 && i <= sp.parts.len()).ok_or_else(|| config_err("suitable check needs a valid `part`"))?;
                let a = parse_atom(&need(&c.atom, "atom")?).map_err(|e| CliError::Parse("atom".into(), e.to_string()))?;
                v(verify::check_suitable(sp, &a, i - 1, &ctx))
            }
            CssldCompleteness => {
                let sp = split()?;
                let rule = self.c_rule(c, sp)?;
                let prefix;
                let ev = match c.evidence.unwrap_or(EvidenceKind::FiniteTree) {
                    EvidenceKind::FiniteTrees | EvidenceKind::FiniteTree => CsEvidence::FiniteTree,
                    EvidenceKind::Recurrent => CsEvidence::Recurrent(mapping()?),
                    EvidenceKind::Acceptable => {
                        prefix = self.spec(&need(&c.prefix_spec, "prefix_spec")?)?;
                        CsEvidence::Acceptable(mapping()?, &prefix)
                    }
                };
                let mut r = Report::new("cssld_completeness", format!("csSLD-trees via {} are complete", rule.name()), &ctx.bounds);
                for q in self.queries(c)? {
                    let t = build_cssld_tree(&sp.programs(), &q, rule.as_ref(), ctx.bounds.budget)
                        .map_err(|e| CliError::Verify(e.into()))?;
                    r.absorb(v(verify::check_cssld_completeness(&self.loaded.program, sp, &t, &ev, &ctx))?);
                }
                Ok(r)
            }
            AdjustablyCovered => match &c.atom {
                Some(a) => {
                    let a = parse_atom(a).map_err(|e| CliError::Parse("atom".into(), e.to_string()))?;
                    v(verify::check_atom_adjustably_covered(&p, &spec()?, cs()?, &a, &ctx))
                }
                None => v(verify::check_adjustably_covered(&p, &spec()?, cs()?, &ctx)),
            },
            CsRuntime => v(verify::check_cs_correct_runtime(&p, cs()?, &atoms()?, &ctx)),
            CutCompleteness => v(verify::check_cut_completeness(&p, &spec()?, cs()?, &atoms()?, &ctx)),
            TreeComplete => {
                let s = spec()?;
                let mut r = Report::new("tree_complete", format!("the trees are complete w.r.t. {}", s.name()), &ctx.bounds);
                for q in self.queries(c)? {
                    let t = self.tree(c, &p, &q, &ctx)?;
                    r.absorb(v(verify::tree_complete_wrt(&t, &s, &ctx))?);
                }
                Ok(r)
            }
        }
    }

    fn queries(&self, c: &CheckConfig) -> Result<Vec<Vec<Atom>>, CliError> {
        if c.queries.is_empty() {
            return Err(config_err(format!("{:?} check needs `queries`", c.kind)));
        }
        c.queries.iter().map(|q| parse_query(q).map_err(|e| CliError::Parse(q.clone(), e.to_string()))).collect()
    }

    fn tree(&self, c: &CheckConfig, p: &Program, q: &[Atom], ctx: &Ctx) -> Result<SldTree, CliError> {
        let budget = ctx.bounds.budget;
        match c.engine.as_deref().unwrap_or("sld") {
            "sld" => Ok(build_sld_tree(p, q, sld_rule(c.rule.as_deref())?.as_ref(), budget)),
            "ld" => Ok(build_sld_tree(p, q, &Leftmost, budget)),
            "pruned-ld" => Ok(build_pruned_ld_tree(p, q, budget)),
            "cssld" => {
                let n = c.split.clone().ok_or_else(|| config_err("the cssld engine needs `split`"))?;
                let sp = self.splits.get(&n).ok_or_else(|| config_err(format!("unknown split {n}")))?;
                build_cssld_tree(&sp.programs(), q, self.c_rule(c, sp)?.as_ref(), budget).map_err(|e| CliError::Verify(e.into()))
            }
            other => Err(config_err(format!("unknown engine {other}"))),
        }
    }

    fn c_rule(&self, c: &CheckConfig, sp: &Split) -> Result<Box<dyn CSelectionRule>, CliError> {
        let table = c
            .table
            .iter()
            .map(|(pat, i)| {
                let a = parse_atom(pat).map_err(|e| CliError::Parse(pat.clone(), e.to_string()))?;
                Ok((a, part_choice(*i, sp.parts.len())?))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        c_rule(c.rule.as_deref().unwrap_or("alternating"), &sp.programs(), table)
    }
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default()
}

fn part_choice(i: usize, n: usize) -> Result<Choice, CliError> {
    match i {
        0 => Ok(Choice::Empty),
        i if i <= n => Ok(Choice::Part(i - 1)),
        i => Err(config_err(format!("part {i} is beyond the {n} parts of the split"))),
    }
}

pub fn sld_rule(name: Option<&str>) -> Result<Box<dyn SelectionRule>, CliError> {
    match name.unwrap_or("leftmost") {
        "leftmost" => Ok(Box::new(Leftmost)),
        "rightmost" => Ok(Box::new(Rightmost)),
        other => Err(config_err(format!("unknown selection rule {other}"))),
    }
}

/// `alternating[:i,j,...]`, `fixed:i`, `first-unifiable` or `table`; part
/// numbers are 1-based.
pub fn c_rule(name: &str, programs: &[Program], table: Vec<(Atom, Choice)>) -> Result<Box<dyn CSelectionRule>, CliError> {
    let n = programs.len();
    let (head, arg) = name.split_once(':').map_or((name, None), |(h, a)| (h, Some(a)));
    let nums = |a: &str| -> Result<Vec<usize>, CliError> {
        a.split(',')
            .map(|x| match x.trim().parse::<usize>() {
                Ok(i) if (1..=n).contains(&i) => Ok(i - 1),
                _ => Err(config_err(format!("bad part number {x:?} in rule {name}"))),
            })
            .collect()
    };
    match (head, arg) {
        ("alternating", None) => Ok(Box::new(AlternatingRule((0..n).collect()))),
        ("alternating", Some(a)) => Ok(Box::new(AlternatingRule(nums(a)?))),
        ("fixed", Some(a)) => match nums(a)?.as_slice() {
            [i] => Ok(Box::new(FixedRule(*i))),
            _ => Err(config_err("fixed takes one part number")),
        },
        ("first-unifiable", None) => Ok(Box::new(FirstUnifiableRule(programs.to_vec()))),
        ("table", None) => Ok(Box::new(TableRule { entries: table, default: Choice::Empty })),
        _ => Err(config_err(format!("unknown c-selection rule {name}"))),
    }
}
