//! Incompleteness and incorrectness diagnosis: every uncovered atom, and
//! every clause instance violating the correctness condition, up to a cap.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde_json::{json, Value};

use crate::spec::Spec;
use crate::term::Atom;
use crate::verify::{incorrect_instances, uncovered_atoms, Bounds, Counterexample, Ctx, Stats, VerifyError, FORMAT_VERSION};

pub const DEFAULT_WITNESS_CAP: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosisKind {
    Incompleteness,
    Incorrectness,
}

/// Where a fix is suggested: a procedure and, for incorrectness, the
/// (1-based) clause whose instance is wrong.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Locus {
    pub procedure: String,
    pub clause: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Culprit {
    pub witness: Counterexample,
    pub locus: Locus,
}

#[derive(Clone, Debug)]
pub struct Diagnosis {
    pub kind: DiagnosisKind,
    pub spec: String,
    /// Culprits grouped by procedure, in enumeration order within a group.
    pub culprits: BTreeMap<String, Vec<Culprit>>,
    /// Atoms whose coverage could not be decided at the bound.
    pub undetermined: Vec<(Atom, String)>,
    /// The cap was reached, so further culprits may exist.
    pub truncated: bool,
    pub bound: Bounds,
    pub stats: Stats,
}

fn procedure(a: &Atom) -> String {
    format!("{}/{}", a.pred.as_str(), a.args.len())
}

impl Diagnosis {
    fn new(kind: DiagnosisKind, s: &Spec, ctx: &Ctx) -> Diagnosis {
        Diagnosis {
            kind,
            spec: s.name().to_string(),
            culprits: BTreeMap::new(),
            undetermined: Vec::new(),
            truncated: false,
            bound: ctx.bounds.clone(),
            stats: Stats::default(),
        }
    }

    fn push(&mut self, c: Culprit) {
        self.culprits.entry(c.locus.procedure.clone()).or_default().push(c);
    }

    pub fn len(&self) -> usize {
        self.culprits.values().map(Vec::len).sum()
    }

    /// No culprits and nothing left undecided.
    pub fn is_empty(&self) -> bool {
        self.culprits.is_empty() && self.undetermined.is_empty()
    }

    pub fn all(&self) -> impl Iterator<Item = &Culprit> {
        self.culprits.values().flatten()
    }

    pub fn to_json(&self) -> Value {
        let groups: serde_json::Map<String, Value> = self
            .culprits
            .iter()
            .map(|(k, cs)| {
                let items: Vec<Value> = cs
                    .iter()
                    .map(|c| json!({"witness": c.witness.to_json(), "locus": {"procedure": c.locus.procedure, "clause": c.locus.clause}}))
                    .collect();
                (k.clone(), Value::Array(items))
            })
            .collect();
        let undetermined: Vec<Value> =
            self.undetermined.iter().map(|(a, why)| json!({"atom": a.to_string(), "reason": why})).collect();
        json!({
            "format_version": FORMAT_VERSION,
            "kind": self.kind,
            "spec": self.spec,
            "count": self.len(),
            "truncated": self.truncated,
            "culprits": groups,
            "undetermined": undetermined,
            "bound": self.bound,
            "stats": self.stats,
        })
    }

    pub fn to_text(&self) -> String {
        let what = match self.kind {
            DiagnosisKind::Incompleteness => "uncovered atoms",
            DiagnosisKind::Incorrectness => "incorrect clause instances",
        };
        let mut out = String::new();
        let more = if self.truncated { " (cap reached)" } else { "" };
        let _ = writeln!(out, "{what} w.r.t. {}: {}{more}", self.spec, self.len());
        for (proc_, cs) in &self.culprits {
            let _ = writeln!(out, "  {proc_}:");
            for c in cs {
                let at = c.locus.clause.map(|i| format!(" [clause {i}]")).unwrap_or_default();
                let _ = writeln!(out, "    {}{at}", c.witness);
            }
        }
        for (a, why) in &self.undetermined {
            let _ = writeln!(out, "  undecided {a}: {why}");
        }
        out
    }
}

/// All atoms of `s_compl` up to the bound that no clause covers.
pub fn diagnose_incompleteness(
    p: &crate::term::Program,
    s_compl: &Spec,
    ctx: &Ctx,
    cap: usize,
) -> Result<Diagnosis, VerifyError> {
    let mut d = Diagnosis::new(DiagnosisKind::Incompleteness, s_compl, ctx);
    let (uncovered, undecided) = uncovered_atoms(p, s_compl, None, ctx, cap, &mut d.stats)?;
    d.truncated = uncovered.len() >= cap;
    for atom in uncovered {
        let locus = Locus { procedure: procedure(&atom), clause: None };
        d.push(Culprit { witness: Counterexample::UncoveredAtom { atom }, locus });
    }
    d.undetermined = undecided;
    Ok(d)
}

/// All clause instances up to the bound whose body holds in `s_corr` but
/// whose head does not.
pub fn diagnose_incorrectness(
    p: &crate::term::Program,
    s_corr: &Spec,
    ctx: &Ctx,
    cap: usize,
) -> Result<Diagnosis, VerifyError> {
    let mut d = Diagnosis::new(DiagnosisKind::Incorrectness, s_corr, ctx);
    let bad = incorrect_instances(p, s_corr, ctx, cap, &mut d.stats)?;
    d.truncated = bad.len() >= cap;
    for (clause, instance) in bad {
        let locus = Locus { procedure: procedure(&instance.head), clause: Some(clause) };
        d.push(Culprit { witness: Counterexample::BadClauseInstance { clause, instance }, locus });
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::parser::{parse_program, parse_spec};
    use crate::spec::SpecSet;
    use crate::term::Program;
    use crate::universe::{Signature, Universe};
    use crate::verify::revalidate;

    fn setup(prog: &str, spec: &str, fresh: usize, depth: usize) -> (Program, SpecSet, Ctx) {
        let p = parse_program(prog).unwrap().program;
        let src = parse_spec(spec).unwrap();
        let mut sig = Signature::new();
        sig.add_program(&p);
        src.collect_symbols(&mut sig);
        sig.add_fresh_constants(fresh);
        let u = Arc::new(Universe::new(sig));
        let set = SpecSet::bind(&src, u.clone()).unwrap();
        (p, set, Ctx::new(u, Bounds { depth, ..Bounds::default() }))
    }

    const APPEND: &str = "app([H|K],L,[H|M]) :- app(K,L,M).\napp([],L,L).";
    const S0: &str = "spec s0 = { app(K,L,M) | list(K), list(L), list(M), concat(K,L,M) }.";

    /// Brute-force uncovered set: every member re-checked by exhaustive
    /// enumeration of body bindings.
    fn oracle(p: &Program, s: &Spec, ctx: &Ctx) -> Vec<Atom> {
        s.enumerate(ctx.depth())
            .unwrap()
            .into_iter()
            .filter(|a| revalidate::uncovered_atom(p, s, &Counterexample::UncoveredAtom { atom: a.clone() }, ctx).unwrap())
            .collect()
    }

    #[test]
    fn deleting_either_append_clause() {
        let (p, set, ctx) = setup(APPEND, S0, 1, 3);
        let s0 = set.get("s0").unwrap();
        for (keep, shape) in [(1usize, "app([],"), (2, "app([")] {
            let q = p.select(&[keep]).unwrap();
            let d = diagnose_incompleteness(&q, s0, &ctx, usize::MAX).unwrap();
            let got: Vec<Atom> = d.all().map(|c| match &c.witness {
                Counterexample::UncoveredAtom { atom } => atom.clone(),
                w => panic!("unexpected {w}"),
            }).collect();
            assert!(!got.is_empty() && !d.truncated);
            assert_eq!(got, oracle(&q, s0, &ctx));
            assert!(got.iter().all(|a| a.to_string().starts_with(shape)));
            if keep == 2 {
                // Only non-empty first arguments are uncovered.
                assert!(got.iter().all(|a| a.args[0] != crate::term::Term::nil()));
            }
            assert_eq!(d.culprits.keys().collect::<Vec<_>>(), ["app/3"]);
        }
        assert!(diagnose_incompleteness(&p, s0, &ctx, 50).unwrap().is_empty());
    }

    #[test]
    fn append_incorrect_instances() {
        let (p, set, ctx) = setup(APPEND, S0, 1, 3);
        let d = diagnose_incorrectness(&p, set.get("s0").unwrap(), &ctx, 50).unwrap();
        assert!(d.len() > 1 && d.len() <= 50);
        for c in d.all() {
            let Counterexample::BadClauseInstance { clause, instance } = &c.witness else { panic!() };
            assert_eq!((*clause, c.locus.clause), (2, Some(2)));
            let a = &instance.head.args;
            assert!(a[0] == crate::term::Term::nil() && a[1] == a[2] && !a[1].is_list());
        }
        assert_eq!(diagnose_incorrectness(&p, set.get("s0").unwrap(), &ctx, 3).unwrap().len(), 3);
    }

    #[test]
    fn included_is_complete_but_not_correct() {
        let prog = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/included/included.pl")).unwrap();
        let spec = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/included/included.spec")).unwrap();
        let (p, set, ctx) = setup(&prog, &spec, 1, 3);
        assert!(diagnose_incompleteness(&p, set.get("compl").unwrap(), &ctx, 50).unwrap().is_empty());
        let d = diagnose_incorrectness(&p, set.get("corr").unwrap(), &ctx, 50).unwrap();
        assert!(!d.is_empty());
        assert!(d.all().all(|c| matches!(&c.witness, Counterexample::BadClauseInstance { clause: 1, instance }
            if instance.head.args[0] == crate::term::Term::nil() && !instance.head.args[1].is_list())));
        let j = d.to_json();
        assert_eq!(j["kind"], "incorrectness");
        assert!(j["culprits"]["included/2"].is_array());
    }
}
