//! Bounded checkers for the sufficient conditions of correctness and
//! completeness. Every check explores a finite part of an infinite space, so
//! `Verified` always means verified up to the recorded bound.

mod cut;
mod definite;
pub mod revalidate;
mod split;

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use serde::ser::{Serialize, Serializer};
use serde_json::{json, Value};
use thiserror::Error;

use crate::engine::EngineError;
use crate::spec::SpecError;
use crate::term::{Atom, Clause, Substitution, Term, Var};
use crate::universe::{instance_caps, odometer, Step, Universe, UniverseError};

pub use cut::{
    check_adjustably_covered, check_atom_adjustably_covered, check_cs_correct_runtime, check_cut_completeness, eta_candidates,
    rho_candidates,
};
pub use definite::{
    check_acceptable, check_completeness, check_completeness_via, check_correctness, check_covered, check_least_model, check_recurrent,
    check_recurrently_covered, check_semi_completeness, check_spec_inclusion, covered, incorrect_instances,
    uncovered_atoms, Coverage, Evidence,
};
pub use split::{check_cssld_completeness, check_suitable, tree_complete_wrt, CsEvidence, Split, SplitPart};

/// Version of the structured report layout.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Universe(#[from] UniverseError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{0}")]
    Mismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Bounds {
    /// Maximal atom depth of enumerated instances and specification members.
    pub depth: usize,
    /// Extra depth allowed for body atoms when checking coverage.
    pub delta: usize,
    /// Node budget for tree construction.
    pub budget: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { depth: 3, delta: 2, budget: 10_000 }
    }
}

/// Universe and bounds shared by the checks of a session.
#[derive(Clone, Debug)]
pub struct Ctx {
    pub universe: Arc<Universe>,
    pub bounds: Bounds,
}

impl Ctx {
    pub fn new(universe: Arc<Universe>, bounds: Bounds) -> Self {
        Ctx { universe, bounds }
    }

    pub fn depth(&self) -> usize {
        self.bounds.depth
    }

    pub fn with_depth(&self, depth: usize) -> Ctx {
        Ctx { universe: self.universe.clone(), bounds: Bounds { depth, ..self.bounds.clone() } }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    VerifiedUpToBound,
    Refuted,
    Inconclusive,
}

impl Verdict {
    /// Refuted dominates Inconclusive, which dominates Verified.
    pub fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Refuted, _) | (_, Refuted) => Refuted,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => VerifiedUpToBound,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::VerifiedUpToBound => "verified up to bound",
            Verdict::Refuted => "refuted",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Call,
    Exit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Counterexample {
    UncoveredAtom { atom: Atom },
    /// `clause` is 1-based.
    BadClauseInstance { clause: usize, instance: Clause },
    /// `body` is the 1-based position of the offending body atom.
    LevelViolation { clause: usize, instance: Clause, body: usize, head_level: u64, body_level: u64 },
    /// `part` is 1-based; `None` means the empty program was chosen.
    UnsuitableSelection { node: Option<usize>, part: Option<usize>, atom: Atom, instance: Option<Atom> },
    AdjustableCoverFailure { atom: Atom, clause: usize, rho: Substitution, eta: Substitution },
    MissingAnswer { instance: Vec<Atom> },
    CallSuccessViolation { path: Vec<String>, atom: Atom, phase: Phase },
    /// `atom` is in `member_of` but not in `missing_from`.
    SpecInclusion { atom: Atom, member_of: String, missing_from: String },
}

impl Counterexample {
    pub fn kind(&self) -> &'static str {
        match self {
            Counterexample::UncoveredAtom { .. } => "uncovered_atom",
            Counterexample::BadClauseInstance { .. } => "bad_clause_instance",
            Counterexample::LevelViolation { .. } => "level_violation",
            Counterexample::UnsuitableSelection { .. } => "unsuitable_selection",
            Counterexample::AdjustableCoverFailure { .. } => "adjustable_cover_failure",
            Counterexample::MissingAnswer { .. } => "missing_answer",
            Counterexample::CallSuccessViolation { .. } => "call_success_violation",
            Counterexample::SpecInclusion { .. } => "spec_inclusion",
        }
    }

    pub fn to_json(&self) -> Value {
        let payload = match self {
            Counterexample::UncoveredAtom { atom } => json!({"atom": atom.to_string()}),
            Counterexample::BadClauseInstance { clause, instance } => {
                json!({"clause": clause, "instance": instance.to_string()})
            }
            Counterexample::LevelViolation { clause, instance, body, head_level, body_level } => json!({
                "clause": clause, "instance": instance.to_string(), "body_atom": body,
                "head_level": head_level, "body_level": body_level,
            }),
            Counterexample::UnsuitableSelection { node, part, atom, instance } => json!({
                "node": node, "program": part, "atom": atom.to_string(),
                "instance": instance.as_ref().map(|a| a.to_string()),
            }),
            Counterexample::AdjustableCoverFailure { atom, clause, rho, eta } => json!({
                "atom": atom.to_string(), "clause": clause, "rho": rho.to_string(), "eta": eta.to_string(),
            }),
            Counterexample::MissingAnswer { instance } => {
                json!({"instance": instance.iter().map(|a| a.to_string()).collect::<Vec<_>>()})
            }
            Counterexample::CallSuccessViolation { path, atom, phase } => json!({
                "derivation": path, "atom": atom.to_string(),
                "phase": match phase { Phase::Call => "call", Phase::Exit => "exit" },
            }),
            Counterexample::SpecInclusion { atom, member_of, missing_from } => {
                json!({"atom": atom.to_string(), "member_of": member_of, "missing_from": missing_from})
            }
        };
        json!({"kind": self.kind(), "payload": payload})
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Counterexample::UncoveredAtom { atom } => write!(f, "{atom} is not covered"),
            Counterexample::BadClauseInstance { clause, instance } => {
                write!(f, "instance of clause {clause} with body in S and head outside S: {instance}")
            }
            Counterexample::LevelViolation { clause, instance, body, head_level, body_level } => write!(
                f,
                "clause {clause} instance {instance}: level of head {head_level} does not exceed level {body_level} of body atom {body}"
            ),
            Counterexample::UnsuitableSelection { node, part: None, atom, .. } => {
                if let Some(n) = node {
                    write!(f, "node {n}: ")?;
                }
                write!(f, "{atom} is selected with the empty program")
            }
            Counterexample::UnsuitableSelection { node, part: Some(i), atom, instance } => {
                if let Some(n) = node {
                    write!(f, "node {n}: ")?;
                }
                write!(f, "Π{i} is not suitable for {atom}")?;
                if let Some(b) = instance {
                    write!(f, " (instance {b} lies outside S{i})")?;
                }
                Ok(())
            }
            Counterexample::AdjustableCoverFailure { atom, clause, rho, eta } => {
                write!(f, "{atom} is not covered by the part after the cut of clause {clause} under ρ = {rho}, η = {eta}")
            }
            Counterexample::MissingAnswer { instance } => {
                let s: Vec<String> = instance.iter().map(|a| a.to_string()).collect();
                write!(f, "{} is in S but not an instance of any answer", s.join(", "))
            }
            Counterexample::CallSuccessViolation { atom, phase: Phase::Call, .. } => {
                write!(f, "selected atom {atom} is not in pre")
            }
            Counterexample::CallSuccessViolation { atom, phase: Phase::Exit, .. } => {
                write!(f, "computed answer {atom} is not in post")
            }
            Counterexample::SpecInclusion { atom, member_of, missing_from } => {
                write!(f, "{atom} is in {member_of} but not in {missing_from}")
            }
        }
    }
}

impl Serialize for Counterexample {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct Stats {
    pub instances: u64,
    pub atoms: u64,
    pub nodes: u64,
}

impl Stats {
    fn add(&mut self, o: &Stats) {
        self.instances += o.instances;
        self.atoms += o.atoms;
        self.nodes += o.nodes;
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Report {
    pub check: String,
    /// The property established or refuted, e.g. "P is correct w.r.t. S".
    pub claim: String,
    pub verdict: Verdict,
    pub witness: Option<Counterexample>,
    /// Why the check could not decide.
    pub reason: Option<String>,
    pub bound: Bounds,
    pub stats: Stats,
    pub parts: Vec<Report>,
}

impl Report {
    pub fn new(check: &str, claim: String, bound: &Bounds) -> Report {
        Report {
            check: check.to_string(),
            claim,
            verdict: Verdict::VerifiedUpToBound,
            witness: None,
            reason: None,
            bound: bound.clone(),
            stats: Stats::default(),
            parts: Vec::new(),
        }
    }

    pub fn refute(&mut self, w: Counterexample) {
        self.verdict = Verdict::Refuted;
        self.witness = Some(w);
    }

    /// Keeps the first reason; a refutation is never downgraded.
    pub fn undecided(&mut self, reason: String) {
        if self.verdict == Verdict::VerifiedUpToBound {
            self.verdict = Verdict::Inconclusive;
        }
        self.reason.get_or_insert(reason);
    }

    pub fn is_verified(&self) -> bool {
        self.verdict == Verdict::VerifiedUpToBound
    }

    pub fn is_refuted(&self) -> bool {
        self.verdict == Verdict::Refuted
    }

    /// Adds a sub-report; a refuted part lends its witness if none is set.
    pub fn absorb(&mut self, part: Report) {
        self.stats.add(&part.stats);
        match part.verdict {
            Verdict::Refuted if self.verdict != Verdict::Refuted => {
                self.verdict = Verdict::Refuted;
                self.witness = part.witness.clone();
            }
            Verdict::Inconclusive => {
                let r = part.reason.clone().unwrap_or_else(|| format!("{} inconclusive", part.check));
                self.undecided(r);
            }
            _ => {}
        }
        self.parts.push(part);
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(&mut out, 0);
        out
    }

    fn write_text(&self, out: &mut String, indent: usize) {
        let pad = "  ".repeat(indent);
        let _ = writeln!(out, "{pad}{}: {}", self.check, self.verdict);
        let _ = writeln!(out, "{pad}  claim: {}", self.claim);
        let _ = writeln!(
            out,
            "{pad}  bound: depth {}, delta {}, budget {}",
            self.bound.depth, self.bound.delta, self.bound.budget
        );
        if let Some(w) = &self.witness {
            let _ = writeln!(out, "{pad}  witness ({}): {w}", w.kind());
        }
        if let Some(r) = &self.reason {
            let _ = writeln!(out, "{pad}  reason: {r}");
        }
        let _ = writeln!(
            out,
            "{pad}  stats: {} instances, {} atoms, {} nodes",
            self.stats.instances, self.stats.atoms, self.stats.nodes
        );
        for p in &self.parts {
            p.write_text(out, indent + 1);
        }
    }
}

/// Enumeration plan for the ground instances of a list of atoms in which
/// every atom has depth at most the bound. Variables of the filter atoms
/// come first so that those atoms can be tested early.
pub(crate) struct Plan {
    vars: Vec<Var>,
    domains: Vec<Arc<Vec<Term>>>,
    /// Filter atoms whose last variable is bound at each level.
    ready: Vec<Vec<usize>>,
    /// Filter atoms with no variables.
    ground: Vec<usize>,
}

impl Plan {
    /// `None` when no instance satisfies the depth bound. Variables in
    /// `fixed` range over a single constant.
    pub(crate) fn new(
        atoms: &[Atom],
        filters: &[usize],
        depth: usize,
        universe: &Universe,
        fixed: &BTreeSet<Var>,
    ) -> Result<Option<Plan>, UniverseError> {
        let Some(caps) = instance_caps(atoms, depth) else { return Ok(None) };
        let mut order = Vec::new();
        for &j in filters {
            atoms[j].vars_into(&mut order);
        }
        for a in atoms {
            a.vars_into(&mut order);
        }
        let (mut vars, rest): (Vec<Var>, Vec<Var>) = order.into_iter().partition(|v| fixed.contains(v));
        vars.extend(rest);
        let first = universe.up_to(0)?.first().cloned().ok_or(UniverseError::NoConstants)?;
        let single = Arc::new(vec![first]);
        let mut domains = Vec::with_capacity(vars.len());
        for v in &vars {
            if fixed.contains(v) {
                domains.push(single.clone());
            } else {
                domains.push(universe.up_to(caps.get(v).copied().unwrap_or(0))?);
            }
        }
        let mut ready = vec![Vec::new(); vars.len()];
        let mut ground = Vec::new();
        for &j in filters {
            match atoms[j].vars().iter().map(|v| vars.iter().position(|w| w == v).expect("planned")).max() {
                Some(k) => ready[k].push(j),
                None => ground.push(j),
            }
        }
        Ok(Some(Plan { vars, domains, ready, ground }))
    }

    /// Runs the enumeration. `keep(j, atom)` tests filter atom `j` as soon
    /// as it is ground and prunes on `false`; `leaf` sees every surviving
    /// full instance. Returns `false` iff `leaf` stopped the search.
    pub(crate) fn run<E>(
        &self,
        atoms: &[Atom],
        mut keep: impl FnMut(usize, &Atom) -> Result<bool, E>,
        mut leaf: impl FnMut(&[Atom], &Substitution) -> Result<Step, E>,
    ) -> Result<bool, E> {
        for &j in &self.ground {
            if !keep(j, &atoms[j])? {
                return Ok(true);
            }
        }
        let n = self.vars.len();
        let mut err = None;
        let completed = odometer(&self.domains, |k, vals| {
            if k != usize::MAX {
                for &j in &self.ready[k] {
                    let a = atoms[j].bind(&self.vars[..=k], vals);
                    match keep(j, &a) {
                        Ok(true) => {}
                        Ok(false) => return Step::Prune,
                        Err(e) => {
                            err = Some(e);
                            return Step::Stop;
                        }
                    }
                }
            }
            if k == usize::MAX || k + 1 == n {
                let inst: Vec<Atom> = atoms.iter().map(|a| a.bind(&self.vars, vals)).collect();
                let theta = Substitution::from_pairs(self.vars.iter().cloned().zip(vals.iter().cloned()));
                match leaf(&inst, &theta) {
                    Ok(s) => s,
                    Err(e) => {
                        err = Some(e);
                        Step::Stop
                    }
                }
            } else {
                Step::Descend
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(completed),
        }
    }
}

/// Atoms of a clause, head first.
pub(crate) fn clause_atoms(c: &Clause) -> Vec<Atom> {
    std::iter::once(c.head.clone()).chain(c.body.iter().cloned()).collect()
}

pub(crate) fn from_atoms(atoms: &[Atom]) -> Clause {
    Clause::new(atoms[0].clone(), atoms[1..].to_vec())
}
