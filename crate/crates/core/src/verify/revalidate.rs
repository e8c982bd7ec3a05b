//! Direct re-checks of counterexamples, independent of the searches that
//! produced them.

use std::sync::Arc;

use super::{clause_atoms, Counterexample, Ctx, Phase, Split, VerifyError};
use crate::engine::SldTree;
use crate::level::LevelMapping;
use crate::spec::callsucc::CallSuccessSpec;
use crate::spec::Spec;
use crate::term::{match_atom, Atom, Program, Term};
use crate::universe::{odometer, Step};

fn conj(atoms: &[Atom]) -> Atom {
    Atom::new("q", atoms.iter().map(|a| a.as_term()).collect::<Vec<Term>>())
}

/// The instance is a ground instance of the clause with its body in `s` and
/// its head outside.
pub fn bad_clause_instance(p: &Program, s: &Spec, w: &Counterexample) -> Result<bool, VerifyError> {
    let Counterexample::BadClauseInstance { clause, instance } = w else { return Ok(false) };
    let Some(c) = clause.checked_sub(1).and_then(|i| p.clauses().get(i)) else { return Ok(false) };
    let general = conj(&clause_atoms(&c.without_cut()));
    let specific = conj(&clause_atoms(instance));
    if !specific.is_ground() || match_atom(&general, &specific).is_none() {
        return Ok(false);
    }
    Ok(s.models(&instance.body)? && !s.contains(&instance.head)?)
}

/// The atom is in `s` and no clause instance with head `atom` has all body
/// atoms (of depth at most `depth(atom) + delta`) in `s`, by exhaustive
/// enumeration of bindings.
pub fn uncovered_atom(p: &Program, s: &Spec, w: &Counterexample, ctx: &Ctx) -> Result<bool, VerifyError> {
    let Counterexample::UncoveredAtom { atom } = w else { return Ok(false) };
    if !atom.is_ground() || !s.contains(atom)? {
        return Ok(false);
    }
    let bound = atom.depth() + ctx.bounds.delta;
    let terms = ctx.universe.up_to(bound.saturating_sub(1))?;
    for c in p.clauses() {
        let c = c.without_cut();
        let Some(theta) = match_atom(&c.head, atom) else { continue };
        let body: Vec<Atom> = c.body.iter().map(|b| b.apply(&theta)).collect();
        let mut vars = Vec::new();
        body.iter().for_each(|b| b.vars_into(&mut vars));
        let domains: Vec<Arc<Vec<Term>>> = vars.iter().map(|_| terms.clone()).collect();
        let mut covered = false;
        let mut err = None;
        odometer(&domains, |k, vals| {
            if k != usize::MAX && k + 1 != vars.len() {
                return Step::Descend;
            }
            let inst: Vec<Atom> = body.iter().map(|b| b.bind(&vars, vals)).collect();
            if inst.iter().any(|b| b.depth() > bound && !vars.is_empty()) {
                return Step::Descend;
            }
            match s.models(&inst) {
                Ok(true) => {
                    covered = true;
                    Step::Stop
                }
                Ok(false) => Step::Descend,
                Err(e) => {
                    err = Some(e);
                    Step::Stop
                }
            }
        });
        if let Some(e) = err {
            return Err(e.into());
        }
        if covered {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn level_violation(p: &Program, lm: &LevelMapping, w: &Counterexample) -> bool {
    let Counterexample::LevelViolation { clause, instance, body, head_level, body_level } = w else { return false };
    let Some(c) = clause.checked_sub(1).and_then(|i| p.clauses().get(i)) else { return false };
    let general = conj(&clause_atoms(&c.without_cut()));
    let specific = conj(&clause_atoms(instance));
    if !specific.is_ground() || match_atom(&general, &specific).is_none() {
        return false;
    }
    let Some(b) = body.checked_sub(1).and_then(|i| instance.body.get(i)) else { return false };
    lm.level(&instance.head) == Some(*head_level) && lm.level(b) == Some(*body_level) && head_level <= body_level
}

/// The instance is an instance of the selected atom, in S, and outside S_i.
pub fn unsuitable_selection(split: &Split, w: &Counterexample) -> Result<bool, VerifyError> {
    let Counterexample::UnsuitableSelection { part, atom, instance, .. } = w else { return Ok(false) };
    let (Some(i), Some(b)) = (part, instance) else { return Ok(part.is_none()) };
    let Some(sp) = i.checked_sub(1).and_then(|i| split.parts.get(i)) else { return Ok(false) };
    Ok(b.is_ground() && match_atom(atom, b).is_some() && split.spec.contains(b)? && !sp.spec.contains(b)?)
}

/// The instance is a ground instance of the root, in `s`, and no answer of
/// the tree has it as an instance.
pub fn missing_answer(tree: &SldTree, s: &Spec, w: &Counterexample) -> Result<bool, VerifyError> {
    let Counterexample::MissingAnswer { instance } = w else { return Ok(false) };
    let q = conj(instance);
    if !q.is_ground() || match_atom(&conj(&tree.root), &q).is_none() || !s.models(instance)? {
        return Ok(false);
    }
    Ok(!tree.answers().iter().any(|a| match_atom(&conj(&a.atoms), &q).is_some()))
}

pub fn call_success_violation(cs: &CallSuccessSpec, w: &Counterexample) -> bool {
    match w {
        Counterexample::CallSuccessViolation { atom, phase: Phase::Call, .. } => !cs.in_pre(atom),
        Counterexample::CallSuccessViolation { atom, phase: Phase::Exit, .. } => !cs.in_post(atom),
        _ => false,
    }
}

/// Hρ is in pre with `atom` an instance of it, the guard atoms under ρη are
/// ground and in post, and `atom` is not an instance of the head of the
/// part after the cut under ρη with its body in `s` for any completion
/// found by exhaustive enumeration up to the coverage bound.
pub fn adjustable_cover_failure(
    p: &Program,
    s: &Spec,
    cs: &CallSuccessSpec,
    w: &Counterexample,
    ctx: &Ctx,
) -> Result<bool, VerifyError> {
    let Counterexample::AdjustableCoverFailure { atom, clause, rho, eta } = w else { return Ok(false) };
    let Some(c) = clause.checked_sub(1).and_then(|i| p.clauses().get(i)) else { return Ok(false) };
    let Some(k) = c.cut else { return Ok(false) };
    let h = c.head.apply(rho);
    if !cs.in_pre(&h) || match_atom(&h, atom).is_none() {
        return Ok(false);
    }
    if !c.body[..k].iter().all(|g| {
        let g = g.apply(rho).apply(eta);
        g.is_ground() && cs.in_post(&g)
    }) {
        return Ok(false);
    }
    let rest = Program::definite(vec![c.after_cut().apply(rho).apply(eta)]);
    uncovered_atom(&rest, s, &Counterexample::UncoveredAtom { atom: atom.clone() }, ctx)
}

pub fn spec_inclusion(a: &Spec, b: &Spec, w: &Counterexample) -> Result<bool, VerifyError> {
    let Counterexample::SpecInclusion { atom, .. } = w else { return Ok(false) };
    Ok(a.contains(atom)? && !b.contains(atom)?)
}
