//! Checks for definite programs: correctness, coverage, recurrence,
//! acceptability and the completeness criteria built on them.

use std::collections::BTreeSet;

use super::{clause_atoms, from_atoms, Counterexample, Ctx, Plan, Report, Stats, VerifyError};
use crate::engine::{build_sld_tree, SelectionRule};
use crate::level::LevelMapping;
use crate::spec::model::bounded_least_model;
use crate::spec::{Spec, SpecError};
use crate::term::{is_instance, match_atom, Atom, Clause, Program, Var};
use crate::universe::Step;

/// Iteration cap for the least model oracle.
const MODEL_ITERATIONS: usize = 10_000;

/// Instances of the clauses of `p` with every body atom in `s` and the head
/// outside, in enumeration order, at most `cap` of them. Clause numbers are
/// 1-based.
pub fn incorrect_instances(
    p: &Program,
    s: &Spec,
    ctx: &Ctx,
    cap: usize,
    stats: &mut Stats,
) -> Result<Vec<(usize, Clause)>, VerifyError> {
    let mut out = Vec::new();
    for (ci, c) in p.clauses().iter().enumerate() {
        let atoms = clause_atoms(&c.without_cut());
        let filters: Vec<usize> = (1..atoms.len()).collect();
        let Some(plan) = Plan::new(&atoms, &filters, ctx.depth(), &ctx.universe, &BTreeSet::new())? else { continue };
        plan.run(
            &atoms,
            |_, b| {
                stats.atoms += 1;
                s.contains(b)
            },
            |inst, _| {
                stats.instances += 1;
                if !s.contains(&inst[0])? {
                    out.push((ci + 1, from_atoms(inst)));
                    if out.len() >= cap {
                        return Ok(Step::Stop);
                    }
                }
                Ok::<_, SpecError>(Step::Descend)
            },
        )?;
        if out.len() >= cap {
            break;
        }
    }
    Ok(out)
}

pub fn check_correctness(p: &Program, s: &Spec, ctx: &Ctx) -> Result<Report, VerifyError> {
    let mut r = Report::new("correctness", format!("the program is correct w.r.t. {}", s.name()), &ctx.bounds);
    let bad = incorrect_instances(p, s, ctx, 1, &mut r.stats)?;
    if let Some((clause, instance)) = bad.into_iter().next() {
        r.refute(Counterexample::BadClauseInstance { clause, instance });
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coverage {
    /// A covering instance and its 1-based clause number.
    Covered(usize, Clause),
    Uncovered,
    Undetermined(String),
}

/// Whether ground `a` is covered by `p` w.r.t. `s`: the head of a clause
/// instance whose body atoms are in `s`. Body atoms range up to depth
/// `depth(a) + delta`. With a level mapping the body levels must also be
/// defined and strictly below the level of `a`.
pub fn covered(
    p: &Program,
    s: &Spec,
    a: &Atom,
    lm: Option<&LevelMapping>,
    ctx: &Ctx,
    stats: &mut Stats,
) -> Result<Coverage, VerifyError> {
    let head_level = match lm {
        Some(lm) => match lm.level(a) {
            Some(l) => Some(l),
            None => return Ok(Coverage::Undetermined(format!("level of {a} is undefined"))),
        },
        None => None,
    };
    let body_depth = a.depth() + ctx.bounds.delta;
    let mut any_head = false;
    let mut truncated = false;
    let mut undefined: Option<Atom> = None;
    for (ci, c) in p.clauses().iter().enumerate() {
        if c.head.key() != a.key() {
            continue;
        }
        let c = c.without_cut();
        let Some(theta) = match_atom(&c.head, a) else { continue };
        any_head = true;
        let body: Vec<Atom> = c.body.iter().map(|b| b.apply(&theta)).collect();
        let ok_levels = |inst: &[Atom], undefined: &mut Option<Atom>| -> bool {
            let (Some(lm), Some(hl)) = (lm, head_level) else { return true };
            inst.iter().all(|b| match lm.level(b) {
                Some(bl) => bl < hl,
                None => {
                    undefined.get_or_insert_with(|| b.clone());
                    false
                }
            })
        };
        let has_vars = body.iter().any(|b| !b.is_ground());
        if !has_vars {
            stats.instances += 1;
            stats.atoms += body.len() as u64;
            if s.models(&body)? && ok_levels(&body, &mut undefined) {
                return Ok(Coverage::Covered(ci + 1, Clause::new(a.clone(), body)));
            }
            continue;
        }
        truncated = true;
        let filters: Vec<usize> = (0..body.len()).collect();
        let Some(plan) = Plan::new(&body, &filters, body_depth, &ctx.universe, &BTreeSet::new())? else { continue };
        let mut found = None;
        plan.run(
            &body,
            |_, b| {
                stats.atoms += 1;
                s.contains(b)
            },
            |inst, _| {
                stats.instances += 1;
                if ok_levels(inst, &mut undefined) {
                    found = Some(inst.to_vec());
                    return Ok(Step::Stop);
                }
                Ok::<_, SpecError>(Step::Descend)
            },
        )?;
        if let Some(inst) = found {
            return Ok(Coverage::Covered(ci + 1, Clause::new(a.clone(), inst)));
        }
    }
    Ok(if !any_head {
        Coverage::Uncovered
    } else if let Some(b) = undefined {
        Coverage::Undetermined(format!("level of {b} is undefined"))
    } else if truncated {
        Coverage::Undetermined(format!("{a}: no covering instance with body atoms of depth at most {body_depth}"))
    } else {
        Coverage::Uncovered
    })
}

/// Uncovered atoms of `s` up to the depth bound, at most `cap`, together
/// with the atoms whose coverage could not be decided.
pub fn uncovered_atoms(
    p: &Program,
    s: &Spec,
    lm: Option<&LevelMapping>,
    ctx: &Ctx,
    cap: usize,
    stats: &mut Stats,
) -> Result<(Vec<Atom>, Vec<(Atom, String)>), VerifyError> {
    let mut uncovered = Vec::new();
    let mut undecided = Vec::new();
    for a in s.enumerate(ctx.depth())? {
        match covered(p, s, &a, lm, ctx, stats)? {
            Coverage::Covered(..) => {}
            Coverage::Uncovered => {
                uncovered.push(a);
                if uncovered.len() >= cap {
                    break;
                }
            }
            Coverage::Undetermined(why) => undecided.push((a, why)),
        }
    }
    Ok((uncovered, undecided))
}

fn coverage_report(
    check: &str,
    claim: String,
    p: &Program,
    s: &Spec,
    lm: Option<&LevelMapping>,
    ctx: &Ctx,
) -> Result<Report, VerifyError> {
    let mut r = Report::new(check, claim, &ctx.bounds);
    let (uncovered, undecided) = uncovered_atoms(p, s, lm, ctx, 1, &mut r.stats)?;
    if let Some(atom) = uncovered.into_iter().next() {
        r.refute(Counterexample::UncoveredAtom { atom });
    } else if let Some((_, why)) = undecided.into_iter().next() {
        r.undecided(why);
    }
    Ok(r)
}

pub fn check_covered(p: &Program, s: &Spec, ctx: &Ctx) -> Result<Report, VerifyError> {
    coverage_report("covered", format!("every atom of {} is covered w.r.t. {}", s.name(), s.name()), p, s, None, ctx)
}

pub fn check_semi_completeness(p: &Program, s: &Spec, ctx: &Ctx) -> Result<Report, VerifyError> {
    coverage_report(
        "semi_completeness",
        format!("{} is covered, so the program is semi-complete w.r.t. {}", s.name(), s.name()),
        p,
        s,
        None,
        ctx,
    )
}

pub fn check_recurrently_covered(p: &Program, s: &Spec, lm: &LevelMapping, ctx: &Ctx) -> Result<Report, VerifyError> {
    coverage_report(
        "recurrently_covered",
        format!("every atom of {} is recurrently covered, so the program is complete w.r.t. it", s.name()),
        p,
        s,
        Some(lm),
        ctx,
    )
}

/// Variables that may influence the levels of `atoms`; `None` means all.
fn level_relevant(lm: &LevelMapping, atoms: &[Atom]) -> Option<BTreeSet<Var>> {
    let mut out = BTreeSet::new();
    for a in atoms {
        out.extend(lm.relevant_vars(a)?);
    }
    Some(out)
}

fn fixed_vars(atoms: &[Atom], relevant: Option<BTreeSet<Var>>) -> BTreeSet<Var> {
    let Some(rel) = relevant else { return BTreeSet::new() };
    atoms.iter().flat_map(|a| a.vars()).filter(|v| !rel.contains(v)).collect()
}

/// Searches clause instances for a level violation among body atoms whose
/// preceding atoms are all in `guard` (every atom when `guard` is `None`).
fn level_search(
    r: &mut Report,
    p: &Program,
    lm: &LevelMapping,
    guard: Option<&Spec>,
    ctx: &Ctx,
) -> Result<(), VerifyError> {
    for (ci, c) in p.clauses().iter().enumerate() {
        let atoms = clause_atoms(&c.without_cut());
        let mut relevant = level_relevant(lm, &atoms);
        if guard.is_some() {
            if let Some(rel) = relevant.as_mut() {
                for b in atoms.iter().skip(1).take(atoms.len().saturating_sub(2)) {
                    rel.extend(b.vars());
                }
            }
        }
        let fixed = fixed_vars(&atoms, relevant);
        let Some(plan) = Plan::new(&atoms, &[], ctx.depth(), &ctx.universe, &fixed)? else { continue };
        let mut undefined: Option<Atom> = None;
        let mut violation = None;
        let stats = &mut r.stats;
        plan.run(
            &atoms,
            |_, _| Ok(true),
            |inst, _| {
                stats.instances += 1;
                let Some(hl) = lm.level(&inst[0]) else {
                    undefined.get_or_insert_with(|| inst[0].clone());
                    return Ok(Step::Descend);
                };
                for (i, b) in inst.iter().enumerate().skip(1) {
                    match lm.level(b) {
                        Some(bl) if bl >= hl => {
                            violation = Some(Counterexample::LevelViolation {
                                clause: ci + 1,
                                instance: from_atoms(inst),
                                body: i,
                                head_level: hl,
                                body_level: bl,
                            });
                            return Ok(Step::Stop);
                        }
                        Some(_) => {}
                        None => {
                            undefined.get_or_insert_with(|| b.clone());
                        }
                    }
                    if let Some(g) = guard {
                        stats.atoms += 1;
                        if !g.contains(b)? {
                            break;
                        }
                    }
                }
                Ok::<_, SpecError>(Step::Descend)
            },
        )?;
        if let Some(w) = violation {
            r.refute(w);
            return Ok(());
        }
        if let Some(a) = undefined {
            r.undecided(format!("level mapping undefined on {a}"));
        }
    }
    Ok(())
}

pub fn check_recurrent(p: &Program, lm: &LevelMapping, ctx: &Ctx) -> Result<Report, VerifyError> {
    let mut r = Report::new("recurrent", "the program is recurrent under the level mapping".into(), &ctx.bounds);
    level_search(&mut r, p, lm, None, ctx)?;
    Ok(r)
}

pub fn check_acceptable(p: &Program, lm: &LevelMapping, s_prime: &Spec, ctx: &Ctx) -> Result<Report, VerifyError> {
    let mut r = Report::new(
        "acceptable",
        format!("the program is acceptable w.r.t. {} and the level mapping", s_prime.name()),
        &ctx.bounds,
    );
    r.absorb(check_correctness(p, s_prime, ctx)?);
    if r.is_refuted() {
        return Ok(r);
    }
    let mut levels = Report::new("acceptable_levels", "guarded level decrease".into(), &ctx.bounds);
    level_search(&mut levels, p, lm, Some(s_prime), ctx)?;
    r.absorb(levels);
    Ok(r)
}

/// The termination part of a completeness argument.
pub enum Evidence<'a> {
    /// Finite SLD-trees for queries whose instances exhaust the
    /// specification; no queries means each member is its own query.
    FiniteTrees { queries: Vec<Atom>, rule: &'a dyn SelectionRule },
    Recurrent(&'a LevelMapping),
    Acceptable(&'a LevelMapping, &'a Spec),
}

fn finite_trees(
    p: &Program,
    s: &Spec,
    queries: &[Atom],
    rule: &dyn SelectionRule,
    ctx: &Ctx,
) -> Result<Report, VerifyError> {
    let mut r = Report::new(
        "finite_trees",
        format!("each atom of {} is an instance of a query with a finite SLD-tree", s.name()),
        &ctx.bounds,
    );
    let mut needed: Vec<Atom> = Vec::new();
    for a in s.enumerate(ctx.depth())? {
        let q = if queries.is_empty() {
            Some(a.clone())
        } else {
            queries.iter().find(|q| is_instance(&a, q)).cloned()
        };
        match q {
            Some(q) if !needed.contains(&q) => needed.push(q),
            Some(_) => {}
            None => {
                r.undecided(format!("{a} is not an instance of any supplied query"));
                return Ok(r);
            }
        }
    }
    for q in &needed {
        let t = build_sld_tree(p, std::slice::from_ref(q), rule, ctx.bounds.budget);
        r.stats.nodes += t.nodes.len() as u64;
        if !t.is_finite() {
            r.undecided(format!("the SLD-tree for {q} exceeds the budget of {} nodes", ctx.bounds.budget));
            return Ok(r);
        }
    }
    Ok(r)
}

pub fn check_completeness(p: &Program, s: &Spec, evidence: &Evidence<'_>, ctx: &Ctx) -> Result<Report, VerifyError> {
    let mut r = Report::new("completeness", format!("the program is complete w.r.t. {}", s.name()), &ctx.bounds);
    r.absorb(check_covered(p, s, ctx)?);
    let ev = match evidence {
        Evidence::FiniteTrees { queries, rule } => finite_trees(p, s, queries, *rule, ctx)?,
        Evidence::Recurrent(lm) => check_recurrent(p, lm, ctx)?,
        Evidence::Acceptable(lm, sp) => check_acceptable(p, lm, sp, ctx)?,
    };
    r.absorb(ev);
    Ok(r)
}

/// Completeness w.r.t. `target` shown through a larger `support` the
/// program is complete for.
pub fn check_completeness_via(
    p: &Program,
    target: &Spec,
    support: &Spec,
    evidence: &Evidence<'_>,
    ctx: &Ctx,
) -> Result<Report, VerifyError> {
    let mut r = Report::new("completeness", format!("the program is complete w.r.t. {}", target.name()), &ctx.bounds);
    r.absorb(check_spec_inclusion(target, support, ctx)?);
    r.absorb(check_completeness(p, support, evidence, ctx)?);
    Ok(r)
}

/// Every member of `a` up to the depth bound is a member of `b`.
pub fn check_spec_inclusion(a: &Spec, b: &Spec, ctx: &Ctx) -> Result<Report, VerifyError> {
    let mut r = Report::new("spec_inclusion", format!("{} ⊆ {}", a.name(), b.name()), &ctx.bounds);
    for x in a.enumerate(ctx.depth())? {
        r.stats.atoms += 1;
        if !b.contains(&x)? {
            r.refute(Counterexample::SpecInclusion {
                atom: x,
                member_of: a.name().into(),
                missing_from: b.name().into(),
            });
            break;
        }
    }
    Ok(r)
}

/// Compares the depth-bounded least model with the members of `s`.
pub fn check_least_model(p: &Program, s: &Spec, ctx: &Ctx) -> Result<Report, VerifyError> {
    let mut r = Report::new("least_model", format!("the least model equals {}", s.name()), &ctx.bounds);
    let m = bounded_least_model(p, &ctx.universe, ctx.depth(), MODEL_ITERATIONS)?;
    if !m.saturated {
        r.undecided(format!("no fixpoint within {MODEL_ITERATIONS} iterations"));
        return Ok(r);
    }
    let model = m.settled();
    let members: BTreeSet<Atom> = s.enumerate(ctx.depth())?.into_iter().collect();
    r.stats.atoms = (model.len() + members.len()) as u64;
    if let Some(a) = model.difference(&members).next() {
        r.refute(Counterexample::SpecInclusion { atom: a.clone(), member_of: "least model".into(), missing_from: s.name().into() });
    } else if let Some(a) = members.difference(&model).next() {
        r.refute(Counterexample::SpecInclusion { atom: a.clone(), member_of: s.name().into(), missing_from: "least model".into() });
    }
    Ok(r)
}
