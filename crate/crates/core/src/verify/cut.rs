//! Completeness of LD-trees pruned by cuts in last clauses, relative to a
//! call-success specification.

use std::cell::Cell;
use std::collections::BTreeSet;

use super::definite::{covered, Coverage};
use super::split::tree_complete_wrt;
use super::{Counterexample, Ctx, Phase, Plan, Report, Stats, VerifyError};
use crate::engine::{build_monitored_ld_tree, build_pruned_ld_tree, Event};
use crate::spec::callsucc::CallSuccessSpec;
use crate::spec::Spec;
use crate::term::{is_instance, is_variant, match_atom, Atom, Clause, Program, Substitution, Term, Var};
use crate::universe::Step;

/// Limit on generalizations considered per head variable and on ρ
/// candidates per atom.
const GENERALIZATION_LIMIT: usize = 4096;
const CANDIDATE_LIMIT: usize = 200_000;

struct Fresh(u32);

impl Fresh {
    fn next(&mut self) -> Var {
        self.0 += 1;
        Var::new("_R").with_suffix(self.0)
    }
}

/// Generalizations of ground `t` (including a fresh variable), each with
/// the ground value of every fresh variable; `None` past the limit.
fn generalizations(t: &Term, fresh: &mut Fresh, limit: usize) -> Option<Vec<(Term, Vec<(Var, Term)>)>> {
    let hole = fresh.next();
    let mut out = vec![(Term::Var(hole.clone()), vec![(hole, t.clone())])];
    let Term::App(f, args) = t else { return Some(out) };
    let mut combos: Vec<(Vec<Term>, Vec<(Var, Term)>)> = vec![(Vec::new(), Vec::new())];
    for a in args.iter() {
        let gs = generalizations(a, fresh, limit)?;
        let mut next = Vec::new();
        for (prefix, vals) in &combos {
            for (g, gv) in &gs {
                let mut p = prefix.clone();
                p.push(g.clone());
                let mut v = vals.clone();
                v.extend(gv.iter().cloned());
                next.push((p, v));
                if next.len() > limit {
                    return None;
                }
            }
        }
        combos = next;
    }
    for (targs, vals) in combos {
        out.push((Term::app_sym(f.clone(), targs), vals));
        if out.len() > limit {
            return None;
        }
    }
    Some(out)
}

/// All set partitions of `items`, each as a list of blocks.
fn partitions<T: Clone>(items: &[T], limit: usize) -> Option<Vec<Vec<Vec<T>>>> {
    let mut out: Vec<Vec<Vec<T>>> = vec![Vec::new()];
    for x in items {
        let mut next = Vec::new();
        for p in &out {
            for i in 0..p.len() {
                let mut q = p.clone();
                q[i].push(x.clone());
                next.push(q);
            }
            let mut q = p.clone();
            q.push(vec![x.clone()]);
            next.push(q);
            if next.len() > limit {
                return None;
            }
        }
        out = next;
    }
    Some(out)
}

/// Substitutions ρ on the head variables of `c` such that `a` is an
/// instance of Hρ ∈ pre, reduced to the most general ones (up to variance).
/// Besides instantiating head variables, ρ may identify variables whose
/// values in `a` coincide. `None` when the candidate space exceeds the
/// limits.
pub fn rho_candidates(c: &Clause, a: &Atom, cs: &CallSuccessSpec) -> Option<Vec<Substitution>> {
    let Some(theta) = match_atom(&c.head, a) else { return Some(Vec::new()) };
    let hv = c.head.vars();
    let mut fresh = Fresh(0);
    let mut options: Vec<Vec<(Term, Vec<(Var, Term)>)>> = Vec::new();
    for x in &hv {
        let t = theta.get(x).cloned().expect("head variables are bound by matching");
        let mut opts = vec![(Term::Var(x.clone()), vec![(x.clone(), t.clone())])];
        // The bare fresh variable would duplicate keeping x.
        opts.extend(generalizations(&t, &mut fresh, GENERALIZATION_LIMIT)?.into_iter().skip(1));
        options.push(opts);
    }
    let mut found: Vec<(Atom, Substitution)> = Vec::new();
    let mut tried = 0usize;
    let mut idx = vec![0usize; hv.len()];
    loop {
        let mut sigma = Substitution::new();
        let mut values: Vec<(Var, Term)> = Vec::new();
        for (k, x) in hv.iter().enumerate() {
            let (t, vals) = &options[k][idx[k]];
            if t != &Term::Var(x.clone()) {
                sigma.insert(x.clone(), t.clone());
            }
            for (v, val) in vals {
                if !values.iter().any(|(w, _)| w == v) {
                    values.push((v.clone(), val.clone()));
                }
            }
        }
        // Variables of Hσ grouped by value; head variables come first so
        // they represent their blocks.
        let mut groups: Vec<(Term, Vec<Var>)> = Vec::new();
        let gvars = c.head.apply(&sigma).vars();
        let mut ordered: Vec<&(Var, Term)> = values.iter().filter(|(v, _)| gvars.contains(v) && hv.contains(v)).collect();
        ordered.extend(values.iter().filter(|(v, _)| gvars.contains(v) && !hv.contains(v)));
        for (v, val) in ordered {
            match groups.iter_mut().find(|(t, _)| t == val) {
                Some((_, vs)) => vs.push(v.clone()),
                None => groups.push((val.clone(), vec![v.clone()])),
            }
        }
        let mut merges: Vec<Substitution> = vec![Substitution::new()];
        for (_, vs) in &groups {
            let parts = partitions(vs, CANDIDATE_LIMIT)?;
            let mut next = Vec::new();
            for m in &merges {
                for p in &parts {
                    let mut m2 = m.clone();
                    for block in p {
                        for v in &block[1..] {
                            m2.insert(v.clone(), Term::Var(block[0].clone()));
                        }
                    }
                    next.push(m2);
                }
            }
            merges = next;
            if merges.len() > CANDIDATE_LIMIT {
                return None;
            }
        }
        for mu in merges {
            tried += 1;
            if tried > CANDIDATE_LIMIT {
                return None;
            }
            let rho = Substitution::from_pairs(hv.iter().filter_map(|x| {
                let t = Term::Var(x.clone()).apply(&sigma).apply(&mu);
                (t != Term::Var(x.clone())).then(|| (x.clone(), t))
            }));
            let g = c.head.apply(&rho);
            if cs.in_pre(&g) && !found.iter().any(|(h, _)| is_variant(h, &g)) {
                found.push((g, rho));
            }
        }
        // Next combination of options.
        let mut k = hv.len();
        loop {
            if k == 0 {
                let general: Vec<Substitution> = found
                    .iter()
                    .filter(|(g, _)| !found.iter().any(|(h, _)| !is_variant(g, h) && is_instance(g, h)))
                    .map(|(_, r)| r.clone())
                    .collect();
                return Some(general);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

enum Adjustable {
    Yes,
    No(Counterexample),
    Unknown(String),
}

fn adjustably_covered_by(
    c: &Clause,
    ci: usize,
    a: &Atom,
    s: &Spec,
    cs: &CallSuccessSpec,
    ctx: &Ctx,
    stats: &mut Stats,
) -> Result<Adjustable, VerifyError> {
    let single = |cl: Clause| Program::definite(vec![cl]);
    if c.cut.is_none() {
        return Ok(match covered(&single(c.clone()), s, a, None, ctx, stats)? {
            Coverage::Covered(..) => Adjustable::Yes,
            Coverage::Uncovered => Adjustable::No(Counterexample::UncoveredAtom { atom: a.clone() }),
            Coverage::Undetermined(why) => Adjustable::Unknown(why),
        });
    }
    match covered(&single(c.guard_part()), s, a, None, ctx, stats)? {
        Coverage::Covered(..) => {}
        Coverage::Uncovered => return Ok(Adjustable::No(Counterexample::UncoveredAtom { atom: a.clone() })),
        Coverage::Undetermined(why) => return Ok(Adjustable::Unknown(why)),
    }
    let Some(rhos) = rho_candidates(c, a, cs) else {
        return Ok(Adjustable::Unknown(format!("too many instances of the head of clause {ci} to consider for {a}")));
    };
    let after = c.after_cut();
    let mut unknown = None;
    for rho in rhos {
        for eta in eta_candidates(c, a, &rho, cs, ctx, stats)? {
            stats.instances += 1;
            let inst = after.apply(&rho).apply(&eta);
            match covered(&single(inst), s, a, None, ctx, stats)? {
                Coverage::Covered(..) => {}
                Coverage::Uncovered => {
                    return Ok(Adjustable::No(Counterexample::AdjustableCoverFailure { atom: a.clone(), clause: ci, rho, eta }));
                }
                Coverage::Undetermined(why) => {
                    unknown.get_or_insert(why);
                }
            }
        }
    }
    Ok(match unknown {
        Some(why) => Adjustable::Unknown(why),
        None => Adjustable::Yes,
    })
}

/// Substitutions η grounding the guard atoms (those before the cut) of
/// `c` under ρ into post, with guard atoms of depth at most that of `a`
/// plus the coverage slack.
pub fn eta_candidates(
    c: &Clause,
    a: &Atom,
    rho: &Substitution,
    cs: &CallSuccessSpec,
    ctx: &Ctx,
    stats: &mut Stats,
) -> Result<Vec<Substitution>, VerifyError> {
    let k = c.cut.unwrap_or(0);
    let guards: Vec<Atom> = c.body[..k].iter().map(|g| g.apply(rho)).collect();
    if let Some(etas) = etas_from_post(&guards, cs, stats) {
        return Ok(etas);
    }
    let filters: Vec<usize> = (0..guards.len()).collect();
    let Some(plan) = Plan::new(&guards, &filters, a.depth() + ctx.bounds.delta, &ctx.universe, &BTreeSet::new())? else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    let tested = Cell::new(0u64);
    plan.run(
        &guards,
        |_, g| {
            tested.set(tested.get() + 1);
            Ok::<_, VerifyError>(cs.in_post(g))
        },
        |_, eta| {
            out.push(eta.clone());
            Ok(Step::Descend)
        },
    )?;
    stats.atoms += tested.get();
    Ok(out)
}

/// Solves the guard atoms left to right against the post patterns, which
/// avoids enumerating the universe; `None` when a pattern leaves some
/// variable unconstrained.
fn etas_from_post(guards: &[Atom], cs: &CallSuccessSpec, stats: &mut Stats) -> Option<Vec<Substitution>> {
    let mut partial = vec![Substitution::new()];
    for g in guards {
        let mut next = Vec::new();
        for eta in &partial {
            let g = g.apply(eta);
            stats.atoms += 1;
            if g.is_ground() {
                if cs.in_post(&g) {
                    next.push(eta.clone());
                }
                continue;
            }
            for theta in cs.post_groundings(&g)? {
                next.push(eta.compose(&theta));
            }
        }
        partial = next;
    }
    Some(partial)
}

/// Whether the single ground atom `a` is adjustably covered by some clause.
pub fn check_atom_adjustably_covered(
    p: &Program,
    s: &Spec,
    cs: &CallSuccessSpec,
    a: &Atom,
    ctx: &Ctx,
) -> Result<Report, VerifyError> {
    let mut r = Report::new("adjustable_coverage", format!("{a} is adjustably covered w.r.t. {}", s.name()), &ctx.bounds);
    atom_adjustably_covered(p, s, cs, a, ctx, &mut r)?;
    Ok(r)
}

fn atom_adjustably_covered(p: &Program, s: &Spec, cs: &CallSuccessSpec, a: &Atom, ctx: &Ctx, r: &mut Report) -> Result<(), VerifyError> {
    let mut failure = None;
    let mut unknown = None;
    for (ci, c) in p.clauses().iter().enumerate() {
        if c.head.key() != a.key() {
            continue;
        }
        match adjustably_covered_by(c, ci + 1, a, s, cs, ctx, &mut r.stats)? {
            Adjustable::Yes => return Ok(()),
            Adjustable::No(w) => {
                if failure.is_none() || matches!(w, Counterexample::AdjustableCoverFailure { .. }) {
                    failure = Some(w);
                }
            }
            Adjustable::Unknown(why) => {
                unknown.get_or_insert(why);
            }
        }
    }
    match unknown {
        Some(why) => r.undecided(why),
        None => r.refute(failure.unwrap_or(Counterexample::UncoveredAtom { atom: a.clone() })),
    }
    Ok(())
}

/// Every member of `s` up to the bound is adjustably covered by some clause
/// of `p`, and `s ⊆ post`.
pub fn check_adjustably_covered(p: &Program, s: &Spec, cs: &CallSuccessSpec, ctx: &Ctx) -> Result<Report, VerifyError> {
    p.check_cut_placement().map_err(|e| VerifyError::Precondition(e.to_string()))?;
    let mut r = Report::new(
        "adjustably_covered",
        format!("every atom of {} is adjustably covered w.r.t. {} and pre, post", s.name(), s.name()),
        &ctx.bounds,
    );
    let members = s.enumerate(ctx.depth())?;
    let mut post = Report::new("spec_in_post", format!("{} ⊆ post", s.name()), &ctx.bounds);
    for a in &members {
        post.stats.atoms += 1;
        if !cs.in_post(a) {
            post.refute(Counterexample::SpecInclusion { atom: a.clone(), member_of: s.name().into(), missing_from: "post".into() });
            break;
        }
    }
    r.absorb(post);
    let mut cover = Report::new("adjustable_coverage", r.claim.clone(), &ctx.bounds);
    for a in &members {
        atom_adjustably_covered(p, s, cs, a, ctx, &mut cover)?;
        if cover.is_refuted() {
            break;
        }
    }
    r.absorb(cover);
    Ok(r)
}

/// Runs the LD-trees (cuts ignored) of the queries, checking that every
/// selected atom is in pre and every answer to it is in post.
pub fn check_cs_correct_runtime(p: &Program, cs: &CallSuccessSpec, queries: &[Atom], ctx: &Ctx) -> Result<Report, VerifyError> {
    let mut r = Report::new("cs_correct_runtime", "the derivations respect pre and post".into(), &ctx.bounds);
    for q in queries {
        let mut violation: Option<(usize, Atom, Phase)> = None;
        let t = build_monitored_ld_tree(p, std::slice::from_ref(q), ctx.bounds.budget, &mut |e| {
            let (node, atom, phase, ok) = match e {
                Event::Call { node, atom } => (node, atom, Phase::Call, cs.in_pre(atom)),
                Event::Exit { node, atom } => (node, atom, Phase::Exit, cs.in_post(atom)),
            };
            if !ok {
                violation = Some((node, atom.clone(), phase));
            }
            ok
        });
        r.stats.nodes += t.nodes.len() as u64;
        if let Some((node, atom, phase)) = violation {
            r.refute(Counterexample::CallSuccessViolation { path: t.path(node), atom, phase });
            return Ok(r);
        }
        if !t.is_finite() {
            r.undecided(format!("the LD-tree for {q} exceeds the budget of {} nodes", ctx.bounds.budget));
        }
    }
    Ok(r)
}

/// The cut completeness theorem for atomic queries, each followed by the
/// direct oracle on its pruned tree.
pub fn check_cut_completeness(
    p: &Program,
    s: &Spec,
    cs: &CallSuccessSpec,
    queries: &[Atom],
    ctx: &Ctx,
) -> Result<Report, VerifyError> {
    p.check_cut_placement().map_err(|e| VerifyError::Precondition(e.to_string()))?;
    if let Some(q) = queries.iter().find(|q| !cs.in_pre(q)) {
        return Err(VerifyError::Precondition(format!("{q} is not in pre")));
    }
    let mut r = Report::new(
        "cut_completeness",
        format!("the LD-trees pruned by the cut are complete w.r.t. {}", s.name()),
        &ctx.bounds,
    );
    r.absorb(check_adjustably_covered(p, s, cs, ctx)?);
    r.absorb(check_cs_correct_runtime(p, cs, queries, ctx)?);
    for query in queries {
        let tree = build_pruned_ld_tree(p, std::slice::from_ref(query), ctx.bounds.budget);
        if !tree.is_finite() {
            let mut fin = Report::new("finite_tree", format!("the pruned tree for {query} is finite"), &ctx.bounds);
            fin.stats.nodes = tree.nodes.len() as u64;
            fin.undecided(format!("the pruned tree exceeds the budget of {} nodes", ctx.bounds.budget));
            r.absorb(fin);
            continue;
        }
        let mut oracle = tree_complete_wrt(&tree, s, ctx)?;
        oracle.check = "oracle".into();
        r.absorb(oracle);
    }
    Ok(r)
}
