//! Randomized property suites. Each returns a one-line summary or the
//! shrunk counterexample.

use std::cell::Cell;
use std::collections::BTreeSet;
use std::sync::Arc;

use lpcomplete::engine::{build_pruned_ld_tree, build_sld_tree, Leftmost};
use lpcomplete::parser::{parse_level_mapping, parse_spec};
use lpcomplete::spec::model::bounded_least_model;
use lpcomplete::spec::{Spec, SpecSet};
use lpcomplete::term::{is_variant, mgu_term, Atom, Clause, Program, Substitution, Term, Var};
use lpcomplete::universe::{Signature, Universe};
use lpcomplete::verify::{self, revalidate, Bounds, Ctx, Verdict};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub const CASES: u32 = 1000;

fn run<S: Strategy>(cases: u32, strat: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner.run(&strat, test).map_err(|e| e.to_string())
}

fn fail(e: impl std::fmt::Display) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

fn c(name: &str) -> Term {
    Term::constant(name)
}

fn f(t: Term) -> Term {
    Term::app("f", vec![t])
}

// --- unification -----------------------------------------------------------

fn open_term() -> impl Strategy<Value = Term> {
    let leaf = prop::sample::select(vec![Term::var("X"), Term::var("Y"), Term::var("Z"), c("a"), c("b")]);
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(f),
            (inner.clone(), inner).prop_map(|(x, y)| Term::app("g", vec![x, y])),
        ]
    })
}

fn subst() -> impl Strategy<Value = Substitution> {
    prop::collection::vec(open_term(), 3).prop_map(|ts| {
        Substitution::from_pairs(["X", "Y", "Z"].iter().zip(ts).filter(|(v, t)| t.as_var() != Some(&Var::new(v))).map(|(v, t)| (Var::new(v), t)))
    })
}

fn term_pair() -> impl Strategy<Value = (Term, Term)> {
    prop_oneof![
        (open_term(), open_term()),
        (open_term(), subst(), subst()).prop_map(|(t, s1, s2)| (t.apply(&s1), t.apply(&s2))),
    ]
}

/// Ground assignments of `vars` over a few small terms.
fn ground_assignments(vars: &[Var]) -> Vec<Substitution> {
    let pool = [c("a"), c("b"), f(c("a")), Term::app("g", vec![c("a"), c("b")])];
    let mut out = vec![Substitution::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|s| {
                pool.iter().map(move |t| {
                    let mut s = s.clone();
                    s.insert(v.clone(), t.clone());
                    s
                })
            })
            .collect();
    }
    out
}

/// The mgu unifies, is idempotent, mentions only variables of the two
/// terms, and every ground unifier found by brute force factors through it.
pub fn mgu_laws() -> Result<String, String> {
    let unified = Cell::new(0usize);
    run(CASES, term_pair(), |(s, t)| {
        let mut vars = s.vars();
        t.vars_into(&mut vars);
        vars.sort();
        vars.dedup();
        let ground: Vec<Substitution> =
            ground_assignments(&vars).into_iter().filter(|g| s.apply(g) == t.apply(g)).collect();
        match mgu_term(&s, &t) {
            Some(theta) => {
                unified.set(unified.get() + 1);
                prop_assert_eq!(s.apply(&theta), t.apply(&theta));
                prop_assert!(theta.is_idempotent(), "{theta} is not idempotent");
                let relevant: BTreeSet<Var> = vars.iter().cloned().collect();
                prop_assert!(theta.domain().is_subset(&relevant) && theta.range_vars().is_subset(&relevant), "{theta} is not relevant");
                for g in &ground {
                    prop_assert!(vars.iter().all(|v| Term::Var(v.clone()).apply(&theta).apply(g) == Term::Var(v.clone()).apply(g)), "{g} does not factor through {theta}");
                }
            }
            None => prop_assert!(ground.is_empty(), "{s} and {t} have the ground unifier {}", ground[0]),
        }
        Ok(())
    })?;
    Ok(format!("{CASES} pairs, {} unifiable", unified.get()))
}

// --- specifications ----------------------------------------------------------

const SPEC_LEAVES: &[&str] = &[
    "{ p(X) | list(X) }",
    "{ p(X) | \\+ list(X) }",
    "{ p(X) | term(X), X \\= a }",
    "{ p(a), p(f(b)), r(a,b) }",
    "{ r(X,X) | term(X) }",
    "{ r(X,f(X)) | ground(X) }",
    "{ p(f(X)) | term(X) }",
    "{ r(X,Y) | list(Y), member(X,Y) }",
    "{ r(X,Y) | term(X), term(Y), (X \\= Y ; list(X)) }",
    "{}",
];

fn spec_expr() -> impl Strategy<Value = String> {
    prop::sample::select(SPEC_LEAVES).prop_map(str::to_string).prop_recursive(3, 8, 2, |inner| {
        (inner.clone(), inner, any::<bool>()).prop_map(|(a, b, u)| format!("({a} {} {b})", if u { "+" } else { "&" }))
    })
}

fn spec_universe() -> Arc<Universe> {
    let mut sig = Signature::new();
    for t in [c("a"), c("b"), f(c("a")), Term::list(vec![c("a")])] {
        sig.add_term(&t);
    }
    sig.add_predicate("p", 1);
    sig.add_predicate("r", 2);
    Arc::new(Universe::new(sig))
}

fn bind(src: &str, u: &Arc<Universe>) -> Result<Spec, TestCaseError> {
    let set = SpecSet::bind(&parse_spec(src).map_err(fail)?, u.clone()).map_err(fail)?;
    Ok(set.get("s").map_err(fail)?.clone())
}

/// Enumeration at depth d is exactly the set of atoms of depth at most d
/// for which the membership test succeeds.
pub fn spec_consistency() -> Result<String, String> {
    let u = spec_universe();
    run(CASES, (spec_expr(), 1usize..=2), |(e, d)| {
        let s = bind(&format!("spec s = {e}."), &u)?;
        let members: BTreeSet<Atom> = s.enumerate(d).map_err(fail)?.into_iter().collect();
        let terms = u.up_to(d - 1).map_err(fail)?;
        let mut base = Vec::new();
        for t in terms.iter() {
            base.push(Atom::new("p", vec![t.clone()]));
            base.extend(terms.iter().map(|x| Atom::new("r", vec![t.clone(), x.clone()])));
        }
        for a in &members {
            prop_assert!(a.is_ground() && a.depth() <= d, "{a} enumerated at depth {d}");
        }
        let mut inside = 0;
        for a in &base {
            let m = s.contains(a).map_err(fail)?;
            prop_assert_eq!(m, members.contains(a), "{} for {}", a, e);
            inside += m as usize;
        }
        prop_assert_eq!(inside, members.len());
        Ok(())
    })?;
    Ok(format!("{CASES} expressions"))
}

// --- generated programs ------------------------------------------------------

/// Predicates by rank; a clause body calls only predicates of lower rank,
/// so every generated program is hierarchical and its LD-trees are finite.
const PREDS: [(&str, usize); 3] = [("e", 1), ("q", 2), ("p", 1)];

#[derive(Clone, Debug)]
struct ClauseSeed {
    pred: usize,
    head: [Term; 2],
    body: Vec<(usize, [usize; 2])>,
    cut: Option<usize>,
}

fn head_term() -> impl Strategy<Value = Term> {
    let leaf = prop::sample::select(vec![Term::var("X"), Term::var("Y"), c("a"), c("b")]);
    prop_oneof![3 => leaf.clone(), 2 => leaf.clone().prop_map(f), 1 => leaf.prop_map(|t| f(f(t)))]
}

fn clause_seed() -> impl Strategy<Value = ClauseSeed> {
    (0..3usize, [head_term(), head_term()], prop::collection::vec((0..3usize, [0..4usize, 0..4usize]), 0..=2), prop::option::of(0..3usize))
        .prop_map(|(pred, head, body, cut)| ClauseSeed { pred, head, body, cut })
}

/// Body arguments are head variables or constants, so body atoms are never
/// deeper than the head.
fn build_clause(s: &ClauseSeed) -> Clause {
    let (name, arity) = PREDS[s.pred];
    let head = Atom::new(name, s.head[..arity].to_vec());
    let mut pool: Vec<Term> = head.vars().into_iter().map(Term::Var).collect();
    pool.extend([c("a"), c("b")]);
    let body: Vec<Atom> = if s.pred == 0 {
        Vec::new()
    } else {
        s.body
            .iter()
            .map(|(p, args)| {
                let (bn, ba) = PREDS[p % s.pred];
                Atom::new(bn, args[..ba].iter().map(|i| pool[i % pool.len()].clone()).collect())
            })
            .collect()
    };
    match s.cut {
        Some(k) => {
            let k = k.min(body.len());
            Clause::with_cut(head, body, k)
        }
        None => Clause::new(head, body),
    }
}

fn with_cuts(seeds: &[ClauseSeed]) -> Program {
    Program::with_cuts(seeds.iter().map(build_clause).collect())
}

fn definite(seeds: &[ClauseSeed]) -> Program {
    Program::definite(seeds.iter().map(|s| build_clause(s).without_cut()).collect())
}

fn program_seeds() -> impl Strategy<Value = Vec<ClauseSeed>> {
    prop::collection::vec(clause_seed(), 1..=5)
}

fn ground_atom() -> impl Strategy<Value = Atom> {
    let t = prop::sample::select(vec![c("a"), c("b"), f(c("a")), f(c("b")), f(f(c("a")))]);
    (0..3usize, t.clone(), t).prop_map(|(p, x, y)| {
        let (n, a) = PREDS[p];
        Atom::new(n, [x, y][..a].to_vec())
    })
}

fn query_atom() -> impl Strategy<Value = Atom> {
    let t = prop::sample::select(vec![Term::var("U"), Term::var("W"), c("a"), c("b"), f(Term::var("U")), f(c("a"))]);
    (0..3usize, t.clone(), t).prop_map(|(p, x, y)| {
        let (n, a) = PREDS[p];
        Atom::new(n, [x, y][..a].to_vec())
    })
}

fn program_universe() -> Arc<Universe> {
    let mut sig = Signature::new();
    for t in [c("a"), c("b"), f(c("a"))] {
        sig.add_term(&t);
    }
    PREDS.iter().for_each(|(n, a)| sig.add_predicate(n, *a));
    Arc::new(Universe::new(sig))
}

fn ctx(u: &Arc<Universe>, depth: usize) -> Ctx {
    Ctx::new(u.clone(), Bounds { depth, delta: 2, budget: 5_000 })
}

fn explicit(atoms: &BTreeSet<Atom>, u: &Arc<Universe>) -> Result<Spec, TestCaseError> {
    let items: Vec<String> = atoms.iter().map(|a| a.to_string()).collect();
    bind(&format!("spec s = {{ {} }}.", items.join(", ")), u)
}

/// A specification near the least model: the model at depth 3 with some
/// atoms dropped and some added, or exactly the model.
#[derive(Clone, Debug)]
struct Perturbation {
    exact: bool,
    drop: Vec<usize>,
    add: Vec<Atom>,
}

fn perturbation() -> impl Strategy<Value = Perturbation> {
    (any::<bool>(), prop::collection::vec(0..64usize, 0..3), prop::collection::vec(ground_atom(), 0..3))
        .prop_map(|(exact, drop, add)| Perturbation { exact, drop, add })
}

fn near_model(p: &Program, u: &Arc<Universe>, pert: &Perturbation) -> Result<Spec, TestCaseError> {
    let m = bounded_least_model(p, u, 3, 1_000).map_err(fail)?;
    let mut atoms: Vec<Atom> = m.atoms.into_iter().collect();
    if !pert.exact {
        for i in &pert.drop {
            if !atoms.is_empty() {
                let i = i % atoms.len();
                atoms.remove(i);
            }
        }
        atoms.extend(pert.add.iter().cloned());
    }
    explicit(&atoms.into_iter().collect(), u)
}

/// Refutations of correctness, coverage and tree completeness carry
/// witnesses that the direct re-checks confirm.
pub fn witness_revalidation() -> Result<String, String> {
    let u = program_universe();
    let refuted = Cell::new(0usize);
    run(CASES, (program_seeds(), perturbation(), query_atom(), 2usize..=3), |(seeds, pert, q, d)| {
        let p = definite(&seeds);
        let s = near_model(&p, &u, &pert)?;
        let cx = ctx(&u, d);
        let r = verify::check_correctness(&p, &s, &cx).map_err(fail)?;
        if let Some(w) = &r.witness {
            refuted.set(refuted.get() + 1);
            prop_assert!(revalidate::bad_clause_instance(&p, &s, w).map_err(fail)?, "{w} does not revalidate");
        }
        let r = verify::check_covered(&p, &s, &cx).map_err(fail)?;
        if let Some(w) = &r.witness {
            refuted.set(refuted.get() + 1);
            prop_assert!(revalidate::uncovered_atom(&p, &s, w, &cx).map_err(fail)?, "{w} does not revalidate");
        }
        let t = build_sld_tree(&p, std::slice::from_ref(&q), &Leftmost, cx.bounds.budget);
        let r = verify::tree_complete_wrt(&t, &s, &cx).map_err(fail)?;
        if let Some(w) = &r.witness {
            refuted.set(refuted.get() + 1);
            prop_assert!(revalidate::missing_answer(&t, &s, w).map_err(fail)?, "{w} does not revalidate");
        }
        Ok(())
    })?;
    Ok(format!("{CASES} programs, {} witnesses re-checked", refuted.get()))
}

/// A refutation at depth d persists at depth d + 1.
pub fn depth_monotonicity() -> Result<String, String> {
    let u = program_universe();
    run(CASES, (program_seeds(), perturbation(), 1usize..=2), |(seeds, pert, d)| {
        let p = definite(&seeds);
        let s = near_model(&p, &u, &pert)?;
        let (lo, hi) = (ctx(&u, d), ctx(&u, d + 1));
        for (name, check) in [
            ("correctness", verify::check_correctness as fn(&Program, &Spec, &Ctx) -> Result<verify::Report, verify::VerifyError>),
            ("coverage", verify::check_covered),
        ] {
            let a = check(&p, &s, &lo).map_err(fail)?.verdict;
            let b = check(&p, &s, &hi).map_err(fail)?.verdict;
            prop_assert!(a != Verdict::Refuted || b == Verdict::Refuted, "{name}: {a} at depth {d}, {b} at depth {}", d + 1);
        }
        Ok(())
    })?;
    Ok(format!("{CASES} programs"))
}

/// Recurrent coverage under any constant level mapping implies coverage.
pub fn recurrent_coverage_implies_coverage() -> Result<String, String> {
    let u = program_universe();
    let premise = Cell::new(0usize);
    run(CASES, (program_seeds(), perturbation(), [0..4usize, 0..4usize, 0..4usize]), |(seeds, pert, levels)| {
        let p = definite(&seeds);
        let s = near_model(&p, &u, &pert)?;
        let lm = parse_level_mapping(&format!("|e(X)| = {}.\n|q(X,Y)| = {}.\n|p(X)| = {}.\n", levels[0], levels[1], levels[2]))
            .map_err(fail)?;
        let cx = ctx(&u, 3);
        let rc = verify::check_recurrently_covered(&p, &s, &lm, &cx).map_err(fail)?;
        if rc.verdict == Verdict::VerifiedUpToBound {
            premise.set(premise.get() + 1);
            let cv = verify::check_covered(&p, &s, &cx).map_err(fail)?;
            prop_assert_eq!(cv.verdict, Verdict::VerifiedUpToBound, "{}", cv.to_text());
        }
        Ok(())
    })?;
    Ok(format!("{CASES} programs, {} recurrently covered", premise.get()))
}

/// Every answer of the pruned LD-tree is an answer of the full LD-tree.
pub fn pruned_answers_are_answers() -> Result<String, String> {
    run(CASES, (program_seeds(), query_atom()), |(seeds, q)| {
        let root = std::slice::from_ref(&q);
        let pruned = build_pruned_ld_tree(&with_cuts(&seeds), root, 5_000);
        let full = build_sld_tree(&definite(&seeds), root, &Leftmost, 5_000);
        prop_assert!(pruned.is_finite() && full.is_finite());
        let all: Vec<Atom> = full.answers().iter().map(|a| a.atoms[0].clone()).collect();
        for a in pruned.answers() {
            prop_assert!(all.iter().any(|b| is_variant(&a.atoms[0], b)), "{} is not a full answer", a.atoms[0]);
        }
        prop_assert!(pruned.answers().len() <= all.len());
        Ok(())
    })?;
    Ok(format!("{CASES} programs"))
}

/// For the hierarchical generated programs, correctness and coverage of S
/// give equality of S with the least model at the depth bound.
pub fn correct_and_covered_is_least_model() -> Result<String, String> {
    let u = program_universe();
    let premise = Cell::new(0usize);
    run(CASES, (program_seeds(), perturbation(), 1usize..=3), |(seeds, pert, d)| {
        let p = definite(&seeds);
        let s = near_model(&p, &u, &pert)?;
        let cx = ctx(&u, d);
        let correct = verify::check_correctness(&p, &s, &cx).map_err(fail)?.verdict == Verdict::VerifiedUpToBound;
        let covered = verify::check_covered(&p, &s, &cx).map_err(fail)?.verdict == Verdict::VerifiedUpToBound;
        if correct && covered {
            premise.set(premise.get() + 1);
            let m = verify::check_least_model(&p, &s, &cx).map_err(fail)?;
            prop_assert_eq!(m.verdict, Verdict::VerifiedUpToBound, "{}\n{}", p, m.to_text());
        }
        Ok(())
    })?;
    Ok(format!("{CASES} programs, {} correct and covered", premise.get()))
}

pub type Suite = fn() -> Result<String, String>;

pub const SUITES: [(&str, Suite); 7] = [
    ("mgu laws", mgu_laws),
    ("enumeration agrees with membership", spec_consistency),
    ("witnesses revalidate", witness_revalidation),
    ("refutation is monotone in depth", depth_monotonicity),
    ("recurrently covered implies covered", recurrent_coverage_implies_coverage),
    ("pruned answers are answers", pruned_answers_are_answers),
    ("correct and covered gives the least model", correct_and_covered_is_least_model),
];
