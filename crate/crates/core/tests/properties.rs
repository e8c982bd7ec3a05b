//! Each property suite on its own, for focused reruns.

mod common;

use common::props;

fn check(f: fn() -> Result<String, String>) {
    if let Err(e) = f() {
        panic!("{e}");
    }
}

#[test]
fn mgu_laws() {
    check(props::mgu_laws);
}

#[test]
fn spec_consistency() {
    check(props::spec_consistency);
}

#[test]
fn witness_revalidation() {
    check(props::witness_revalidation);
}

#[test]
fn depth_monotonicity() {
    check(props::depth_monotonicity);
}

#[test]
fn recurrent_coverage_implies_coverage() {
    check(props::recurrent_coverage_implies_coverage);
}

#[test]
fn pruned_answers_are_answers() {
    check(props::pruned_answers_are_answers);
}

#[test]
fn correct_and_covered_is_least_model() {
    check(props::correct_and_covered_is_least_model);
}

/// Without termination the implication fails: p(a) <- p(a) is correct and
/// covered w.r.t. {p(a)} but its least model is empty.
#[test]
fn correct_and_covered_without_termination() {
    use lpcomplete::load::load;
    use lpcomplete::verify::{check_correctness, check_covered, check_least_model, Bounds, Ctx, Verdict};
    let l = load("p(a) :- p(a).", "spec s = { p(a) }.", &[], 0).unwrap();
    let ctx = Ctx::new(l.universe.clone(), Bounds { depth: 2, ..Bounds::default() });
    let (p, s) = (&l.program, l.specs.get("s").unwrap());
    assert_eq!(check_correctness(p, s, &ctx).unwrap().verdict, Verdict::VerifiedUpToBound);
    assert_eq!(check_covered(p, s, &ctx).unwrap().verdict, Verdict::VerifiedUpToBound);
    assert_eq!(check_least_model(p, s, &ctx).unwrap().verdict, Verdict::Refuted);
}
