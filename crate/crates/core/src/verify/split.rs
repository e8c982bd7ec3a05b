//! Splits of a program into (possibly overlapping) subprograms with
//! specifications, and completeness of csSLD-trees built over them.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, Mutex};

use super::definite::{check_acceptable, check_recurrent, covered, Coverage};
use super::{check_spec_inclusion, Counterexample, Ctx, Plan, Report, Stats, VerifyError};
use crate::engine::{answers, Choice, NodeKind, SldTree, TreeKind};
use crate::level::LevelMapping;
use crate::spec::{Spec, SpecError};
use crate::term::{canonical, match_atom, Atom, Program, Term};
use crate::universe::Step;

#[derive(Clone, Debug)]
pub struct SplitPart {
    pub name: String,
    /// 1-based clause numbers of the program.
    pub clauses: Vec<usize>,
    pub program: Program,
    pub spec: Spec,
}

/// Programs Π_i ⊆ P with specifications S_i whose union is S.
#[derive(Clone, Debug)]
pub struct Split {
    pub parts: Vec<SplitPart>,
    pub spec: Spec,
    /// Whether `spec` was given rather than formed as the union.
    explicit: bool,
    diffs: Arc<Mutex<BTreeMap<usize, Arc<Vec<Vec<Atom>>>>>>,
}

impl Split {
    /// With `s` absent, S is the union of the part specifications.
    pub fn new(p: &Program, parts: Vec<(String, Vec<usize>, Spec)>, s: Option<Spec>) -> Result<Split, VerifyError> {
        if parts.is_empty() {
            return Err(VerifyError::Mismatch("a split needs at least one part".into()));
        }
        let mut out = Vec::new();
        for (name, clauses, spec) in parts {
            let program = p.select(&clauses).ok_or_else(|| {
                VerifyError::Mismatch(format!("part {name} names a clause outside 1..{}", p.len()))
            })?;
            out.push(SplitPart { name, clauses, program: Program::definite(program.clauses().to_vec()), spec });
        }
        let explicit = s.is_some();
        let spec = s.unwrap_or_else(|| {
            let specs: Vec<Spec> = out.iter().map(|x| x.spec.clone()).collect();
            Spec::union("S", &specs)
        });
        Ok(Split { parts: out, spec, explicit, diffs: Arc::default() })
    }

    pub fn programs(&self) -> Vec<Program> {
        self.parts.iter().map(|x| x.program.clone()).collect()
    }

    /// Checks that the union of the S_i equals S up to the bound.
    pub fn check_union(&self, ctx: &Ctx) -> Result<Report, VerifyError> {
        let mut r = Report::new("split_union", format!("the part specifications form {}", self.spec.name()), &ctx.bounds);
        if !self.explicit {
            return Ok(r);
        }
        let specs: Vec<Spec> = self.parts.iter().map(|x| x.spec.clone()).collect();
        let union = Spec::union("the union of the parts", &specs);
        r.absorb(check_spec_inclusion(&union, &self.spec, ctx)?);
        r.absorb(check_spec_inclusion(&self.spec, &union, ctx)?);
        Ok(r)
    }

    /// Members of S \ S_i up to the bound, for every part.
    fn differences(&self, ctx: &Ctx) -> Result<Arc<Vec<Vec<Atom>>>, VerifyError> {
        if let Some(d) = self.diffs.lock().expect("split lock").get(&ctx.depth()) {
            return Ok(d.clone());
        }
        let members = self.spec.enumerate(ctx.depth())?;
        let mut out = Vec::new();
        for part in &self.parts {
            let mut diff = Vec::new();
            for a in &members {
                if !part.spec.contains(a)? {
                    diff.push(a.clone());
                }
            }
            out.push(diff);
        }
        let out = Arc::new(out);
        self.diffs.lock().expect("split lock").insert(ctx.depth(), out.clone());
        Ok(out)
    }
}

/// First instance of `a` among `candidates`.
fn instance_among<'c>(a: &Atom, candidates: &'c [Atom]) -> Option<&'c Atom> {
    candidates.iter().find(|b| match_atom(a, b).is_some())
}

/// Π_i is suitable for `a` iff no instance of `a` lies in S \ S_i; `i` is
/// 0-based. Instances range over atoms of depth at most the bound.
pub fn check_suitable(split: &Split, a: &Atom, i: usize, ctx: &Ctx) -> Result<Report, VerifyError> {
    let part = split.parts.get(i).ok_or_else(|| VerifyError::Mismatch(format!("no part {}", i + 1)))?;
    let mut r = Report::new("suitable", format!("{} is suitable for {a}", part.name), &ctx.bounds);
    let diffs = split.differences(ctx)?;
    r.stats.atoms = diffs[i].len() as u64;
    if let Some(b) = instance_among(a, &diffs[i]) {
        r.refute(Counterexample::UnsuitableSelection { node: None, part: Some(i + 1), atom: a.clone(), instance: Some(b.clone()) });
    }
    Ok(r)
}

/// The termination part of the csSLD completeness theorem.
pub enum CsEvidence<'a> {
    FiniteTree,
    Recurrent(&'a LevelMapping),
    /// Requires the tree to be built under the leftmost selection rule.
    Acceptable(&'a LevelMapping, &'a Spec),
}

/// Ground instances of the root with every atom in `s`. A single-atom root
/// is matched against the members of `s`; otherwise the root variables are
/// enumerated under the depth bound.
fn root_instances(root: &[Atom], s: &Spec, ctx: &Ctx, stats: &mut Stats) -> Result<Vec<Vec<Atom>>, VerifyError> {
    if root.iter().all(|a| a.is_ground()) {
        stats.atoms += root.len() as u64;
        return Ok(if s.models(root)? { vec![root.to_vec()] } else { Vec::new() });
    }
    if let [a] = root {
        let members = s.enumerate(ctx.depth())?;
        stats.atoms += members.len() as u64;
        return Ok(members.into_iter().filter(|b| match_atom(a, b).is_some()).map(|b| vec![b]).collect());
    }
    let filters: Vec<usize> = (0..root.len()).collect();
    let mut out = Vec::new();
    if let Some(plan) = Plan::new(root, &filters, ctx.depth(), &ctx.universe, &BTreeSet::new())? {
        plan.run(
            root,
            |_, b| {
                stats.atoms += 1;
                s.contains(b)
            },
            |inst, _| {
                out.push(inst.to_vec());
                Ok::<_, SpecError>(Step::Descend)
            },
        )?;
    }
    Ok(out)
}

fn conj(atoms: &[Atom]) -> Atom {
    Atom::new("q", atoms.iter().map(|a| a.as_term()).collect::<Vec<Term>>())
}

/// Every ground instance of the root query in `s` (up to the bound) is an
/// instance of a computed answer of the finite tree.
pub fn tree_complete_wrt(tree: &SldTree, s: &Spec, ctx: &Ctx) -> Result<Report, VerifyError> {
    let root: Vec<String> = tree.root.iter().map(|a| a.to_string()).collect();
    let mut r = Report::new("tree_complete", format!("the tree for {} is complete w.r.t. {}", root.join(", "), s.name()), &ctx.bounds);
    r.stats.nodes = tree.nodes.len() as u64;
    if !tree.is_finite() {
        r.undecided(format!("the tree is not finite within the budget of {} nodes", ctx.bounds.budget));
        return Ok(r);
    }
    let ans: Vec<Atom> = answers(tree).iter().map(|a| conj(&a.atoms)).collect();
    for inst in root_instances(&tree.root, s, ctx, &mut r.stats)? {
        r.stats.instances += 1;
        let q = conj(&inst);
        if !ans.iter().any(|a| match_atom(a, &q).is_some()) {
            r.refute(Counterexample::MissingAnswer { instance: inst });
            break;
        }
    }
    Ok(r)
}

/// Checks the csSLD completeness theorem on a concrete tree: coverage of
/// each S_i by Π_i, compatibility of every selection, and termination.
/// The direct oracle is appended as a cross-check.
pub fn check_cssld_completeness(
    p: &Program,
    split: &Split,
    tree: &SldTree,
    evidence: &CsEvidence<'_>,
    ctx: &Ctx,
) -> Result<Report, VerifyError> {
    if tree.kind != TreeKind::CsSld || tree.programs != split.programs() {
        return Err(VerifyError::Mismatch("the tree was not built over the programs of the split".into()));
    }
    let s = &split.spec;
    let mut r = Report::new("cssld_completeness", format!("the csSLD-tree is complete w.r.t. {}", s.name()), &ctx.bounds);
    r.absorb(split.check_union(ctx)?);

    for part in &split.parts {
        let mut c = Report::new(
            "part_coverage",
            format!("every atom of {} is covered by {} w.r.t. {}", part.spec.name(), part.name, s.name()),
            &ctx.bounds,
        );
        for a in part.spec.enumerate(ctx.depth())? {
            match covered(&part.program, s, &a, None, ctx, &mut c.stats)? {
                Coverage::Covered(..) => {}
                Coverage::Uncovered => {
                    c.refute(Counterexample::UncoveredAtom { atom: a });
                    break;
                }
                Coverage::Undetermined(why) => c.undecided(why),
            }
        }
        r.absorb(c);
    }

    let mut compat = Report::new("compatibility", "the tree is compatible with the split".into(), &ctx.bounds);
    let diffs = split.differences(ctx)?;
    let mut seen: BTreeSet<(Vec<Atom>, usize)> = BTreeSet::new();
    for n in &tree.nodes {
        let (Some(a), Some(choice)) = (&n.selected, n.choice) else { continue };
        compat.stats.atoms += 1;
        let i = match choice {
            Choice::Empty => {
                compat.refute(Counterexample::UnsuitableSelection { node: Some(n.id), part: None, atom: a.clone(), instance: None });
                break;
            }
            Choice::Part(i) => i,
        };
        let key = (canonical(std::slice::from_ref(a)), i);
        if seen.contains(&key) {
            continue;
        }
        if let Some(b) = instance_among(a, &diffs[i]) {
            compat.refute(Counterexample::UnsuitableSelection {
                node: Some(n.id),
                part: Some(i + 1),
                atom: a.clone(),
                instance: Some(b.clone()),
            });
            break;
        }
        seen.insert(key);
    }
    if tree.nodes.iter().any(|n| n.kind == NodeKind::Open) {
        compat.undecided("part of the tree is unexplored".into());
    }
    r.absorb(compat);

    let term = match evidence {
        CsEvidence::FiniteTree => {
            let mut f = Report::new("finite_tree", "the tree is finite".into(), &ctx.bounds);
            f.stats.nodes = tree.nodes.len() as u64;
            if !tree.is_finite() {
                f.undecided(format!("the tree exceeds the budget of {} nodes", ctx.bounds.budget));
            }
            f
        }
        CsEvidence::Recurrent(lm) => check_recurrent(p, lm, ctx)?,
        CsEvidence::Acceptable(lm, sp) => {
            let mut a = check_acceptable(p, lm, sp, ctx)?;
            if !tree.leftmost {
                a.undecided("acceptability applies only to trees built under the leftmost selection rule".into());
            }
            a
        }
    };
    r.absorb(term);

    if tree.is_finite() {
        let mut oracle = tree_complete_wrt(tree, s, ctx)?;
        oracle.check = "oracle".into();
        r.absorb(oracle);
    }
    Ok(r)
}
