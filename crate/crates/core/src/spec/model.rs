//! Depth-bounded iteration of the immediate consequence operator.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::term::{match_atom, Atom, Clause, Program, Substitution, Sym, Term, Var};
use crate::universe::{instance_caps, odometer, Step, Universe, UniverseError};

/// `atoms` is `T_P ↑ k` restricted to clause instances whose atoms all have
/// depth at most the bound. When the iteration cap stopped the computation
/// before a fixpoint, `censored` holds the atoms first derived in the last
/// iteration.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LeastModel {
    pub atoms: BTreeSet<Atom>,
    pub saturated: bool,
    pub censored: BTreeSet<Atom>,
    pub iterations: usize,
}

impl LeastModel {
    /// Atoms not flagged as censored.
    pub fn settled(&self) -> BTreeSet<Atom> {
        self.atoms.difference(&self.censored).cloned().collect()
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.atoms.contains(a)
    }
}

type Index = BTreeMap<(Sym, usize), Vec<Atom>>;

fn join(
    body: &[Atom],
    index: &Index,
    s: Substitution,
    out: &mut Vec<Substitution>,
) {
    let Some((first, rest)) = body.split_first() else {
        out.push(s);
        return;
    };
    let pat = first.apply(&s);
    let Some(facts) = index.get(&pat.key()) else { return };
    for f in facts {
        if let Some(m) = match_atom(&pat, f) {
            join(rest, index, s.compose(&m), out);
        }
    }
}

/// Consequences of one clause over `index`, restricted by `caps`.
fn consequences(
    c: &Clause,
    caps: &BTreeMap<Var, usize>,
    depth: usize,
    index: &Index,
    universe: &Universe,
    out: &mut BTreeSet<Atom>,
) -> Result<(), UniverseError> {
    let mut joins = Vec::new();
    join(&c.body, index, Substitution::new(), &mut joins);
    for s in joins {
        let head = c.head.apply(&s);
        let free = head.vars();
        if free.is_empty() {
            if head.depth() <= depth {
                out.insert(head);
            }
            continue;
        }
        let domains: Vec<Arc<Vec<Term>>> =
            free.iter().map(|v| universe.up_to(caps.get(v).copied().unwrap_or(0))).collect::<Result<_, _>>()?;
        odometer(&domains, |k, vals| {
            if k + 1 == free.len() {
                let h = head.bind(&free, vals);
                if h.depth() <= depth {
                    out.insert(h);
                }
            }
            Step::Descend
        });
    }
    Ok(())
}

/// Least model of `p` over atoms of depth at most `depth`, iterating at most
/// `cap` times.
pub fn bounded_least_model(
    p: &Program,
    universe: &Universe,
    depth: usize,
    cap: usize,
) -> Result<LeastModel, UniverseError> {
    let clauses: Vec<(Clause, BTreeMap<Var, usize>)> = p
        .clauses()
        .iter()
        .filter_map(|c| {
            let c = c.without_cut();
            let caps = instance_caps(std::iter::once(&c.head).chain(c.body.iter()), depth)?;
            Some((c, caps))
        })
        .collect();
    let mut model = LeastModel::default();
    let mut index: Index = BTreeMap::new();
    let mut last_new = BTreeSet::new();
    while model.iterations < cap {
        let mut derived = BTreeSet::new();
        for (c, caps) in &clauses {
            consequences(c, caps, depth, &index, universe, &mut derived)?;
        }
        model.iterations += 1;
        let new: BTreeSet<Atom> = derived.into_iter().filter(|a| !model.atoms.contains(a)).collect();
        if new.is_empty() {
            model.saturated = true;
            return Ok(model);
        }
        for a in &new {
            index.entry(a.key()).or_default().push(a.clone());
        }
        model.atoms.extend(new.iter().cloned());
        last_new = new;
    }
    // A cap of zero leaves nothing derived and nothing to flag.
    model.censored = last_new;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;
    use crate::universe::Signature;

    fn universe_for(p: &Program, fresh: usize) -> Universe {
        let mut sig = Signature::new();
        sig.add_program(p);
        sig.add_fresh_constants(fresh);
        Universe::new(sig)
    }

    /// Applies `T_P` once by brute force over all ground instances within
    /// the depth bound.
    fn tp_oracle(p: &Program, u: &Universe, depth: usize, i: &BTreeSet<Atom>) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        let terms = u.up_to(depth).unwrap();
        for c in p.clauses() {
            let vars = c.vars();
            let domains: Vec<Arc<Vec<Term>>> = vars.iter().map(|_| terms.clone()).collect();
            odometer(&domains, |k, vals| {
                if k == usize::MAX || k + 1 == vars.len() {
                    let inst = c.bind(&vars, vals);
                    let ok = inst.head.depth() <= depth
                        && inst.body.iter().all(|b| b.depth() <= depth && i.contains(b));
                    if ok {
                        out.insert(inst.head);
                    }
                }
                Step::Descend
            });
        }
        out
    }

    #[test]
    fn matches_brute_force_iteration() {
        let p = parse_program("app([H|K],L,[H|M]) :- app(K,L,M).\napp([],L,L).").unwrap().program;
        let u = universe_for(&p, 1);
        for depth in 1..=2 {
            let m = bounded_least_model(&p, &u, depth, 100).unwrap();
            assert!(m.saturated);
            let mut i = BTreeSet::new();
            loop {
                let next = tp_oracle(&p, &u, depth, &i);
                if next == i {
                    break;
                }
                i = next;
            }
            assert_eq!(m.atoms, i, "depth {depth}");
        }
    }

    #[test]
    fn cap_flags_last_iteration() {
        let p = parse_program("n(0). n(s(X)) :- n(X).").unwrap().program;
        let u = universe_for(&p, 0);
        let m = bounded_least_model(&p, &u, 10, 3).unwrap();
        assert!(!m.saturated);
        assert_eq!(m.atoms.len(), 3);
        assert_eq!(m.censored.len(), 1);
        assert_eq!(m.settled().len(), 2);
        let full = bounded_least_model(&p, &u, 4, 100).unwrap();
        assert!(full.saturated);
        assert_eq!(full.atoms.len(), 4);
    }
}
