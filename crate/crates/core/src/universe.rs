//! Signatures and the depth-stratified Herbrand universe.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::term::{Atom, Clause, Program, Sym, Term, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UniverseError {
    #[error("signature has no constants, so the Herbrand universe is empty")]
    NoConstants,
    #[error("universe up to depth {depth} would hold about {size} terms (limit {limit})")]
    TooLarge { depth: usize, size: u128, limit: usize },
}

/// Function symbols with arities; constants have arity 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: BTreeSet<(Sym, usize)>,
    predicates: BTreeSet<(Sym, usize)>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_symbol(&mut self, name: &str, arity: usize) {
        self.symbols.insert((Sym::new(name), arity));
    }

    pub fn add_term(&mut self, t: &Term) {
        if let Term::App(f, args) = t {
            self.symbols.insert((f.clone(), args.len()));
            args.iter().for_each(|a| self.add_term(a));
        }
    }

    pub fn add_atom(&mut self, a: &Atom) {
        self.predicates.insert(a.key());
        a.args.iter().for_each(|t| self.add_term(t));
    }

    /// Adds the terms of `a` without registering its predicate.
    pub fn add_atom_terms(&mut self, a: &Atom) {
        a.args.iter().for_each(|t| self.add_term(t));
    }

    pub fn add_clause(&mut self, c: &Clause) {
        self.add_atom(&c.head);
        c.body.iter().for_each(|a| self.add_atom(a));
    }

    pub fn add_program(&mut self, p: &Program) {
        p.clauses().iter().for_each(|c| self.add_clause(c));
    }

    pub fn add_predicate(&mut self, name: &str, arity: usize) {
        self.predicates.insert((Sym::new(name), arity));
    }

    /// Adds `n` fresh constants named by the smallest positive integers not
    /// already in the signature, returning their names.
    pub fn add_fresh_constants(&mut self, n: usize) -> Vec<Sym> {
        let mut added = Vec::new();
        let mut k = 1usize;
        while added.len() < n {
            let name = k.to_string();
            if !self.symbols.iter().any(|(s, _)| s.as_str() == name) {
                let s = Sym::new(&name);
                self.symbols.insert((s.clone(), 0));
                added.push(s);
            }
            k += 1;
        }
        added
    }

    pub fn constants(&self) -> Vec<Sym> {
        self.symbols.iter().filter(|(_, n)| *n == 0).map(|(s, _)| s.clone()).collect()
    }

    pub fn functions(&self) -> Vec<(Sym, usize)> {
        self.symbols.iter().filter(|(_, n)| *n > 0).cloned().collect()
    }

    pub fn symbols(&self) -> &BTreeSet<(Sym, usize)> {
        &self.symbols
    }

    pub fn predicates(&self) -> &BTreeSet<(Sym, usize)> {
        &self.predicates
    }

    pub fn has_symbol(&self, name: &str, arity: usize) -> bool {
        self.symbols.contains(&(Sym::new(name), arity))
    }
}

/// Mixed-radix increment; `false` once every position wrapped.
fn advance(idx: &mut [usize], base: usize) -> bool {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < base {
            return true;
        }
        idx[i] = 0;
    }
    false
}

pub const DEFAULT_UNIVERSE_LIMIT: usize = 4_000_000;

/// Ground terms of the signature, generated lazily by depth. `up_to(d)` is
/// ordered by depth, then by generation order; the order is deterministic.
#[derive(Debug)]
pub struct Universe {
    sig: Signature,
    limit: usize,
    cumulative: Mutex<Vec<Arc<Vec<Term>>>>,
    lists: Mutex<BTreeMap<usize, Arc<Vec<Term>>>>,
}

impl Universe {
    pub fn new(sig: Signature) -> Self {
        Self::with_limit(sig, DEFAULT_UNIVERSE_LIMIT)
    }

    pub fn with_limit(sig: Signature, limit: usize) -> Self {
        Universe { sig, limit, cumulative: Mutex::new(Vec::new()), lists: Mutex::new(BTreeMap::new()) }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    /// All ground terms of depth at most `depth`.
    pub fn up_to(&self, depth: usize) -> Result<Arc<Vec<Term>>, UniverseError> {
        let mut cum = self.cumulative.lock().expect("universe lock");
        if cum.is_empty() {
            let consts: Vec<Term> = self.sig.constants().iter().map(|s| Term::app_sym(s.clone(), vec![])).collect();
            if consts.is_empty() {
                return Err(UniverseError::NoConstants);
            }
            cum.push(Arc::new(consts));
        }
        while cum.len() <= depth {
            let k = cum.len();
            let prev = cum[k - 1].clone();
            let older = if k >= 2 { cum[k - 2].len() } else { 0 };
            let n = prev.len() as u128;
            let mut estimate = prev.len() as u128;
            for (_, ar) in self.sig.functions() {
                estimate += n.saturating_pow(ar as u32) - (older as u128).saturating_pow(ar as u32);
            }
            if estimate > self.limit as u128 {
                return Err(UniverseError::TooLarge { depth: k, size: estimate, limit: self.limit });
            }
            if self.sig.functions().is_empty() {
                cum.push(prev);
                continue;
            }
            let mut next: Vec<Term> = prev.as_ref().clone();
            for (f, ar) in self.sig.functions() {
                let mut idx = vec![0usize; ar];
                loop {
                    // At least one argument must have depth exactly k-1.
                    if idx.iter().any(|&i| i >= older) {
                        next.push(Term::app_sym(f.clone(), idx.iter().map(|&i| prev[i].clone()).collect()));
                    }
                    if !advance(&mut idx, prev.len()) {
                        break;
                    }
                }
            }
            cum.push(Arc::new(next));
        }
        Ok(cum[depth].clone())
    }

    /// Number of distinct terms of depth at most `depth`.
    pub fn count(&self, depth: usize) -> Result<usize, UniverseError> {
        Ok(self.up_to(depth)?.len())
    }

    /// Proper ground lists of depth at most `depth`, all elements drawn
    /// from the universe.
    pub fn lists_up_to(&self, depth: usize) -> Result<Arc<Vec<Term>>, UniverseError> {
        if let Some(l) = self.lists.lock().expect("lists lock").get(&depth) {
            return Ok(l.clone());
        }
        let mut out = Vec::new();
        if self.sig.has_symbol(crate::term::NIL, 0) {
            out.push(Term::nil());
            if depth >= 1 && self.sig.has_symbol(crate::term::CONS, 2) {
                let elems = self.up_to(depth - 1)?;
                let tails = self.lists_up_to(depth - 1)?;
                if elems.len() as u128 * tails.len() as u128 > self.limit as u128 {
                    return Err(UniverseError::TooLarge {
                        depth,
                        size: elems.len() as u128 * tails.len() as u128,
                        limit: self.limit,
                    });
                }
                for t in tails.iter() {
                    for e in elems.iter() {
                        out.push(Term::cons(e.clone(), t.clone()));
                    }
                }
            }
        }
        let out = Arc::new(out);
        self.lists.lock().expect("lists lock").insert(depth, out.clone());
        Ok(out)
    }
}

/// Per-variable depth caps such that every atom of the instance has depth at
/// most `depth`. `None` when no instance can satisfy the bound.
pub fn instance_caps<'a>(atoms: impl IntoIterator<Item = &'a Atom>, depth: usize) -> Option<BTreeMap<Var, usize>> {
    let mut caps: BTreeMap<Var, usize> = BTreeMap::new();
    for a in atoms {
        if a.depth() > depth {
            return None;
        }
        if a.args.is_empty() {
            continue;
        }
        let mut pos = BTreeMap::new();
        a.var_positions(&mut pos);
        for (v, p) in pos {
            // Argument roots sit one level below the atom.
            let cap = depth.checked_sub(1 + p)?;
            let e = caps.entry(v).or_insert(cap);
            *e = (*e).min(cap);
        }
    }
    Some(caps)
}

/// Odometer over per-variable domains. `visit(k, values)` runs after the
/// k-th variable is bound; it decides whether to descend, skip the value or
/// stop the whole search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Descend,
    Prune,
    Stop,
}

/// Returns `false` iff the search was stopped by `visit`.
pub fn odometer(domains: &[Arc<Vec<Term>>], mut visit: impl FnMut(usize, &[Term]) -> Step) -> bool {
    let n = domains.len();
    if n == 0 {
        return visit(usize::MAX, &[]) != Step::Stop;
    }
    if domains.iter().any(|d| d.is_empty()) {
        return true;
    }
    let mut idx = vec![0usize; n];
    let mut vals: Vec<Term> = Vec::with_capacity(n);
    let mut level = 0usize;
    loop {
        vals.truncate(level);
        vals.push(domains[level][idx[level]].clone());
        let step = visit(level, &vals);
        match step {
            Step::Stop => return false,
            Step::Descend if level + 1 < n => {
                level += 1;
                idx[level] = 0;
                continue;
            }
            _ => {}
        }
        // Advance at this level, backtracking when exhausted.
        loop {
            idx[level] += 1;
            if idx[level] < domains[level].len() {
                break;
            }
            if level == 0 {
                return true;
            }
            level -= 1;
        }
    }
}

/// Ground instances of `c` whose bindings have depth at most `depth`.
pub fn ground_instances(c: &Clause, universe: &Universe, depth: usize) -> Result<Vec<Clause>, UniverseError> {
    let vars = c.vars();
    let dom = universe.up_to(depth)?;
    let domains: Vec<Arc<Vec<Term>>> = vars.iter().map(|_| dom.clone()).collect();
    let mut out = Vec::new();
    odometer(&domains, |k, vals| {
        if k == usize::MAX || k + 1 == vars.len() {
            out.push(c.bind(&vars, vals));
        }
        Step::Descend
    });
    Ok(out)
}

/// Ground instances of `atoms` (jointly) with bindings of depth at most `depth`.
pub fn atom_instances(atoms: &[Atom], universe: &Universe, depth: usize) -> Result<Vec<Vec<Atom>>, UniverseError> {
    let mut vars = Vec::new();
    atoms.iter().for_each(|a| a.vars_into(&mut vars));
    let dom = universe.up_to(depth)?;
    let domains: Vec<Arc<Vec<Term>>> = vars.iter().map(|_| dom.clone()).collect();
    let mut out = Vec::new();
    odometer(&domains, |k, vals| {
        if k == usize::MAX || k + 1 == vars.len() {
            out.push(atoms.iter().map(|a| a.bind(&vars, vals)).collect());
        }
        Step::Descend
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(consts: &[&str], funs: &[(&str, usize)]) -> Signature {
        let mut s = Signature::new();
        consts.iter().for_each(|c| s.add_symbol(c, 0));
        funs.iter().for_each(|(f, n)| s.add_symbol(f, *n));
        s
    }

    /// Counts terms of depth at most d by the recurrence directly.
    fn oracle_count(k: u128, funs: &[usize], d: usize) -> u128 {
        let mut n = k;
        for _ in 0..d {
            n = k + funs.iter().map(|&a| n.pow(a as u32)).sum::<u128>();
        }
        n
    }

    #[test]
    fn universe_counts_match_recurrence() {
        let u = Universe::new(sig(&["[]", "1"], &[(".", 2)]));
        for d in 0..4 {
            assert_eq!(u.count(d).unwrap() as u128, oracle_count(2, &[2], d));
        }
        let u = Universe::new(sig(&["0", "a"], &[("s", 1), ("f", 2)]));
        for d in 0..4 {
            assert_eq!(u.count(d).unwrap() as u128, oracle_count(2, &[1, 2], d));
        }
    }

    #[test]
    fn universe_is_duplicate_free_and_depth_bounded() {
        let u = Universe::new(sig(&["a", "b"], &[("f", 1), ("g", 2)]));
        let terms = u.up_to(3).unwrap();
        let set: BTreeSet<&Term> = terms.iter().collect();
        assert_eq!(set.len(), terms.len());
        assert!(terms.iter().all(|t| t.depth() <= 3));
    }

    #[test]
    fn empty_signature_is_an_error() {
        let u = Universe::new(sig(&[], &[("f", 1)]));
        assert_eq!(u.up_to(0).unwrap_err(), UniverseError::NoConstants);
    }

    #[test]
    fn fresh_constants_skip_existing_names() {
        let mut s = sig(&["1", "a"], &[]);
        let added = s.add_fresh_constants(2);
        assert_eq!(added, vec![Sym::new("2"), Sym::new("3")]);
    }

    #[test]
    fn lists_have_bounded_depth() {
        let u = Universe::new(sig(&["[]", "a"], &[(".", 2)]));
        let ls = u.lists_up_to(2).unwrap();
        assert!(ls.iter().all(|l| l.is_list() && l.depth() <= 2));
        let terms = u.up_to(2).unwrap();
        let all: Vec<&Term> = terms.iter().filter(|t| t.is_list()).collect();
        assert_eq!(all.len(), ls.len());
    }

    #[test]
    fn ground_instances_counts() {
        let u = Universe::new(sig(&["[]", "0"], &[]));
        let c = Clause::fact(Atom::new("app", vec![Term::nil(), Term::var("L"), Term::var("L")]));
        let inst = ground_instances(&c, &u, 1).unwrap();
        assert_eq!(inst.len(), 2);
        assert!(inst.iter().all(Clause::is_ground));
    }

    #[test]
    fn caps_follow_occurrence_depth() {
        let h = Atom::new("s", vec![Term::cons(Term::var("X"), Term::var("Xs")), Term::var("Z")]);
        let caps = instance_caps([&h], 4).unwrap();
        assert_eq!(caps[&Var::new("X")], 2);
        assert_eq!(caps[&Var::new("Z")], 3);
        assert!(instance_caps([&h], 1).is_none());
    }

    #[test]
    fn odometer_prunes_subtrees() {
        let d = Arc::new(vec![Term::constant("a"), Term::constant("b")]);
        let mut leaves = 0;
        odometer(&[d.clone(), d.clone(), d], |k, vals| {
            if k == 0 && vals[0] == Term::constant("a") {
                return Step::Prune;
            }
            if k == 2 {
                leaves += 1;
            }
            Step::Descend
        });
        assert_eq!(leaves, 4);
    }
}
