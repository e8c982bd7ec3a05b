//! Call-success specifications: a precondition `pre` on selected atoms and a
//! postcondition `post` on their answers. Both are sets of possibly
//! non-ground atoms closed under substitution, so every guard here is a
//! syntactic test preserved by instantiation.

use std::collections::BTreeSet;
use std::fmt;

use crate::term::{match_atom, mgu, mgu_term, Atom, Substitution, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CsGuard {
    Ground(Term),
    /// A proper list; elements may be non-ground.
    List(Term),
    /// Syntactically identical to some element of a proper list.
    Member(Term, Term),
    /// Every element of the first list is identical to some element of the
    /// second.
    Subset(Term, Term),
    Identical(Term, Term),
    True,
}

impl CsGuard {
    pub fn from_atom(a: &Atom) -> Option<CsGuard> {
        let arg = |i: usize| a.args[i].clone();
        Some(match (a.pred.as_str(), a.args.len()) {
            ("ground", 1) => CsGuard::Ground(arg(0)),
            ("list", 1) => CsGuard::List(arg(0)),
            ("member", 2) => CsGuard::Member(arg(0), arg(1)),
            ("subset", 2) => CsGuard::Subset(arg(0), arg(1)),
            ("==", 2) => CsGuard::Identical(arg(0), arg(1)),
            ("true", 0) => CsGuard::True,
            _ => return None,
        })
    }

    fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        match self {
            CsGuard::Ground(t) | CsGuard::List(t) => t.vars_into(&mut out),
            CsGuard::Member(a, b) | CsGuard::Subset(a, b) | CsGuard::Identical(a, b) => {
                a.vars_into(&mut out);
                b.vars_into(&mut out);
            }
            CsGuard::True => {}
        }
        out
    }

    pub fn holds(&self, s: &Substitution) -> bool {
        match self {
            CsGuard::Ground(t) => t.apply(s).is_ground(),
            CsGuard::List(t) => t.apply(s).is_list(),
            CsGuard::Member(e, l) => {
                let e = e.apply(s);
                l.apply(s).list_items().is_some_and(|items| items.iter().any(|x| **x == e))
            }
            CsGuard::Subset(u, t) => {
                let (u, t) = (u.apply(s), t.apply(s));
                match (u.list_items(), t.list_items()) {
                    (Some(us), Some(ts)) => us.iter().all(|x| ts.contains(x)),
                    _ => false,
                }
            }
            CsGuard::Identical(a, b) => a.apply(s) == b.apply(s),
            CsGuard::True => true,
        }
    }
}

impl fmt::Display for CsGuard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CsGuard::Ground(t) => write!(f, "ground({t})"),
            CsGuard::List(t) => write!(f, "list({t})"),
            CsGuard::Member(a, b) => write!(f, "member({a},{b})"),
            CsGuard::Subset(a, b) => write!(f, "subset({a},{b})"),
            CsGuard::Identical(a, b) => write!(f, "{a} == {b}"),
            CsGuard::True => write!(f, "true"),
        }
    }
}

/// All instances of `pattern` satisfying the guards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsPattern {
    pub pattern: Atom,
    pub guards: Vec<CsGuard>,
}

impl CsPattern {
    pub fn new(pattern: Atom, guards: Vec<CsGuard>) -> Result<Self, String> {
        let pv: BTreeSet<Var> = pattern.vars().into_iter().collect();
        for g in &guards {
            if let Some(v) = g.vars().into_iter().find(|v| !pv.contains(v)) {
                return Err(format!("guard variable {v} does not occur in {pattern}"));
            }
        }
        Ok(CsPattern { pattern, guards })
    }

    pub fn admits(&self, a: &Atom) -> bool {
        match match_atom(&self.pattern, a) {
            Some(s) => self.guards.iter().all(|g| g.holds(&s)),
            None => false,
        }
    }
}

impl fmt::Display for CsPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pattern)?;
        if !self.guards.is_empty() {
            let gs: Vec<String> = self.guards.iter().map(|g| g.to_string()).collect();
            write!(f, " | {}", gs.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CallSuccessSpec {
    pub pre: Vec<CsPattern>,
    pub post: Vec<CsPattern>,
}

impl CallSuccessSpec {
    pub fn in_pre(&self, a: &Atom) -> bool {
        self.pre.iter().any(|p| p.admits(a))
    }

    pub fn in_post(&self, a: &Atom) -> bool {
        self.post.iter().any(|p| p.admits(a))
    }

    /// Ground instantiations θ of the variables of `g` with gθ in post, when
    /// the post patterns and their member guards determine them all; `None`
    /// if some variable of `g` is left unconstrained.
    pub fn post_groundings(&self, g: &Atom) -> Option<Vec<Substitution>> {
        let gv = g.vars();
        let fresh = gv.iter().map(|v| v.suffix).max().unwrap_or(0) + 1;
        let mut out: Vec<Substitution> = Vec::new();
        for p in &self.post {
            let ren = Substitution::from_pairs(p.pattern.vars().into_iter().map(|v| {
                let w = v.with_suffix(fresh);
                (v, Term::Var(w))
            }));
            let Some(sigma) = mgu(g, &p.pattern.apply(&ren)) else { continue };
            let mut partial = vec![sigma];
            for guard in &p.guards {
                let CsGuard::Member(e, l) = guard else { continue };
                let (e, l) = (e.apply(&ren), l.apply(&ren));
                let mut next = Vec::new();
                for s in &partial {
                    let l = l.apply(s);
                    if !l.is_ground() {
                        next.push(s.clone());
                        continue;
                    }
                    let e = e.apply(s);
                    for it in l.list_items().unwrap_or_default() {
                        if let Some(u) = mgu_term(&e, it) {
                            next.push(s.compose(&u));
                        }
                    }
                }
                partial = next;
            }
            for s in partial {
                let theta = Substitution::from_pairs(gv.iter().map(|v| (v.clone(), Term::Var(v.clone()).apply(&s))));
                if gv.iter().any(|v| theta.get(v).is_none_or(|t| !t.is_ground())) {
                    return None;
                }
                if self.in_post(&g.apply(&theta)) && !out.contains(&theta) {
                    out.push(theta);
                }
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use crate::parser::{parse_atom, parse_callsucc};

    #[test]
    fn membership_is_syntactic_and_closed() {
        let cs = parse_callsucc(
            "pre m(U,T) | list(T).\npost m(E,L) | list(L), member(E,L).\npre in(U,T) | ground(U), ground(T), list(U), list(T).",
        )
        .unwrap();
        assert!(cs.in_pre(&parse_atom("m(X,[a,Y])").unwrap()));
        assert!(!cs.in_pre(&parse_atom("m(X,[a|Y])").unwrap()));
        assert!(cs.in_post(&parse_atom("m(Y,[a,Y])").unwrap()));
        assert!(!cs.in_post(&parse_atom("m(X,[a,Y])").unwrap()));
        assert!(cs.in_pre(&parse_atom("in([a],[a,b])").unwrap()));
        assert!(!cs.in_pre(&parse_atom("in([X],[a,b])").unwrap()));
    }

    #[test]
    fn post_groundings_follow_member_guards() {
        let cs = parse_callsucc("post m(E,L) | member(E,L).\npost q(a,a).\npost q(a,b).").unwrap();
        let g = cs.post_groundings(&parse_atom("m(H,[a,b,a])").unwrap()).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(cs.post_groundings(&parse_atom("q(a,Y)").unwrap()).unwrap().len(), 2);
        assert!(cs.post_groundings(&parse_atom("m(H,L)").unwrap()).is_none());
        assert!(cs.post_groundings(&parse_atom("m(H,[])").unwrap()).unwrap().is_empty());
    }

    #[test]
    fn shared_variable_names_do_not_leak() {
        let cs = parse_callsucc("pre p(a,X).").unwrap();
        assert!(cs.in_pre(&parse_atom("p(a,X)").unwrap()));
        assert!(cs.in_pre(&parse_atom("p(a,Y)").unwrap()));
        assert!(!cs.in_pre(&parse_atom("p(X,a)").unwrap()));
    }
}
