//! Level mappings `|.|` from ground atoms to naturals, possibly partial.

use std::collections::{BTreeMap, BTreeSet};

use crate::spec::callsucc::CsGuard;
use crate::term::{match_atom, Atom, Substitution, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MExpr {
    Num(u64),
    /// Non-list tails contribute 0.
    ListLen(Term),
    TermSize(Term),
    Add(Box<MExpr>, Box<MExpr>),
    Mul(Box<MExpr>, Box<MExpr>),
    Max(Box<MExpr>, Box<MExpr>),
    /// Finite lookup; undefined outside the table.
    Table(String, Vec<Term>),
}

impl MExpr {
    fn eval(&self, s: &Substitution, tables: &BTreeMap<String, BTreeMap<Vec<Term>, u64>>) -> Option<u64> {
        Some(match self {
            MExpr::Num(n) => *n,
            MExpr::ListLen(t) => t.apply(s).listlen() as u64,
            MExpr::TermSize(t) => t.apply(s).size() as u64,
            MExpr::Add(a, b) => a.eval(s, tables)?.saturating_add(b.eval(s, tables)?),
            MExpr::Mul(a, b) => a.eval(s, tables)?.saturating_mul(b.eval(s, tables)?),
            MExpr::Max(a, b) => a.eval(s, tables)?.max(b.eval(s, tables)?),
            MExpr::Table(name, args) => {
                let key: Vec<Term> = args.iter().map(|t| t.apply(s)).collect();
                *tables.get(name)?.get(&key)?
            }
        })
    }

    /// Pattern variables the value is read from, split by whether only the
    /// list spine of the bound term matters.
    fn reads(&self, spine: &mut BTreeSet<Var>, whole: &mut BTreeSet<Var>) {
        match self {
            MExpr::Num(_) => {}
            MExpr::ListLen(Term::Var(v)) => {
                spine.insert(v.clone());
            }
            MExpr::ListLen(t) | MExpr::TermSize(t) => whole.extend(t.vars()),
            MExpr::Add(a, b) | MExpr::Mul(a, b) | MExpr::Max(a, b) => {
                a.reads(spine, whole);
                b.reads(spine, whole);
            }
            MExpr::Table(_, args) => args.iter().for_each(|t| whole.extend(t.vars())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelEntry {
    pub pattern: Atom,
    pub expr: MExpr,
    /// Domain guard; the entry applies only where every guard holds.
    pub when: Vec<CsGuard>,
}

/// Entries are tried in order and the first matching one decides; an
/// undefined table lookup leaves the atom without a level.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LevelMapping {
    entries: Vec<LevelEntry>,
    tables: BTreeMap<String, BTreeMap<Vec<Term>, u64>>,
}

fn spine_vars(t: &Term, out: &mut BTreeSet<Var>) {
    match t {
        Term::Var(v) => {
            out.insert(v.clone());
        }
        _ => {
            if let Some((_, tail)) = t.as_cons() {
                spine_vars(tail, out);
            }
        }
    }
}

impl LevelMapping {
    pub fn new(entries: Vec<LevelEntry>, tables: BTreeMap<String, BTreeMap<Vec<Term>, u64>>) -> Self {
        LevelMapping { entries, tables }
    }

    pub fn entries(&self) -> &[LevelEntry] {
        &self.entries
    }

    pub fn level(&self, a: &Atom) -> Option<u64> {
        for e in &self.entries {
            if let Some(s) = match_atom(&e.pattern, a) {
                if e.when.iter().all(|g| g.holds(&s)) {
                    return e.expr.eval(&s, &self.tables);
                }
            }
        }
        None
    }

    /// Variables of `a` whose values can influence `level(aθ)`; `None` means
    /// all of them. Only a first entry with a linear all-variable pattern and
    /// no guard is analysed, because it matches every atom of its predicate.
    pub fn relevant_vars(&self, a: &Atom) -> Option<BTreeSet<Var>> {
        let e = self.entries.iter().find(|e| e.pattern.key() == a.key())?;
        if !e.when.is_empty() {
            return None;
        }
        let mut pvars = Vec::new();
        for t in &e.pattern.args {
            match t {
                Term::Var(v) if !pvars.contains(v) => pvars.push(v.clone()),
                _ => return None,
            }
        }
        let (mut spine, mut whole) = (BTreeSet::new(), BTreeSet::new());
        e.expr.reads(&mut spine, &mut whole);
        let mut out = BTreeSet::new();
        for (i, pv) in pvars.iter().enumerate() {
            if whole.contains(pv) {
                out.extend(a.args[i].vars());
            } else if spine.contains(pv) {
                spine_vars(&a.args[i], &mut out);
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_atom, parse_level_mapping};

    #[test]
    fn sat_mapping_values() {
        let lm = parse_level_mapping("|p(T,U)| = 2*listlen(U)+2; |q(T,U)| = 2*listlen(U)+1; |=(T,U)| = 0").unwrap();
        assert_eq!(lm.level(&parse_atom("p(a, [x,y])").unwrap()), Some(6));
        assert_eq!(lm.level(&parse_atom("q(a, [x|z])").unwrap()), Some(3));
        assert_eq!(lm.level(&parse_atom("a = b").unwrap()), Some(0));
        assert_eq!(lm.level(&parse_atom("r(a)").unwrap()), None);
    }

    #[test]
    fn tables_are_partial() {
        let lm = parse_level_mapping("|p(T,T)| = 0. |p(T,U)| = sp(T,U). table sp: (a,b) = 1.").unwrap();
        assert_eq!(lm.level(&parse_atom("p(c,c)").unwrap()), Some(0));
        assert_eq!(lm.level(&parse_atom("p(a,b)").unwrap()), Some(1));
        assert_eq!(lm.level(&parse_atom("p(b,a)").unwrap()), None);
    }

    #[test]
    fn relevance_follows_the_spine() {
        let lm = parse_level_mapping("|s(T,A,B)| = listlen(T).").unwrap();
        let a = parse_atom("s([X|Xs], [X|Ys], Zs)").unwrap();
        let r = lm.relevant_vars(&a).unwrap();
        assert_eq!(r, [Var::new("Xs")].into_iter().collect());
    }

    #[test]
    fn when_guards_restrict_the_domain() {
        let lm = parse_level_mapping("|p(X)| = listlen(X) when list(X).").unwrap();
        assert_eq!(lm.level(&parse_atom("p([a])").unwrap()), Some(1));
        assert_eq!(lm.level(&parse_atom("p(a)").unwrap()), None);
    }
}
