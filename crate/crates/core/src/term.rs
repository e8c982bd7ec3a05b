//! First-order terms, atoms, clauses and programs, with unification and
//! renaming. Symbols compare by name so every ordering is reproducible
//! across processes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// An interned-by-value symbol name (functor, constant or predicate).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(Arc<str>);

impl Sym {
    pub fn new(name: &str) -> Self {
        Sym(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_name(f, &self.0)
    }
}

impl From<&str> for Sym {
    fn from(s: &str) -> Self {
        Sym::new(s)
    }
}

/// A variable. Source variables carry suffix 0; renamed copies carry a
/// positive suffix that is never reused within one derivation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: Sym,
    pub suffix: u32,
}

impl Var {
    pub fn new(name: &str) -> Self {
        Var { name: Sym::new(name), suffix: 0 }
    }

    pub fn with_suffix(&self, suffix: u32) -> Self {
        Var { name: self.name.clone(), suffix }
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.suffix == 0 {
            write!(f, "{}", self.name.as_str())
        } else {
            write!(f, "{}_{}", self.name.as_str(), self.suffix)
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    App(Sym, Arc<[Term]>),
}

pub const NIL: &str = "[]";
pub const CONS: &str = ".";

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Var::new(name))
    }

    pub fn constant(name: &str) -> Self {
        Term::App(Sym::new(name), Arc::from(Vec::new()))
    }

    pub fn app(name: &str, args: Vec<Term>) -> Self {
        Term::App(Sym::new(name), Arc::from(args))
    }

    pub fn app_sym(sym: Sym, args: Vec<Term>) -> Self {
        Term::App(sym, Arc::from(args))
    }

    pub fn nil() -> Self {
        Term::constant(NIL)
    }

    pub fn cons(head: Term, tail: Term) -> Self {
        Term::app(CONS, vec![head, tail])
    }

    /// Builds `[t1,...,tn|tail]`.
    pub fn list_with_tail(items: Vec<Term>, tail: Term) -> Self {
        items.into_iter().rev().fold(tail, |acc, t| Term::cons(t, acc))
    }

    pub fn list(items: Vec<Term>) -> Self {
        Term::list_with_tail(items, Term::nil())
    }

    /// `s^n(0)`.
    pub fn peano(n: usize) -> Self {
        (0..n).fold(Term::constant("0"), |acc, _| Term::app("s", vec![acc]))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn functor(&self) -> Option<(&Sym, usize)> {
        match self {
            Term::App(f, args) => Some((f, args.len())),
            Term::Var(_) => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(_, args) => args,
            Term::Var(_) => &[],
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Term::App(_, a) if a.is_empty())
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Constants and variables have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args.iter().map(|a| a.depth() + 1).max().unwrap_or(0),
        }
    }

    /// Number of symbol occurrences.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Term::App(f, a) if a.is_empty() && f.as_str() == NIL)
    }

    pub fn as_cons(&self) -> Option<(&Term, &Term)> {
        match self {
            Term::App(f, a) if a.len() == 2 && f.as_str() == CONS => Some((&a[0], &a[1])),
            _ => None,
        }
    }

    /// Elements of a proper list (elements may be non-ground).
    pub fn list_items(&self) -> Option<Vec<&Term>> {
        let mut items = Vec::new();
        let mut cur = self;
        loop {
            if cur.is_nil() {
                return Some(items);
            }
            let (h, t) = cur.as_cons()?;
            items.push(h);
            cur = t;
        }
    }

    pub fn is_list(&self) -> bool {
        self.list_items().is_some()
    }

    /// `|[h|t]| = 1 + |t|`; anything else counts 0, so a non-list tail
    /// contributes nothing.
    pub fn listlen(&self) -> usize {
        let mut n = 0;
        let mut cur = self;
        while let Some((_, t)) = cur.as_cons() {
            n += 1;
            cur = t;
        }
        n
    }

    /// Variables in order of first occurrence.
    pub fn vars_into(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.vars_into(out)),
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.vars_into(&mut out);
        out
    }

    pub fn apply(&self, s: &Substitution) -> Term {
        if s.is_empty() {
            return self.clone();
        }
        self.map_vars(&|v| s.get(v).cloned())
    }

    /// Replaces each variable for which `f` returns a term.
    pub fn map_vars(&self, f: &dyn Fn(&Var) -> Option<Term>) -> Term {
        match self {
            Term::Var(v) => f(v).unwrap_or_else(|| self.clone()),
            Term::App(_, args) if args.is_empty() => self.clone(),
            Term::App(g, args) => {
                Term::App(g.clone(), args.iter().map(|a| a.map_vars(f)).collect())
            }
        }
    }

    /// Instantiates with a positional binding (`vars[i] := values[i]`).
    pub fn bind(&self, vars: &[Var], values: &[Term]) -> Term {
        match self {
            Term::Var(v) => match vars.iter().position(|w| w == v) {
                Some(i) if i < values.len() => values[i].clone(),
                _ => self.clone(),
            },
            Term::App(_, args) if args.is_empty() => self.clone(),
            Term::App(g, args) => {
                Term::App(g.clone(), args.iter().map(|a| a.bind(vars, values)).collect())
            }
        }
    }

    /// Records the deepest nesting level of each variable below `at`.
    fn var_positions(&self, at: usize, out: &mut BTreeMap<Var, usize>) {
        match self {
            Term::Var(v) => {
                let e = out.entry(v.clone()).or_insert(at);
                *e = (*e).max(at);
            }
            Term::App(_, args) => args.iter().for_each(|a| a.var_positions(at + 1, out)),
        }
    }
}

const INFIX: [&str; 4] = ["-", "+", "*", "="];

fn is_plain_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        Some(c) if c.is_ascii_digit() => s.chars().all(|c| c.is_ascii_digit()),
        _ => s == NIL,
    }
}

fn write_name(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    if is_plain_name(s) {
        write!(f, "{s}")
    } else {
        write!(f, "'{}'", s.replace('\\', "\\\\").replace('\'', "\\'"))
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    write!(f, "(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{a}")?;
    }
    write!(f, ")")
}

fn write_operand(f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
    match t {
        Term::App(g, a) if a.len() == 2 && INFIX.contains(&g.as_str()) => write!(f, "({t})"),
        _ => write!(f, "{t}"),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(g, args) if args.is_empty() => write_name(f, g.as_str()),
            Term::App(_, _) if self.as_cons().is_some() => {
                write!(f, "[")?;
                let mut cur = self;
                let mut first = true;
                while let Some((h, t)) = cur.as_cons() {
                    if !first {
                        write!(f, ",")?;
                    }
                    first = false;
                    write!(f, "{h}")?;
                    cur = t;
                }
                if !cur.is_nil() {
                    write!(f, "|{cur}")?;
                }
                write!(f, "]")
            }
            Term::App(g, args) if args.len() == 2 && INFIX.contains(&g.as_str()) => {
                write_operand(f, &args[0])?;
                write!(f, "{}", g.as_str())?;
                write_operand(f, &args[1])
            }
            Term::App(g, args) => {
                write_name(f, g.as_str())?;
                write_args(f, args)
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: Sym,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Self {
        Atom { pred: Sym::new(pred), args }
    }

    pub fn key(&self) -> (Sym, usize) {
        (self.pred.clone(), self.args.len())
    }

    /// An atom is measured as a term over its predicate symbol.
    pub fn depth(&self) -> usize {
        self.args.iter().map(|a| a.depth() + 1).max().unwrap_or(0)
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn vars_into(&self, out: &mut Vec<Var>) {
        self.args.iter().for_each(|a| a.vars_into(out));
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.vars_into(&mut out);
        out
    }

    pub fn apply(&self, s: &Substitution) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|a| a.apply(s)).collect() }
    }

    pub fn bind(&self, vars: &[Var], values: &[Term]) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|a| a.bind(vars, values)).collect() }
    }

    pub fn map_vars(&self, f: &dyn Fn(&Var) -> Option<Term>) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|a| a.map_vars(f)).collect() }
    }

    pub fn as_term(&self) -> Term {
        Term::app_sym(self.pred.clone(), self.args.clone())
    }

    pub fn from_term(t: &Term) -> Option<Atom> {
        match t {
            Term::App(f, args) => Some(Atom { pred: f.clone(), args: args.to_vec() }),
            Term::Var(_) => None,
        }
    }

    /// For every variable, the deepest position at which it occurs, where an
    /// argument root sits at position 0.
    pub fn var_positions(&self, out: &mut BTreeMap<Var, usize>) {
        self.args.iter().for_each(|a| a.var_positions(0, out));
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.len() == 2 && self.pred.as_str() == "=" {
            write_operand(f, &self.args[0])?;
            write!(f, " = ")?;
            return write_operand(f, &self.args[1]);
        }
        write_name(f, self.pred.as_str())?;
        if self.args.is_empty() {
            Ok(())
        } else {
            write_args(f, &self.args)
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite map from variables to terms.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution(BTreeMap<Var, Term>);

impl Substitution {
    pub fn new() -> Self {
        Substitution(BTreeMap::new())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, Term)>) -> Self {
        Substitution(pairs.into_iter().filter(|(v, t)| t.as_var() != Some(v)).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.0.get(v)
    }

    pub fn insert(&mut self, v: Var, t: Term) {
        if t.as_var() != Some(&v) {
            self.0.insert(v, t);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter()
    }

    pub fn domain(&self) -> BTreeSet<Var> {
        self.0.keys().cloned().collect()
    }

    pub fn range_vars(&self) -> BTreeSet<Var> {
        let mut out = Vec::new();
        self.0.values().for_each(|t| t.vars_into(&mut out));
        out.into_iter().collect()
    }

    /// `self` followed by `other`: `t(self ∘ other) = (t self) other`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut out: BTreeMap<Var, Term> =
            self.0.iter().map(|(v, t)| (v.clone(), t.apply(other))).collect();
        for (v, t) in &other.0 {
            out.entry(v.clone()).or_insert_with(|| t.clone());
        }
        out.retain(|v, t| t.as_var() != Some(v));
        Substitution(out)
    }

    pub fn is_idempotent(&self) -> bool {
        self.domain().is_disjoint(&self.range_vars())
    }

    pub fn restrict(&self, vars: &BTreeSet<Var>) -> Substitution {
        Substitution(self.0.iter().filter(|(v, _)| vars.contains(v)).map(|(v, t)| (v.clone(), t.clone())).collect())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}/{t}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

struct Unifier {
    bindings: HashMap<Var, Term>,
}

impl Unifier {
    fn walk<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.bindings.get(v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    fn resolve(&self, t: &Term) -> Term {
        match self.walk(t) {
            Term::Var(v) => Term::Var(v.clone()),
            Term::App(f, args) if args.is_empty() => Term::App(f.clone(), args.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.resolve(a)).collect()),
        }
    }

    fn occurs(&self, v: &Var, t: &Term) -> bool {
        match self.walk(t) {
            Term::Var(w) => w == v,
            Term::App(_, args) => args.iter().any(|a| self.occurs(v, a)),
        }
    }

    fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let mut stack = vec![(a.clone(), b.clone())];
        while let Some((x, y)) = stack.pop() {
            let x = self.walk(&x).clone();
            let y = self.walk(&y).clone();
            match (&x, &y) {
                (Term::Var(v), Term::Var(w)) if v == w => {}
                (Term::Var(v), t) | (t, Term::Var(v)) => {
                    if self.occurs(v, t) {
                        return false;
                    }
                    self.bindings.insert(v.clone(), t.clone());
                }
                (Term::App(f, xs), Term::App(g, ys)) => {
                    if f != g || xs.len() != ys.len() {
                        return false;
                    }
                    stack.extend(xs.iter().cloned().zip(ys.iter().cloned()));
                }
            }
        }
        true
    }

    fn finish(self) -> Substitution {
        let keys: Vec<Var> = self.bindings.keys().cloned().collect();
        let mut out = Substitution::new();
        for v in keys {
            let t = self.resolve(&Term::Var(v.clone()));
            out.insert(v, t);
        }
        out
    }
}

/// Most general unifier of two term lists, with occurs check. The result is
/// idempotent and relevant (binds only variables of the inputs).
pub fn mgu_terms(xs: &[Term], ys: &[Term]) -> Option<Substitution> {
    if xs.len() != ys.len() {
        return None;
    }
    let mut u = Unifier { bindings: HashMap::new() };
    for (x, y) in xs.iter().zip(ys) {
        if !u.unify(x, y) {
            return None;
        }
    }
    Some(u.finish())
}

pub fn mgu_term(x: &Term, y: &Term) -> Option<Substitution> {
    mgu_terms(std::slice::from_ref(x), std::slice::from_ref(y))
}

pub fn mgu(a: &Atom, b: &Atom) -> Option<Substitution> {
    if a.pred != b.pred {
        return None;
    }
    mgu_terms(&a.args, &b.args)
}

/// One-way matching: binds variables of `pattern` only; variables of
/// `target` are rigid.
pub fn match_term(pattern: &Term, target: &Term, s: &mut Substitution) -> bool {
    match pattern {
        Term::Var(v) => match s.get(v) {
            Some(t) => t == target,
            None => {
                s.0.insert(v.clone(), target.clone());
                true
            }
        },
        Term::App(f, xs) => match target {
            Term::App(g, ys) if f == g && xs.len() == ys.len() => {
                xs.iter().zip(ys.iter()).all(|(x, y)| match_term(x, y, s))
            }
            _ => false,
        },
    }
}

pub fn match_atom(pattern: &Atom, target: &Atom) -> Option<Substitution> {
    if pattern.pred != target.pred || pattern.args.len() != target.args.len() {
        return None;
    }
    let mut s = Substitution::new();
    for (p, t) in pattern.args.iter().zip(&target.args) {
        if !match_term(p, t, &mut s) {
            return None;
        }
    }
    Some(s)
}

/// `specific` is an instance of `general`.
pub fn is_instance(specific: &Atom, general: &Atom) -> bool {
    let avoid: BTreeSet<Var> = specific.vars().into_iter().collect();
    let g = rename_atom_apart(general, &avoid);
    match_atom(&g, specific).is_some()
}

pub fn is_variant(a: &Atom, b: &Atom) -> bool {
    is_instance(a, b) && is_instance(b, a)
}

/// Renames variables to `V0, V1, ...` by first occurrence; variants map to
/// the same canonical form.
pub fn canonical(atoms: &[Atom]) -> Vec<Atom> {
    let mut order = Vec::new();
    atoms.iter().for_each(|a| a.vars_into(&mut order));
    let s = Substitution::from_pairs(
        order.iter().enumerate().map(|(i, v)| (v.clone(), Term::Var(Var::new(&format!("V{i}"))))),
    );
    atoms.iter().map(|a| a.apply(&s)).collect()
}

fn rename_atom_apart(a: &Atom, avoid: &BTreeSet<Var>) -> Atom {
    let suffix = avoid.iter().map(|v| v.suffix).max().map_or(1, |m| m + 1);
    let suffix = suffix.max(a.vars().iter().map(|v| v.suffix).max().unwrap_or(0) + 1);
    a.map_vars(&|v| Some(Term::Var(v.with_suffix(suffix))))
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    pub head: Atom,
    pub body: Vec<Atom>,
    /// Number of body atoms before the cut, when the clause has one.
    pub cut: Option<usize>,
}

impl Clause {
    pub fn fact(head: Atom) -> Self {
        Clause { head, body: Vec::new(), cut: None }
    }

    pub fn new(head: Atom, body: Vec<Atom>) -> Self {
        Clause { head, body, cut: None }
    }

    pub fn with_cut(head: Atom, body: Vec<Atom>, cut: usize) -> Self {
        assert!(cut <= body.len(), "cut position beyond body");
        Clause { head, body, cut: Some(cut) }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = self.head.vars();
        self.body.iter().for_each(|a| a.vars_into(&mut out));
        out
    }

    pub fn is_ground(&self) -> bool {
        self.head.is_ground() && self.body.iter().all(Atom::is_ground)
    }

    pub fn apply(&self, s: &Substitution) -> Clause {
        Clause { head: self.head.apply(s), body: self.body.iter().map(|a| a.apply(s)).collect(), cut: self.cut }
    }

    pub fn bind(&self, vars: &[Var], values: &[Term]) -> Clause {
        Clause {
            head: self.head.bind(vars, values),
            body: self.body.iter().map(|a| a.bind(vars, values)).collect(),
            cut: self.cut,
        }
    }

    pub fn rename(&self, suffix: u32) -> Clause {
        let f = |v: &Var| Some(Term::Var(v.with_suffix(suffix)));
        Clause { head: self.head.map_vars(&f), body: self.body.iter().map(|a| a.map_vars(&f)).collect(), cut: self.cut }
    }

    /// The definite clause obtained by dropping the cut.
    pub fn without_cut(&self) -> Clause {
        Clause { cut: None, ..self.clone() }
    }

    /// Head with only the atoms before the cut, `H <- A1..Ak-1`.
    pub fn guard_part(&self) -> Clause {
        let k = self.cut.unwrap_or(self.body.len());
        Clause::new(self.head.clone(), self.body[..k].to_vec())
    }

    /// Head with only the atoms after the cut, `H <- Ak..An`.
    pub fn after_cut(&self) -> Clause {
        let k = self.cut.unwrap_or(0);
        Clause::new(self.head.clone(), self.body[k..].to_vec())
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() || self.cut.is_some() {
            write!(f, " :- ")?;
            let mut items: Vec<String> = self.body.iter().map(|a| a.to_string()).collect();
            if let Some(k) = self.cut {
                items.insert(k, "!".into());
            }
            write!(f, "{}", items.join(", "))?;
        }
        write!(f, ".")
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Renames `c` so that its variables avoid `avoid`. Ground clauses come back
/// unchanged.
pub fn rename_apart(c: &Clause, avoid: &BTreeSet<Var>) -> Clause {
    if c.is_ground() {
        return c.clone();
    }
    let own = c.vars().iter().map(|v| v.suffix).max().unwrap_or(0);
    let other = avoid.iter().map(|v| v.suffix).max().unwrap_or(0);
    c.rename(own.max(other) + 1)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProgramError {
    #[error("cut in clause {clause} is not in the last clause of {pred}")]
    CutNotLast { clause: usize, pred: String },
}

#[derive(Clone, Default, PartialEq, Eq)]
pub struct Program {
    clauses: Vec<Clause>,
}

impl Program {
    /// Cuts are accepted only in the textually last clause of a procedure.
    pub fn new(clauses: Vec<Clause>) -> Result<Self, ProgramError> {
        let p = Program { clauses };
        p.check_cut_placement()?;
        Ok(p)
    }

    /// Keeps cuts wherever they occur; only execution accepts such programs.
    pub fn with_cuts(clauses: Vec<Clause>) -> Self {
        Program { clauses }
    }

    pub fn check_cut_placement(&self) -> Result<(), ProgramError> {
        for (i, c) in self.clauses.iter().enumerate() {
            if c.cut.is_some() {
                let key = c.head.key();
                if self.clauses[i + 1..].iter().any(|d| d.head.key() == key) {
                    return Err(ProgramError::CutNotLast {
                        clause: i + 1,
                        pred: format!("{}/{}", key.0.as_str(), key.1),
                    });
                }
            }
        }
        Ok(())
    }

    /// Bypasses the cut-placement restriction; used for clause-selection
    /// splits whose parts are cut-free.
    pub fn definite(clauses: Vec<Clause>) -> Self {
        Program { clauses: clauses.into_iter().map(|c| c.without_cut()).collect() }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn has_cuts(&self) -> bool {
        self.clauses.iter().any(|c| c.cut.is_some())
    }

    /// Subprogram from 1-based clause numbers.
    pub fn select(&self, numbers: &[usize]) -> Option<Program> {
        let mut out = Vec::new();
        for &n in numbers {
            out.push(self.clauses.get(n.checked_sub(1)?)?.clone());
        }
        Some(Program { clauses: out })
    }

    pub fn procedure(&self, key: &(Sym, usize)) -> impl Iterator<Item = (usize, &Clause)> {
        let key = key.clone();
        self.clauses.iter().enumerate().filter(move |(_, c)| c.head.key() == key)
    }

    pub fn predicates(&self) -> BTreeSet<(Sym, usize)> {
        let mut out = BTreeSet::new();
        for c in &self.clauses {
            out.insert(c.head.key());
            c.body.iter().for_each(|a| {
                out.insert(a.key());
            });
        }
        out
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }
    fn c(n: &str) -> Term {
        Term::constant(n)
    }

    #[test]
    fn mgu_binds_both_sides() {
        let a = Atom::new("p", vec![v("X"), Term::app("f", vec![v("Y")])]);
        let b = Atom::new("p", vec![c("a"), Term::app("f", vec![c("b")])]);
        let s = mgu(&a, &b).unwrap();
        assert_eq!(s.get(&Var::new("X")), Some(&c("a")));
        assert_eq!(s.get(&Var::new("Y")), Some(&c("b")));
        assert!(s.is_idempotent());
    }

    #[test]
    fn occurs_check_fails() {
        let a = Atom::new("p", vec![v("X")]);
        let b = Atom::new("p", vec![Term::app("f", vec![v("X")])]);
        assert!(mgu(&a, &b).is_none());
    }

    #[test]
    fn chained_bindings_are_resolved() {
        let xs = vec![v("X"), v("Y")];
        let ys = vec![v("Y"), Term::app("f", vec![v("Z")])];
        let s = mgu_terms(&xs, &ys).unwrap();
        assert!(s.is_idempotent());
        assert_eq!(xs[0].apply(&s), ys[0].apply(&s));
        assert_eq!(xs[1].apply(&s), ys[1].apply(&s));
    }

    #[test]
    fn rename_apart_is_variant_and_disjoint() {
        let cl = Clause::new(Atom::new("p", vec![v("X")]), vec![Atom::new("q", vec![v("X")])]);
        let r1 = rename_apart(&cl, &BTreeSet::new());
        let avoid: BTreeSet<Var> = r1.vars().into_iter().collect();
        let r2 = rename_apart(&cl, &avoid);
        assert!(r1.vars().iter().all(|x| !r2.vars().contains(x)));
        assert!(is_variant(&r1.head, &cl.head));
        let g = Clause::fact(Atom::new("p", vec![c("a")]));
        assert_eq!(rename_apart(&g, &avoid), g);
    }

    #[test]
    fn depth_and_lists() {
        let l = Term::list(vec![c("a"), c("b")]);
        assert_eq!(l.depth(), 2);
        assert_eq!(l.listlen(), 2);
        assert_eq!(Term::list_with_tail(vec![c("a")], c("t")).listlen(), 1);
        assert_eq!(l.to_string(), "[a,b]");
        assert_eq!(Term::list_with_tail(vec![c("a")], v("T")).to_string(), "[a|T]");
        assert_eq!(Atom::new("app", vec![l.clone(), c("x"), l]).depth(), 3);
    }

    #[test]
    fn infix_printing() {
        let t = Term::app("-", vec![Term::app("-", vec![c("a"), c("b")]), c("c")]);
        assert_eq!(t.to_string(), "(a-b)-c");
        assert_eq!(Atom::new("=", vec![c("a"), v("X")]).to_string(), "a = X");
        assert_eq!(c("a'").to_string(), "'a\\''");
    }

    #[test]
    fn cut_must_be_last() {
        let h = |x: &str| Atom::new("p", vec![c(x)]);
        let bad = Program::new(vec![Clause::with_cut(h("a"), vec![], 0), Clause::fact(h("b"))]);
        assert!(bad.is_err());
        let ok = Program::new(vec![Clause::fact(h("b")), Clause::with_cut(h("a"), vec![], 0)]);
        assert!(ok.is_ok());
    }

    #[test]
    fn compose_matches_sequential_application() {
        let s1 = Substitution::from_pairs([(Var::new("X"), Term::app("f", vec![v("Y")]))]);
        let s2 = Substitution::from_pairs([(Var::new("Y"), c("a"))]);
        let t = Term::app("g", vec![v("X"), v("Y")]);
        assert_eq!(t.apply(&s1.compose(&s2)), t.apply(&s1).apply(&s2));
    }
}
