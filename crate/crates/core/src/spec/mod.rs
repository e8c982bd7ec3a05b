//! Specifications: sets of ground atoms given by guarded comprehensions,
//! combined by union and intersection, with membership and depth-bounded
//! enumeration that agree with each other.

pub mod callsucc;
pub mod model;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::term::{match_atom, match_term, Atom, Clause, Program, Substitution, Sym, Term, Var};
use crate::universe::{instance_caps, odometer, Signature, Step, Universe, UniverseError};

use model::bounded_least_model;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error(transparent)]
    Universe(#[from] UniverseError),
    #[error("unknown specification {0}")]
    Unknown(String),
    #[error("specification {0} refers to itself")]
    Cycle(String),
    #[error("unknown guard predicate {0}")]
    UnknownGuard(String),
    #[error("arithmetic guard {0} is not a numeric expression")]
    Arithmetic(String),
    #[error("auxiliary program did not reach a fixpoint at depth {0}")]
    AuxNotSaturated(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Guard {
    Goal(Atom),
    Not(Box<Guard>),
    /// Disjunction of conjunctions.
    Or(Vec<Vec<Guard>>),
    True,
}

impl Guard {
    fn vars_into(&self, out: &mut Vec<Var>) {
        match self {
            Guard::Goal(a) => a.vars_into(out),
            Guard::Not(g) => g.vars_into(out),
            Guard::Or(alts) => alts.iter().flatten().for_each(|g| g.vars_into(out)),
            Guard::True => {}
        }
    }

    fn collect_symbols(&self, sig: &mut Signature) {
        match self {
            Guard::Goal(a) if !ARITH_CMP.contains(&a.pred.as_str()) => sig.add_atom_terms(a),
            Guard::Goal(_) | Guard::True => {}
            Guard::Not(g) => g.collect_symbols(sig),
            Guard::Or(alts) => alts.iter().flatten().for_each(|g| g.collect_symbols(sig)),
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guard::Goal(a) => write!(f, "{a}"),
            Guard::Not(g) => write!(f, "\\+ {g}"),
            Guard::True => write!(f, "true"),
            Guard::Or(alts) => {
                let parts: Vec<String> =
                    alts.iter().map(|c| c.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ")).collect();
                write!(f, "({})", parts.join(" ; "))
            }
        }
    }
}

/// `{ pattern | guards }`: the ground instances of `pattern` for which the
/// conjunction of guards has a solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comprehension {
    pub pattern: Atom,
    pub guards: Vec<Guard>,
}

impl Comprehension {
    fn has_local_vars(&self) -> bool {
        let pv = self.pattern.vars();
        let mut gv = Vec::new();
        self.guards.iter().for_each(|g| g.vars_into(&mut gv));
        gv.iter().any(|v| !pv.contains(v))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecExpr {
    Empty,
    /// The whole Herbrand base.
    All,
    Comp(Comprehension),
    Union(Vec<SpecExpr>),
    Inter(Box<SpecExpr>, Box<SpecExpr>),
    Ref(String),
}

impl SpecExpr {
    fn collect_symbols(&self, sig: &mut Signature) {
        match self {
            SpecExpr::Comp(c) => {
                sig.add_atom(&c.pattern);
                c.guards.iter().for_each(|g| g.collect_symbols(sig));
            }
            SpecExpr::Union(es) => es.iter().for_each(|e| e.collect_symbols(sig)),
            SpecExpr::Inter(a, b) => {
                a.collect_symbols(sig);
                b.collect_symbols(sig);
            }
            _ => {}
        }
    }

    fn resolve(&self, defs: &BTreeMap<String, SpecExpr>, stack: &mut Vec<String>) -> Result<SpecExpr, SpecError> {
        Ok(match self {
            SpecExpr::Ref(n) => {
                if stack.contains(n) {
                    return Err(SpecError::Cycle(n.clone()));
                }
                let def = defs.get(n).ok_or_else(|| SpecError::Unknown(n.clone()))?;
                stack.push(n.clone());
                let r = def.resolve(defs, stack)?;
                stack.pop();
                r
            }
            SpecExpr::Union(es) => SpecExpr::Union(es.iter().map(|e| e.resolve(defs, stack)).collect::<Result<_, _>>()?),
            SpecExpr::Inter(a, b) => SpecExpr::Inter(Box::new(a.resolve(defs, stack)?), Box::new(b.resolve(defs, stack)?)),
            e => e.clone(),
        })
    }
}

impl fmt::Display for SpecExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecExpr::Empty => write!(f, "{{}}"),
            SpecExpr::All => write!(f, "all"),
            SpecExpr::Ref(n) => write!(f, "{n}"),
            SpecExpr::Comp(c) if c.guards.is_empty() => write!(f, "{{ {} }}", c.pattern),
            SpecExpr::Comp(c) => {
                let gs: Vec<String> = c.guards.iter().map(|g| g.to_string()).collect();
                write!(f, "{{ {} | {} }}", c.pattern, gs.join(", "))
            }
            SpecExpr::Union(es) => {
                let parts: Vec<String> = es.iter().map(|e| e.to_string()).collect();
                write!(f, "({})", parts.join(" + "))
            }
            SpecExpr::Inter(a, b) => write!(f, "({a} & {b})"),
        }
    }
}

/// Unbound specification text: auxiliary clauses and named expressions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpecSource {
    pub aux: Vec<Clause>,
    pub specs: Vec<(String, SpecExpr)>,
}

impl SpecSource {
    /// Symbols mentioned by patterns, non-arithmetic guards and the
    /// auxiliary program.
    pub fn collect_symbols(&self, sig: &mut Signature) {
        self.specs.iter().for_each(|(_, e)| e.collect_symbols(sig));
        self.aux.iter().for_each(|c| {
            sig.add_atom_terms(&c.head);
            c.body.iter().for_each(|b| sig.add_atom_terms(b));
        });
    }
}

const AUX_ITERATION_CAP: usize = 100_000;

struct AuxModel {
    atoms: HashSet<Atom>,
    by_pred: BTreeMap<(Sym, usize), Vec<Atom>>,
}

/// Shared evaluation context for the specifications of one session.
pub struct SpecEnv {
    universe: Arc<Universe>,
    aux: Program,
    aux_preds: BTreeSet<(Sym, usize)>,
    aux_models: Mutex<BTreeMap<usize, Arc<AuxModel>>>,
    /// Predicates enumerated by `all`.
    predicates: BTreeSet<(Sym, usize)>,
}

impl fmt::Debug for SpecEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpecEnv").field("aux", &self.aux).finish()
    }
}

impl SpecEnv {
    pub fn new(universe: Arc<Universe>, aux: Vec<Clause>) -> Arc<Self> {
        let aux = Program::definite(aux);
        let aux_preds = aux.clauses().iter().map(|c| c.head.key()).collect();
        let predicates = universe.signature().predicates().clone();
        Arc::new(SpecEnv { universe, aux, aux_preds, aux_models: Mutex::new(BTreeMap::new()), predicates })
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    fn aux_model(&self, depth: usize) -> Result<Arc<AuxModel>, SpecError> {
        if let Some(m) = self.aux_models.lock().expect("aux lock").get(&depth) {
            return Ok(m.clone());
        }
        let lm = bounded_least_model(&self.aux, &self.universe, depth, AUX_ITERATION_CAP)?;
        if !lm.saturated {
            return Err(SpecError::AuxNotSaturated(depth));
        }
        let mut by_pred: BTreeMap<(Sym, usize), Vec<Atom>> = BTreeMap::new();
        for a in &lm.atoms {
            by_pred.entry(a.key()).or_default().push(a.clone());
        }
        let m = Arc::new(AuxModel { atoms: lm.atoms.into_iter().collect(), by_pred });
        self.aux_models.lock().expect("aux lock").insert(depth, m.clone());
        Ok(m)
    }
}

/// A bound specification. Cloning is cheap.
#[derive(Clone)]
pub struct Spec {
    name: String,
    expr: Arc<SpecExpr>,
    env: Arc<SpecEnv>,
    /// Enumerations by depth, shared between clones.
    members: Arc<Mutex<BTreeMap<usize, Arc<Vec<Atom>>>>>,
}

impl fmt::Debug for Spec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.name, self.expr)
    }
}

/// All named specifications of a source, bound to one environment.
#[derive(Clone, Debug)]
pub struct SpecSet {
    env: Arc<SpecEnv>,
    specs: BTreeMap<String, Spec>,
}

impl SpecSet {
    pub fn bind(src: &SpecSource, universe: Arc<Universe>) -> Result<Self, SpecError> {
        let env = SpecEnv::new(universe, src.aux.clone());
        let defs: BTreeMap<String, SpecExpr> = src.specs.iter().cloned().collect();
        let mut specs = BTreeMap::new();
        for (name, e) in &src.specs {
            let mut stack = vec![name.clone()];
            let expr = e.resolve(&defs, &mut stack)?;
            specs.insert(name.clone(), Spec::new(name, expr, env.clone()));
        }
        Ok(SpecSet { env, specs })
    }

    pub fn get(&self, name: &str) -> Result<&Spec, SpecError> {
        self.specs.get(name).ok_or_else(|| SpecError::Unknown(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.specs.keys()
    }

    pub fn env(&self) -> &Arc<SpecEnv> {
        &self.env
    }

    /// Binds an ad hoc expression (which may refer to named specifications).
    pub fn expr(&self, name: &str, e: &SpecExpr) -> Result<Spec, SpecError> {
        let defs: BTreeMap<String, SpecExpr> = self.specs.iter().map(|(n, s)| (n.clone(), (*s.expr).clone())).collect();
        let expr = e.resolve(&defs, &mut Vec::new())?;
        Ok(Spec::new(name, expr, self.env.clone()))
    }
}

impl Spec {
    pub fn new(name: &str, expr: SpecExpr, env: Arc<SpecEnv>) -> Self {
        Spec { name: name.to_string(), expr: Arc::new(expr), env, members: Arc::default() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn expr(&self) -> &SpecExpr {
        &self.expr
    }

    pub fn env(&self) -> &Arc<SpecEnv> {
        &self.env
    }

    pub fn union(name: &str, parts: &[Spec]) -> Spec {
        let env = parts.first().map(|s| s.env.clone()).expect("union of no specifications");
        Spec::new(name, SpecExpr::Union(parts.iter().map(|s| (*s.expr).clone()).collect()), env)
    }

    pub fn intersect(&self, name: &str, other: &Spec) -> Spec {
        Spec::new(name, SpecExpr::Inter(Box::new((*self.expr).clone()), Box::new((*other.expr).clone())), self.env.clone())
    }

    /// Membership of a ground atom.
    pub fn contains(&self, a: &Atom) -> Result<bool, SpecError> {
        contains(&self.expr, &self.env, a)
    }

    /// `S ⊨ A1,...,An`.
    pub fn models(&self, atoms: &[Atom]) -> Result<bool, SpecError> {
        for a in atoms {
            if !self.contains(a)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All members of depth at most `depth`, sorted.
    pub fn enumerate(&self, depth: usize) -> Result<Vec<Atom>, SpecError> {
        if let Some(m) = self.members.lock().expect("members lock").get(&depth) {
            return Ok(m.to_vec());
        }
        let mut out = BTreeSet::new();
        enumerate(&self.expr, &self.env, depth, &mut out)?;
        let m: Vec<Atom> = out.into_iter().collect();
        self.members.lock().expect("members lock").insert(depth, Arc::new(m.clone()));
        Ok(m)
    }
}

fn contains(e: &SpecExpr, env: &SpecEnv, a: &Atom) -> Result<bool, SpecError> {
    match e {
        SpecExpr::Empty => Ok(false),
        SpecExpr::All => Ok(true),
        SpecExpr::Ref(n) => Err(SpecError::Unknown(n.clone())),
        SpecExpr::Union(es) => {
            for e in es {
                if contains(e, env, a)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        SpecExpr::Inter(x, y) => Ok(contains(x, env, a)? && contains(y, env, a)?),
        SpecExpr::Comp(c) => {
            let Some(s) = match_atom(&c.pattern, a) else { return Ok(false) };
            let bind: Bind = s.iter().map(|(v, t)| (v.clone(), t.clone())).collect();
            let solver = Solver { env, caps: BTreeMap::new(), default_cap: a.depth().saturating_sub(1), base: a.depth() };
            let goals: Vec<&Guard> = c.guards.iter().collect();
            let mut found = false;
            solver.solve(&goals, &mut bind.clone(), &mut |_| {
                found = true;
                Ok(true)
            })?;
            Ok(found)
        }
    }
}

fn enumerate(e: &SpecExpr, env: &SpecEnv, depth: usize, out: &mut BTreeSet<Atom>) -> Result<(), SpecError> {
    match e {
        SpecExpr::Empty => Ok(()),
        SpecExpr::Ref(n) => Err(SpecError::Unknown(n.clone())),
        SpecExpr::All => {
            for (p, n) in &env.predicates {
                let pattern = Atom { pred: p.clone(), args: (0..*n).map(|i| Term::var(&format!("X{i}"))).collect() };
                enumerate_comp(&Comprehension { pattern, guards: vec![] }, env, depth, out)?;
            }
            Ok(())
        }
        SpecExpr::Union(es) => es.iter().try_for_each(|e| enumerate(e, env, depth, out)),
        SpecExpr::Inter(x, y) => {
            let mut left = BTreeSet::new();
            enumerate(x, env, depth, &mut left)?;
            for a in left {
                if contains(y, env, &a)? {
                    out.insert(a);
                }
            }
            Ok(())
        }
        SpecExpr::Comp(c) => enumerate_comp(c, env, depth, out),
    }
}

fn enumerate_comp(c: &Comprehension, env: &SpecEnv, depth: usize, out: &mut BTreeSet<Atom>) -> Result<(), SpecError> {
    let Some(caps) = instance_caps([&c.pattern], depth) else { return Ok(()) };
    let solver = Solver { env, caps: caps.clone(), default_cap: depth.saturating_sub(1), base: depth };
    let goals: Vec<&Guard> = c.guards.iter().collect();
    let pvars = c.pattern.vars();
    let mut found = BTreeSet::new();
    solver.solve(&goals, &mut Vec::new(), &mut |bind| {
        let partial = c.pattern.map_vars(&|v| lookup(bind, v).cloned());
        let free: Vec<Var> = pvars.iter().filter(|v| lookup(bind, v).is_none()).cloned().collect();
        if free.is_empty() {
            if partial.depth() <= depth {
                found.insert(partial);
            }
            return Ok(false);
        }
        let domains = free
            .iter()
            .map(|v| env.universe.up_to(caps.get(v).copied().unwrap_or(0)))
            .collect::<Result<Vec<_>, _>>()?;
        odometer(&domains, |k, vals| {
            if k + 1 == free.len() {
                let a = partial.bind(&free, vals);
                if a.depth() <= depth {
                    found.insert(a);
                }
            }
            Step::Descend
        });
        Ok(false)
    })?;
    // Guard-local witnesses are bounded by the atom's own depth during
    // membership, so enumeration re-checks to stay consistent with it.
    if c.has_local_vars() {
        for a in found {
            if contains(&SpecExpr::Comp(c.clone()), env, &a)? {
                out.insert(a);
            }
        }
    } else {
        out.extend(found);
    }
    Ok(())
}

/// Ground bindings, in binding order.
type Bind = Vec<(Var, Term)>;

fn lookup<'a>(b: &'a Bind, v: &Var) -> Option<&'a Term> {
    b.iter().rev().find(|(w, _)| w == v).map(|(_, t)| t)
}

fn inst_term(t: &Term, b: &Bind) -> Term {
    if b.is_empty() || t.is_ground() {
        return t.clone();
    }
    t.map_vars(&|v| lookup(b, v).cloned())
}

fn inst_atom(a: &Atom, b: &Bind) -> Atom {
    Atom { pred: a.pred.clone(), args: a.args.iter().map(|t| inst_term(t, b)).collect() }
}

/// Extensions making `pattern` equal to the ground term `target`.
fn match_ground(pattern: &Term, target: &Term) -> Option<Bind> {
    let mut s = Substitution::new();
    if match_term(pattern, target, &mut s) {
        Some(s.iter().map(|(v, t)| (v.clone(), t.clone())).collect())
    } else {
        None
    }
}

const ARITH_CMP: [&str; 5] = ["=<", "<", ">=", ">", "=:="];

fn numeral(n: usize) -> Term {
    Term::constant(&n.to_string())
}

fn arith(t: &Term) -> Result<i64, SpecError> {
    let bad = || SpecError::Arithmetic(t.to_string());
    match t {
        Term::App(f, a) if a.is_empty() => f.as_str().parse().map_err(|_| bad()),
        Term::App(f, a) if a.len() == 2 => {
            let (x, y) = (arith(&a[0])?, arith(&a[1])?);
            match f.as_str() {
                "+" => Ok(x.saturating_add(y)),
                "-" => Ok(x.saturating_sub(y)),
                "*" => Ok(x.saturating_mul(y)),
                _ => Err(bad()),
            }
        }
        Term::App(f, a) if a.len() == 1 => match f.as_str() {
            "listlen" => Ok(a[0].listlen() as i64),
            "termsize" => Ok(a[0].size() as i64),
            "depth" => Ok(a[0].depth() as i64),
            _ => Err(bad()),
        },
        _ => Err(bad()),
    }
}

fn is_peano(t: &Term) -> bool {
    let mut cur = t;
    loop {
        match cur {
            Term::App(f, a) if a.is_empty() => return f.as_str() == "0",
            Term::App(f, a) if a.len() == 1 && f.as_str() == "s" => cur = &a[0],
            _ => return false,
        }
    }
}

struct Solver<'a> {
    env: &'a SpecEnv,
    caps: BTreeMap<Var, usize>,
    default_cap: usize,
    /// Depth that auxiliary models are computed to, at least.
    base: usize,
}

type Sink<'s> = dyn FnMut(&Bind) -> Result<bool, SpecError> + 's;

impl Solver<'_> {
    fn cap(&self, v: &Var) -> usize {
        self.caps.get(v).copied().unwrap_or(self.default_cap)
    }

    /// Runs `sink` on every solution; returns `true` once `sink` asks to stop.
    fn solve(&self, goals: &[&Guard], bind: &mut Bind, sink: &mut Sink<'_>) -> Result<bool, SpecError> {
        if goals.is_empty() {
            return sink(bind);
        }
        for (i, g) in goals.iter().enumerate() {
            let rest: Vec<&Guard> = goals[..i].iter().chain(goals[i + 1..].iter()).copied().collect();
            match g {
                Guard::True => return self.solve(&rest, bind, sink),
                Guard::Or(alts) => {
                    for alt in alts {
                        let mut gs: Vec<&Guard> = alt.iter().collect();
                        gs.extend(rest.iter().copied());
                        if self.solve(&gs, bind, sink)? {
                            return Ok(true);
                        }
                    }
                    return Ok(false);
                }
                Guard::Not(inner) => {
                    let mut vs = Vec::new();
                    inner.vars_into(&mut vs);
                    if vs.iter().all(|v| lookup(bind, v).is_some()) {
                        let mut found = false;
                        self.solve(&[inner.as_ref()], &mut bind.clone(), &mut |_| {
                            found = true;
                            Ok(true)
                        })?;
                        if found {
                            return Ok(false);
                        }
                        return self.solve(&rest, bind, sink);
                    }
                }
                Guard::Goal(a) => {
                    let a = inst_atom(a, bind);
                    if let Some(exts) = self.builtin(&a)? {
                        for ext in exts {
                            let n = bind.len();
                            bind.extend(ext);
                            let stop = self.solve(&rest, bind, sink)?;
                            bind.truncate(n);
                            if stop {
                                return Ok(true);
                            }
                        }
                        return Ok(false);
                    }
                }
            }
        }
        // Nothing can run yet: enumerate the first unbound variable.
        let mut vs = Vec::new();
        goals.iter().for_each(|g| g.vars_into(&mut vs));
        let v = vs.into_iter().find(|v| lookup(bind, v).is_none()).expect("stuck goal without unbound variables");
        let dom = self.env.universe.up_to(self.cap(&v))?;
        for t in dom.iter() {
            bind.push((v.clone(), t.clone()));
            let stop = self.solve(goals, bind, sink)?;
            bind.pop();
            if stop {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Solutions of an instantiated goal as binding extensions, or `None`
    /// when it cannot run in this instantiation.
    fn builtin(&self, a: &Atom) -> Result<Option<Vec<Bind>>, SpecError> {
        let yes = || Ok(Some(vec![Vec::new()]));
        let test = |b: bool| Ok(Some(if b { vec![Vec::new()] } else { vec![] }));
        let ground = a.is_ground();
        let args = &a.args;
        let name = a.pred.as_str();
        if self.env.aux_preds.contains(&a.key()) {
            let m = self.env.aux_model(self.base.max(a.depth()))?;
            if ground {
                return test(m.atoms.contains(a));
            }
            let mut out = Vec::new();
            for f in m.by_pred.get(&a.key()).into_iter().flatten() {
                if let Some(s) = match_atom(a, f) {
                    out.push(s.iter().map(|(v, t)| (v.clone(), t.clone())).collect());
                }
            }
            return Ok(Some(out));
        }
        match (name, args.len()) {
            ("term", 1) => match &args[0] {
                t if t.is_ground() => yes(),
                Term::Var(v) => {
                    let dom = self.env.universe.up_to(self.cap(v))?;
                    Ok(Some(dom.iter().map(|t| vec![(v.clone(), t.clone())]).collect()))
                }
                _ => Ok(None),
            },
            ("list", 1) => match &args[0] {
                t if t.is_ground() => test(t.is_list()),
                Term::Var(v) => {
                    let dom = self.env.universe.lists_up_to(self.cap(v))?;
                    Ok(Some(dom.iter().map(|t| vec![(v.clone(), t.clone())]).collect()))
                }
                _ => Ok(None),
            },
            ("nat", 1) => match &args[0] {
                t if t.is_ground() => test(is_peano(t)),
                Term::Var(v) => Ok(Some((0..=self.cap(v)).map(|n| vec![(v.clone(), Term::peano(n))]).collect())),
                _ => Ok(None),
            },
            ("ground", 1) => {
                if ground {
                    yes()
                } else {
                    Ok(None)
                }
            }
            ("listlen", 2) if args[0].is_ground() => {
                if !args[0].is_list() {
                    return test(false);
                }
                let n = numeral(args[0].listlen());
                Ok(Some(match_ground(&args[1], &n).into_iter().collect()))
            }
            ("concat", 3) => {
                if args[0].is_ground() && args[1].is_ground() {
                    let (Some(k), Some(l)) = (args[0].list_items(), args[1].list_items()) else { return test(false) };
                    let all: Vec<Term> = k.into_iter().chain(l).cloned().collect();
                    return Ok(Some(match_ground(&args[2], &Term::list(all)).into_iter().collect()));
                }
                if args[2].is_ground() {
                    let Some(m) = args[2].list_items() else { return test(false) };
                    let m: Vec<Term> = m.into_iter().cloned().collect();
                    let mut out = Vec::new();
                    for i in 0..=m.len() {
                        let Some(b1) = match_ground(&args[0], &Term::list(m[..i].to_vec())) else { continue };
                        let second = inst_term(&args[1], &b1);
                        if let Some(b2) = match_ground(&second, &Term::list(m[i..].to_vec())) {
                            out.push(b1.into_iter().chain(b2).collect());
                        }
                    }
                    return Ok(Some(out));
                }
                Ok(None)
            }
            ("member", 2) if args[1].is_ground() => {
                let Some(items) = args[1].list_items() else { return test(false) };
                let mut out: Vec<Bind> = Vec::new();
                for it in items {
                    if let Some(b) = match_ground(&args[0], it) {
                        if !out.contains(&b) {
                            out.push(b);
                        }
                    }
                }
                Ok(Some(out))
            }
            ("subset", 2) if ground => match (args[0].list_items(), args[1].list_items()) {
                (Some(u), Some(t)) => test(u.iter().all(|x| t.contains(x))),
                _ => test(false),
            },
            ("eqfunctor", 2) if ground => test(args[0].functor() == args[1].functor()),
            ("=", 2) => {
                if args[0].is_ground() {
                    Ok(Some(match_ground(&args[1], &args[0]).into_iter().collect()))
                } else if args[1].is_ground() {
                    Ok(Some(match_ground(&args[0], &args[1]).into_iter().collect()))
                } else {
                    Ok(None)
                }
            }
            ("\\=", 2) | ("==", 2) if ground => test((args[0] == args[1]) == (name == "==")),
            (op, 2) if ARITH_CMP.contains(&op) && ground => {
                let (x, y) = (arith(&args[0])?, arith(&args[1])?);
                test(match op {
                    "=<" => x <= y,
                    "<" => x < y,
                    ">=" => x >= y,
                    ">" => x > y,
                    _ => x == y,
                })
            }
            ("term", _) | ("list", _) | ("nat", _) | ("ground", _) | ("listlen", 2) | ("concat", _) | ("member", 2)
            | ("subset", 2) | ("eqfunctor", 2) | ("\\=", 2) | ("==", 2) => Ok(None),
            (op, 2) if ARITH_CMP.contains(&op) => Ok(None),
            _ => Err(SpecError::UnknownGuard(format!("{name}/{}", args.len()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_atom, parse_program, parse_spec};

    fn set(spec_src: &str, prog: &str, fresh: usize) -> SpecSet {
        let src = parse_spec(spec_src).unwrap();
        let mut sig = Signature::new();
        if !prog.is_empty() {
            sig.add_program(&parse_program(prog).unwrap().program);
        }
        src.collect_symbols(&mut sig);
        sig.add_fresh_constants(fresh);
        SpecSet::bind(&src, Arc::new(Universe::new(sig))).unwrap()
    }

    const APPEND: &str = "app([H|K],L,[H|M]) :- app(K,L,M).\napp([],L,L).";

    #[test]
    fn append_specs() {
        let s = set(
            "spec s0 = { app(K,L,M) | list(K), list(L), list(M), concat(K,L,M) }.\n\
             spec s = { app(K,L,M) | (\\+ list(L), \\+ list(M)) ; (list(K), list(L), list(M), concat(K,L,M)) }.",
            APPEND,
            1,
        );
        let s0 = s.get("s0").unwrap();
        let full = s.get("s").unwrap();
        let a = parse_atom("app([1],[],[1])").unwrap();
        assert!(s0.contains(&a).unwrap());
        let b = parse_atom("app([],1,1)").unwrap();
        assert!(!s0.contains(&b).unwrap());
        assert!(full.contains(&b).unwrap());
        assert!(!full.contains(&parse_atom("app([],[],1)").unwrap()).unwrap());
        let e = s0.enumerate(3).unwrap();
        assert!(e.iter().all(|a| a.depth() <= 3 && s0.contains(a).unwrap()));
        assert!(e.contains(&a));
    }

    #[test]
    fn enumeration_agrees_with_membership_over_the_base() {
        let s = set(
            "spec s = { p(X,Y) | member(X, Y) } + { q(X) | nat(X) } + { r(X) | \\+ X = a } & { r(b) }.",
            "p(a,[b]). q(s(0)).",
            0,
        );
        let sp = s.get("s").unwrap();
        let u = s.env().universe().clone();
        for depth in 0..=3 {
            let e: BTreeSet<Atom> = sp.enumerate(depth).unwrap().into_iter().collect();
            let mut oracle = BTreeSet::new();
            for (p, n) in [("p", 2), ("q", 1), ("r", 1)] {
                if depth == 0 {
                    continue;
                }
                let terms = u.up_to(depth - 1).unwrap();
                let vars: Vec<Var> = (0..n).map(|i| Var::new(&format!("X{i}"))).collect();
                let pat = Atom::new(p, vars.iter().map(|v| Term::Var(v.clone())).collect());
                let domains: Vec<_> = vars.iter().map(|_| terms.clone()).collect();
                odometer(&domains, |k, vals| {
                    if k + 1 == n {
                        let a = pat.bind(&vars, vals);
                        if sp.contains(&a).unwrap() {
                            oracle.insert(a);
                        }
                    }
                    Step::Descend
                });
            }
            assert_eq!(e, oracle, "depth {depth}");
        }
    }

    #[test]
    fn auxiliary_programs_act_as_guards() {
        let s = set(
            "aux { odd_pos([],[]). odd_pos([X|T],[X|R]) :- even_pos(T,R). even_pos([],[]). even_pos([X|T],R) :- odd_pos(T,R). }\n\
             spec split = { s(L,A,B) | list(L), odd_pos(L,A), even_pos(L,B) }.",
            "s([],[],[]). s([X|Xs],[X|Ys],Zs) :- s(Xs,Zs,Ys).",
            1,
        );
        let sp = s.get("split").unwrap();
        assert!(sp.contains(&parse_atom("s([1,[],1],[1,1],[[]])").unwrap()).unwrap());
        assert!(!sp.contains(&parse_atom("s([1,[]],[1,[]],[])").unwrap()).unwrap());
        let e = sp.enumerate(3).unwrap();
        assert!(e.iter().all(|a| sp.contains(a).unwrap()));
        assert!(e.len() > 5);
    }

    #[test]
    fn arithmetic_guards() {
        let s = set(
            "spec size = { s(L,A,B) | list(L), list(A), list(B), listlen(A) - listlen(B) >= 0, listlen(A) - listlen(B) =< 1 }.",
            "s([],[],[]).",
            1,
        );
        let sp = s.get("size").unwrap();
        assert!(sp.contains(&parse_atom("s([],[1],[])").unwrap()).unwrap());
        assert!(!sp.contains(&parse_atom("s([],[1,1],[])").unwrap()).unwrap());
        assert!(!sp.contains(&parse_atom("s([],[],[1])").unwrap()).unwrap());
    }

    #[test]
    fn references_and_cycles() {
        let src = parse_spec("spec a = b. spec b = a.").unwrap();
        let mut sig = Signature::new();
        sig.add_symbol("c", 0);
        assert!(matches!(SpecSet::bind(&src, Arc::new(Universe::new(sig))), Err(SpecError::Cycle(_))));
    }

    #[test]
    fn unknown_guard_is_reported() {
        let s = set("spec s = { p(X) | frob(X) }.", "p(a).", 0);
        assert!(matches!(s.get("s").unwrap().contains(&parse_atom("p(a)").unwrap()), Err(SpecError::UnknownGuard(_))));
    }
}
