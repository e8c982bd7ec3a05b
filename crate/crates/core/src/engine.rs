//! SLD, csSLD and pruned LD resolution, building explicit budgeted trees.
//!
//! Trees are explored depth-first with children in clause order. A node
//! budget bounds the number of nodes; when it runs out the tree is marked
//! exhausted and its unexplored part is simply absent.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::term::{canonical, is_instance, match_atom, mgu, Atom, Program, Substitution, Term, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("selection rule chose position {0} in a query of {1} atoms")]
    BadPosition(usize, usize),
    #[error("c-selection rule chose program {0} but only {1} are available")]
    BadProgram(usize, usize),
}

/// A query item. Cut and exit markers only occur in LD mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Atom(Atom),
    /// Removes alternatives of the given node and of everything explored
    /// below it so far.
    Cut(usize),
    /// Marks the completion of a call; the atom carries the answer.
    Exit(Atom),
}

impl Item {
    fn apply(&self, s: &Substitution) -> Item {
        match self {
            Item::Atom(a) => Item::Atom(a.apply(s)),
            Item::Cut(b) => Item::Cut(*b),
            Item::Exit(a) => Item::Exit(a.apply(s)),
        }
    }
}

/// Program chosen by a c-selection rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Choice {
    Empty,
    Part(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Internal,
    Success,
    Failure,
    /// A non-empty query for which the empty program was chosen.
    Stuck,
    /// Created but not expanded before the budget ran out.
    Open,
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub program: usize,
    /// Index within the chosen program.
    pub clause: usize,
    pub mgu: Substitution,
}

#[derive(Clone, Debug)]
pub struct Node {
    pub id: usize,
    pub parent: Option<usize>,
    /// Resolution steps from the root.
    pub depth: usize,
    pub query: Vec<Item>,
    pub via: Option<Edge>,
    /// Selected atom, after leading cuts and exits ran.
    pub selected: Option<Atom>,
    pub choice: Option<Choice>,
    pub children: Vec<usize>,
    pub kind: NodeKind,
    /// The root query under the composed substitutions of the branch.
    pub resultant: Vec<Atom>,
    /// Alternatives of this node removed by a cut.
    pub pruned: usize,
}

impl Node {
    pub fn atoms(&self) -> Vec<Atom> {
        self.query
            .iter()
            .filter_map(|i| match i {
                Item::Atom(a) => Some(a.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn query_text(&self) -> String {
        let parts: Vec<String> = self
            .query
            .iter()
            .filter_map(|i| match i {
                Item::Atom(a) => Some(a.to_string()),
                Item::Cut(_) => Some("!".into()),
                Item::Exit(_) => None,
            })
            .collect();
        if parts.is_empty() {
            "□".into()
        } else {
            parts.join(", ")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeKind {
    Sld,
    CsSld,
    PrunedLd,
    Ld,
}

#[derive(Clone, Debug)]
pub struct SldTree {
    pub kind: TreeKind,
    pub rule: String,
    /// True when every node selected its leftmost atom.
    pub leftmost: bool,
    pub programs: Vec<Program>,
    pub root: Vec<Atom>,
    pub nodes: Vec<Node>,
    pub exhausted: bool,
}

/// A computed answer: the root query instantiated, and the substitution on
/// the root variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Answer {
    pub atoms: Vec<Atom>,
    pub subst: Substitution,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.atoms.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(", "))
    }
}

impl SldTree {
    pub fn is_finite(&self) -> bool {
        !self.exhausted
    }

    pub fn answers(&self) -> Vec<Answer> {
        answers(self)
    }

    /// Queries from the root to `id`.
    pub fn path(&self, id: usize) -> Vec<String> {
        let mut out = Vec::new();
        let mut cur = Some(id);
        while let Some(i) = cur {
            out.push(self.nodes[i].query_text());
            cur = self.nodes[i].parent;
        }
        out.reverse();
        out
    }

    fn label(&self, n: &Node) -> String {
        let mut s = format!("[{}] {}", n.id, n.query_text());
        if let Some(e) = &n.via {
            let prog = if self.kind == TreeKind::CsSld { format!("Π{}:", e.program + 1) } else { String::new() };
            let _ = write!(s, "   <- {prog}clause {} {}", e.clause + 1, e.mgu);
        }
        if let Some(Choice::Part(i)) = n.choice {
            if self.kind == TreeKind::CsSld {
                let _ = write!(s, "   select Π{}", i + 1);
            }
        }
        match n.kind {
            NodeKind::Success => s.push_str("   success"),
            NodeKind::Failure => s.push_str("   failure"),
            NodeKind::Stuck => s.push_str("   empty program"),
            NodeKind::Open => s.push_str("   unexplored"),
            NodeKind::Internal => {}
        }
        if n.pruned > 0 {
            let _ = write!(s, "   ({} pruned)", n.pruned);
        }
        s
    }

    /// Indented text dump, one node per line.
    pub fn dump_text(&self) -> String {
        let mut out = String::new();
        let mut stack = vec![(0usize, 0usize)];
        while let Some((id, indent)) = stack.pop() {
            let n = &self.nodes[id];
            let _ = writeln!(out, "{}{}", "  ".repeat(indent), self.label(n));
            for &c in n.children.iter().rev() {
                stack.push((c, indent + 1));
            }
        }
        if self.exhausted {
            out.push_str("(node budget exhausted)\n");
        }
        out
    }

    /// Nested structure, built bottom-up so no recursion is needed.
    pub fn to_json(&self) -> Value {
        let mut built: Vec<Option<Value>> = vec![None; self.nodes.len()];
        for n in self.nodes.iter().rev() {
            let children: Vec<Value> = n.children.iter().map(|&c| built[c].take().unwrap_or(Value::Null)).collect();
            let via = n.via.as_ref().map(|e| {
                json!({"program": e.program + 1, "clause": e.clause + 1, "mgu": e.mgu.to_string()})
            });
            built[n.id] = Some(json!({
                "id": n.id,
                "query": n.atoms().iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                "via": via,
                "selected": n.selected.as_ref().map(|a| a.to_string()),
                "choice": n.choice.map(|c| match c { Choice::Empty => Value::Null, Choice::Part(i) => json!(i + 1) }),
                "kind": n.kind,
                "pruned": n.pruned,
                "children": children,
            }));
        }
        json!({
            "kind": self.kind,
            "rule": self.rule,
            "root": self.root.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "exhausted": self.exhausted,
            "tree": built.first().cloned().flatten(),
        })
    }
}

pub trait SelectionRule {
    fn name(&self) -> String;
    fn select(&self, atoms: &[Atom]) -> usize;
}

pub struct Leftmost;

impl SelectionRule for Leftmost {
    fn name(&self) -> String {
        "leftmost".into()
    }
    fn select(&self, _: &[Atom]) -> usize {
        0
    }
}

pub struct Rightmost;

impl SelectionRule for Rightmost {
    fn name(&self) -> String {
        "rightmost".into()
    }
    fn select(&self, atoms: &[Atom]) -> usize {
        atoms.len() - 1
    }
}

/// Chooses an atom position and a program for each non-empty query.
pub trait CSelectionRule {
    fn name(&self) -> String;
    /// `depth` counts resolution steps from the root along the branch.
    fn choose(&self, atoms: &[Atom], depth: usize) -> (usize, Choice);
    fn is_leftmost(&self) -> bool;
}

/// Leftmost atom, always the same program.
pub struct FixedRule(pub usize);

impl CSelectionRule for FixedRule {
    fn name(&self) -> String {
        format!("fixed(Π{})", self.0 + 1)
    }
    fn choose(&self, _: &[Atom], _: usize) -> (usize, Choice) {
        (0, Choice::Part(self.0))
    }
    fn is_leftmost(&self) -> bool {
        true
    }
}

/// Leftmost atom, cycling through the listed programs along each branch.
pub struct AlternatingRule(pub Vec<usize>);

impl CSelectionRule for AlternatingRule {
    fn name(&self) -> String {
        let ps: Vec<String> = self.0.iter().map(|i| format!("Π{}", i + 1)).collect();
        format!("alternating({})", ps.join(","))
    }
    fn choose(&self, _: &[Atom], depth: usize) -> (usize, Choice) {
        if self.0.is_empty() {
            return (0, Choice::Empty);
        }
        (0, Choice::Part(self.0[depth % self.0.len()]))
    }
    fn is_leftmost(&self) -> bool {
        true
    }
}

/// Leftmost atom; the first entry whose pattern has the atom as an instance
/// decides the program.
pub struct TableRule {
    pub entries: Vec<(Atom, Choice)>,
    pub default: Choice,
}

impl CSelectionRule for TableRule {
    fn name(&self) -> String {
        "table".into()
    }
    fn choose(&self, atoms: &[Atom], _: usize) -> (usize, Choice) {
        let a = &atoms[0];
        let c = self.entries.iter().find(|(p, _)| is_instance(a, p)).map_or(self.default, |(_, c)| *c);
        (0, c)
    }
    fn is_leftmost(&self) -> bool {
        true
    }
}

/// Leftmost atom; the first program with a clause whose head unifies with
/// it. Over singleton parts this commits to the first applicable clause.
pub struct FirstUnifiableRule(pub Vec<Program>);

impl CSelectionRule for FirstUnifiableRule {
    fn name(&self) -> String {
        "first-unifiable".into()
    }
    fn choose(&self, atoms: &[Atom], _: usize) -> (usize, Choice) {
        let a = &atoms[0];
        let avoid: BTreeSet<Var> = a.vars().into_iter().collect();
        for (i, p) in self.0.iter().enumerate() {
            if p.clauses().iter().any(|c| mgu(a, &crate::term::rename_apart(c, &avoid).head).is_some()) {
                return (0, Choice::Part(i));
            }
        }
        (0, Choice::Empty)
    }
    fn is_leftmost(&self) -> bool {
        true
    }
}

/// Events reported to a monitor during LD execution.
pub enum Event<'a> {
    Call { node: usize, atom: &'a Atom },
    Exit { node: usize, atom: &'a Atom },
}

struct Alt {
    program: usize,
    clause: usize,
    mgu: Substitution,
    query: Vec<Item>,
    resultant: Vec<Atom>,
}

struct Frame {
    node: usize,
    alts: std::collections::VecDeque<Alt>,
}

enum Mode<'r> {
    Sld(&'r dyn SelectionRule),
    CsSld(&'r dyn CSelectionRule),
    /// Leftmost; cuts honoured when the flag is set, exits recorded.
    Ld { cuts: bool },
}

struct Builder<'r, 'm> {
    programs: &'r [Program],
    mode: Mode<'r>,
    budget: usize,
    monitor: Option<&'m mut dyn FnMut(Event<'_>) -> bool>,
    nodes: Vec<Node>,
    stack: Vec<Frame>,
    counter: u32,
    leftmost: bool,
    stopped: bool,
}

impl Builder<'_, '_> {
    fn run(mut self, root: &[Atom], kind: TreeKind, rule: String) -> Result<SldTree, EngineError> {
        let query: Vec<Item> = root.iter().cloned().map(Item::Atom).collect();
        self.nodes.push(Node {
            id: 0,
            parent: None,
            depth: 0,
            query,
            via: None,
            selected: None,
            choice: None,
            children: Vec::new(),
            kind: NodeKind::Internal,
            resultant: root.to_vec(),
            pruned: 0,
        });
        self.visit(0)?;
        let mut exhausted = false;
        while !self.stopped {
            let Some(top) = self.stack.last_mut() else { break };
            let Some(alt) = top.alts.pop_front() else {
                self.stack.pop();
                continue;
            };
            if self.nodes.len() >= self.budget {
                exhausted = true;
                break;
            }
            let parent = top.node;
            let id = self.nodes.len();
            let depth = self.nodes[parent].depth + 1;
            self.nodes[parent].children.push(id);
            self.nodes.push(Node {
                id,
                parent: Some(parent),
                depth,
                query: alt.query,
                via: Some(Edge { program: alt.program, clause: alt.clause, mgu: alt.mgu }),
                selected: None,
                choice: None,
                children: Vec::new(),
                kind: NodeKind::Internal,
                resultant: alt.resultant,
                pruned: 0,
            });
            self.visit(id)?;
        }
        if exhausted {
            for n in &mut self.nodes {
                if n.kind == NodeKind::Internal && n.children.is_empty() {
                    n.kind = NodeKind::Open;
                }
            }
        }
        Ok(SldTree {
            kind,
            rule,
            leftmost: self.leftmost,
            programs: self.programs.to_vec(),
            root: root.to_vec(),
            nodes: self.nodes,
            exhausted: exhausted || self.stopped,
        })
    }

    fn cut(&mut self, barrier: usize) {
        let Some(pos) = self.stack.iter().position(|f| f.node == barrier) else { return };
        for f in &mut self.stack[pos..] {
            self.nodes[f.node].pruned += f.alts.len();
            f.alts.clear();
        }
    }

    fn visit(&mut self, id: usize) -> Result<(), EngineError> {
        // Run leading cuts and exits; they are not resolution steps.
        let mut query = self.nodes[id].query.clone();
        while let Some(first) = query.first() {
            match first {
                Item::Cut(b) => {
                    let b = *b;
                    self.cut(b);
                    query.remove(0);
                }
                Item::Exit(a) => {
                    if let Some(m) = self.monitor.as_mut() {
                        if !m(Event::Exit { node: id, atom: a }) {
                            self.stopped = true;
                        }
                    }
                    query.remove(0);
                }
                Item::Atom(_) => break,
            }
        }
        if self.stopped {
            return Ok(());
        }
        let atoms: Vec<Atom> = query
            .iter()
            .filter_map(|i| match i {
                Item::Atom(a) => Some(a.clone()),
                _ => None,
            })
            .collect();
        if atoms.is_empty() {
            self.nodes[id].kind = NodeKind::Success;
            return Ok(());
        }
        let depth = self.nodes[id].depth;
        let (pos, choice) = match &self.mode {
            Mode::Sld(r) => (r.select(&atoms), Choice::Part(0)),
            Mode::CsSld(r) => r.choose(&atoms, depth),
            Mode::Ld { .. } => (0, Choice::Part(0)),
        };
        if pos >= atoms.len() {
            return Err(EngineError::BadPosition(pos, atoms.len()));
        }
        if pos != 0 {
            self.leftmost = false;
        }
        let selected = atoms[pos].clone();
        self.nodes[id].selected = Some(selected.clone());
        self.nodes[id].choice = Some(choice);
        let program = match choice {
            Choice::Empty => {
                self.nodes[id].kind = NodeKind::Stuck;
                return Ok(());
            }
            Choice::Part(i) if i >= self.programs.len() => return Err(EngineError::BadProgram(i, self.programs.len())),
            Choice::Part(i) => i,
        };
        if let Some(m) = self.monitor.as_mut() {
            if !m(Event::Call { node: id, atom: &selected }) {
                self.stopped = true;
                return Ok(());
            }
        }
        // Position of the selected atom among all items.
        let item_pos = query
            .iter()
            .enumerate()
            .filter(|(_, i)| matches!(i, Item::Atom(_)))
            .nth(pos)
            .map(|(k, _)| k)
            .expect("selected atom present");
        let (honour_cuts, exits) = match self.mode {
            Mode::Ld { cuts } => (cuts, self.monitor.is_some()),
            _ => (false, false),
        };
        let mut alts = std::collections::VecDeque::new();
        for (ci, c) in self.programs[program].clauses().iter().enumerate() {
            if c.head.key() != selected.key() {
                continue;
            }
            self.counter += 1;
            let c = c.rename(self.counter);
            let Some(theta) = mgu(&selected, &c.head) else { continue };
            let mut body: Vec<Item> = c.body.iter().cloned().map(Item::Atom).collect();
            if honour_cuts {
                if let Some(k) = c.cut {
                    body.insert(k, Item::Cut(id));
                }
            }
            if exits {
                body.push(Item::Exit(selected.clone()));
            }
            let new_query: Vec<Item> =
                query[..item_pos].iter().chain(body.iter()).chain(query[item_pos + 1..].iter()).map(|i| i.apply(&theta)).collect();
            let resultant = self.nodes[id].resultant.iter().map(|a| a.apply(&theta)).collect();
            alts.push_back(Alt { program, clause: ci, mgu: theta, query: new_query, resultant });
        }
        if alts.is_empty() {
            self.nodes[id].kind = NodeKind::Failure;
            return Ok(());
        }
        self.stack.push(Frame { node: id, alts });
        Ok(())
    }
}

fn builder<'r, 'm>(programs: &'r [Program], mode: Mode<'r>, budget: usize) -> Builder<'r, 'm> {
    Builder {
        programs,
        mode,
        budget: budget.max(1),
        monitor: None,
        nodes: Vec::new(),
        stack: Vec::new(),
        counter: 0,
        leftmost: true,
        stopped: false,
    }
}

/// SLD-tree of `p` for `query` under `rule`. Cuts are ignored.
pub fn build_sld_tree(p: &Program, query: &[Atom], rule: &dyn SelectionRule, budget: usize) -> SldTree {
    let programs = [Program::definite(p.clauses().to_vec())];
    builder(&programs, Mode::Sld(rule), budget)
        .run(query, TreeKind::Sld, rule.name())
        .expect("plain selection rules stay in range")
}

/// csSLD-tree over the programs `parts` under a c-selection rule.
pub fn build_cssld_tree(
    parts: &[Program],
    query: &[Atom],
    rule: &dyn CSelectionRule,
    budget: usize,
) -> Result<SldTree, EngineError> {
    let programs: Vec<Program> = parts.iter().map(|p| Program::definite(p.clauses().to_vec())).collect();
    let b = builder(&programs, Mode::CsSld(rule), budget);
    let mut t = b.run(query, TreeKind::CsSld, rule.name())?;
    t.programs = parts.to_vec();
    Ok(t)
}

/// LD-tree with cuts honoured: the connected part of the LD-tree that
/// Prolog explores.
pub fn build_pruned_ld_tree(p: &Program, query: &[Atom], budget: usize) -> SldTree {
    let programs = [p.clone()];
    builder(&programs, Mode::Ld { cuts: true }, budget)
        .run(query, TreeKind::PrunedLd, "leftmost".into())
        .expect("LD stays in range")
}

/// The full LD-tree (cuts ignored), reporting every call and exit to
/// `monitor`; construction stops as soon as it returns `false`.
pub fn build_monitored_ld_tree(
    p: &Program,
    query: &[Atom],
    budget: usize,
    monitor: &mut dyn FnMut(Event<'_>) -> bool,
) -> SldTree {
    let programs = [p.clone()];
    let mut b = builder(&programs, Mode::Ld { cuts: false }, budget);
    b.monitor = Some(monitor);
    b.run(query, TreeKind::Ld, "leftmost".into()).expect("LD stays in range")
}

/// Computed answers of the success leaves, one per variant class, in
/// left-to-right order.
pub fn answers(t: &SldTree) -> Vec<Answer> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let root_vars: BTreeSet<Var> = t.root.iter().flat_map(|a| a.vars()).collect();
    let root_term = Term::app("q", t.root.iter().map(|a| a.as_term()).collect());
    let mut stack = vec![0usize];
    while let Some(id) = stack.pop() {
        let n = &t.nodes[id];
        if n.kind == NodeKind::Success && seen.insert(canonical(&n.resultant)) {
            let res_term = Term::app("q", n.resultant.iter().map(|a| a.as_term()).collect());
            let subst = match_atom(&Atom::from_term(&root_term).unwrap(), &Atom::from_term(&res_term).unwrap())
                .map(|s| Substitution::from_pairs(s.iter().map(|(v, t)| (v.clone(), t.clone()))).restrict(&root_vars))
                .unwrap_or_default();
            out.push(Answer { atoms: n.resultant.clone(), subst });
        }
        stack.extend(n.children.iter().rev());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_atom, parse_clauses, parse_program, parse_query};

    fn prog(src: &str) -> Program {
        parse_program(src).unwrap().program
    }

    #[test]
    fn append_answers() {
        let p = prog("app([H|K],L,[H|M]) :- app(K,L,M).\napp([],L,L).");
        let t = build_sld_tree(&p, &parse_query("app(X,Y,[a,b])").unwrap(), &Leftmost, 1000);
        assert!(t.is_finite());
        let ans: Vec<String> = t.answers().iter().map(|a| a.to_string()).collect();
        assert_eq!(ans, vec!["app([a,b],[],[a,b])", "app([a],[b],[a,b])", "app([],[a,b],[a,b])"]);
        assert_eq!(t.answers()[2].subst.get(&Var::new("X")), Some(&Term::nil()));
    }

    #[test]
    fn budget_marks_exhaustion() {
        let p = prog("p(X) :- p(X).");
        let t = build_sld_tree(&p, &parse_query("p(a)").unwrap(), &Leftmost, 50);
        assert!(!t.is_finite());
        assert_eq!(t.nodes.len(), 50);
        assert!(t.answers().is_empty());
    }

    #[test]
    fn appendix_cut_commits_to_first_guard_answer() {
        let p = prog("p(X,Z) :- q(X,Y), !, r(Y,Z).\nq(a,a).\nq(a,a1).\nq(b,b).\nr(a,c).\nr(a1,c).");
        let t = build_pruned_ld_tree(&p, &parse_query("p(a,Z)").unwrap(), 1000);
        assert!(t.is_finite());
        let ans: Vec<String> = t.answers().iter().map(|a| a.to_string()).collect();
        assert_eq!(ans, vec!["p(a,c)"]);
        assert!(t.nodes.iter().any(|n| n.pruned > 0));
    }

    #[test]
    fn cut_prunes_only_inside_its_subtree() {
        let p = prog("t(X) :- s(X).\nt(z).\ns(X) :- m(X), !.\nm(a).\nm(b).");
        let t = build_pruned_ld_tree(&p, &parse_query("t(X)").unwrap(), 1000);
        let ans: Vec<String> = t.answers().iter().map(|a| a.to_string()).collect();
        assert_eq!(ans, vec!["t(a)", "t(z)"]);
    }

    #[test]
    fn infinite_branch_before_the_cut_prevents_pruning() {
        let p = prog("p(X) :- q(X), !.\nq(X) :- q(X).\nq(a).");
        let t = build_pruned_ld_tree(&p, &parse_query("p(X)").unwrap(), 200);
        assert!(!t.is_finite());
        assert!(t.answers().is_empty());
    }

    #[test]
    fn alternating_rule_on_the_split_example() {
        let p = prog("q(X) :- p(Y,X).\np(Y,0).\np(a,s(X)) :- p(a,X).\np(b,s(X)) :- p(b,X).");
        let pi1 = p.select(&[1, 2, 4]).unwrap();
        let pi2 = p.select(&[1, 2, 3]).unwrap();
        let q = vec![parse_atom("q(s(s(s(0))))").unwrap()];
        let t = build_cssld_tree(&[pi1.clone(), pi2.clone()], &q, &AlternatingRule(vec![0, 1]), 1000).unwrap();
        assert!(t.is_finite());
        assert!(t.answers().is_empty());
        let full = build_sld_tree(&p, &q, &Leftmost, 1000);
        assert_eq!(full.answers().len(), 1);
        assert_eq!(full.nodes.iter().filter(|n| n.kind == NodeKind::Success).count(), 2);
    }

    #[test]
    fn first_unifiable_rule_emulates_commit() {
        let cl = parse_clauses("nop(adam,0) :- !. nop(eve,0) :- !. nop(X,2).").unwrap();
        let parts: Vec<Program> = cl.iter().map(|c| Program::definite(vec![c.clone()])).collect();
        let rule = FirstUnifiableRule(parts.clone());
        let t = build_cssld_tree(&parts, &parse_query("nop(X,0)").unwrap(), &rule, 100).unwrap();
        let ans: Vec<String> = t.answers().iter().map(|a| a.to_string()).collect();
        assert_eq!(ans, vec!["nop(adam,0)"]);
    }

    #[test]
    fn monitor_sees_calls_and_answers() {
        let p = prog("p(X) :- q(X).\nq(a).\nq(b).");
        let mut exits = Vec::new();
        let mut calls = 0;
        let t = build_monitored_ld_tree(&p, &parse_query("p(X)").unwrap(), 100, &mut |e| {
            match e {
                Event::Call { .. } => calls += 1,
                Event::Exit { atom, .. } => exits.push(atom.to_string()),
            }
            true
        });
        assert!(t.is_finite());
        assert_eq!(calls, 2);
        assert_eq!(exits, vec!["q(a)", "p(a)", "q(b)", "p(b)"]);
    }

    #[test]
    fn dumps_are_produced() {
        let p = prog("p(a).\np(b).");
        let t = build_sld_tree(&p, &parse_query("p(X)").unwrap(), &Leftmost, 10);
        let text = t.dump_text();
        assert!(text.starts_with("[0] p(X)"));
        assert_eq!(text.lines().count(), 3);
        let j = t.to_json();
        assert_eq!(j["tree"]["children"].as_array().unwrap().len(), 2);
    }
}
