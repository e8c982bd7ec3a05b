//! Parsers for the Edinburgh-style program subset, specification DSL, level
//! mappings, call-success specifications and queries.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::level::{LevelEntry, LevelMapping, MExpr};
use crate::spec::callsucc::{CallSuccessSpec, CsGuard, CsPattern};
use crate::spec::{Comprehension, Guard, SpecExpr, SpecSource};
use crate::term::{Atom, Clause, Program, ProgramError, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Name(String),
    Quoted(String),
    Var(String),
    Punct(&'static str),
    End,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const PUNCT: [&str; 26] = [
    ":-", "=:=", "\\+", "\\=", "==", "=<", ">=", "(", ")", "[", "]", "{", "}", "|", ",", "!", ";", "=", "<", ">",
    "+", "-", "*", "&", ":", "/",
];

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, msg: &str| ParseError { line, col, msg: msg.to_string() };
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let (l0, c0) = (line, col);
            bump!();
            bump!();
            loop {
                if i + 1 >= chars.len() {
                    return Err(err(l0, c0, "unterminated block comment"));
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
            continue;
        }
        let (l0, c0) = (line, col);
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: l0, col: c0 });
        if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            if c.is_ascii_digit() {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    bump!();
                }
            } else {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    bump!();
                }
            }
            let text: String = chars[start..i].iter().collect();
            if c.is_ascii_uppercase() || c == '_' {
                push(&mut out, Tok::Var(text));
            } else {
                push(&mut out, Tok::Name(text));
            }
            continue;
        }
        if c == '\'' {
            bump!();
            let mut text = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(err(l0, c0, "unterminated quoted atom")),
                    Some('\\') => {
                        bump!();
                        match chars.get(i) {
                            Some(&e) => {
                                text.push(e);
                                bump!();
                            }
                            None => return Err(err(l0, c0, "unterminated quoted atom")),
                        }
                    }
                    Some('\'') => {
                        bump!();
                        if chars.get(i) == Some(&'\'') {
                            text.push('\'');
                            bump!();
                        } else {
                            break;
                        }
                    }
                    Some(&ch) => {
                        text.push(ch);
                        bump!();
                    }
                }
            }
            push(&mut out, Tok::Quoted(text));
            continue;
        }
        if c == '.' {
            let next = chars.get(i + 1);
            if next.is_none() || next.is_some_and(|n| n.is_whitespace() || *n == '%') {
                bump!();
                push(&mut out, Tok::End);
                continue;
            }
            return Err(err(l0, c0, "unexpected '.'"));
        }
        if c == '[' {
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_whitespace() && chars[j] != '\n' {
                j += 1;
            }
            if chars.get(j) == Some(&']') {
                while i <= j {
                    bump!();
                }
                push(&mut out, Tok::Name("[]".into()));
                continue;
            }
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        match PUNCT.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                for _ in 0..p.chars().count() {
                    bump!();
                }
                push(&mut out, Tok::Punct(p));
            }
            None => return Err(err(l0, c0, &format!("unexpected character '{c}'"))),
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

const RELOPS: [&str; 8] = ["=", "\\=", "==", "=<", "<", ">=", ">", "=:="];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    anon: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser { toks: lex(src)?, pos: 0, anon: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let t = &self.toks[self.pos];
        Err(ParseError { line: t.line, col: t.col, msg: msg.into() })
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.error(format!("expected '{p}', found {}", describe(self.peek())))
        }
    }

    fn expect_end(&mut self) -> PResult<()> {
        if matches!(self.peek(), Tok::End) {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected '.', found {}", describe(self.peek())))
        }
    }

    fn is_name(&self, n: &str) -> bool {
        matches!(self.peek(), Tok::Name(m) if m == n)
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    fn term(&mut self) -> PResult<Term> {
        let mut left = self.mul()?;
        loop {
            let op = if self.is_punct("+") {
                "+"
            } else if self.is_punct("-") {
                "-"
            } else {
                break;
            };
            self.next();
            let right = self.mul()?;
            left = Term::app(op, vec![left, right]);
        }
        Ok(left)
    }

    fn mul(&mut self) -> PResult<Term> {
        let mut left = self.primary()?;
        while self.eat_punct("*") {
            let right = self.primary()?;
            left = Term::app("*", vec![left, right]);
        }
        Ok(left)
    }

    fn args(&mut self) -> PResult<Vec<Term>> {
        self.expect_punct("(")?;
        let mut args = vec![self.term()?];
        while self.eat_punct(",") {
            args.push(self.term()?);
        }
        self.expect_punct(")")?;
        Ok(args)
    }

    fn primary(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.next();
                if v == "_" {
                    self.anon += 1;
                    Ok(Term::var(&format!("_G{}", self.anon)))
                } else {
                    Ok(Term::var(&v))
                }
            }
            Tok::Name(n) | Tok::Quoted(n) => {
                self.next();
                if self.is_punct("(") {
                    Ok(Term::app(&n, self.args()?))
                } else {
                    Ok(Term::constant(&n))
                }
            }
            Tok::Punct(p) if matches!(self.peek_at(1), Tok::Punct("(")) && (RELOPS.contains(&p) || "+-*".contains(p)) => {
                self.next();
                Ok(Term::app(p, self.args()?))
            }
            Tok::Punct("(") => {
                self.next();
                let t = self.term()?;
                self.expect_punct(")")?;
                Ok(t)
            }
            Tok::Punct("[") => {
                self.next();
                let mut items = vec![self.term()?];
                while self.eat_punct(",") {
                    items.push(self.term()?);
                }
                let tail = if self.eat_punct("|") { self.term()? } else { Term::nil() };
                self.expect_punct("]")?;
                Ok(Term::list_with_tail(items, tail))
            }
            other => self.error(format!("expected a term, found {}", describe(&other))),
        }
    }

    /// `term [relop term]`, read as an atom.
    fn relation(&mut self) -> PResult<Atom> {
        let left = self.term()?;
        if let Tok::Punct(p) = self.peek().clone() {
            if RELOPS.contains(&p) {
                self.next();
                let right = self.term()?;
                return Ok(Atom::new(p, vec![left, right]));
            }
        }
        match Atom::from_term(&left) {
            Some(a) => Ok(a),
            None => self.error("a variable cannot be used as an atom"),
        }
    }

    /// Body items; `None` stands for a cut.
    fn body(&mut self) -> PResult<Vec<Option<Atom>>> {
        let mut items = Vec::new();
        loop {
            if self.eat_punct("!") {
                items.push(None);
            } else {
                items.push(Some(self.relation()?));
            }
            if !self.eat_punct(",") {
                return Ok(items);
            }
        }
    }

    fn clause_after_head(&mut self, head: Atom) -> PResult<Clause> {
        if !self.eat_punct(":-") {
            return Ok(Clause::fact(head));
        }
        let items = self.body()?;
        let cuts: Vec<usize> = items.iter().enumerate().filter(|(_, x)| x.is_none()).map(|(i, _)| i).collect();
        if cuts.len() > 1 {
            return self.error("at most one cut per clause is supported");
        }
        let body: Vec<Atom> = items.into_iter().flatten().collect();
        Ok(match cuts.first() {
            Some(&k) => Clause::with_cut(head, body, k),
            None => Clause::new(head, body),
        })
    }

    fn clause(&mut self) -> PResult<Clause> {
        let head = self.relation()?;
        let c = self.clause_after_head(head)?;
        self.expect_end()?;
        Ok(c)
    }

    fn guard_disj(&mut self) -> PResult<Guard> {
        let mut alts = vec![self.guard_conj()?];
        while self.eat_punct(";") {
            alts.push(self.guard_conj()?);
        }
        Ok(if alts.len() == 1 && alts[0].len() == 1 { alts.pop().unwrap().pop().unwrap() } else { Guard::Or(alts) })
    }

    fn guard_conj(&mut self) -> PResult<Vec<Guard>> {
        let mut gs = vec![self.guard_lit()?];
        while self.eat_punct(",") {
            gs.push(self.guard_lit()?);
        }
        Ok(gs)
    }

    fn guard_lit(&mut self) -> PResult<Guard> {
        if self.eat_punct("\\+") {
            return Ok(Guard::Not(Box::new(self.guard_lit()?)));
        }
        if self.is_name("true") && !matches!(self.peek_at(1), Tok::Punct("(")) {
            self.next();
            return Ok(Guard::True);
        }
        if self.is_punct("(") {
            let save = self.pos;
            self.next();
            if let Ok(g) = self.guard_disj() {
                if self.eat_punct(")") && !matches!(self.peek(), Tok::Punct(p) if RELOPS.contains(p) || "+-*".contains(p)) {
                    return Ok(g);
                }
            }
            self.pos = save;
        }
        Ok(Guard::Goal(self.relation()?))
    }

    fn spec_expr(&mut self) -> PResult<SpecExpr> {
        let mut parts = vec![self.spec_inter()?];
        while self.eat_punct("+") {
            parts.push(self.spec_inter()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { SpecExpr::Union(parts) })
    }

    fn spec_inter(&mut self) -> PResult<SpecExpr> {
        let mut left = self.spec_factor()?;
        while self.eat_punct("&") {
            let right = self.spec_factor()?;
            left = SpecExpr::Inter(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn spec_factor(&mut self) -> PResult<SpecExpr> {
        if self.eat_punct("(") {
            let e = self.spec_expr()?;
            self.expect_punct(")")?;
            return Ok(e);
        }
        if self.eat_punct("{") {
            if self.eat_punct("}") {
                return Ok(SpecExpr::Empty);
            }
            let first = self.relation()?;
            if self.eat_punct("|") {
                let g = self.guard_disj()?;
                self.expect_punct("}")?;
                let guards = match g {
                    Guard::Or(mut alts) if alts.len() == 1 => alts.pop().unwrap(),
                    g => vec![g],
                };
                return Ok(SpecExpr::Comp(Comprehension { pattern: first, guards }));
            }
            let mut pats = vec![first];
            while self.eat_punct(",") {
                pats.push(self.relation()?);
            }
            self.expect_punct("}")?;
            let comps: Vec<SpecExpr> =
                pats.into_iter().map(|p| SpecExpr::Comp(Comprehension { pattern: p, guards: vec![] })).collect();
            return Ok(if comps.len() == 1 { comps.into_iter().next().unwrap() } else { SpecExpr::Union(comps) });
        }
        match self.next() {
            Tok::Name(n) if n == "all" => Ok(SpecExpr::All),
            Tok::Name(n) => Ok(SpecExpr::Ref(n)),
            other => {
                self.pos -= 1;
                self.error(format!("expected a specification, found {}", describe(&other)))
            }
        }
    }

    fn number(&mut self) -> PResult<u64> {
        match self.next() {
            Tok::Name(n) if n.chars().all(|c| c.is_ascii_digit()) => {
                n.parse().map_err(|_| ParseError { line: 0, col: 0, msg: format!("number too large: {n}") })
            }
            other => {
                self.pos -= 1;
                self.error(format!("expected a number, found {}", describe(&other)))
            }
        }
    }

    fn mexpr(&mut self) -> PResult<MExpr> {
        let mut left = self.mterm()?;
        while self.eat_punct("+") {
            left = MExpr::Add(Box::new(left), Box::new(self.mterm()?));
        }
        Ok(left)
    }

    fn mterm(&mut self) -> PResult<MExpr> {
        let mut left = self.mprim()?;
        while self.eat_punct("*") {
            left = MExpr::Mul(Box::new(left), Box::new(self.mprim()?));
        }
        Ok(left)
    }

    fn mprim(&mut self) -> PResult<MExpr> {
        if self.eat_punct("(") {
            let e = self.mexpr()?;
            self.expect_punct(")")?;
            return Ok(e);
        }
        match self.peek().clone() {
            Tok::Name(n) if n.chars().all(|c| c.is_ascii_digit()) => Ok(MExpr::Num(self.number()?)),
            Tok::Name(n) if matches!(self.peek_at(1), Tok::Punct("(")) => {
                self.next();
                match n.as_str() {
                    "max" => {
                        self.expect_punct("(")?;
                        let a = self.mexpr()?;
                        self.expect_punct(",")?;
                        let b = self.mexpr()?;
                        self.expect_punct(")")?;
                        Ok(MExpr::Max(Box::new(a), Box::new(b)))
                    }
                    "listlen" | "termsize" | "const" => {
                        let mut args = self.args()?;
                        if args.len() != 1 {
                            return self.error(format!("{n} takes one argument"));
                        }
                        let t = args.pop().unwrap();
                        match n.as_str() {
                            "listlen" => Ok(MExpr::ListLen(t)),
                            "termsize" => Ok(MExpr::TermSize(t)),
                            _ => match &t {
                                Term::App(s, a) if a.is_empty() => s
                                    .as_str()
                                    .parse()
                                    .map(MExpr::Num)
                                    .or_else(|_| self.error("const takes a number")),
                                _ => self.error("const takes a number"),
                            },
                        }
                    }
                    _ => Ok(MExpr::Table(n, self.args()?)),
                }
            }
            other => self.error(format!("expected a measure, found {}", describe(&other))),
        }
    }

    fn cs_guards(&mut self) -> PResult<Vec<CsGuard>> {
        let mut out = Vec::new();
        loop {
            let a = self.relation()?;
            match CsGuard::from_atom(&a) {
                Some(g) => out.push(g),
                None => {
                    return self.error(format!(
                        "guard {a} is not one of the substitution-closed forms ground/1, list/1, member/2, subset/2, ==/2, true"
                    ))
                }
            }
            if !self.eat_punct(",") {
                return Ok(out);
            }
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Name(n) | Tok::Quoted(n) => format!("'{n}'"),
        Tok::Var(v) => format!("variable {v}"),
        Tok::Punct(p) => format!("'{p}'"),
        Tok::End => "end of clause".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// A parsed program file with the directives it declared.
#[derive(Clone, Debug)]
pub struct SourceProgram {
    pub program: Program,
    /// Extra constants declared with `:- signature([c1,...]).`
    pub signature_extras: Vec<Term>,
    /// Named clause-number lists declared with `:- part(Name, [i,...]).`
    pub parts: Vec<(String, Vec<usize>)>,
}

#[derive(Debug, Error)]
pub enum ProgramParseError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error(transparent)]
    Program(#[from] ProgramError),
}

pub fn parse_program(src: &str) -> Result<SourceProgram, ProgramParseError> {
    let sp = parse_program_lenient(src)?;
    sp.program.check_cut_placement()?;
    Ok(sp)
}

/// Like [`parse_program`] but accepts cuts in any clause.
pub fn parse_program_lenient(src: &str) -> Result<SourceProgram, ProgramParseError> {
    let mut p = Parser::new(src)?;
    let mut clauses = Vec::new();
    let mut extras = Vec::new();
    let mut parts = Vec::new();
    while !p.at_eof() {
        if p.eat_punct(":-") {
            let d = p.term()?;
            p.expect_end()?;
            match (d.functor(), d.args()) {
                (Some((f, 1)), [l]) if f.as_str() == "signature" => match l.list_items() {
                    Some(items) => extras.extend(items.into_iter().cloned()),
                    None => return Err(p.error::<()>("signature/1 expects a list").unwrap_err().into()),
                },
                (Some((f, 2)), [name, l]) if f.as_str() == "part" => {
                    let name = name.to_string();
                    let mut nums = Vec::new();
                    for item in l.list_items().unwrap_or_default() {
                        match item.to_string().parse::<usize>() {
                            Ok(n) if n >= 1 => nums.push(n),
                            _ => return Err(p.error::<()>("part/2 expects clause numbers").unwrap_err().into()),
                        }
                    }
                    parts.push((name, nums));
                }
                _ => return Err(p.error::<()>(format!("unknown directive {d}")).unwrap_err().into()),
            }
            continue;
        }
        clauses.push(p.clause()?);
    }
    let program = Program::with_cuts(clauses);
    for (name, nums) in &parts {
        if nums.iter().any(|&n| n > program.len()) {
            return Err(ParseError { line: 0, col: 0, msg: format!("part {name} names a clause beyond {}", program.len()) }.into());
        }
    }
    Ok(SourceProgram { program, signature_extras: extras, parts })
}

/// Clauses without any placement restriction on cuts.
pub fn parse_clauses(src: &str) -> Result<Vec<Clause>, ParseError> {
    let mut p = Parser::new(src)?;
    let mut out = Vec::new();
    while !p.at_eof() {
        out.push(p.clause()?);
    }
    Ok(out)
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    if matches!(p.peek(), Tok::End) {
        p.next();
    }
    if !p.at_eof() {
        return p.error("trailing input after term");
    }
    Ok(t)
}

pub fn parse_atom(src: &str) -> Result<Atom, ParseError> {
    let q = parse_query(src)?;
    if q.len() != 1 {
        return Err(ParseError { line: 1, col: 1, msg: "expected a single atom".into() });
    }
    Ok(q.into_iter().next().unwrap())
}

/// A conjunction `A1, ..., An` with an optional final `.`.
pub fn parse_query(src: &str) -> Result<Vec<Atom>, ParseError> {
    let mut p = Parser::new(src)?;
    let items = p.body()?;
    if matches!(p.peek(), Tok::End) {
        p.next();
    }
    if !p.at_eof() {
        return p.error("trailing input after query");
    }
    items.into_iter().map(|x| x.ok_or(())).collect::<Result<Vec<_>, _>>().map_err(|_| ParseError {
        line: 1,
        col: 1,
        msg: "cuts are not allowed in queries".into(),
    })
}

/// Reads `aux { clauses }` blocks and `spec name = expr.` declarations.
pub fn parse_spec(src: &str) -> Result<SpecSource, ParseError> {
    let mut p = Parser::new(src)?;
    let mut out = SpecSource::default();
    while !p.at_eof() {
        if p.is_name("aux") && matches!(p.peek_at(1), Tok::Punct("{")) {
            p.next();
            p.next();
            while !p.eat_punct("}") {
                if p.at_eof() {
                    return p.error("unterminated aux block");
                }
                out.aux.push(p.clause()?);
            }
            continue;
        }
        if !p.is_name("spec") {
            return p.error(format!("expected 'spec' or 'aux', found {}", describe(p.peek())));
        }
        p.next();
        let name = match p.next() {
            Tok::Name(n) => n,
            other => {
                p.pos -= 1;
                return p.error(format!("expected a specification name, found {}", describe(&other)));
            }
        };
        p.expect_punct("=")?;
        let e = p.spec_expr()?;
        p.expect_end()?;
        if out.specs.iter().any(|(n, _)| *n == name) {
            return p.error(format!("specification {name} defined twice"));
        }
        out.specs.push((name, e));
    }
    Ok(out)
}

/// Reads `|pattern| = measure [when guards]` entries, separated by `;` or
/// `.`, and `table name: (args) = n, ... .` declarations.
pub fn parse_level_mapping(src: &str) -> Result<LevelMapping, ParseError> {
    let mut p = Parser::new(src)?;
    let mut entries = Vec::new();
    let mut tables: BTreeMap<String, BTreeMap<Vec<Term>, u64>> = BTreeMap::new();
    while !p.at_eof() {
        if p.is_name("table") {
            p.next();
            let name = match p.next() {
                Tok::Name(n) => n,
                _ => return p.error("expected a table name"),
            };
            p.expect_punct(":")?;
            let t = tables.entry(name).or_default();
            loop {
                let key = p.args()?;
                p.expect_punct("=")?;
                let v = p.number()?;
                t.insert(key, v);
                if !p.eat_punct(",") {
                    break;
                }
            }
            p.expect_end()?;
            continue;
        }
        p.expect_punct("|")?;
        let pattern = p.relation()?;
        p.expect_punct("|")?;
        p.expect_punct("=")?;
        let expr = p.mexpr()?;
        let when = if p.is_name("when") {
            p.next();
            p.cs_guards()?
        } else {
            Vec::new()
        };
        if !p.eat_punct(";") && !matches!(p.peek(), Tok::Eof) {
            p.expect_end()?;
        }
        entries.push(LevelEntry { pattern, expr, when });
    }
    Ok(LevelMapping::new(entries, tables))
}

/// Reads `pre pattern [| guards].` and `post pattern [| guards].` lines.
pub fn parse_callsucc(src: &str) -> Result<CallSuccessSpec, ParseError> {
    let mut p = Parser::new(src)?;
    let mut cs = CallSuccessSpec::default();
    while !p.at_eof() {
        let is_pre = if p.is_name("pre") {
            true
        } else if p.is_name("post") {
            false
        } else {
            return p.error(format!("expected 'pre' or 'post', found {}", describe(p.peek())));
        };
        p.next();
        let pattern = p.relation()?;
        let guards = if p.eat_punct("|") { p.cs_guards()? } else { Vec::new() };
        p.expect_end()?;
        let cp = CsPattern::new(pattern, guards).map_err(|msg| ParseError { line: 0, col: 0, msg })?;
        if is_pre {
            cs.pre.push(cp);
        } else {
            cs.post.push(cp);
        }
    }
    Ok(cs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn append_roundtrip() {
        let src = "app([H|K],L,[H|M]) :- app(K,L,M).\napp([],L,L).\n";
        let p = parse_program(src).unwrap().program;
        assert_eq!(p.len(), 2);
        let printed = p.to_string();
        let again = parse_program(&printed).unwrap().program;
        assert_eq!(p, again);
        assert_eq!(printed, "app([H|K],L,[H|M]) :- app(K,L,M).\napp([],L,L).\n");
    }

    #[test]
    fn cut_position_and_placement() {
        let p = parse_program("in([],L).\nin([H|T],L) :- m(H,L), !, in(T,L).").unwrap().program;
        assert_eq!(p.clauses()[1].cut, Some(1));
        assert!(parse_program("nop(adam,0) :- !. nop(X,2).").is_err());
        assert_eq!(parse_clauses("nop(adam,0) :- !. nop(X,2).").unwrap()[0].cut, Some(0));
    }

    #[test]
    fn pairs_and_equality() {
        let p = parse_program("p(P-P,[]). q(V-P,_) :- V=P. P=P.").unwrap().program;
        assert_eq!(p.clauses()[2].head.pred.as_str(), "=");
        assert_eq!(p.clauses()[0].head.args[0].functor().unwrap().0.as_str(), "-");
        let again = parse_program(&p.to_string()).unwrap().program;
        assert_eq!(p, again);
    }

    #[test]
    fn quoted_atoms() {
        let t = parse_term("f('a''', 'hello world')").unwrap();
        assert_eq!(parse_term(&t.to_string()).unwrap(), t);
        assert_eq!(t.args()[0].functor().unwrap().0.as_str(), "a'");
    }

    #[test]
    fn syntax_error_has_position() {
        let e = parse_program("p(a).\nq(b :- r.").unwrap_err();
        match e {
            ProgramParseError::Syntax(e) => assert_eq!(e.line, 2),
            _ => panic!("expected syntax error"),
        }
    }

    #[test]
    fn directives() {
        let sp = parse_program(":- signature([a,b]).\n:- part(pi1, [1,2]).\np(X).\nq(Y).").unwrap();
        assert_eq!(sp.signature_extras.len(), 2);
        assert_eq!(sp.parts, vec![("pi1".to_string(), vec![1, 2])]);
    }

    #[test]
    fn spec_file() {
        let src = "aux { e(a). }\nspec s0 = { app(K,L,M) | list(K), list(L), (\\+ list(M) ; concat(K,L,M)) }.\n\
                   spec s = s0 + { p(a), p(b) } & all.\nspec z = {}.";
        let s = parse_spec(src).unwrap();
        assert_eq!(s.aux.len(), 1);
        assert_eq!(s.specs.len(), 3);
        match &s.specs[0].1 {
            SpecExpr::Comp(c) => assert_eq!(c.guards.len(), 3),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn guard_with_parenthesised_term() {
        let s = parse_spec("spec s = { p(X) | (X-a) = (b-a) }.").unwrap();
        match &s.specs[0].1 {
            SpecExpr::Comp(c) => assert!(matches!(&c.guards[0], Guard::Goal(a) if a.pred.as_str() == "=")),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn level_mapping_file() {
        let lm = parse_level_mapping(
            "|p(T,U)| = 2*listlen(U)+2; |q(T,U)| = 2*listlen(U)+1; |=(T,U)| = 0.\n\
             table sp: (a,b) = 1, (b,c) = 1.\n|e(X,Y)| = sp(X,Y).",
        )
        .unwrap();
        assert_eq!(lm.entries().len(), 4);
    }

    #[test]
    fn callsucc_file() {
        let cs = parse_callsucc("pre in(U,T) | list(U), ground(T).\npost m(E,L) | member(E,L).\npre p(a,_).").unwrap();
        assert_eq!(cs.pre.len(), 2);
        assert_eq!(cs.post.len(), 1);
        assert!(parse_callsucc("pre p(X) | foo(X).").is_err());
    }
}
