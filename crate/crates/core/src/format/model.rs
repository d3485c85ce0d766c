//! Model files.
//!
//! ```text
//! model     := decl* automaton+
//! decl      := "clock" idents ";" | "param" idents ";"
//!            | "action" ("low" | "high") idents ";" | "sync" idents? ";"
//! automaton := "automaton" ID "{" var* loc+ "}"
//! var       := "var" ID ":" INT ".." INT "=" INT ";"
//! loc       := "loc" ID "init"? ("inv" "(" guard ")")? ("{" edge* "}" | ";")
//! edge      := ("on" (ID | "eps"))? clause* "goto" ID ";"
//! clause    := "when" "(" guard ")" | "reset" "{" idents? "}" | "do" "{" (ID ":=" INT),* "}"
//! guard     := "true" | chain ("&&" chain)*
//! chain     := expr (CMP expr)+          CMP in < <= == >= > (and != for vars)
//! expr      := ["-"] term (("+" | "-") term)*
//! term      := NUM ["/" NUM] ["*"? ID] | ID
//! ```
//!
//! A `var` is compiled away: each location is split into one copy per
//! value (`l0_v0`, `l0_v1`, ...), guards may test `v == k` or `v != k` and
//! edges may assign with `do`.  `//` starts a comment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use num_traits::{One, ToPrimitive, Zero};

use crate::constraint::text::{atom_to_string, LinExpr};
use crate::constraint::{parse_rat, Atom, Cmp, Context, Polyhedron, Rat, Var, VarId, VarKind};
use crate::error::{Error, Result};
use crate::pta::{Action, ActionClass, Diagnostic, Edge, Label, Location, Network, Pta};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(Rat),
    Punct(&'static str),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const KEYWORDS: &[&str] = &["when", "reset", "do", "goto"];

const PUNCT: &[&str] = &[
    ":=", "..", "==", "!=", "<=", ">=", "&&", ";", ",", "{", "}", "(", ")", ":", "=", "<", ">", "+",
    "-", "*", "/",
];

fn lex(src: &str) -> Result<Vec<Token>> {
    let mut out = vec![];
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let bump = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        let (l0, c0) = (line, col);
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if j + 1 < chars.len() && chars[j] == '.' && chars[j + 1].is_ascii_digit() {
                j += 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
            }
            let text: String = chars[i..j].iter().collect();
            let v = parse_rat(&text).map_err(|e| perr(l0, c0, e.to_string()))?;
            out.push(Token { tok: Tok::Num(v), line: l0, col: c0 });
            let n = j - i;
            bump(&mut i, &mut line, &mut col, n);
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            out.push(Token { tok: Tok::Ident(text), line: l0, col: c0 });
            let n = j - i;
            bump(&mut i, &mut line, &mut col, n);
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let Some(p) = PUNCT.iter().find(|p| rest.starts_with(**p)) else {
            return Err(perr(l0, c0, format!("unexpected character `{c}`")));
        };
        out.push(Token { tok: Tok::Punct(p), line: l0, col: c0 });
        bump(&mut i, &mut line, &mut col, p.len());
    }
    Ok(out)
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

// ---- syntax tree ----

#[derive(Clone, Debug)]
enum GuardAtom {
    /// `lhs cmp rhs`, position of the first token.
    Linear(LinExpr, Cmp, LinExpr, (usize, usize)),
    /// `v == k` or `v != k` on a discrete variable.
    Discrete(String, bool, i64, (usize, usize)),
}

#[derive(Clone, Debug)]
struct EdgeAst {
    label: Option<(String, (usize, usize))>,
    guard: Vec<GuardAtom>,
    resets: Vec<(String, (usize, usize))>,
    assigns: Vec<(String, i64, (usize, usize))>,
    target: (String, (usize, usize)),
}

#[derive(Clone, Debug)]
struct LocAst {
    name: String,
    init: bool,
    inv: Vec<GuardAtom>,
    edges: Vec<EdgeAst>,
}

#[derive(Clone, Debug)]
struct DiscreteVar {
    name: String,
    lo: i64,
    hi: i64,
    init: i64,
}

#[derive(Clone, Debug)]
struct AutAst {
    name: String,
    pos: (usize, usize),
    vars: Vec<DiscreteVar>,
    locs: Vec<LocAst>,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|t| (t.line, t.col)).unwrap_or(self.eof)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let (l, c) = self.here();
        perr(l, c, msg)
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(q)) if q == k)
    }

    fn punct(&mut self, p: &str) -> Result<()> {
        if self.is_punct(p) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{p}`")))
        }
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        let hit = self.is_punct(p);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        let hit = self.is_kw(k);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn kw(&mut self, k: &str) -> Result<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{k}`")))
        }
    }

    fn ident(&mut self) -> Result<(String, (usize, usize))> {
        let at = self.here();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok((s, at))
            }
            _ => Err(self.err("expected an identifier")),
        }
    }

    fn idents(&mut self, close: &str) -> Result<Vec<(String, (usize, usize))>> {
        let mut out = vec![];
        if self.is_punct(close) {
            return Ok(out);
        }
        loop {
            out.push(self.ident()?);
            if !self.eat_punct(",") {
                return Ok(out);
            }
        }
    }

    fn int(&mut self) -> Result<i64> {
        let neg = self.eat_punct("-");
        match self.peek() {
            Some(Tok::Num(v)) if v.is_integer() => {
                let v = v.to_integer().to_i64().ok_or_else(|| self.err("integer too large"))?;
                self.pos += 1;
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.err("expected an integer")),
        }
    }

    fn number(&mut self) -> Option<Rat> {
        if let Some(Tok::Num(v)) = self.peek() {
            let mut v = v.clone();
            self.pos += 1;
            if self.is_punct("/") {
                if let Some(Tok::Num(d)) = self.toks.get(self.pos + 1).map(|t| &t.tok) {
                    if !d.is_zero() {
                        v /= d.clone();
                        self.pos += 2;
                    }
                }
            }
            Some(v)
        } else {
            None
        }
    }

    fn term(&mut self, e: &mut LinExpr, sign: Rat) -> Result<()> {
        if let Some(c) = self.number() {
            let c = c * &sign;
            self.eat_punct("*");
            if let Some(Tok::Ident(_)) = self.peek() {
                let (name, _) = self.ident()?;
                push_term(e, &name, c);
            } else {
                e.constant += c;
            }
            return Ok(());
        }
        let (name, _) = self.ident()?;
        push_term(e, &name, sign);
        Ok(())
    }

    fn expr(&mut self) -> Result<LinExpr> {
        let mut e = LinExpr::default();
        let mut sign = if self.eat_punct("-") { -Rat::one() } else { Rat::one() };
        loop {
            self.term(&mut e, sign)?;
            if self.eat_punct("+") {
                sign = Rat::one();
            } else if self.eat_punct("-") {
                sign = -Rat::one();
            } else {
                return Ok(e);
            }
        }
    }

    fn cmp(&mut self) -> Option<(Cmp, bool)> {
        let c = match self.peek() {
            Some(Tok::Punct("<")) => (Cmp::Lt, false),
            Some(Tok::Punct("<=")) => (Cmp::Le, false),
            Some(Tok::Punct("==")) | Some(Tok::Punct("=")) => (Cmp::Eq, false),
            Some(Tok::Punct(">=")) => (Cmp::Ge, false),
            Some(Tok::Punct(">")) => (Cmp::Gt, false),
            Some(Tok::Punct("!=")) => (Cmp::Eq, true),
            _ => return None,
        };
        self.pos += 1;
        Some(c)
    }

    fn guard(&mut self, vars: &[DiscreteVar]) -> Result<Vec<GuardAtom>> {
        let mut out = vec![];
        if self.eat_kw("true") {
            return Ok(out);
        }
        loop {
            let at = self.here();
            // discrete test: `v == k` / `v != k`
            if let Some(Tok::Ident(name)) = self.peek() {
                if vars.iter().any(|v| &v.name == name) {
                    let name = name.clone();
                    self.pos += 1;
                    let negated = match self.cmp() {
                        Some((Cmp::Eq, neg)) => neg,
                        _ => return Err(self.err(format!("`{name}` can only be tested with == or !="))),
                    };
                    let k = self.int()?;
                    out.push(GuardAtom::Discrete(name, negated, k, at));
                    if !self.eat_punct("&&") {
                        return Ok(out);
                    }
                    continue;
                }
            }
            let mut lhs = self.expr()?;
            let mut any = false;
            while let Some((c, neg)) = self.cmp() {
                if neg {
                    return Err(self.err("`!=` is only allowed on discrete variables"));
                }
                let rhs = self.expr()?;
                out.push(GuardAtom::Linear(lhs, c, rhs.clone(), at));
                lhs = rhs;
                any = true;
            }
            if !any {
                return Err(self.err("expected a comparison"));
            }
            if !self.eat_punct("&&") {
                return Ok(out);
            }
        }
    }

    fn paren_guard(&mut self, vars: &[DiscreteVar]) -> Result<Vec<GuardAtom>> {
        self.punct("(")?;
        let g = self.guard(vars)?;
        self.punct(")")?;
        Ok(g)
    }

    fn edge(&mut self, vars: &[DiscreteVar]) -> Result<EdgeAst> {
        let label = if self.eat_kw("on") {
            if KEYWORDS.iter().any(|k| self.is_kw(k)) {
                return Err(self.err("expected an action name or `eps`"));
            }
            let (a, at) = self.ident()?;
            (a != "eps").then_some((a, at))
        } else {
            None
        };
        let (mut guard, mut resets, mut assigns) = (None, None, None);
        loop {
            if guard.is_none() && self.eat_kw("when") {
                guard = Some(self.paren_guard(vars)?);
            } else if resets.is_none() && self.eat_kw("reset") {
                self.punct("{")?;
                let r = self.idents("}")?;
                self.punct("}")?;
                resets = Some(r);
            } else if assigns.is_none() && self.eat_kw("do") {
                let mut a = vec![];
                self.punct("{")?;
                while !self.is_punct("}") {
                    let (v, at) = self.ident()?;
                    self.punct(":=")?;
                    let k = self.int()?;
                    a.push((v, k, at));
                    if !self.eat_punct(",") {
                        break;
                    }
                }
                self.punct("}")?;
                assigns = Some(a);
            } else {
                break;
            }
        }
        self.kw("goto")?;
        let target = self.ident()?;
        self.punct(";")?;
        Ok(EdgeAst {
            label,
            guard: guard.unwrap_or_default(),
            resets: resets.unwrap_or_default(),
            assigns: assigns.unwrap_or_default(),
            target,
        })
    }

    fn automaton(&mut self) -> Result<AutAst> {
        let (name, pos) = self.ident()?;
        self.punct("{")?;
        let mut vars = vec![];
        while self.eat_kw("var") {
            let (v, _) = self.ident()?;
            self.punct(":")?;
            let lo = self.int()?;
            self.punct("..")?;
            let hi = self.int()?;
            self.punct("=")?;
            let init = self.int()?;
            self.punct(";")?;
            if lo > hi || init < lo || init > hi {
                return Err(self.err(format!("bad domain or initial value for `{v}`")));
            }
            vars.push(DiscreteVar { name: v, lo, hi, init });
        }
        let mut locs = vec![];
        while self.eat_kw("loc") {
            let (lname, _) = self.ident()?;
            let init = self.eat_kw("init");
            let inv = if self.eat_kw("inv") { self.paren_guard(&[])? } else { vec![] };
            let mut edges = vec![];
            if !self.eat_punct(";") {
                self.punct("{")?;
                while !self.eat_punct("}") {
                    if self.peek().is_none() {
                        return Err(self.err("unterminated location block"));
                    }
                    edges.push(self.edge(&vars)?);
                }
            }
            locs.push(LocAst {
                name: lname,
                init,
                inv,
                edges,
            });
        }
        self.punct("}")?;
        if locs.is_empty() {
            return Err(perr(pos.0, pos.1, format!("automaton `{name}` has no locations")));
        }
        Ok(AutAst {
            name,
            pos,
            vars,
            locs,
        })
    }
}

fn push_term(e: &mut LinExpr, name: &str, c: Rat) {
    match e.terms.iter_mut().find(|(n, _)| n == name) {
        Some((_, v)) => *v += c,
        None => e.terms.push((name.to_string(), c)),
    }
}

/// A parsed and compiled model.
#[derive(Clone, Debug)]
pub struct Model {
    pub components: Vec<Pta>,
    /// Explicit `sync` declaration, if any.
    pub sync: Option<BTreeSet<String>>,
    pub network: Network,
    /// Semantic problems; a model with diagnostics should not be analysed.
    pub diagnostics: Vec<Diagnostic>,
}

impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components && self.sync == other.sync
    }
}

struct Compiler<'a> {
    ctx: &'a Arc<Context>,
    classes: &'a BTreeMap<String, ActionClass>,
    diags: Vec<Diagnostic>,
}

impl Compiler<'_> {
    fn linear(&mut self, atoms: &[GuardAtom], what: &str) -> Result<Polyhedron> {
        let mut out: Vec<Atom> = vec![];
        for a in atoms {
            if let GuardAtom::Linear(l, c, r, (line, col)) = a {
                let undeclared: Vec<&str> = l
                    .terms
                    .iter()
                    .chain(&r.terms)
                    .map(|(n, _)| n.as_str())
                    .filter(|n| self.ctx.lookup(n).is_none())
                    .collect();
                if !undeclared.is_empty() {
                    for n in undeclared {
                        self.diags.push(Diagnostic {
                            message: format!("{line}:{col}: undeclared variable `{n}` in {what}"),
                        });
                    }
                    continue;
                }
                out.push(l.compare(*c, r, self.ctx)?);
            }
        }
        Polyhedron::from_atoms(self.ctx.clone(), out)
    }

    fn automaton(&mut self, aut: &AutAst) -> Result<Pta> {
        let dims: Vec<Vec<i64>> = aut.vars.iter().map(|v| (v.lo..=v.hi).collect()).collect();
        let mut tuples: Vec<Vec<i64>> = vec![vec![]];
        for d in &dims {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    d.iter().map(move |k| {
                        let mut t = t.clone();
                        t.push(*k);
                        t
                    })
                })
                .collect();
        }
        let suffix = |t: &[i64]| -> String {
            aut.vars
                .iter()
                .zip(t)
                .map(|(v, k)| format!("_{}{}", v.name, k))
                .collect()
        };
        let index = |loc: usize, t: &[i64]| -> usize {
            loc * tuples.len() + tuples.iter().position(|u| u == t).expect("tuple in domain")
        };
        let init_loc = match aut.locs.iter().filter(|l| l.init).count() {
            1 => aut.locs.iter().position(|l| l.init).expect("one"),
            0 => 0,
            _ => {
                return Err(perr(
                    aut.pos.0,
                    aut.pos.1,
                    format!("automaton `{}` has several initial locations", aut.name),
                ))
            }
        };
        let init_tuple: Vec<i64> = aut.vars.iter().map(|v| v.init).collect();

        let mut locations = vec![];
        for l in &aut.locs {
            let inv = self.linear(&l.inv, &format!("invariant of {}.{}", aut.name, l.name))?;
            for t in &tuples {
                locations.push(Location {
                    name: format!("{}{}", l.name, suffix(t)),
                    invariant: inv.clone(),
                });
            }
        }
        let mut used: BTreeSet<String> = BTreeSet::new();
        let mut edges = vec![];
        for (li, l) in aut.locs.iter().enumerate() {
            for e in &l.edges {
                let (tname, tpos) = &e.target;
                let Some(ti) = aut.locs.iter().position(|x| &x.name == tname) else {
                    return Err(perr(tpos.0, tpos.1, format!("unknown location `{tname}`")));
                };
                let label = match &e.label {
                    None => Label::Silent,
                    Some((a, (line, col))) => {
                        if !self.classes.contains_key(a) {
                            return Err(perr(*line, *col, format!("undeclared action `{a}`")));
                        }
                        used.insert(a.clone());
                        Label::Act(a.clone())
                    }
                };
                let what = format!("guard of {}.{} -> {}", aut.name, l.name, tname);
                let guard = self.linear(&e.guard, &what)?;
                let mut resets = vec![];
                for (r, (line, col)) in &e.resets {
                    match self.ctx.lookup(r) {
                        Some(id) if self.ctx.var(id).kind == VarKind::Clock => resets.push(id),
                        _ => return Err(perr(*line, *col, format!("`{r}` is not a clock"))),
                    }
                }
                resets.sort();
                resets.dedup();
                let var_index = |name: &str, pos: (usize, usize)| {
                    aut.vars
                        .iter()
                        .position(|v| v.name == name)
                        .ok_or_else(|| perr(pos.0, pos.1, format!("unknown discrete variable `{name}`")))
                };
                let mut tests = vec![];
                for g in &e.guard {
                    if let GuardAtom::Discrete(v, neg, k, pos) = g {
                        tests.push((var_index(v, *pos)?, *neg, *k));
                    }
                }
                let mut assigns = vec![];
                for (v, k, pos) in &e.assigns {
                    let i = var_index(v, *pos)?;
                    let d = &aut.vars[i];
                    if *k < d.lo || *k > d.hi {
                        return Err(perr(pos.0, pos.1, format!("{k} is outside the domain of `{v}`")));
                    }
                    assigns.push((i, *k));
                }
                for t in &tuples {
                    if !tests.iter().all(|&(i, neg, k)| (t[i] == k) != neg) {
                        continue;
                    }
                    let mut u = t.clone();
                    for &(i, k) in &assigns {
                        u[i] = k;
                    }
                    edges.push(Edge {
                        source: index(li, t),
                        guard: guard.clone(),
                        label: label.clone(),
                        resets: resets.clone(),
                        target: index(ti, &u),
                    });
                }
            }
        }
        edges.sort_by_key(|e| e.source);
        let actions = self
            .classes
            .iter()
            .filter(|(a, _)| used.contains(*a))
            .map(|(a, c)| Action {
                name: a.clone(),
                class: *c,
            })
            .collect();
        Pta::new(
            aut.name.clone(),
            self.ctx.clone(),
            actions,
            locations,
            index(init_loc, &init_tuple),
            edges,
        )
    }
}

/// Parses and compiles a model file.
pub fn parse_model(src: &str) -> Result<Model> {
    let toks = lex(src)?;
    let eof = toks.last().map(|t| (t.line, t.col + 1)).unwrap_or((1, 1));
    let mut p = Parser { toks, pos: 0, eof };
    let mut vars: Vec<Var> = vec![];
    let mut classes: BTreeMap<String, ActionClass> = BTreeMap::new();
    let mut sync: Option<BTreeSet<String>> = None;
    let mut auts = vec![];
    let mut names = BTreeSet::new();
    while p.peek().is_some() {
        let at = p.here();
        if p.eat_kw("clock") || p.eat_kw("param") {
            let kind_clock = matches!(&p.toks[p.pos - 1].tok, Tok::Ident(k) if k == "clock");
            for (n, (l, c)) in p.idents(";")? {
                if !names.insert(n.clone()) {
                    return Err(perr(l, c, format!("`{n}` declared twice")));
                }
                vars.push(if kind_clock { Var::clock(n) } else { Var::parameter(n) });
            }
            p.punct(";")?;
        } else if p.eat_kw("action") {
            let class = if p.eat_kw("low") {
                ActionClass::Low
            } else if p.eat_kw("high") {
                ActionClass::High
            } else {
                return Err(p.err("expected `low` or `high`"));
            };
            for (n, (l, c)) in p.idents(";")? {
                if n == "eps" {
                    return Err(perr(l, c, "`eps` is reserved for the silent action"));
                }
                if classes.insert(n.clone(), class).is_some() {
                    return Err(perr(l, c, format!("action `{n}` declared twice")));
                }
            }
            p.punct(";")?;
        } else if p.eat_kw("sync") {
            let s = p.idents(";")?;
            p.punct(";")?;
            sync.get_or_insert_with(BTreeSet::new).extend(s.into_iter().map(|(n, _)| n));
        } else if p.eat_kw("automaton") {
            auts.push(p.automaton()?);
        } else {
            return Err(perr(at.0, at.1, "expected a declaration or `automaton`"));
        }
    }
    if auts.is_empty() {
        return Err(p.err("the model declares no automaton"));
    }
    let ctx = Context::new(vars)?;
    let mut comp = Compiler {
        ctx: &ctx,
        classes: &classes,
        diags: vec![],
    };
    let components = auts.iter().map(|a| comp.automaton(a)).collect::<Result<Vec<_>>>()?;
    let mut diagnostics = comp.diags;
    let mut seen = BTreeSet::new();
    for c in &components {
        if !seen.insert(c.name()) {
            diagnostics.push(Diagnostic {
                message: format!("automaton `{}` declared twice", c.name()),
            });
        }
        diagnostics.extend(c.validate());
    }
    let network = Network::new(components.clone(), sync.clone())?;
    Ok(Model {
        components,
        sync,
        network,
        diagnostics,
    })
}

fn guard_text(ctx: &Context, p: &Polyhedron) -> String {
    if p.is_universe() {
        return "true".into();
    }
    p.atoms()
        .iter()
        .map(|a| atom_to_string(ctx, a))
        .collect::<Vec<_>>()
        .join(" && ")
}

fn ids(ctx: &Context, v: &[VarId]) -> String {
    v.iter().map(|i| ctx.var(*i).name.as_str()).collect::<Vec<_>>().join(", ")
}

/// Prints a model in the syntax accepted by [`parse_model`] (discrete
/// variables appear expanded).
pub fn print_model(m: &Model) -> String {
    let mut out = String::new();
    let ctx = m.network.context();
    let clocks = ctx.clocks();
    let params = ctx.parameters();
    if !clocks.is_empty() {
        let _ = writeln!(out, "clock {};", ids(ctx, &clocks));
    }
    if !params.is_empty() {
        let _ = writeln!(out, "param {};", ids(ctx, &params));
    }
    for (class, kw) in [(ActionClass::Low, "low"), (ActionClass::High, "high")] {
        let mut acts: BTreeSet<&str> = BTreeSet::new();
        for c in &m.components {
            acts.extend(c.actions().iter().filter(|a| a.class == class).map(|a| a.name.as_str()));
        }
        if !acts.is_empty() {
            let _ = writeln!(out, "action {kw} {};", acts.into_iter().collect::<Vec<_>>().join(", "));
        }
    }
    if let Some(s) = &m.sync {
        let _ = writeln!(out, "sync {};", s.iter().cloned().collect::<Vec<_>>().join(", "));
    }
    for c in &m.components {
        let _ = writeln!(out, "\nautomaton {} {{", c.name());
        for (i, l) in c.locations().iter().enumerate() {
            let _ = write!(out, "  loc {}", l.name);
            if i == c.initial() {
                out.push_str(" init");
            }
            if !l.invariant.is_universe() {
                let _ = write!(out, " inv ({})", guard_text(ctx, &l.invariant));
            }
            let edges: Vec<&Edge> = c.edges().iter().filter(|e| e.source == i).collect();
            if edges.is_empty() {
                out.push_str(";\n");
                continue;
            }
            out.push_str(" {\n");
            for e in edges {
                let _ = write!(out, "    on {}", e.label);
                if !e.guard.is_universe() {
                    let _ = write!(out, " when ({})", guard_text(ctx, &e.guard));
                }
                if !e.resets.is_empty() {
                    let _ = write!(out, " reset {{{}}}", ids(ctx, &e.resets));
                }
                let _ = writeln!(out, " goto {};", c.locations()[e.target].name);
            }
            out.push_str("  }\n");
        }
        out.push_str("}\n");
    }
    out
}
