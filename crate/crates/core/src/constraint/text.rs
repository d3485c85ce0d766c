//! Text form of constraints: `0 < p && p < 1 || 2 < p && p < 3`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::atom::{Atom, Cmp, Rel};
use super::context::Context;
use super::polyhedron::Polyhedron;
use super::rational::{fmt_rat, parse_rat, Rat};
use super::set::ConstraintSet;
use crate::error::{Error, Result};

pub fn atom_to_string(ctx: &Context, a: &Atom) -> String {
    if let Some(t) = a.constant_truth() {
        return if t { "0 <= 0".into() } else { "0 < 0".into() };
    }
    let support: Vec<usize> = a.support().collect();
    let cmp = match a.rel() {
        Rel::Lt => Cmp::Lt,
        Rel::Le => Cmp::Le,
        Rel::Eq => Cmp::Eq,
    };
    if support.len() == 1 {
        let j = support[0];
        let c = a.coeff(j);
        let k = Rat::new(a.rhs().clone(), c.clone());
        let name = &ctx.vars()[j].name;
        let cmp = if c.is_negative() { cmp.flip() } else { cmp };
        return match cmp {
            Cmp::Gt => format!("{} < {name}", fmt_rat(&k)),
            _ => format!("{name} {} {}", cmp.symbol(), fmt_rat(&k)),
        };
    }
    let flip = a.coeff(support[0]).is_negative();
    let sign = if flip { -BigInt::one() } else { BigInt::one() };
    let mut out = String::new();
    for (n, &j) in support.iter().enumerate() {
        let c = a.coeff(j) * &sign;
        let name = &ctx.vars()[j].name;
        let mag = c.abs();
        if n == 0 {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        if mag.is_one() {
            out.push_str(name);
        } else {
            out.push_str(&format!("{mag}*{name}"));
        }
    }
    let cmp = if flip { cmp.flip() } else { cmp };
    let rhs = a.rhs() * &sign;
    format!("{out} {} {rhs}", cmp.symbol())
}

impl fmt::Display for Polyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ctx = self.context();
        if self.is_empty() {
            return f.write_str("false");
        }
        let mut parts: Vec<String> = self.atoms().iter().map(|a| atom_to_string(ctx, a)).collect();
        for (j, v) in ctx.vars().iter().enumerate() {
            if !self.atoms().iter().any(|a| a.mentions(j)) {
                parts.push(format!("{} >= 0", v.name));
            }
        }
        if parts.is_empty() {
            return f.write_str("true");
        }
        f.write_str(&parts.join(" && "))
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("false");
        }
        let parts: Vec<String> = self.disjuncts().iter().map(|d| d.to_string()).collect();
        f.write_str(&parts.join(" || "))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rat),
    Ident(String),
    Plus,
    Minus,
    Star,
    Cmp(Cmp),
    And,
    Or,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |i: usize, m: &str| Error::usage(format!("{m} at offset {i} in `{text}`"));
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && ((bytes[i] as char).is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // a/b literal
            let mut j = i;
            while j < bytes.len() && bytes[j] == b' ' {
                j += 1;
            }
            if j < bytes.len() && bytes[j] == b'/' {
                j += 1;
                while j < bytes.len() && bytes[j] == b' ' {
                    j += 1;
                }
                let d0 = j;
                while j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                    j += 1;
                }
                if j == d0 {
                    return Err(err(i, "expected denominator"));
                }
                i = j;
            }
            let lit: String = text[start..i].chars().filter(|c| !c.is_whitespace()).collect();
            out.push((start, Tok::Num(parse_rat(&lit)?)));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
            continue;
        }
        let two = text.get(i..i + 2).unwrap_or("");
        let (tok, len) = match two {
            "<=" => (Tok::Cmp(Cmp::Le), 2),
            ">=" => (Tok::Cmp(Cmp::Ge), 2),
            "==" => (Tok::Cmp(Cmp::Eq), 2),
            "&&" => (Tok::And, 2),
            "||" => (Tok::Or, 2),
            _ => match c {
                '<' => (Tok::Cmp(Cmp::Lt), 1),
                '>' => (Tok::Cmp(Cmp::Gt), 1),
                '=' => (Tok::Cmp(Cmp::Eq), 1),
                '+' => (Tok::Plus, 1),
                '-' => (Tok::Minus, 1),
                '*' => (Tok::Star, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                _ => return Err(err(i, &format!("unexpected character `{c}`"))),
            },
        };
        out.push((start, tok));
        i += len;
    }
    Ok(out)
}

/// Linear expression `sum(coeff * var) + constant` with named variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinExpr {
    pub terms: Vec<(String, Rat)>,
    pub constant: Rat,
}

impl LinExpr {
    fn add_term(&mut self, name: &str, c: Rat) {
        match self.terms.iter_mut().find(|(n, _)| n == name) {
            Some((_, v)) => *v += c,
            None => self.terms.push((name.to_string(), c)),
        }
    }

    /// `self - other ⋈ 0` as an atom over `ctx`.
    pub fn compare(&self, cmp: Cmp, other: &LinExpr, ctx: &Context) -> Result<Atom> {
        let mut coeffs = vec![Rat::zero(); ctx.len()];
        for (name, c) in &self.terms {
            let j = ctx
                .lookup(name)
                .ok_or_else(|| Error::usage(format!("unknown variable `{name}`")))?;
            coeffs[j.0] += c;
        }
        for (name, c) in &other.terms {
            let j = ctx
                .lookup(name)
                .ok_or_else(|| Error::usage(format!("unknown variable `{name}`")))?;
            coeffs[j.0] -= c;
        }
        let rhs = &other.constant - &self.constant;
        Ok(Atom::new(&coeffs, cmp, &rhs))
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    text: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn err(&self, m: &str) -> Error {
        let at = self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.text.len());
        Error::usage(format!("{m} at offset {at} in `{}`", self.text))
    }

    fn expr(&mut self) -> Result<LinExpr> {
        let mut e = LinExpr::default();
        let mut first = true;
        loop {
            let mut sign = Rat::one();
            match self.peek() {
                Some(Tok::Plus) if !first => self.pos += 1,
                Some(Tok::Minus) => {
                    self.pos += 1;
                    sign = -sign;
                }
                _ if first => {}
                _ => break,
            }
            first = false;
            match self.peek().cloned() {
                Some(Tok::Num(v)) => {
                    self.pos += 1;
                    let v = sign * v;
                    if self.peek() == Some(&Tok::Star) {
                        self.pos += 1;
                    }
                    match self.peek().cloned() {
                        Some(Tok::Ident(n)) => {
                            self.pos += 1;
                            e.add_term(&n, v);
                        }
                        _ => e.constant += v,
                    }
                }
                Some(Tok::Ident(n)) => {
                    self.pos += 1;
                    e.add_term(&n, sign);
                }
                _ => return Err(self.err("expected a term")),
            }
        }
        Ok(e)
    }

    /// `e1 ⋈ e2 [⋈ e3 ...]`
    fn chain(&mut self, ctx: &Context, out: &mut Vec<Atom>) -> Result<()> {
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            self.conj(ctx, out)?;
            if self.peek() != Some(&Tok::RParen) {
                return Err(self.err("expected `)`"));
            }
            self.pos += 1;
            return Ok(());
        }
        if let Some(Tok::Ident(w)) = self.peek() {
            if w == "true" {
                self.pos += 1;
                return Ok(());
            }
            if w == "false" {
                self.pos += 1;
                out.push(Atom::falsum(ctx.len()));
                return Ok(());
            }
        }
        let mut left = self.expr()?;
        let mut any = false;
        while let Some(Tok::Cmp(c)) = self.peek().cloned() {
            self.pos += 1;
            let right = self.expr()?;
            out.push(left.compare(c, &right, ctx)?);
            left = right;
            any = true;
        }
        if !any {
            return Err(self.err("expected a comparison"));
        }
        Ok(())
    }

    fn conj(&mut self, ctx: &Context, out: &mut Vec<Atom>) -> Result<()> {
        self.chain(ctx, out)?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            self.chain(ctx, out)?;
        }
        Ok(())
    }
}

/// Parses a conjunction of linear comparisons over `ctx`.
pub fn parse_polyhedron(ctx: &Arc<Context>, text: &str) -> Result<Polyhedron> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        text,
    };
    let mut atoms = Vec::new();
    if !p.toks.is_empty() {
        p.conj(ctx, &mut atoms)?;
    }
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Polyhedron::from_atoms(ctx.clone(), atoms)
}

/// Parses `conj || conj || ...`; `false` is the empty set.
pub fn parse_constraint(ctx: &Arc<Context>, text: &str) -> Result<ConstraintSet> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        text,
    };
    let mut disjuncts = Vec::new();
    loop {
        let mut atoms = Vec::new();
        p.conj(ctx, &mut atoms)?;
        disjuncts.push(Polyhedron::from_atoms(ctx.clone(), atoms)?);
        match p.peek() {
            Some(Tok::Or) => p.pos += 1,
            None => break,
            _ => return Err(p.err("expected `||` or end of input")),
        }
    }
    ConstraintSet::from_disjuncts(ctx.clone(), disjuncts)
}

/// Parses a linear expression such as `2*p + 1/2` (used for guards).
pub fn parse_expr(text: &str) -> Result<LinExpr> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        text,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}
