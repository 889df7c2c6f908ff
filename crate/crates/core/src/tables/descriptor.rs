//! Textual Lie-algebra descriptors and their canonical form.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! pair    := "(" algebra "," algebra ")"
//! algebra := "0" | term ("+" term)*
//! term    := "R" | "diag" term | "s(" algebra ")" | name ["^C"] ["(" arg ("," arg)* ")"]
//! arg     := "R" | "C" | "H" | linear expression in lower-case parameters, e.g. "2n+2"
//! ```
//!
//! Names carry their real form in the arguments: `o(p,q)`, `su(p,q)`, `sp(p,q)`,
//! `sl(n,R)`, `o(m,C)`, `su*(2n)`, `f4(-20)`, `e6^C`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// `Σ coeff·param + constant`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinExpr {
    pub constant: i64,
    pub coeffs: BTreeMap<String, i64>,
}

impl LinExpr {
    fn int(c: i64) -> Self {
        LinExpr { constant: c, coeffs: BTreeMap::new() }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Descriptor(format!("bad expression {s:?}"));
        let chars: Vec<char> = s.trim().chars().collect();
        for (i, c) in chars.iter().enumerate() {
            if c.is_whitespace() {
                let prev = chars[..i].iter().rev().find(|c| !c.is_whitespace());
                let next = chars[i..].iter().find(|c| !c.is_whitespace());
                if prev.zip(next).is_some_and(|(a, b)| a.is_alphanumeric() && b.is_alphanumeric()) {
                    return Err(bad());
                }
            }
        }
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(bad());
        }
        let mut out = LinExpr::int(0);
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = 1;
            if bytes[i] == b'+' || bytes[i] == b'-' {
                if bytes[i] == b'-' {
                    sign = -1;
                }
                i += 1;
            } else if i > 0 {
                return Err(bad());
            }
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let num: Option<i64> = if i > start { Some(s[start..i].parse().map_err(|_| bad())?) } else { None };
            let vstart = i;
            while i < bytes.len() && bytes[i].is_ascii_lowercase() {
                i += 1;
            }
            match (num, i > vstart) {
                (None, false) => return Err(bad()),
                (n, true) => *out.coeffs.entry(s[vstart..i].to_string()).or_insert(0) += sign * n.unwrap_or(1),
                (Some(n), false) => out.constant += sign * n,
            }
        }
        out.coeffs.retain(|_, c| *c != 0);
        Ok(out)
    }

    pub fn eval(&self, env: &BTreeMap<String, i64>) -> Result<i64> {
        let mut v = self.constant;
        for (p, c) in &self.coeffs {
            let x = env.get(p).ok_or_else(|| Error::Descriptor(format!("free parameter {p}")))?;
            v += c * x;
        }
        Ok(v)
    }

    pub fn params(&self) -> impl Iterator<Item = &String> {
        self.coeffs.keys()
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (p, &c) in &self.coeffs {
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            if mag == 1 {
                write!(f, "{sign}{p}")?;
            } else {
                write!(f, "{sign}{mag}{p}")?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant != 0 {
            write!(f, "{}{}", if self.constant < 0 { "-" } else { "+" }, self.constant.abs())
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Arg {
    Field(char),
    Expr(LinExpr),
}

impl Arg {
    fn as_int(&self) -> Option<i64> {
        match self {
            Arg::Expr(e) if e.coeffs.is_empty() => Some(e.constant),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    /// The one-dimensional abelian algebra.
    Real,
    Named { name: String, args: Vec<Arg> },
    /// `s(...)`: trace-zero part of a sum of unitary algebras.
    S(Algebra),
    Diag(Box<Term>),
}

/// A direct sum; the empty sum is the zero algebra.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Algebra(pub Vec<Term>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pair {
    pub g: Algebra,
    pub h: Algebra,
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { s: src.as_bytes(), i: 0, src }
    }

    fn err(&self, what: &str) -> Error {
        Error::Descriptor(format!("{what} at offset {} in {:?}", self.i, self.src))
    }

    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected {:?}", c as char)))
        }
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'*') {
            self.i += 1;
        }
        self.src[start..self.i].to_string()
    }

    fn algebra(&mut self) -> Result<Algebra> {
        if self.peek() == Some(b'0') {
            let save = self.i;
            self.i += 1;
            if matches!(self.peek(), None | Some(b',') | Some(b')')) {
                return Ok(Algebra::default());
            }
            self.i = save;
        }
        let mut terms = vec![self.term()?];
        while self.eat(b'+') {
            terms.push(self.term()?);
        }
        Ok(Algebra(terms))
    }

    fn term(&mut self) -> Result<Term> {
        let name = self.ident();
        match name.as_str() {
            "" => Err(self.err("expected a term")),
            "R" => Ok(Term::Real),
            "diag" => Ok(Term::Diag(Box::new(if self.eat(b'(') {
                let t = self.term()?;
                self.expect(b')')?;
                t
            } else {
                self.term()?
            }))),
            "s" => {
                self.expect(b'(')?;
                let inner = self.algebra()?;
                self.expect(b')')?;
                Ok(Term::S(inner))
            }
            _ => {
                if !name.as_bytes()[0].is_ascii_lowercase() {
                    return Err(self.err(&format!("unknown algebra {name:?}")));
                }
                let mut args = Vec::new();
                if self.eat(b'^') {
                    if self.ident() != "C" {
                        return Err(self.err("expected ^C"));
                    }
                    args.push(Arg::Field('C'));
                } else if self.eat(b'(') {
                    loop {
                        args.push(self.arg()?);
                        if self.eat(b')') {
                            break;
                        }
                        self.expect(b',')?;
                    }
                }
                Ok(Term::Named { name, args })
            }
        }
    }

    fn arg(&mut self) -> Result<Arg> {
        self.skip_ws();
        let start = self.i;
        while self.i < self.s.len() && !matches!(self.s[self.i], b',' | b')' | b'(') {
            self.i += 1;
        }
        let text = self.src[start..self.i].trim();
        match text {
            "R" | "C" | "H" => Ok(Arg::Field(text.chars().next().unwrap())),
            _ => LinExpr::parse(text).map(Arg::Expr),
        }
    }

    fn finish(&mut self) -> Result<()> {
        if self.peek().is_some() {
            Err(self.err("trailing input"))
        } else {
            Ok(())
        }
    }
}

impl Algebra {
    pub fn parse(s: &str) -> Result<Self> {
        let mut p = Parser::new(s);
        let a = p.algebra()?;
        p.finish()?;
        Ok(a)
    }

    /// Substitutes parameter values into every argument.
    pub fn instantiate(&self, env: &BTreeMap<String, i64>) -> Result<Algebra> {
        self.0.iter().map(|t| t.instantiate(env)).collect::<Result<_>>().map(Algebra)
    }

    pub fn params(&self, out: &mut Vec<String>) {
        for t in &self.0 {
            t.params(out);
        }
    }

    /// Largest absolute integer appearing in an argument.
    pub fn max_int(&self) -> i64 {
        self.0.iter().map(Term::max_int).max().unwrap_or(0)
    }

    pub fn normalize(&self) -> Algebra {
        self.normalize_with(true)
    }

    fn normalize_with(&self, top: bool) -> Algebra {
        let mut terms: Vec<Term> = self.0.iter().filter_map(|t| t.normalize(top)).collect();
        terms.sort_by_key(|t| t.to_string());
        Algebra(terms)
    }
}

impl Term {
    fn instantiate(&self, env: &BTreeMap<String, i64>) -> Result<Term> {
        Ok(match self {
            Term::Real => Term::Real,
            Term::S(a) => Term::S(a.instantiate(env)?),
            Term::Diag(t) => Term::Diag(Box::new(t.instantiate(env)?)),
            Term::Named { name, args } => Term::Named {
                name: name.clone(),
                args: args
                    .iter()
                    .map(|a| match a {
                        Arg::Expr(e) => e.eval(env).map(|v| Arg::Expr(LinExpr::int(v))),
                        f => Ok(f.clone()),
                    })
                    .collect::<Result<_>>()?,
            },
        })
    }

    fn params(&self, out: &mut Vec<String>) {
        match self {
            Term::Real => {}
            Term::S(a) => a.params(out),
            Term::Diag(t) => t.params(out),
            Term::Named { args, .. } => {
                for a in args {
                    if let Arg::Expr(e) = a {
                        for p in e.params() {
                            if !out.contains(p) {
                                out.push(p.clone());
                            }
                        }
                    }
                }
            }
        }
    }

    fn max_int(&self) -> i64 {
        match self {
            Term::Real => 0,
            Term::S(a) => a.max_int(),
            Term::Diag(t) => t.max_int(),
            Term::Named { args, .. } => args.iter().filter_map(Arg::as_int).map(i64::abs).max().unwrap_or(0),
        }
    }

    /// Dimension for the classical families, when the arguments are concrete.
    fn dimension(&self) -> Option<i64> {
        let Term::Named { name, args } = self else { return None };
        let ints: Vec<i64> = args.iter().filter_map(Arg::as_int).collect();
        let n: i64 = ints.iter().sum();
        if ints.is_empty() || ints.iter().any(|&k| k < 0) {
            return None;
        }
        Some(match name.as_str() {
            "o" => n * (n - 1) / 2,
            "u" | "gl" => n * n,
            "su" | "sl" => (n * n - 1).max(0),
            "sp" => n * (2 * n + 1),
            "o*" => (n / 2) * (n - 1),
            "su*" => (n * n - 1).max(0),
            _ => return None,
        })
    }

    fn normalize(&self, top: bool) -> Option<Term> {
        let t = match self {
            Term::Real => Term::Real,
            Term::Diag(inner) => Term::Diag(Box::new(inner.normalize(true)?)),
            Term::S(a) => {
                let inner = a.normalize_with(false);
                match inner.0.as_slice() {
                    [] => return None,
                    [Term::Named { name, args }] if name == "u" => {
                        return Term::Named { name: "su".into(), args: args.clone() }.normalize(top);
                    }
                    _ => Term::S(inner),
                }
            }
            Term::Named { name, args } => {
                let name = match name.as_str() {
                    "so" => "o".to_string(),
                    "so*" => "o*".to_string(),
                    _ => name.clone(),
                };
                let mut args = args.clone();
                let signature = matches!(name.as_str(), "o" | "u" | "su" | "sp");
                if signature && args.len() == 2 && args.iter().all(|a| a.as_int().is_some()) {
                    args.sort_by_key(|a| std::cmp::Reverse(a.as_int()));
                    if args[1].as_int() == Some(0) {
                        args.pop();
                    }
                }
                Term::Named { name, args }
            }
        };
        if t.dimension() == Some(0) {
            return None;
        }
        if top && t.is_one_dim_abelian() {
            return Some(Term::Real);
        }
        Some(t)
    }

    fn is_one_dim_abelian(&self) -> bool {
        let Term::Named { name, args } = self else { return false };
        let ints: Vec<i64> = args.iter().filter_map(Arg::as_int).collect();
        let real = args.iter().all(|a| !matches!(a, Arg::Field('C') | Arg::Field('H')));
        real && match (name.as_str(), ints.as_slice()) {
            ("u", [1]) | ("o", [2]) | ("o", [1, 1]) | ("o*", [2]) => true,
            ("gl", [1]) => args.contains(&Arg::Field('R')),
            _ => false,
        }
    }
}

impl Pair {
    pub fn parse(s: &str) -> Result<Self> {
        let mut p = Parser::new(s);
        let wrapped = p.eat(b'(');
        let g = p.algebra()?;
        p.expect(b',')?;
        let h = p.algebra()?;
        if wrapped {
            p.expect(b')')?;
        }
        p.finish()?;
        Ok(Pair { g, h })
    }

    pub fn normalize(&self) -> Pair {
        Pair { g: self.g.normalize(), h: self.h.normalize() }
    }

    pub fn instantiate(&self, env: &BTreeMap<String, i64>) -> Result<Pair> {
        Ok(Pair { g: self.g.instantiate(env)?, h: self.h.instantiate(env)? })
    }

    pub fn params(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.g.params(&mut out);
        self.h.params(&mut out);
        out
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Field(c) => write!(f, "{c}"),
            Arg::Expr(e) => write!(f, "{e}"),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Real => write!(f, "R"),
            Term::Diag(t) => write!(f, "diag {t}"),
            Term::S(a) => write!(f, "s({a})"),
            Term::Named { name, args } if args.is_empty() => write!(f, "{name}"),
            Term::Named { name, args } => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.g, self.h)
    }
}

/// Parses and normalizes a concrete pair descriptor.
pub fn normalize_descriptor(s: &str) -> Result<String> {
    Ok(Pair::parse(s)?.normalize().to_string())
}
