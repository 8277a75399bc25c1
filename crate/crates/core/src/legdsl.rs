//! Leg notation as text.
//!
//! ```text
//! stmt := expr ("==" expr)?
//! expr := term ("." term)*
//! term := atom "^*"?
//! atom := NAME "[" INT ("," INT)* "]" ("@over" | "@under")? | "(" expr ")"
//! ```
//!
//! `.` is the operator product, so `A.B` applies B first. Leg positions are
//! 1-based. `c[i,i+1]` is the braiding of the two legs currently there and
//! `cinv[i,i+1]` the inverse braiding that ends on them. A two-leg atom on
//! legs i < k that are not adjacent braids leg i past the legs in between,
//! over them unless `@under` is given.
//!
//! Statement files hold one statement per line. `#` starts a comment,
//! `@context A B C` sets the legs for the statements that follow and
//! `@bind NAME = OPERATOR` renames a bundle operator.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::braidings::Braiding;
use crate::error::{Error, Result};
use crate::examples_io::Bundle;
use crate::linalg::hs_norm;
use crate::tensor_core::{adjoint, apply_distant, compose, embed_adjacent, LegOperator, Route, Space};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomKind {
    Op(String),
    Braid,
    BraidInv,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub kind: AtomKind,
    pub legs: Vec<usize>,
    pub route: Option<Route>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Atom(Atom),
    /// Operator product, leftmost factor applied last.
    Compose(Vec<Expr>),
    Adjoint(Box<Expr>),
    Paren(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Statement {
    pub lhs: Expr,
    pub rhs: Option<Expr>,
}

// ---------------------------------------------------------------------------
// lexer

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Int(usize),
    LBrack,
    RBrack,
    Comma,
    Dot,
    LParen,
    RParen,
    Star,
    EqEq,
    Route(Route),
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Name(n) => format!("name '{n}'"),
        Tok::Int(i) => format!("integer {i}"),
        Tok::LBrack => "'['".into(),
        Tok::RBrack => "']'".into(),
        Tok::Comma => "','".into(),
        Tok::Dot => "'.'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Star => "'^*'".into(),
        Tok::EqEq => "'=='".into(),
        Tok::Route(r) => format!("'@{}'", route_name(*r)),
        Tok::End => "end of input".into(),
    }
}

fn route_name(r: Route) -> &'static str {
    match r {
        Route::Over => "over",
        Route::Under => "under",
    }
}

/// Tokens with 1-based columns. The end token sits on the last character.
fn lex(text: &str, line: usize) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let err = |col: usize, msg: String| Error::Parse { line, col, msg };
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let col = i + 1;
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match ch {
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, col));
            i += 1;
        } else if ch == '^' {
            if chars.get(i + 1) != Some(&'*') {
                return Err(err(col, "expected '*' after '^'".into()));
            }
            out.push((Tok::Star, col));
            i += 2;
        } else if ch == '=' {
            if chars.get(i + 1) != Some(&'=') {
                return Err(err(col, "expected '=='".into()));
            }
            out.push((Tok::EqEq, col));
            i += 2;
        } else if ch == '@' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && chars[j].is_ascii_alphabetic() {
                j += 1;
            }
            let word: String = chars[start..j].iter().collect();
            let r = match word.as_str() {
                "over" => Route::Over,
                "under" => Route::Under,
                _ => return Err(err(col, format!("unknown route '@{word}'"))),
            };
            out.push((Tok::Route(r), col));
            i = j;
        } else if ch.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            let v = s.parse().map_err(|_| err(col, format!("integer {s} too large")))?;
            out.push((Tok::Int(v), col));
            i = j;
        } else if ch.is_alphabetic() || ch == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            out.push((Tok::Name(chars[i..j].iter().collect()), col));
            i = j;
        } else {
            return Err(err(col, format!("unexpected character '{ch}'")));
        }
    }
    out.push((Tok::End, chars.len().max(1)));
    Ok(out)
}

// ---------------------------------------------------------------------------
// parser

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T> {
        Err(Error::Parse {
            line: self.line,
            col: self.col(),
            msg: format!("expected {expected}, found {}", describe(self.peek())),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.fail(what)
        }
    }

    fn statement(&mut self) -> Result<Statement> {
        let lhs = self.expr()?;
        let rhs = if *self.peek() == Tok::EqEq {
            self.bump();
            Some(self.expr()?)
        } else {
            None
        };
        if *self.peek() != Tok::End {
            return self.fail("'.', '==' or end of input");
        }
        Ok(Statement { lhs, rhs })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        while *self.peek() == Tok::Dot {
            self.bump();
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Compose(terms) })
    }

    fn term(&mut self) -> Result<Expr> {
        let a = self.atom()?;
        if *self.peek() == Tok::Star {
            self.bump();
            return Ok(Expr::Adjoint(Box::new(a)));
        }
        Ok(a)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Expr::Paren(Box::new(e)))
            }
            Tok::Name(name) => {
                self.bump();
                self.expect(Tok::LBrack, "'['")?;
                let mut legs = Vec::new();
                loop {
                    let col = self.col();
                    match self.peek().clone() {
                        Tok::Int(0) => {
                            return Err(Error::Parse { line: self.line, col, msg: "leg positions start at 1".into() })
                        }
                        Tok::Int(v) => {
                            self.bump();
                            legs.push(v);
                        }
                        _ => return self.fail("leg position"),
                    }
                    match self.peek() {
                        Tok::Comma => {
                            self.bump();
                        }
                        Tok::RBrack => {
                            self.bump();
                            break;
                        }
                        _ => return self.fail("',' or ']'"),
                    }
                }
                let route = if let Tok::Route(r) = self.peek() {
                    let r = *r;
                    self.bump();
                    Some(r)
                } else {
                    None
                };
                let kind = match name.as_str() {
                    "c" => AtomKind::Braid,
                    "cinv" => AtomKind::BraidInv,
                    _ => AtomKind::Op(name),
                };
                Ok(Expr::Atom(Atom { kind, legs, route }))
            }
            _ => self.fail("operator name or '('"),
        }
    }
}

pub fn parse_statement_at(text: &str, line: usize) -> Result<Statement> {
    let toks = lex(text, line)?;
    Parser { toks, pos: 0, line }.statement()
}

pub fn parse_statement(text: &str) -> Result<Statement> {
    parse_statement_at(text, 1)
}

/// Parse a single expression (no "==").
pub fn parse(text: &str) -> Result<Expr> {
    let s = parse_statement(text)?;
    if s.rhs.is_some() {
        let col = text.find("==").map(|i| text[..i].chars().count() + 1).unwrap_or(1);
        return Err(Error::Parse { line: 1, col, msg: "expected an expression, found '=='".into() });
    }
    Ok(s.lhs)
}

// ---------------------------------------------------------------------------
// printer

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match &self.kind {
            AtomKind::Op(n) => n.as_str(),
            AtomKind::Braid => "c",
            AtomKind::BraidInv => "cinv",
        };
        let legs: Vec<String> = self.legs.iter().map(|l| l.to_string()).collect();
        write!(f, "{name}[{}]", legs.join(","))?;
        if let Some(r) = self.route {
            write!(f, "@{}", route_name(r))?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Atom(a) => write!(f, "{a}"),
            Expr::Compose(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ".")?;
                    }
                    write!(f, "{t}")?;
                }
                Ok(())
            }
            Expr::Adjoint(e) => write!(f, "{e}^*"),
            Expr::Paren(e) => write!(f, "({e})"),
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.lhs)?;
        if let Some(r) = &self.rhs {
            write!(f, " == {r}")?;
        }
        Ok(())
    }
}

/// Same expression with every distant atom's route made explicit and flipped.
pub fn toggle_routes(e: &Expr) -> Expr {
    match e {
        Expr::Atom(a) => {
            let mut a = a.clone();
            a.route = Some(a.route.unwrap_or(Route::Over).flipped());
            Expr::Atom(a)
        }
        Expr::Compose(ts) => Expr::Compose(ts.iter().map(toggle_routes).collect()),
        Expr::Adjoint(x) => Expr::Adjoint(Box::new(toggle_routes(x))),
        Expr::Paren(x) => Expr::Paren(Box::new(toggle_routes(x))),
    }
}

pub fn toggle_statement(s: &Statement) -> Statement {
    Statement { lhs: toggle_routes(&s.lhs), rhs: s.rhs.as_ref().map(toggle_routes) }
}

// ---------------------------------------------------------------------------
// evaluation

/// Named operators and the braiding used for crossings.
pub struct Env<'a> {
    pub ops: BTreeMap<String, LegOperator>,
    pub braiding: &'a Braiding,
}

fn positions(a: &Atom, n: usize) -> Result<Vec<usize>> {
    for &l in &a.legs {
        if l == 0 || l > n {
            return Err(Error::Legs(format!("{a}: leg {l} outside a context of {n} legs")));
        }
    }
    Ok(a.legs.iter().map(|l| l - 1).collect())
}

impl Env<'_> {
    fn op(&self, name: &str) -> Result<&LegOperator> {
        self.ops.get(name).ok_or_else(|| Error::Invalid(format!("no operator bound to '{name}'")))
    }

    fn atom_forward(&self, a: &Atom, dom: &[Space]) -> Result<LegOperator> {
        let pos = positions(a, dom.len())?;
        match &a.kind {
            AtomKind::Braid | AtomKind::BraidInv => {
                if pos.len() != 2 || pos[1] != pos[0] + 1 {
                    return Err(Error::Legs(format!("{a}: braidings act on adjacent legs i, i+1")));
                }
                let (x, y) = (&dom[pos[0]], &dom[pos[1]]);
                let b = match a.kind {
                    AtomKind::Braid => self.braiding.braid(x, y)?,
                    _ => adjoint(&self.braiding.braid(y, x)?),
                };
                embed_adjacent(&b, dom, pos[0])
            }
            AtomKind::Op(name) => {
                let x = self.op(name)?;
                if x.dom.len() != pos.len() {
                    return Err(Error::Signature(format!("{a}: operator has {} legs", x.dom.len())));
                }
                if pos.windows(2).all(|w| w[1] == w[0] + 1) {
                    embed_adjacent(x, dom, pos[0])
                } else if pos.len() == 2 && pos[0] < pos[1] {
                    apply_distant(x, dom, pos[0], pos[1], a.route.unwrap_or(Route::Over), self.braiding)
                } else {
                    Err(Error::Legs(format!("{a}: legs must increase, and only two-leg operators may be distant")))
                }
            }
        }
    }

    /// Domain context of an atom given the context it must end on.
    fn atom_domain(&self, a: &Atom, cod: &[Space]) -> Result<Vec<Space>> {
        let pos = positions(a, cod.len())?;
        let mut dom = cod.to_vec();
        match &a.kind {
            AtomKind::Braid | AtomKind::BraidInv => {
                if pos.len() != 2 || pos[1] != pos[0] + 1 {
                    return Err(Error::Legs(format!("{a}: braidings act on adjacent legs i, i+1")));
                }
                dom.swap(pos[0], pos[1]);
            }
            AtomKind::Op(name) => {
                let x = self.op(name)?;
                if x.cod.len() != pos.len() || x.dom.len() != pos.len() {
                    return Err(Error::Signature(format!("{a}: operator has {} legs", x.cod.len())));
                }
                for (j, &p) in pos.iter().enumerate() {
                    if cod[p] != x.cod[j] {
                        return Err(Error::Legs(format!("{a}: leg {} is {}, operator ends on {}", p + 1, cod[p], x.cod[j])));
                    }
                    dom[p] = x.dom[j].clone();
                }
            }
        }
        Ok(dom)
    }

    /// Evaluate starting from the domain context.
    pub fn eval(&self, e: &Expr, dom: &[Space]) -> Result<LegOperator> {
        match e {
            Expr::Atom(a) => self.atom_forward(a, dom),
            Expr::Paren(x) => self.eval(x, dom),
            Expr::Adjoint(x) => Ok(adjoint(&self.eval_to(x, dom)?)),
            Expr::Compose(ts) => {
                let mut acc = self.eval(ts.last().expect("non-empty"), dom)?;
                for t in ts.iter().rev().skip(1) {
                    let next = self.eval(t, &acc.cod)?;
                    acc = compose(&next, &acc)?;
                }
                Ok(acc)
            }
        }
    }

    /// Evaluate an expression that must end on the context `cod`.
    pub fn eval_to(&self, e: &Expr, cod: &[Space]) -> Result<LegOperator> {
        match e {
            Expr::Atom(a) => {
                let dom = self.atom_domain(a, cod)?;
                let x = self.atom_forward(a, &dom)?;
                if x.cod != cod {
                    return Err(Error::Legs(format!("{a} does not end on the required legs")));
                }
                Ok(x)
            }
            Expr::Paren(x) => self.eval_to(x, cod),
            Expr::Adjoint(x) => Ok(adjoint(&self.eval(x, cod)?)),
            Expr::Compose(ts) => {
                let mut acc = self.eval_to(&ts[0], cod)?;
                for t in ts.iter().skip(1) {
                    let prev = self.eval_to(t, &acc.dom)?;
                    acc = compose(&acc, &prev)?;
                }
                Ok(acc)
            }
        }
    }

    /// ‖lhs − rhs‖ for a statement with "==".
    pub fn residual(&self, s: &Statement, context: &[Space]) -> Result<f64> {
        let rhs = s.rhs.as_ref().ok_or_else(|| Error::Invalid("statement has no '=='".into()))?;
        let l = self.eval(&s.lhs, context)?;
        let r = self.eval(rhs, context)?;
        if l.cod != r.cod {
            return Err(Error::Legs("the two sides end on different legs".into()));
        }
        Ok(hs_norm(&(l.mat - r.mat)))
    }
}

pub fn evaluate(e: &Expr, ops: &BTreeMap<String, LegOperator>, context: &[Space], braiding: &Braiding) -> Result<LegOperator> {
    Env { ops: ops.clone(), braiding }.eval(e, context)
}

// ---------------------------------------------------------------------------
// statement files

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub line: usize,
    pub context: Vec<String>,
    pub statement: Statement,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StatementFile {
    pub bindings: BTreeMap<String, String>,
    pub entries: Vec<Entry>,
}

pub fn parse_statement_file(text: &str) -> Result<StatementFile> {
    let mut out = StatementFile::default();
    let mut context: Option<Vec<String>> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        if body.trim().is_empty() {
            continue;
        }
        let trimmed = body.trim_start();
        let indent = body.chars().count() - trimmed.chars().count();
        let err = |col: usize, msg: &str| Error::Parse { line, col: indent + col, msg: msg.into() };
        if let Some(rest) = trimmed.strip_prefix("@context") {
            let legs: Vec<String> = rest.split_whitespace().map(String::from).collect();
            if legs.is_empty() {
                return Err(err(9, "@context needs at least one leg"));
            }
            context = Some(legs);
        } else if let Some(rest) = trimmed.strip_prefix("@bind") {
            let parts: Vec<&str> = rest.split('=').map(str::trim).collect();
            let ok = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_');
            if parts.len() != 2 || !ok(parts[0]) || !ok(parts[1]) {
                return Err(err(1, "expected '@bind NAME = OPERATOR'"));
            }
            out.bindings.insert(parts[0].into(), parts[1].into());
        } else if trimmed.starts_with('@') {
            return Err(err(1, "unknown directive"));
        } else {
            let statement = parse_statement_at(body, line)?;
            if statement.rhs.is_none() {
                return Err(err(body.trim_end().chars().count() - indent, "statement needs '=='"));
            }
            let context = context.clone().ok_or_else(|| err(1, "statement before any @context line"))?;
            out.entries.push(Entry { line, context, statement });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct StatementResult {
    pub line: usize,
    pub statement: String,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvalReport {
    pub tol: f64,
    pub results: Vec<StatementResult>,
    pub pass: bool,
}

fn operator_names(e: &Expr, out: &mut Vec<String>) {
    match e {
        Expr::Atom(Atom { kind: AtomKind::Op(n), .. }) => out.push(n.clone()),
        Expr::Atom(_) => {}
        Expr::Compose(ts) => ts.iter().for_each(|t| operator_names(t, out)),
        Expr::Adjoint(x) | Expr::Paren(x) => operator_names(x, out),
    }
}

/// Operators referenced by the file, resolved against the bundle.
pub fn bind(file: &StatementFile, bundle: &Bundle) -> Result<BTreeMap<String, LegOperator>> {
    let mut names = Vec::new();
    for e in &file.entries {
        operator_names(&e.statement.lhs, &mut names);
        if let Some(r) = &e.statement.rhs {
            operator_names(r, &mut names);
        }
    }
    let mut ops = BTreeMap::new();
    for n in names {
        if ops.contains_key(&n) {
            continue;
        }
        let target = file.bindings.get(&n).unwrap_or(&n);
        ops.insert(n.clone(), bundle.operator(target)?);
    }
    Ok(ops)
}

/// Residual of every statement of the file on the bundle.
pub fn assert_equal(file: &StatementFile, bundle: &Bundle, tol: f64) -> Result<EvalReport> {
    let braiding = bundle.braiding()?;
    let env = Env { ops: bind(file, bundle)?, braiding: &braiding };
    let mut results = Vec::new();
    for e in &file.entries {
        let ctx = e.context.iter().map(|id| bundle.space(id)).collect::<Result<Vec<_>>>()?;
        let residual = env.residual(&e.statement, &ctx)?;
        results.push(StatementResult { line: e.line, statement: e.statement.to_string(), residual, pass: residual < tol });
    }
    let pass = results.iter().all(|r| r.pass);
    Ok(EvalReport { tol, results, pass })
}

/// Largest difference between evaluating each side with its routes as
/// written and with all routes flipped.
pub fn route_gap(file: &StatementFile, bundle: &Bundle) -> Result<f64> {
    let braiding = bundle.braiding()?;
    let env = Env { ops: bind(file, bundle)?, braiding: &braiding };
    let mut worst: f64 = 0.0;
    for e in &file.entries {
        let ctx = e.context.iter().map(|id| bundle.space(id)).collect::<Result<Vec<_>>>()?;
        let t = toggle_statement(&e.statement);
        for (a, b) in [(&e.statement.lhs, &t.lhs), (e.statement.rhs.as_ref().unwrap(), t.rhs.as_ref().unwrap())] {
            let x = env.eval(a, &ctx)?;
            let y = env.eval(b, &ctx)?;
            worst = worst.max(hs_norm(&(x.mat - y.mat)));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples_io::{cyclic_group, kac_takesaki, kac_takesaki_bundle};
    use crate::linalg::eye;

    const PENTAGON: &str = "F[2,3].F[1,2] == F[1,2].c[1,2].F[2,3].cinv[1,2].F[2,3]";

    #[test]
    fn parses_composition() {
        let e = parse("F[2,3].F[1,2]").unwrap();
        match &e {
            Expr::Compose(ts) => assert_eq!(ts.len(), 2),
            _ => panic!("{e:?}"),
        }
        let s = parse_statement(PENTAGON).unwrap();
        assert_eq!(s.to_string(), PENTAGON);
        match s.rhs.unwrap() {
            Expr::Compose(ts) => {
                assert_eq!(ts.len(), 5);
                assert_eq!(ts[1], Expr::Atom(Atom { kind: AtomKind::Braid, legs: vec![1, 2], route: None }));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_error_positions() {
        match parse("F[1,2") {
            Err(Error::Parse { line: 1, col: 5, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse("F[1,2].") {
            Err(Error::Parse { col: 7, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse("F[1,,2]") {
            Err(Error::Parse { col: 5, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse("F[1,2]@sideways") {
            Err(Error::Parse { col: 7, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("F[0,1]"), Err(Error::Parse { col: 3, .. })));
    }

    #[test]
    fn round_trip_with_routes_and_adjoints() {
        for text in ["(U[1,3]@under.F[2,3])^*.V[1,2]", "F[1,2]^*.F[1,2]", "((A[1]))", "X[1,3]@over"] {
            let e = parse(text).unwrap();
            assert_eq!(e.to_string(), text);
            assert_eq!(parse(&e.to_string()).unwrap(), e);
        }
        assert_eq!(parse(" F [ 1 , 2 ] . G[2,3] ").unwrap().to_string(), "F[1,2].G[2,3]");
    }

    #[test]
    fn pentagon_matches_builtin() {
        for n in [2, 3] {
            let w = kac_takesaki(&cyclic_group(n));
            let mut ops = BTreeMap::new();
            ops.insert("F".to_string(), w.f.clone());
            let env = Env { ops, braiding: &w.braiding };
            let ctx = vec![w.l.clone(); 3];
            let s = parse_statement(PENTAGON).unwrap();
            assert!((env.residual(&s, &ctx).unwrap() - w.pentagon_residual().unwrap()).abs() < 1e-12);
            let u = env.eval(&parse("F[1,2]^*.F[1,2]").unwrap(), &ctx[..2]).unwrap();
            assert!(hs_norm(&(u.mat - eye(n * n))) < 1e-13);
            let adj = env.eval(&parse("(F[1,2].c[1,2])^*").unwrap(), &ctx[..2]).unwrap();
            let direct = (&w.f.mat * w.c().unwrap()).adjoint();
            assert!(hs_norm(&(adj.mat - direct)) < 1e-13);
        }
    }

    #[test]
    fn statement_files() {
        let text = "# pentagon\n@context L L L\n@bind F = W\n\n".to_string() + PENTAGON + "  # inline\nF[1,2] == F[2,3]\n";
        let file = parse_statement_file(&text).unwrap();
        assert_eq!(file.entries.len(), 2);
        assert_eq!(file.entries[0].line, 5);
        let bundle = kac_takesaki_bundle(&cyclic_group(2));
        let rep = assert_equal(&file, &bundle, 1e-9).unwrap();
        assert!(rep.results[0].pass);
        assert!(!rep.results[1].pass && rep.results[1].residual > 0.1);
        assert!(route_gap(&file, &bundle).unwrap() < 1e-12);
        match parse_statement_file("@context L L\nF[1,2] == F[1,2\n") {
            Err(Error::Parse { line: 2, col: 15, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_statement_file("F[1,2] == F[1,2]\n"), Err(Error::Parse { line: 1, .. })));
    }
}
