use std::str::FromStr;

use gq_core::blocksets::BlockSet;
use gq_core::rational::Q;
use num_bigint::BigInt;
use num_traits::Num as _;
use thiserror::Error;

use crate::ast::{BinOp, Expr, Stmt};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("ParseError at {pos}: {message}")]
pub struct ParseError {
    /// Byte offset into the source line.
    pub pos: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Q),
    Approx(f64),
    Ident(String),
    Set(BlockSet),
    /// Unit letter glued to the preceding literal or `)`.
    Suffix(usize),
    Sym(&'static str),
    Semi,
}

const SYMBOLS: [&str; 14] = ["==", "+", "-", "*", "/", "^", "(", ")", "{", "}", "|", ":", ",", "="];

fn err<T>(pos: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { pos, message: message.into() })
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

fn unit_index(c: u8) -> Option<usize> {
    match c {
        b'i' => Some(1),
        b'j' => Some(2),
        b'k' => Some(3),
        _ => None,
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    out: Vec<(usize, Tok)>,
}

impl<'a> Lexer<'a> {
    fn run(text: &'a str) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut lx = Lexer { src: text.as_bytes(), pos: 0, out: Vec::new() };
        while lx.pos < lx.src.len() {
            lx.step()?;
        }
        Ok(lx.out)
    }

    fn peek_at(&self, i: usize) -> Option<u8> {
        self.src.get(i).copied()
    }

    fn text(&self, a: usize, b: usize) -> &'a str {
        std::str::from_utf8(&self.src[a..b]).expect("ascii slice")
    }

    /// Emits a unit suffix when `i`, `j` or `k` directly follows as a whole word.
    fn glued_suffix(&mut self) {
        if let Some(u) = self.peek_at(self.pos).and_then(unit_index) {
            if !self.peek_at(self.pos + 1).is_some_and(|c| is_ident_char(c) || c == b'?') {
                self.out.push((self.pos, Tok::Suffix(u)));
                self.pos += 1;
            }
        }
    }

    fn digits(&mut self) {
        while self.peek_at(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
    }

    fn step(&mut self) -> Result<(), ParseError> {
        let start = self.pos;
        let c = self.src[start];
        if c.is_ascii_whitespace() {
            self.pos += 1;
            return Ok(());
        }
        if c == b';' {
            self.out.push((start, Tok::Semi));
            self.pos += 1;
            return Ok(());
        }
        if self.src[start..].starts_with(b"pre=") {
            self.pos += 4;
            while matches!(self.peek_at(self.pos), Some(b'0' | b'1')) {
                self.pos += 1;
            }
            if !self.src[self.pos..].starts_with(b";per=") {
                return err(self.pos, "expected `;per=` in block set");
            }
            self.pos += 5;
            while matches!(self.peek_at(self.pos), Some(b'0' | b'1')) {
                self.pos += 1;
            }
            let set = BlockSet::from_str(self.text(start, self.pos))
                .map_err(|e| ParseError { pos: start, message: e.to_string() })?;
            self.out.push((start, Tok::Set(set)));
            return Ok(());
        }
        if c.is_ascii_digit() {
            self.digits();
            if self.peek_at(self.pos) == Some(b'.') && self.peek_at(self.pos + 1).is_some_and(|d| d.is_ascii_digit()) {
                self.pos += 1;
                self.digits();
            }
            let q = parse_decimal(self.text(start, self.pos)).ok_or(ParseError {
                pos: start,
                message: "malformed number".into(),
            })?;
            self.out.push((start, Tok::Num(q)));
            self.glued_suffix();
            return Ok(());
        }
        if c == b'~' {
            self.pos += 1;
            let num_start = self.pos;
            if self.peek_at(self.pos) == Some(b'-') {
                self.pos += 1;
            }
            self.digits();
            if self.peek_at(self.pos) == Some(b'.') {
                self.pos += 1;
                self.digits();
            }
            if matches!(self.peek_at(self.pos), Some(b'e' | b'E')) {
                let mut p = self.pos + 1;
                if matches!(self.peek_at(p), Some(b'+' | b'-')) {
                    p += 1;
                }
                if self.peek_at(p).is_some_and(|d| d.is_ascii_digit()) {
                    self.pos = p;
                    self.digits();
                }
            }
            let x: f64 = self
                .text(num_start, self.pos)
                .parse()
                .map_err(|_| ParseError { pos: start, message: "malformed floating constant after `~`".into() })?;
            self.out.push((start, Tok::Approx(x)));
            self.glued_suffix();
            return Ok(());
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self.peek_at(self.pos).is_some_and(is_ident_char) {
                self.pos += 1;
            }
            if self.peek_at(self.pos) == Some(b'?') {
                self.pos += 1;
            }
            self.out.push((start, Tok::Ident(self.text(start, self.pos).to_string())));
            return Ok(());
        }
        for s in SYMBOLS {
            if self.src[start..].starts_with(s.as_bytes()) {
                self.pos += s.len();
                self.out.push((start, Tok::Sym(s)));
                if s == ")" || s == "}" {
                    self.glued_suffix();
                }
                return Ok(());
            }
        }
        err(start, format!("unexpected character `{}`", c as char))
    }
}

fn parse_decimal(s: &str) -> Option<Q> {
    match s.split_once('.') {
        None => BigInt::from_str_radix(s, 10).ok().map(Q::from_integer),
        Some((int, frac)) => {
            let n = BigInt::from_str_radix(&format!("{int}{frac}"), 10).ok()?;
            Some(Q::new(n, BigInt::from(10).pow(frac.len() as u32)))
        }
    }
}

const RESERVED: [&str; 7] = ["let", "e", "i", "j", "k", "O", "pre"];

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == sym) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<(), ParseError> {
        if self.eat(sym) {
            Ok(())
        } else {
            err(self.pos(), format!("expected `{sym}`"))
        }
    }

    fn statement(&mut self) -> Result<Stmt, ParseError> {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == "let") {
            self.at += 1;
            let pos = self.pos();
            let name = match self.next() {
                Some(Tok::Ident(n)) if !RESERVED.contains(&n.as_str()) => n,
                _ => return err(pos, "expected a variable name after `let`"),
            };
            self.expect("=")?;
            return Ok(Stmt::Let(name, self.expr()?));
        }
        let lhs = self.expr()?;
        if self.eat("==") {
            return Ok(Stmt::Eq(lhs, self.expr()?));
        }
        Ok(Stmt::Expr(lhs))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = if self.eat("+") {
                BinOp::Add
            } else if self.eat("-") {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.product()?));
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat("*") {
                BinOp::Mul
            } else if self.eat("/") {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.atom()?;
        while self.eat("^") {
            let pos = self.pos();
            let n = match self.next() {
                Some(Tok::Num(q)) if q.is_integer() => q.to_integer().try_into().ok(),
                _ => None,
            };
            match n {
                Some(n) => base = Expr::Pow(Box::new(base), n),
                None => return err(pos, "expected a nonnegative integer exponent"),
            }
        }
        Ok(base)
    }

    fn suffixed(&mut self, x: Expr) -> Expr {
        if let Some(Tok::Suffix(u)) = self.peek() {
            let u = *u;
            self.at += 1;
            return Expr::Suffix(Box::new(x), u);
        }
        x
    }

    /// Exponent of `e^…`: an integer, or a parenthesized signed rational.
    fn eps_exponent(&mut self) -> Result<Q, ParseError> {
        let pos = self.pos();
        if self.eat("(") {
            let neg = self.eat("-");
            let mut r = match self.next() {
                Some(Tok::Num(q)) => q,
                _ => return err(pos, "expected a rational exponent"),
            };
            if self.eat("/") {
                match self.next() {
                    Some(Tok::Num(d)) if d.is_integer() && d != Q::from_integer(0.into()) => r /= d,
                    _ => return err(pos, "expected a nonzero integer denominator"),
                }
            }
            self.expect(")")?;
            return Ok(if neg { -r } else { r });
        }
        let neg = self.eat("-");
        match self.next() {
            Some(Tok::Num(q)) => Ok(if neg { -q } else { q }),
            _ => err(pos, "expected an exponent after `e^`"),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Num(q)) => Ok(self.suffixed(Expr::Num(q))),
            Some(Tok::Approx(x)) => Ok(self.suffixed(Expr::Approx(x))),
            Some(Tok::Set(s)) => Ok(Expr::Set(s)),
            Some(Tok::Sym("(")) => {
                let inner = self.expr()?;
                self.expect(")")?;
                Ok(self.suffixed(inner))
            }
            Some(Tok::Sym("{")) => {
                let mut branches = Vec::new();
                loop {
                    let set_pos = self.pos();
                    let set = match self.next() {
                        Some(Tok::Set(s)) => s,
                        _ => return err(set_pos, "expected a block set `pre=..;per=..`"),
                    };
                    self.expect(":")?;
                    branches.push((set, self.expr()?));
                    if !self.eat("|") {
                        break;
                    }
                }
                self.expect("}")?;
                Ok(self.suffixed(Expr::Branches(branches)))
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "e" => {
                    if self.eat("^") {
                        Ok(Expr::Eps(self.eps_exponent()?))
                    } else {
                        Ok(Expr::Eps(Q::from_integer(1.into())))
                    }
                }
                "O" => {
                    self.expect("(")?;
                    let e_pos = self.pos();
                    if !matches!(self.next(), Some(Tok::Ident(e)) if e == "e") {
                        return err(e_pos, "expected `e` inside `O(..)`");
                    }
                    let r = if self.eat("^") { self.eps_exponent()? } else { Q::from_integer(1.into()) };
                    self.expect(")")?;
                    Ok(Expr::BigO(r))
                }
                "i" => Ok(Expr::Unit(1)),
                "j" => Ok(Expr::Unit(2)),
                "k" => Ok(Expr::Unit(3)),
                "let" | "pre" => err(pos, format!("unexpected keyword `{name}`")),
                _ => {
                    if self.eat("(") {
                        let mut args = Vec::new();
                        if !self.eat(")") {
                            loop {
                                args.push(self.expr()?);
                                if self.eat(")") {
                                    break;
                                }
                                self.expect(",")?;
                            }
                        }
                        Ok(Expr::Call(name, args))
                    } else {
                        Ok(Expr::Var(name))
                    }
                }
            },
            Some(Tok::Suffix(_)) => err(pos, "unit suffix without a preceding factor"),
            Some(t) => err(pos, format!("unexpected token {}", describe(&t))),
            None => err(pos, "unexpected end of input"),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Semi => "`;`".into(),
        other => format!("{other:?}"),
    }
}

/// Parses a line holding one or more `;`-separated statements.
pub fn parse_program(text: &str) -> Result<Vec<Stmt>, ParseError> {
    let toks = Lexer::run(text)?;
    let mut out = Vec::new();
    for chunk in split_statements(toks) {
        if chunk.is_empty() {
            continue;
        }
        out.push(parse_tokens(chunk, text.len())?);
    }
    Ok(out)
}

/// Parses exactly one statement.
pub fn parse_statement(text: &str) -> Result<Stmt, ParseError> {
    let toks = Lexer::run(text)?;
    if let Some((pos, _)) = toks.iter().find(|(_, t)| *t == Tok::Semi) {
        return err(*pos, "expected a single statement");
    }
    if toks.is_empty() {
        return err(0, "empty input");
    }
    parse_tokens(toks, text.len())
}

/// Parses exactly one expression.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    match parse_statement(text)? {
        Stmt::Expr(x) => Ok(x),
        _ => err(0, "expected an expression, found a statement"),
    }
}

fn split_statements(toks: Vec<(usize, Tok)>) -> Vec<Vec<(usize, Tok)>> {
    let mut out = vec![Vec::new()];
    for t in toks {
        if t.1 == Tok::Semi {
            out.push(Vec::new());
        } else {
            out.last_mut().expect("nonempty").push(t);
        }
    }
    out
}

fn parse_tokens(toks: Vec<(usize, Tok)>, end: usize) -> Result<Stmt, ParseError> {
    let mut p = Parser { toks, at: 0, end };
    let stmt = p.statement()?;
    if p.at < p.toks.len() {
        let pos = p.pos();
        let t = p.next().expect("token present");
        return err(pos, format!("unexpected token {} after statement", describe(&t)));
    }
    Ok(stmt)
}
