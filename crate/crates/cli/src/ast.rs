use std::fmt;

use gq_core::blocksets::BlockSet;
use gq_core::puiseux::fmt_power;
use gq_core::rational::{fmt_q, Q};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    fn prec(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => SUM,
            BinOp::Mul | BinOp::Div => PRODUCT,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// Nonnegative literal written as an integer or a finite decimal.
    Num(Q),
    /// `~1.25`: a floating constant.
    Approx(f64),
    /// `e^r`, the scale element `ε^r`.
    Eps(Q),
    /// `O(e^r)`.
    BigO(Q),
    /// Basis quaternion: 1 = i, 2 = j, 3 = k.
    Unit(usize),
    /// Raw block set such as `pre=;per=10`.
    Set(BlockSet),
    Var(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    /// `2k` or `(expr)i`.
    Suffix(Box<Expr>, usize),
    Call(String, Vec<Expr>),
    /// `{set : expr | set : expr}`.
    Branches(Vec<(BlockSet, Expr)>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Stmt {
    Let(String, Expr),
    Eq(Expr, Expr),
    Expr(Expr),
}

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

pub const UNIT_NAMES: [&str; 4] = ["1", "i", "j", "k"];

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Bin(op, _, _) => op.prec(),
            Expr::Neg(_) => UNARY,
            Expr::Pow(_, _) => POWER,
            _ => ATOM,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            f.write_str("(")?;
            self.write(f)?;
            return f.write_str(")");
        }
        self.write(f)
    }

    fn write(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(q) => f.write_str(&decimal(q)),
            Expr::Approx(x) => write!(f, "~{x:?}"),
            Expr::Eps(r) => f.write_str(&fmt_power(r)),
            Expr::BigO(r) => write!(f, "O({})", fmt_power(r)),
            Expr::Unit(n) => f.write_str(UNIT_NAMES[*n]),
            Expr::Set(s) => write!(f, "{s}"),
            Expr::Var(v) => f.write_str(v),
            Expr::Neg(x) => {
                f.write_str("-")?;
                x.write_at(f, UNARY)
            }
            Expr::Bin(op, a, b) => {
                a.write_at(f, op.prec())?;
                write!(f, " {} ", op.symbol())?;
                b.write_at(f, op.prec() + 1)
            }
            Expr::Pow(x, n) => {
                x.write_at(f, ATOM)?;
                write!(f, "^{n}")
            }
            Expr::Suffix(x, n) => {
                match **x {
                    Expr::Num(ref q) if !decimal(q).contains('/') => x.write(f)?,
                    _ => {
                        f.write_str("(")?;
                        x.write(f)?;
                        f.write_str(")")?;
                    }
                }
                f.write_str(UNIT_NAMES[*n])
            }
            Expr::Call(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    a.write(f)?;
                }
                f.write_str(")")
            }
            Expr::Branches(bs) => {
                f.write_str("{")?;
                for (i, (s, x)) in bs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    write!(f, "{s} : ")?;
                    x.write(f)?;
                }
                f.write_str("}")
            }
        }
    }
}

/// Exact decimal text of a rational with a terminating expansion; other
/// rationals fall back to `n/d`, which reparses as a division.
fn decimal(q: &Q) -> String {
    if q.is_integer() {
        return fmt_q(q);
    }
    let (mut twos, mut fives) = (0u32, 0u32);
    let mut d = q.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return fmt_q(q);
    }
    let places = twos.max(fives) as usize;
    let scaled = (q * Q::from_integer(BigInt::from(10).pow(places as u32))).to_integer();
    let digits = scaled.abs().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (int, frac) = digits.split_at(digits.len() - places);
    let sign = if q.is_negative() { "-" } else { "" };
    format!("{sign}{int}.{frac}")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f)
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Let(name, x) => write!(f, "let {name} = {x}"),
            Stmt::Eq(a, b) => write!(f, "{a} == {b}"),
            Stmt::Expr(x) => write!(f, "{x}"),
        }
    }
}
