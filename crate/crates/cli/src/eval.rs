use std::collections::HashMap;
use std::fmt;

use gq_core::blocksets::BlockSet;
use gq_core::error::GqError;
use gq_core::ghquat::GenQuaternion;
use gq_core::gnum::{GenScalar, Valuation};
use gq_core::ideals::FgIdeal;
use gq_core::oracle::{self, DEFAULT_DEPTH};
use gq_core::puiseux::{Coeff, PuiseuxGerm};
use gq_core::rational::Q;
use num_traits::Zero;
use thiserror::Error;

use crate::ast::{BinOp, Expr, Stmt};
use crate::parser::{parse_program, ParseError};
use crate::value::Value;

pub const DEFAULT_ORDER: i64 = 8;

#[derive(Clone, Debug, PartialEq, Error)]
#[error("{message} [in `{subexpression}`]")]
pub struct EvalError {
    /// Library error name, or `TypeError`, `UnboundVariable`, `ArityError`.
    pub kind: String,
    pub message: String,
    pub subexpression: String,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CommandError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl CommandError {
    pub fn kind(&self) -> &str {
        match self {
            CommandError::Parse(_) => "ParseError",
            CommandError::Eval(e) => &e.kind,
        }
    }
}

fn lib_error(e: GqError, at: &Expr) -> EvalError {
    EvalError { kind: e.name().to_string(), message: e.to_string(), subexpression: at.to_string() }
}

fn type_error(message: impl fmt::Display, at: &Expr) -> EvalError {
    EvalError { kind: "TypeError".into(), message: format!("TypeError: {message}"), subexpression: at.to_string() }
}

/// Binding environment plus the truncation order used by `/` and inverses.
#[derive(Clone, Debug)]
pub struct Session {
    pub env: HashMap<String, Value>,
    pub order: Q,
}

impl Default for Session {
    fn default() -> Self {
        Session::new(Q::from_integer(DEFAULT_ORDER.into()))
    }
}

/// Numeric operand, with scalars promoted on demand.
enum Num {
    S(GenScalar),
    H(GenQuaternion),
}

impl Num {
    fn quat(self) -> GenQuaternion {
        match self {
            Num::S(s) => GenQuaternion::embed(s),
            Num::H(h) => h,
        }
    }
}

impl Session {
    pub fn new(order: Q) -> Self {
        Session { env: HashMap::new(), order }
    }

    /// Runs every statement of a line; the last value is returned.
    pub fn run_line(&mut self, text: &str) -> Result<Option<Value>, CommandError> {
        let mut last = None;
        for stmt in parse_program(text)? {
            last = Some(self.exec(&stmt)?);
        }
        Ok(last)
    }

    pub fn exec(&mut self, stmt: &Stmt) -> Result<Value, EvalError> {
        match stmt {
            Stmt::Let(name, x) => {
                let v = self.eval(x)?;
                self.env.insert(name.clone(), v.clone());
                Ok(v)
            }
            Stmt::Eq(a, b) => {
                let va = self.eval(a)?;
                let vb = self.eval(b)?;
                let whole = Expr::Call("==".into(), vec![a.clone(), b.clone()]);
                self.equal(va, vb, &whole).map(Value::Bool)
            }
            Stmt::Expr(x) => self.eval(x),
        }
    }

    fn equal(&self, a: Value, b: Value, at: &Expr) -> Result<bool, EvalError> {
        match (a, b) {
            (Value::Bool(x), Value::Bool(y)) => Ok(x == y),
            (Value::Set(x), Value::Set(y)) => Ok(x.tail() == y.tail()),
            (Value::Valuation(x), Value::Valuation(y)) => Ok(x == y),
            (Value::Ideal(x), Value::Ideal(y)) => Ok(x.same_ideal(&y)),
            (a, b) => {
                let x = as_num(a, at)?.quat();
                let y = as_num(b, at)?.quat();
                x.try_eq(&y).map_err(|e| lib_error(e, at))
            }
        }
    }

    pub fn eval(&self, x: &Expr) -> Result<Value, EvalError> {
        match x {
            Expr::Num(q) => Ok(Value::Scalar(GenScalar::constant(q.clone()))),
            Expr::Approx(v) => Ok(Value::Scalar(GenScalar::from_germ(
                PuiseuxGerm::monomial(Coeff::Approx(*v), Q::zero()),
            ))),
            Expr::Eps(r) => Ok(Value::Scalar(GenScalar::alpha(r.clone()))),
            Expr::BigO(r) => Ok(Value::Scalar(GenScalar::from_germ(PuiseuxGerm::big_o(r.clone())))),
            Expr::Unit(n) => Ok(Value::Quat(GenQuaternion::basis(*n))),
            Expr::Set(s) => Ok(Value::Set(s.clone())),
            Expr::Var(name) => self.env.get(name).cloned().ok_or_else(|| EvalError {
                kind: "UnboundVariable".into(),
                message: format!("UnboundVariable: `{name}` has no binding"),
                subexpression: x.to_string(),
            }),
            Expr::Neg(a) => Ok(match self.num(a)? {
                Num::S(s) => Value::Scalar(-&s),
                Num::H(h) => Value::Quat(-&h),
            }),
            Expr::Bin(op, a, b) => {
                let l = self.num(a)?;
                let r = self.num(b)?;
                self.binary(*op, l, r, x)
            }
            Expr::Pow(a, n) => Ok(match self.num(a)? {
                Num::S(s) => Value::Scalar(s.pow(*n)),
                Num::H(h) => Value::Quat((0..*n).fold(GenQuaternion::one(), |acc, _| &acc * &h)),
            }),
            Expr::Suffix(a, n) => {
                let s = self.scalar(a)?;
                Ok(Value::Quat(GenQuaternion::basis(*n).scale(&s)))
            }
            Expr::Branches(bs) => {
                let mut seen = BlockSet::empty();
                let mut acc = GenScalar::zero();
                for (set, e) in bs {
                    if !seen.is_disjoint(set) {
                        return Err(lib_error(
                            GqError::InvalidPartition(format!("branch set {set} overlaps an earlier branch")),
                            x,
                        ));
                    }
                    seen = seen.union(set);
                    acc = &acc + &self.scalar(e)?.restrict(set);
                }
                if !seen.tail().is_all() {
                    return Err(lib_error(
                        GqError::InvalidPartition(format!("branch sets miss the blocks {}", seen.complement())),
                        x,
                    ));
                }
                Ok(Value::Scalar(acc))
            }
            Expr::Call(name, args) => self.call(name, args, x),
        }
    }

    fn binary(&self, op: BinOp, l: Num, r: Num, at: &Expr) -> Result<Value, EvalError> {
        let lib = |e| lib_error(e, at);
        Ok(match (op, l, r) {
            (BinOp::Add, Num::S(a), Num::S(b)) => Value::Scalar(&a + &b),
            (BinOp::Sub, Num::S(a), Num::S(b)) => Value::Scalar(&a - &b),
            (BinOp::Mul, Num::S(a), Num::S(b)) => Value::Scalar(&a * &b),
            (BinOp::Div, Num::S(a), Num::S(b)) => Value::Scalar(&a * &b.invert(&self.order).map_err(lib)?),
            (BinOp::Add, a, b) => Value::Quat(&a.quat() + &b.quat()),
            (BinOp::Sub, a, b) => Value::Quat(&a.quat() - &b.quat()),
            (BinOp::Mul, a, b) => Value::Quat(&a.quat() * &b.quat()),
            (BinOp::Div, a, b) => Value::Quat(&a.quat() * &b.quat().invert(&self.order).map_err(lib)?),
        })
    }

    fn num(&self, x: &Expr) -> Result<Num, EvalError> {
        as_num(self.eval(x)?, x)
    }

    fn scalar(&self, x: &Expr) -> Result<GenScalar, EvalError> {
        match self.num(x)? {
            Num::S(s) => Ok(s),
            Num::H(h) => h.as_scalar().cloned().ok_or_else(|| type_error("expected a scalar, found a quaternion", x)),
        }
    }

    fn rational(&self, x: &Expr) -> Result<Q, EvalError> {
        self.scalar(x)?
            .as_rational()
            .ok_or_else(|| type_error("expected an exact rational constant", x))
    }

    fn set(&self, x: &Expr) -> Result<BlockSet, EvalError> {
        match self.eval(x)? {
            Value::Set(s) => Ok(s),
            Value::Idem(e) => Ok(e.set().clone()),
            other => Err(type_error(format!("expected a block set, found {}", other.type_name()), x)),
        }
    }

    fn ideal(&self, args: &[Expr], at: &Expr) -> Result<FgIdeal, EvalError> {
        if let [one] = args {
            if let Value::Ideal(i) = self.eval(one)? {
                return Ok(i);
            }
        }
        let nums = args.iter().map(|a| self.num(a)).collect::<Result<Vec<_>, _>>()?;
        let all_scalar = nums.iter().all(|n| matches!(n, Num::S(_)));
        let made = if all_scalar {
            FgIdeal::scalar(nums.into_iter().map(|n| if let Num::S(s) = n { s } else { unreachable!() }).collect())
        } else {
            FgIdeal::quaternion(nums.into_iter().map(Num::quat).collect())
        };
        made.map_err(|e| lib_error(e, at))
    }

    fn call(&self, name: &str, args: &[Expr], at: &Expr) -> Result<Value, EvalError> {
        let lib = |e| lib_error(e, at);
        let n = &self.order;
        let arity = |k: usize| -> Result<(), EvalError> {
            if args.len() == k {
                Ok(())
            } else {
                Err(EvalError {
                    kind: "ArityError".into(),
                    message: format!("ArityError: `{name}` takes {k} argument(s), got {}", args.len()),
                    subexpression: at.to_string(),
                })
            }
        };
        let at_least = |k: usize| -> Result<(), EvalError> {
            if args.len() >= k {
                Ok(())
            } else {
                Err(EvalError {
                    kind: "ArityError".into(),
                    message: format!("ArityError: `{name}` takes at least {k} argument(s)"),
                    subexpression: at.to_string(),
                })
            }
        };
        let unary = |f: &dyn Fn(Num) -> Result<Value, EvalError>| {
            arity(1)?;
            f(self.num(&args[0])?)
        };
        let pair = || -> Result<(Num, Num), EvalError> {
            arity(2)?;
            Ok((self.num(&args[0])?, self.num(&args[1])?))
        };
        match name {
            "alpha" => {
                arity(1)?;
                Ok(Value::Scalar(GenScalar::alpha(self.rational(&args[0])?)))
            }
            "chi" => {
                arity(1)?;
                Ok(Value::Scalar(GenScalar::chi(&self.set(&args[0])?)))
            }
            "norm" => unary(&|x| match x {
                Num::S(s) => s.abs().map(Value::Scalar).map_err(lib),
                Num::H(h) => h.norm(n).map(Value::Scalar).map_err(lib),
            }),
            "normsq" => unary(&|x| Ok(Value::Scalar(x.quat().normsq()))),
            "conj" => unary(&|x| {
                Ok(match x {
                    Num::S(s) => Value::Scalar(s),
                    Num::H(h) => Value::Quat(h.conj()),
                })
            }),
            "V" => unary(&|x| {
                match x {
                    Num::S(s) => s.valuation(),
                    Num::H(h) => h.valuation(),
                }
                .map(Value::Valuation)
                .map_err(lib)
            }),
            "A" => unary(&|x| {
                let v = match x {
                    Num::S(s) => s.valuation(),
                    Num::H(h) => h.valuation(),
                }
                .map_err(lib)?;
                Ok(Value::Text(v.a_set_string()))
            }),
            "sharpnorm" => unary(&|x| {
                match x {
                    Num::S(s) => s.sharp_norm(),
                    Num::H(h) => h.valuation().map(|v| v.sharp_norm()),
                }
                .map(Value::Real)
                .map_err(lib)
            }),
            "d" => {
                let (x, y) = pair()?;
                match (x, y) {
                    (Num::S(a), Num::S(b)) => a.distance(&b),
                    (a, b) => a.quat().metric_d(&b.quat()),
                }
                .map(Value::Real)
                .map_err(lib)
            }
            "dpi" => {
                let (x, y) = pair()?;
                x.quat().metric_dpi(&y.quat()).map(Value::Real).map_err(lib)
            }
            "shadow" => unary(&|x| {
                Ok(Value::Shadow(match x {
                    Num::S(s) => s.shadow().map_err(lib)?.map(|r| [r, Q::zero(), Q::zero(), Q::zero()]),
                    Num::H(h) => h.shadow().map_err(lib)?,
                }))
            }),
            "sqrt" => {
                arity(1)?;
                self.scalar(&args[0])?.sqrt(n).map(Value::Scalar).map_err(lib)
            }
            "abs" => {
                arity(1)?;
                self.scalar(&args[0])?.abs().map(Value::Scalar).map_err(lib)
            }
            "invert" => unary(&|x| {
                Ok(match x {
                    Num::S(s) => Value::Scalar(s.invert(n).map_err(lib)?),
                    Num::H(h) => Value::Quat(h.invert(n).map_err(lib)?),
                })
            }),
            "unit?" => unary(&|x| {
                match x {
                    Num::S(s) => s.is_unit(),
                    Num::H(h) => h.is_unit(),
                }
                .map(Value::Bool)
                .map_err(lib)
            }),
            "idem?" => unary(&|x| {
                let found = match x {
                    Num::S(s) => s.is_idempotent(),
                    Num::H(h) => h.is_idempotent(),
                };
                Ok(found.map_or(Value::Bool(false), Value::Idem))
            }),
            "annihilator" => unary(&|x| {
                match x {
                    Num::S(s) => s.annihilator_idempotent(),
                    Num::H(h) => h.zero_divisor_witness(),
                }
                .map(Value::Idem)
                .map_err(lib)
            }),
            "exchange" => unary(&|x| {
                match x {
                    Num::S(s) => s.exchange_idempotent(),
                    Num::H(h) => h.exchange_idempotent(),
                }
                .map(Value::Idem)
                .map_err(lib)
            }),
            "polar" => unary(&|x| x.quat().polar(n).map(Value::Polar).map_err(lib)),
            "support" => {
                arity(1)?;
                let x = self.num(&args[0])?.quat();
                x.normsq().support().map(Value::Set).map_err(lib)
            }
            "qpos?" => {
                arity(1)?;
                self.scalar(&args[0])?.is_qpositive().map(Value::Bool).map_err(lib)
            }
            "leq" => {
                arity(2)?;
                let a = self.scalar(&args[0])?;
                let b = self.scalar(&args[1])?;
                a.order_leq(&b).map(Value::Bool).map_err(lib)
            }
            "assoc" => {
                let (x, y) = pair()?;
                match (x, y) {
                    (Num::S(a), Num::S(b)) => a.associated(&b),
                    (a, b) => a.quat().associates(&b.quat()),
                }
                .map(Value::Bool)
                .map_err(lib)
            }
            "unitnear" => {
                arity(2)?;
                let x = self.scalar(&args[0])?;
                let s = self.rational(&args[1])?;
                x.unit_within_radius(&s).map(Value::Scalar).map_err(lib)
            }
            "ideal" => {
                at_least(1)?;
                self.ideal(args, at).map(Value::Ideal)
            }
            "bezout" => {
                at_least(1)?;
                let ideal = self.ideal(args, at)?;
                let cert = ideal.bezout_certificate(n).map_err(lib)?;
                if !cert.verifies() {
                    return Err(EvalError {
                        kind: "CertificateFailed".into(),
                        message: format!("CertificateFailed: Bezout certificate does not verify to order {n}"),
                        subexpression: at.to_string(),
                    });
                }
                Ok(Value::Scalar(cert.g))
            }
            "member" => {
                at_least(2)?;
                let x = self.num(&args[0])?.quat();
                let ideal = self.ideal(&args[1..], at)?;
                ideal.contains_element(&x).map(Value::Bool).map_err(lib)
            }
            "essential" => {
                at_least(1)?;
                Ok(Value::Bool(self.ideal(args, at)?.is_essential()))
            }
            "normideal" => {
                at_least(1)?;
                Ok(Value::Ideal(self.ideal(args, at)?.norm_ideal()))
            }
            "proper?" => {
                at_least(1)?;
                Ok(Value::Bool(self.ideal(args, at)?.is_proper()))
            }
            "contains" => {
                arity(2)?;
                let outer = self.ideal(&args[..1], at)?;
                match self.eval(&args[1])? {
                    Value::Ideal(inner) => Ok(Value::Bool(outer.contains(&inner))),
                    other => {
                        let x = as_num(other, &args[1])?.quat();
                        outer.contains_element(&x).map(Value::Bool).map_err(lib)
                    }
                }
            }
            "rann" => {
                at_least(1)?;
                let ideal = self.ideal(args, at)?;
                Ok(ideal.right_annihilator_idempotent().map_or(Value::Bool(false), Value::Idem))
            }
            "radical" => {
                arity(3)?;
                let ideal = self.ideal(&args[..1], at)?;
                let x = self.num(&args[1])?.quat();
                let k = self.rational(&args[2])?;
                let k: u32 = (k.is_integer() && k > Q::zero())
                    .then(|| k.to_integer().try_into().ok())
                    .flatten()
                    .ok_or_else(|| type_error("expected a positive integer power", &args[2]))?;
                ideal.radical_check(&x, k).map(Value::Bool).map_err(lib)
            }
            "complement" => {
                arity(1)?;
                Ok(Value::Set(self.set(&args[0])?.complement()))
            }
            "oracle" => unary(&|x| {
                let reports = match x {
                    Num::S(s) => vec![
                        oracle::check_unit_threshold(&s, &oracle::unit_exponent(&s).map_err(lib)?, DEFAULT_DEPTH),
                        oracle::check_association(&s, DEFAULT_DEPTH),
                        oracle::check_qpositivity(&s, DEFAULT_DEPTH),
                    ],
                    Num::H(h) => vec![
                        oracle::check_unit_threshold_quat(
                            &h,
                            &oracle::unit_exponent_quat(&h).map_err(lib)?,
                            DEFAULT_DEPTH,
                        ),
                        oracle::check_association_quat(&h, DEFAULT_DEPTH),
                    ],
                };
                reports.into_iter().collect::<Result<Vec<_>, _>>().map(Value::Reports).map_err(lib)
            }),
            _ => Err(EvalError {
                kind: "UnknownFunction".into(),
                message: format!("UnknownFunction: no function named `{name}`"),
                subexpression: at.to_string(),
            }),
        }
    }
}

fn as_num(v: Value, at: &Expr) -> Result<Num, EvalError> {
    match v {
        Value::Scalar(s) => Ok(Num::S(s)),
        Value::Quat(h) => Ok(Num::H(h)),
        Value::Idem(e) => Ok(Num::S(e.to_scalar())),
        Value::Valuation(Valuation::Finite(r)) => Ok(Num::S(GenScalar::constant(r))),
        Value::Shadow(Some(c)) => Ok(Num::H(GenQuaternion::from_components(c.map(GenScalar::constant)))),
        other => Err(type_error(format!("expected a number, found {}", other.type_name()), at)),
    }
}
