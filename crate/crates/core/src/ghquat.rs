//! Quaternions over the generalized scalars.
//!
//! Every decision procedure goes through `normsq(x) = x·x̄`, which is an
//! exact scalar whenever the components are exact. Idempotents of this ring
//! are central scalar idempotents `χ_A`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{GqError, Result};
use crate::gnum::{GenScalar, IdempotentScalar, Valuation};
use crate::rational::{fmt_q, Q};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenQuaternion {
    pub x0: GenScalar,
    pub x1: GenScalar,
    pub x2: GenScalar,
    pub x3: GenScalar,
}

/// Polar form `x = θ·n` with `n = n(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polar {
    pub theta: GenQuaternion,
    pub n: GenScalar,
}

const UNITS: [&str; 4] = ["", "i", "j", "k"];

impl GenQuaternion {
    pub fn new(x0: GenScalar, x1: GenScalar, x2: GenScalar, x3: GenScalar) -> Self {
        GenQuaternion { x0, x1, x2, x3 }
    }

    pub fn from_components(c: [GenScalar; 4]) -> Self {
        let [x0, x1, x2, x3] = c;
        GenQuaternion { x0, x1, x2, x3 }
    }

    /// Scalar embedding `s ↦ s + 0i + 0j + 0k`.
    pub fn embed(s: GenScalar) -> Self {
        GenQuaternion::new(s, GenScalar::zero(), GenScalar::zero(), GenScalar::zero())
    }

    pub fn zero() -> Self {
        GenQuaternion::embed(GenScalar::zero())
    }

    pub fn one() -> Self {
        GenQuaternion::embed(GenScalar::one())
    }

    /// Basis element `n` (0 = 1, 1 = i, 2 = j, 3 = k).
    pub fn basis(n: usize) -> Self {
        let mut c = [GenScalar::zero(), GenScalar::zero(), GenScalar::zero(), GenScalar::zero()];
        c[n] = GenScalar::one();
        GenQuaternion::from_components(c)
    }

    pub fn i() -> Self {
        GenQuaternion::basis(1)
    }

    pub fn j() -> Self {
        GenQuaternion::basis(2)
    }

    pub fn k() -> Self {
        GenQuaternion::basis(3)
    }

    pub fn components(&self) -> [&GenScalar; 4] {
        [&self.x0, &self.x1, &self.x2, &self.x3]
    }

    fn map(&self, f: impl Fn(&GenScalar) -> GenScalar) -> Self {
        GenQuaternion::new(f(&self.x0), f(&self.x1), f(&self.x2), f(&self.x3))
    }

    /// `s·x`; scalars are central, so the side does not matter.
    pub fn scale(&self, s: &GenScalar) -> Self {
        self.map(|c| s * c)
    }

    pub fn conj(&self) -> Self {
        GenQuaternion::new(self.x0.clone(), -&self.x1, -&self.x2, -&self.x3)
    }

    /// Real part when all imaginary components are exactly zero.
    pub fn as_scalar(&self) -> Option<&GenScalar> {
        let zero = GenScalar::zero();
        (self.x1 == zero && self.x2 == zero && self.x3 == zero).then_some(&self.x0)
    }

    pub fn has_exact_coeffs(&self) -> bool {
        self.components().iter().all(|c| c.has_exact_coeffs())
    }

    pub fn is_exact(&self) -> bool {
        self.components().iter().all(|c| c.is_exact())
    }

    pub fn is_zero(&self) -> Result<bool> {
        for c in self.components() {
            if !c.is_zero()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn try_eq(&self, other: &Self) -> Result<bool> {
        (self - other).is_zero()
    }

    /// `x0² + x1² + x2² + x3²`.
    pub fn normsq(&self) -> GenScalar {
        self.components().iter().fold(GenScalar::zero(), |acc, c| &acc + &(*c * *c))
    }

    /// `n(x) = √normsq(x)` to order `n`.
    pub fn norm(&self, n: &Q) -> Result<GenScalar> {
        self.normsq().sqrt(n)
    }

    pub fn is_unit(&self) -> Result<bool> {
        self.normsq().is_unit()
    }

    /// `x̄ · normsq(x)^{-1}`.
    pub fn invert(&self, n: &Q) -> Result<Self> {
        let inv = self.normsq().invert(n)?;
        Ok(self.conj().scale(&inv))
    }

    /// Central idempotent `e ≠ 0` with `x·e = e·x = 0`, for a nonzero non-unit.
    pub fn zero_divisor_witness(&self) -> Result<IdempotentScalar> {
        self.normsq().annihilator_idempotent()
    }

    /// Minimum of the component valuations.
    pub fn valuation(&self) -> Result<Valuation> {
        let mut v = Valuation::Infinite;
        for c in self.components() {
            v = v.min(c.valuation()?);
        }
        Ok(v)
    }

    /// `V(normsq(x)) / 2`, the valuation seen through the norm.
    pub fn norm_valuation(&self) -> Result<Valuation> {
        Ok(match self.normsq().valuation()? {
            Valuation::Finite(v) => Valuation::Finite(v / Q::from_integer(2.into())),
            Valuation::Infinite => Valuation::Infinite,
        })
    }

    /// `d(x, y) = e^{-V(x − y)}`, computed through the norm of the difference.
    pub fn metric_d(&self, other: &Self) -> Result<f64> {
        Ok((self - other).norm_valuation()?.sharp_norm())
    }

    /// `max_n e^{-V(x_n − y_n)}`.
    pub fn metric_dpi(&self, other: &Self) -> Result<f64> {
        let mut m: f64 = 0.0;
        for (a, b) in self.components().iter().zip(other.components()) {
            m = m.max(a.distance(b)?);
        }
        Ok(m)
    }

    /// `x = θ·n(x)` for a unit `x`, each factor to absolute order `n`.
    pub fn polar(&self, n: &Q) -> Result<Polar> {
        let ns = self.normsq();
        let z = ns.zero_set()?;
        if z.is_all() {
            return Err(GqError::ZeroInput);
        }
        if !z.is_empty() {
            return Err(GqError::NotInvertible { witness: Some(z) });
        }
        // relative orders are raised so the absolute error stays above `n`
        let v = match self.valuation()? {
            Valuation::Finite(v) => v,
            Valuation::Infinite => unreachable!("units are nonzero"),
        };
        let order = if v.is_negative() { n - &v } else { n.clone() };
        let norm = ns.sqrt(&order)?;
        let theta = self.scale(&norm.invert(&order)?);
        Ok(Polar { theta, n: norm })
    }

    pub fn associates_zero(&self) -> Result<bool> {
        for c in self.components() {
            if !c.associates_zero()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn associates(&self, other: &Self) -> Result<bool> {
        (self - other).associates_zero()
    }

    /// Classical quaternion `(a0, a1, a2, a3)` with `x ≈ a`, if it exists.
    pub fn shadow(&self) -> Result<Option<[Q; 4]>> {
        let mut out = Vec::with_capacity(4);
        for c in self.components() {
            match c.shadow()? {
                Some(a) => out.push(a),
                None => return Ok(None),
            }
        }
        Ok(Some(out.try_into().expect("four components")))
    }

    /// Idempotent `e` with `x + e` a unit.
    pub fn exchange_idempotent(&self) -> Result<IdempotentScalar> {
        self.normsq().exchange_idempotent()
    }

    /// `Some(χ_A)` exactly when `x² = x`; such `x` is always a scalar `χ_A`.
    pub fn is_idempotent(&self) -> Option<IdempotentScalar> {
        if !self.is_exact() || &(self * self) != self {
            return None;
        }
        let e = self.as_scalar()?.is_idempotent();
        debug_assert!(e.is_some(), "idempotent quaternion with non-idempotent real part");
        e
    }

    /// Component values at `eps`.
    pub fn eval(&self, eps: f64) -> [f64; 4] {
        [self.x0.eval(eps), self.x1.eval(eps), self.x2.eval(eps), self.x3.eval(eps)]
    }

    /// `|x(ε)|`, the Euclidean norm of the sampled components.
    pub fn eval_abs(&self, eps: f64) -> f64 {
        self.eval(eps).iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn hamilton(a: &GenQuaternion, b: &GenQuaternion) -> GenQuaternion {
    let [a0, a1, a2, a3] = a.components();
    let [b0, b1, b2, b3] = b.components();
    GenQuaternion::new(
        &(&(a0 * b0) - &(a1 * b1)) - &(&(a2 * b2) + &(a3 * b3)),
        &(&(a0 * b1) + &(a1 * b0)) + &(&(a2 * b3) - &(a3 * b2)),
        &(&(a0 * b2) - &(a1 * b3)) + &(&(a2 * b0) + &(a3 * b1)),
        &(&(a0 * b3) + &(a1 * b2)) - &(&(a2 * b1) - &(a3 * b0)),
    )
}

impl Add for &GenQuaternion {
    type Output = GenQuaternion;
    fn add(self, rhs: &GenQuaternion) -> GenQuaternion {
        GenQuaternion::new(&self.x0 + &rhs.x0, &self.x1 + &rhs.x1, &self.x2 + &rhs.x2, &self.x3 + &rhs.x3)
    }
}

impl Sub for &GenQuaternion {
    type Output = GenQuaternion;
    fn sub(self, rhs: &GenQuaternion) -> GenQuaternion {
        GenQuaternion::new(&self.x0 - &rhs.x0, &self.x1 - &rhs.x1, &self.x2 - &rhs.x2, &self.x3 - &rhs.x3)
    }
}

impl Mul for &GenQuaternion {
    type Output = GenQuaternion;
    fn mul(self, rhs: &GenQuaternion) -> GenQuaternion {
        hamilton(self, rhs)
    }
}

impl Neg for &GenQuaternion {
    type Output = GenQuaternion;
    fn neg(self) -> GenQuaternion {
        self.map(|c| -c)
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for GenQuaternion {
            type Output = GenQuaternion;
            fn $m(self, rhs: GenQuaternion) -> GenQuaternion {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for GenQuaternion {
    type Output = GenQuaternion;
    fn neg(self) -> GenQuaternion {
        -&self
    }
}

impl From<GenScalar> for GenQuaternion {
    fn from(s: GenScalar) -> Self {
        GenQuaternion::embed(s)
    }
}

/// Writes one nonzero component as a signed summand, e.g. `-2k`, `(1/2)i`
/// or `(e^1 + e^2)j`. Returns whether the summand is negative.
fn summand(c: &GenScalar, unit: &str) -> (bool, String) {
    if let Some(r) = c.as_rational() {
        let neg = r.is_negative();
        let a = r.abs();
        let body = if unit.is_empty() {
            fmt_q(&a)
        } else if a == Q::from_integer(1.into()) {
            unit.to_string()
        } else if a.is_integer() {
            format!("{}{unit}", fmt_q(&a))
        } else {
            format!("({}){unit}", fmt_q(&a))
        };
        return (neg, body);
    }
    if unit.is_empty() {
        (false, c.to_string())
    } else {
        (false, format!("({c}){unit}"))
    }
}

impl fmt::Display for GenQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let zero = GenScalar::zero();
        let parts: Vec<(bool, String)> = self
            .components()
            .iter()
            .zip(UNITS)
            .filter(|(c, _)| ***c != zero)
            .map(|(c, u)| summand(c, u))
            .collect();
        if parts.is_empty() {
            return f.write_str("0");
        }
        if let [(false, s)] = parts.as_slice() {
            if self.x0 != zero {
                return f.write_str(s);
            }
        }
        for (idx, (neg, s)) in parts.iter().enumerate() {
            let s = if idx == 0 && self.x0 != zero && self.x0.as_rational().is_none() {
                format!("({s})")
            } else {
                s.clone()
            };
            match (idx, neg) {
                (0, false) => f.write_str(&s)?,
                (0, true) => write!(f, "-{s}")?,
                (_, false) => write!(f, " + {s}")?,
                (_, true) => write!(f, " - {s}")?,
            }
        }
        Ok(())
    }
}

/// Largest `m` such that the difference is `O(ε^m)` in every component;
/// `None` when the difference is exactly zero.
pub fn residual_order(x: &GenQuaternion) -> Option<Q> {
    x.components().iter().filter_map(|c| scalar_residual_order(c)).min()
}

/// Smallest branch residual order of a scalar; `None` when exactly zero.
pub fn scalar_residual_order(x: &GenScalar) -> Option<Q> {
    x.branches().iter().filter_map(|(_, g)| g.residual_order()).min()
}

impl GenQuaternion {
    /// True when `self` is zero to absolute order above `n` in every component.
    pub fn vanishes_beyond(&self, n: &Q) -> bool {
        residual_order(self).map_or(true, |m| &m > n)
    }
}
