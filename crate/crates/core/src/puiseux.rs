//! Single-branch asymptotic germs: finite sums `Σ c·ε^r` with exact rational
//! exponents, optionally known only modulo `O(ε^N)`.
//!
//! Coefficients are exact rationals unless a square root of a non-square
//! forced a floating approximation; such coefficients are tagged
//! [`Coeff::Approx`] and every decision procedure refuses them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GqError, Result};
use crate::rational::{exact_sqrt, fmt_q, is_integer, parse_q, q, to_f64, Q};

/// Default truncation order for inversion and square roots.
pub const DEFAULT_ORDER: i64 = 8;

#[derive(Clone, Debug, PartialEq)]
pub enum Coeff {
    Exact(Q),
    Approx(f64),
}

impl Coeff {
    pub fn one() -> Self {
        Coeff::Exact(Q::one())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Exact(c) => c.is_zero(),
            Coeff::Approx(x) => *x == 0.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coeff::Exact(_))
    }

    pub fn exact(&self) -> Option<&Q> {
        match self {
            Coeff::Exact(c) => Some(c),
            Coeff::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Coeff::Exact(c) => to_f64(c),
            Coeff::Approx(x) => *x,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Coeff::Exact(c) => c.is_positive(),
            Coeff::Approx(x) => *x > 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Coeff::Exact(c) => c.is_negative(),
            Coeff::Approx(x) => *x < 0.0,
        }
    }

    pub fn recip(&self) -> Coeff {
        match self {
            Coeff::Exact(c) => Coeff::Exact(c.recip()),
            Coeff::Approx(x) => Coeff::Approx(1.0 / x),
        }
    }

    fn combine(&self, other: &Coeff, exact: impl Fn(&Q, &Q) -> Q, approx: impl Fn(f64, f64) -> f64) -> Coeff {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(exact(a, b)),
            _ => Coeff::Approx(approx(self.to_f64(), other.to_f64())),
        }
    }
}

impl Add for &Coeff {
    type Output = Coeff;
    fn add(self, rhs: &Coeff) -> Coeff {
        self.combine(rhs, |a, b| a + b, |a, b| a + b)
    }
}

impl Sub for &Coeff {
    type Output = Coeff;
    fn sub(self, rhs: &Coeff) -> Coeff {
        self.combine(rhs, |a, b| a - b, |a, b| a - b)
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &Coeff) -> Coeff {
        self.combine(rhs, |a, b| a * b, |a, b| a * b)
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        match self {
            Coeff::Exact(c) => Coeff::Exact(-c),
            Coeff::Approx(x) => Coeff::Approx(-x),
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Exact(c) => f.write_str(&fmt_q(c)),
            Coeff::Approx(x) => write!(f, "~{x:?}"),
        }
    }
}

/// How much of a germ is known: all of it, or everything below `ε^N`.
///
/// `Order(_) < Exact`, so `min` picks the weaker of two precisions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Precision {
    Order(Q),
    Exact,
}

impl Precision {
    pub fn order(&self) -> Option<&Q> {
        match self {
            Precision::Order(n) => Some(n),
            Precision::Exact => None,
        }
    }

    fn shift(&self, by: &Q) -> Precision {
        match self {
            Precision::Order(n) => Precision::Order(n + by),
            Precision::Exact => Precision::Exact,
        }
    }

    fn admits(&self, exp: &Q) -> bool {
        match self {
            Precision::Order(n) => exp < n,
            Precision::Exact => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxGerm {
    terms: Vec<(Q, Coeff)>,
    precision: Precision,
}

impl PuiseuxGerm {
    pub fn zero() -> Self {
        PuiseuxGerm { terms: vec![], precision: Precision::Exact }
    }

    pub fn one() -> Self {
        PuiseuxGerm::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        PuiseuxGerm::monomial(Coeff::Exact(c), Q::zero())
    }

    pub fn monomial(c: Coeff, exp: Q) -> Self {
        PuiseuxGerm::new(vec![(exp, c)], Precision::Exact)
    }

    /// `ε^r`.
    pub fn power(exp: Q) -> Self {
        PuiseuxGerm::monomial(Coeff::one(), exp)
    }

    /// The zero germ known only modulo `O(ε^n)`.
    pub fn big_o(n: Q) -> Self {
        PuiseuxGerm { terms: vec![], precision: Precision::Order(n) }
    }

    /// Builds from arbitrary terms: merges equal exponents, drops zero
    /// coefficients and anything at or above the precision.
    pub fn new(terms: Vec<(Q, Coeff)>, precision: Precision) -> Self {
        let mut acc: BTreeMap<Q, Coeff> = BTreeMap::new();
        for (e, c) in terms {
            if !precision.admits(&e) {
                continue;
            }
            match acc.get_mut(&e) {
                Some(prev) => *prev = &*prev + &c,
                None => {
                    acc.insert(e, c);
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        PuiseuxGerm { terms, precision }
    }

    pub fn terms(&self) -> &[(Q, Coeff)] {
        &self.terms
    }

    pub fn precision(&self) -> &Precision {
        &self.precision
    }

    /// No approximate coefficients (precision may still be finite).
    pub fn has_exact_coeffs(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_exact())
    }

    /// Fully known and exactly rational.
    pub fn is_exact(&self) -> bool {
        self.precision == Precision::Exact && self.has_exact_coeffs()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Structurally the exact zero germ.
    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.precision == Precision::Exact
    }

    pub fn ensure_exact_coeffs(&self) -> Result<()> {
        if self.has_exact_coeffs() {
            Ok(())
        } else {
            Err(GqError::ApproximateInput)
        }
    }

    /// Smallest-exponent term, `None` for the exact zero germ.
    pub fn leading(&self) -> Result<Option<(&Q, &Coeff)>> {
        match (self.terms.first(), &self.precision) {
            (Some((e, c)), _) => Ok(Some((e, c))),
            (None, Precision::Exact) => Ok(None),
            (None, Precision::Order(n)) => Err(GqError::IndeterminateAtPrecision(n.clone())),
        }
    }

    pub fn leading_exponent(&self) -> Result<Option<&Q>> {
        Ok(self.leading()?.map(|(e, _)| e))
    }

    /// Exact-zero test; refuses approximate coefficients.
    pub fn is_zero(&self) -> Result<bool> {
        self.ensure_exact_coeffs()?;
        Ok(self.leading()?.is_none())
    }

    /// Equality as elements, refusing approximate coefficients.
    pub fn try_eq(&self, other: &Self) -> Result<bool> {
        (self - other).is_zero()
    }

    /// Lower bound for the order of vanishing: the leading exponent if a term
    /// is known, else the precision. `None` means exact zero.
    fn order_lower_bound(&self) -> Option<&Q> {
        self.terms.first().map(|(e, _)| e).or(self.precision.order())
    }

    /// Exponent below which the germ is certified to vanish:
    /// `min(leading exponent, precision)`; `None` for exact zero.
    pub fn residual_order(&self) -> Option<Q> {
        self.order_lower_bound().cloned()
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &Coeff) -> Self {
        let terms = self.terms.iter().map(|(e, d)| (e.clone(), d * c)).collect();
        PuiseuxGerm::new(terms, self.precision.clone())
    }

    /// Multiplies by `ε^r`.
    pub fn shift(&self, r: &Q) -> Self {
        PuiseuxGerm {
            terms: self.terms.iter().map(|(e, c)| (e + r, c.clone())).collect(),
            precision: self.precision.shift(r),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = PuiseuxGerm::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse to relative order `n`: `self · g = 1 + O(ε^m)` for some
    /// `m > n`. Exact when `self` is an exact monomial.
    pub fn invert(&self, n: &Q) -> Result<Self> {
        let (v, c) = match self.leading()? {
            Some((v, c)) => (v.clone(), c.clone()),
            None => return Err(GqError::NotInvertible { witness: None }),
        };
        let c_inv = c.recip();
        let rel_prec = self.precision.shift(&-&v);
        if self.is_monomial() {
            let precision = rel_prec.shift(&-&v);
            return Ok(PuiseuxGerm::new(vec![(-&v, c_inv)], precision));
        }
        let h = self.normalized_tail(&v, &c_inv);
        let (support, precision) = series_support(&h, n, &rel_prec);
        let mut s: BTreeMap<Q, Coeff> = BTreeMap::new();
        s.insert(Q::zero(), Coeff::one());
        for e in support.iter().skip(1) {
            let mut acc = Coeff::Exact(Q::zero());
            for (g, hg) in &h {
                if g > e {
                    break;
                }
                if let Some(prev) = s.get(&(e - g)) {
                    acc = &acc - &(hg * prev);
                }
            }
            s.insert(e.clone(), acc);
        }
        let terms = s.into_iter().map(|(e, d)| (e - &v, &d * &c_inv)).collect();
        Ok(PuiseuxGerm::new(terms, precision.shift(&-&v)))
    }

    /// Square root to relative order `n`: `g² = self·(1 + O(ε^m))`, `m > n`.
    ///
    /// The leading coefficient's root is exact when it is a rational square,
    /// otherwise the whole result carries approximate coefficients.
    pub fn sqrt(&self, n: &Q) -> Result<Self> {
        let (v, c) = match self.leading()? {
            Some((v, c)) => (v.clone(), c.clone()),
            None => return Ok(PuiseuxGerm::zero()),
        };
        if !c.is_positive() {
            return Err(GqError::NotQPositiveLeading(c.to_string()));
        }
        let root_c = match &c {
            Coeff::Exact(x) => match exact_sqrt(x) {
                Some(r) => Coeff::Exact(r),
                None => Coeff::Approx(to_f64(x).sqrt()),
            },
            Coeff::Approx(x) => Coeff::Approx(x.sqrt()),
        };
        let half_v = &v / q(2);
        let rel_prec = self.precision.shift(&-&v);
        if self.is_monomial() {
            return Ok(PuiseuxGerm::new(vec![(half_v.clone(), root_c)], rel_prec.shift(&half_v)));
        }
        let h = self.normalized_tail(&v, &c.recip());
        let h_map: BTreeMap<&Q, &Coeff> = h.iter().map(|(e, c)| (e, c)).collect();
        let (support, precision) = series_support(&h, n, &rel_prec);
        let half = Coeff::Exact(Q::new(1.into(), 2.into()));
        let mut s: BTreeMap<Q, Coeff> = BTreeMap::new();
        s.insert(Q::zero(), Coeff::one());
        for e in support.iter().skip(1) {
            let mut acc = h_map.get(e).map_or(Coeff::Exact(Q::zero()), |c| (*c).clone());
            for a in support.iter().skip(1) {
                if a >= e {
                    break;
                }
                if let (Some(sa), Some(sb)) = (s.get(a), s.get(&(e - a))) {
                    acc = &acc - &(sa * sb);
                }
            }
            s.insert(e.clone(), &acc * &half);
        }
        let terms = s.into_iter().map(|(e, d)| (e + &half_v, &d * &root_c)).collect();
        Ok(PuiseuxGerm::new(terms, precision.shift(&half_v)))
    }

    /// Value of the represented function at `eps`.
    pub fn eval(&self, eps: f64) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let p = if is_integer(e) {
                    eps.powi(crate::rational::to_f64(e) as i32)
                } else {
                    eps.powf(to_f64(e))
                };
                c.to_f64() * p
            })
            .sum()
    }

    /// Terms after the leading one, divided by the leading term:
    /// `self = c·ε^v·(1 + Σ h)`.
    fn normalized_tail(&self, v: &Q, c_inv: &Coeff) -> Vec<(Q, Coeff)> {
        self.terms[1..].iter().map(|(e, d)| (e - v, d * c_inv)).collect()
    }
}

/// Exponents that a power series in `h` can reach below relative order `n`,
/// together with the precision of the truncated series.
///
/// The support is the additive monoid generated by the (positive) exponents
/// of `h`; the truncation error starts at the first monoid element above `n`,
/// or earlier if the input itself was only known to `input_prec`.
fn series_support(h: &[(Q, Coeff)], n: &Q, input_prec: &Precision) -> (Vec<Q>, Precision) {
    let gens: Vec<&Q> = h.iter().map(|(e, _)| e).collect();
    let mut elems: BTreeSet<Q> = BTreeSet::from([Q::zero()]);
    let mut next_above: Option<Q> = None;
    let mut stack = vec![Q::zero()];
    while let Some(a) = stack.pop() {
        for g in &gens {
            let b = &a + *g;
            if &b <= n {
                if elems.insert(b.clone()) {
                    stack.push(b);
                }
            } else if next_above.as_ref().map_or(true, |m| &b < m) {
                next_above = Some(b);
            }
        }
    }
    let bound = Precision::Order(next_above.expect("tail has positive exponents"));
    let precision = bound.min(input_prec.clone());
    let support = elems.into_iter().filter(|e| precision.admits(e)).collect();
    (support, precision)
}

impl Add for &PuiseuxGerm {
    type Output = PuiseuxGerm;
    fn add(self, rhs: &PuiseuxGerm) -> PuiseuxGerm {
        let precision = self.precision.clone().min(rhs.precision.clone());
        let terms = self.terms.iter().chain(&rhs.terms).cloned().collect();
        PuiseuxGerm::new(terms, precision)
    }
}

impl Neg for &PuiseuxGerm {
    type Output = PuiseuxGerm;
    fn neg(self) -> PuiseuxGerm {
        PuiseuxGerm {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            precision: self.precision.clone(),
        }
    }
}

impl Sub for &PuiseuxGerm {
    type Output = PuiseuxGerm;
    fn sub(self, rhs: &PuiseuxGerm) -> PuiseuxGerm {
        self + &(-rhs)
    }
}

impl Mul for &PuiseuxGerm {
    type Output = PuiseuxGerm;
    fn mul(self, rhs: &PuiseuxGerm) -> PuiseuxGerm {
        let (lf, lg) = match (self.order_lower_bound(), rhs.order_lower_bound()) {
            (Some(a), Some(b)) => (a, b),
            _ => return PuiseuxGerm::zero(),
        };
        // (F + O(ε^Nf))(G + O(ε^Ng)) = FG + O(ε^{min(Nf + v(G), Ng + v(F))})
        let precision = self.precision.shift(lg).min(rhs.precision.shift(lf));
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                terms.push((ea + eb, ca * cb));
            }
        }
        PuiseuxGerm::new(terms, precision)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for PuiseuxGerm {
            type Output = PuiseuxGerm;
            fn $m(self, rhs: PuiseuxGerm) -> PuiseuxGerm {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for PuiseuxGerm {
    type Output = PuiseuxGerm;
    fn neg(self) -> PuiseuxGerm {
        -&self
    }
}

/// `e^2`, `e^(1/2)`, `e^(-1)`.
pub fn fmt_power(e: &Q) -> String {
    if is_integer(e) && !e.is_negative() {
        format!("e^{}", fmt_q(e))
    } else {
        format!("e^({})", fmt_q(e))
    }
}

impl fmt::Display for PuiseuxGerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (e, c) in &self.terms {
            let neg = c.is_negative();
            let mag = if neg { -c } else { c.clone() };
            let body = match (e.is_zero(), &mag) {
                (true, _) => mag.to_string(),
                (false, Coeff::Exact(m)) if m.is_one() => fmt_power(e),
                (false, _) => format!("{}*{}", mag, fmt_power(e)),
            };
            parts.push((neg, body));
        }
        if let Precision::Order(n) = &self.precision {
            parts.push((false, format!("O({})", fmt_power(n))));
        }
        if parts.is_empty() {
            return f.write_str("0");
        }
        for (i, (neg, body)) in parts.iter().enumerate() {
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => f.write_str(body)?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct TermRepr {
    exp: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    num: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    den: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    approx: Option<f64>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct GermRepr {
    pub(crate) terms: Vec<TermRepr>,
    pub(crate) precision: String,
}

impl From<&PuiseuxGerm> for GermRepr {
    fn from(g: &PuiseuxGerm) -> Self {
        let terms = g
            .terms
            .iter()
            .map(|(e, c)| match c {
                Coeff::Exact(x) => TermRepr {
                    exp: fmt_q(e),
                    num: Some(x.numer().to_string()),
                    den: Some(x.denom().to_string()),
                    approx: None,
                },
                Coeff::Approx(x) => TermRepr { exp: fmt_q(e), num: None, den: None, approx: Some(*x) },
            })
            .collect();
        let precision = match &g.precision {
            Precision::Exact => "exact".to_string(),
            Precision::Order(n) => fmt_q(n),
        };
        GermRepr { terms, precision }
    }
}

impl TryFrom<GermRepr> for PuiseuxGerm {
    type Error = GqError;
    fn try_from(r: GermRepr) -> Result<Self> {
        let bad = |what: &str| GqError::Parse(format!("bad germ JSON: {what}"));
        let precision = if r.precision == "exact" {
            Precision::Exact
        } else {
            Precision::Order(parse_q(&r.precision).ok_or_else(|| bad("precision"))?)
        };
        let mut terms = Vec::with_capacity(r.terms.len());
        for t in r.terms {
            let exp = parse_q(&t.exp).ok_or_else(|| bad("exp"))?;
            let coeff = match (t.num, t.den, t.approx) {
                (Some(n), d, None) => {
                    let d = d.unwrap_or_else(|| "1".into());
                    Coeff::Exact(parse_q(&format!("{n}/{d}")).ok_or_else(|| bad("num/den"))?)
                }
                (None, None, Some(x)) if x.is_finite() => Coeff::Approx(x),
                _ => return Err(bad("term needs num/den or approx")),
            };
            if !precision.admits(&exp) {
                return Err(bad("term at or above the precision"));
            }
            terms.push((exp, coeff));
        }
        Ok(PuiseuxGerm::new(terms, precision))
    }
}

impl Serialize for PuiseuxGerm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GermRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PuiseuxGerm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GermRepr::deserialize(d)?;
        PuiseuxGerm::try_from(repr).map_err(serde::de::Error::custom)
    }
}
