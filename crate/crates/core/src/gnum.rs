//! Generalized scalars: a partition of the block indices into eventually
//! periodic pieces, each carrying one asymptotic germ.
//!
//! Only the behaviour as `ε → 0` matters, so branch sets are stored by their
//! periodic tails; finitely many blocks never influence a value. With that,
//! two exact scalars are equal iff their canonical forms are equal.
//!
//! The decision procedures follow the dichotomy for this ring: an element is
//! a unit iff no accumulating branch carries the zero germ, and otherwise the
//! characteristic function of those zero branches is a nonzero idempotent
//! annihilating it.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::blocksets::{block_of, BlockSet};
use crate::error::{GqError, Result};
use crate::puiseux::{Coeff, GermRepr, PuiseuxGerm};
use crate::rational::{fmt_q, to_f64, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct GenScalar {
    branches: Vec<(BlockSet, PuiseuxGerm)>,
}

/// `V(x)`: the supremum of `A(x) = {r : ε^-r·x → 0}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(Q),
    Infinite,
}

impl Valuation {
    /// `‖x‖ = e^{-V(x)}`, zero for `V = +∞`.
    pub fn sharp_norm(&self) -> f64 {
        match self {
            Valuation::Finite(v) => (-to_f64(v)).exp(),
            Valuation::Infinite => 0.0,
        }
    }

    /// Membership of `r` in `A(x)`, which is the open ray `(-∞, V)`
    /// (all of ℝ when `x = 0`).
    pub fn a_set_contains(&self, r: &Q) -> bool {
        match self {
            Valuation::Finite(v) => r < v,
            Valuation::Infinite => true,
        }
    }

    pub fn a_set_string(&self) -> String {
        match self {
            Valuation::Finite(v) => format!("(-inf, {})", fmt_q(v)),
            Valuation::Infinite => "R".to_string(),
        }
    }

    pub fn finite(&self) -> Option<&Q> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => f.write_str(&fmt_q(v)),
            Valuation::Infinite => f.write_str("+inf"),
        }
    }
}

/// An idempotent `χ_A`, identified with the tail of its block set `A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IdempotentScalar {
    set: BlockSet,
}

impl IdempotentScalar {
    pub fn new(set: &BlockSet) -> Self {
        IdempotentScalar { set: set.tail() }
    }

    pub fn zero() -> Self {
        IdempotentScalar { set: BlockSet::empty() }
    }

    pub fn one() -> Self {
        IdempotentScalar { set: BlockSet::all() }
    }

    pub fn set(&self) -> &BlockSet {
        &self.set
    }

    pub fn is_zero(&self) -> bool {
        self.set.is_empty()
    }

    /// Neither 0 nor 1: both `A` and its complement accumulate.
    pub fn is_nontrivial(&self) -> bool {
        self.set.is_splitting()
    }

    pub fn complement(&self) -> Self {
        IdempotentScalar { set: self.set.complement() }
    }

    pub fn meet(&self, other: &Self) -> Self {
        IdempotentScalar { set: self.set.intersection(&other.set) }
    }

    pub fn to_scalar(&self) -> GenScalar {
        GenScalar::chi(&self.set)
    }
}

impl fmt::Display for IdempotentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi({})", self.set)
    }
}

impl GenScalar {
    /// Builds from branches whose sets partition ℕ exactly.
    pub fn from_branches(branches: Vec<(BlockSet, PuiseuxGerm)>) -> Result<Self> {
        let mut seen = BlockSet::empty();
        for (set, _) in &branches {
            if !seen.is_disjoint(set) {
                return Err(GqError::InvalidPartition(format!("branch set {set} overlaps an earlier branch")));
            }
            seen = seen.union(set);
        }
        if !seen.is_all() {
            return Err(GqError::InvalidPartition(format!(
                "branch sets miss the blocks {}",
                seen.complement()
            )));
        }
        Ok(GenScalar::canonical(branches))
    }

    /// Single branch over all of ℕ.
    pub fn from_germ(g: PuiseuxGerm) -> Self {
        GenScalar { branches: vec![(BlockSet::all(), g)] }
    }

    pub fn zero() -> Self {
        GenScalar::from_germ(PuiseuxGerm::zero())
    }

    pub fn one() -> Self {
        GenScalar::from_germ(PuiseuxGerm::one())
    }

    pub fn constant(c: Q) -> Self {
        GenScalar::from_germ(PuiseuxGerm::constant(c))
    }

    /// The scale element with representative `ε ↦ ε^r`.
    pub fn alpha(r: Q) -> Self {
        GenScalar::from_germ(PuiseuxGerm::power(r))
    }

    /// Characteristic function of `set`.
    pub fn chi(set: &BlockSet) -> Self {
        GenScalar::canonical(vec![
            (set.clone(), PuiseuxGerm::one()),
            (set.complement(), PuiseuxGerm::zero()),
        ])
    }

    /// `χ_set · self`.
    pub fn restrict(&self, set: &BlockSet) -> Self {
        self * &GenScalar::chi(set)
    }

    pub fn branches(&self) -> &[(BlockSet, PuiseuxGerm)] {
        &self.branches
    }

    fn canonical(branches: Vec<(BlockSet, PuiseuxGerm)>) -> Self {
        let mut merged: Vec<(BlockSet, PuiseuxGerm)> = Vec::new();
        for (set, germ) in branches {
            let set = set.tail();
            if set.is_empty() {
                continue;
            }
            match merged.iter_mut().find(|(_, g)| *g == germ) {
                Some((s, _)) => *s = s.union(&set),
                None => merged.push((set, germ)),
            }
        }
        merged.sort_by(|a, b| a.0.cmp(&b.0));
        debug_assert!(!merged.is_empty());
        GenScalar { branches: merged }
    }

    /// Pieces of the common refinement of two partitions.
    pub fn zip<'a>(&'a self, other: &'a Self) -> Vec<(BlockSet, &'a PuiseuxGerm, &'a PuiseuxGerm)> {
        let mut out = Vec::new();
        for (a, f) in &self.branches {
            for (b, g) in &other.branches {
                let s = a.intersection(b);
                if !s.is_empty() {
                    out.push((s, f, g));
                }
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(&PuiseuxGerm) -> PuiseuxGerm) -> Self {
        GenScalar::canonical(self.branches.iter().map(|(s, g)| (s.clone(), f(g))).collect())
    }

    pub fn try_map(&self, f: impl Fn(&PuiseuxGerm) -> Result<PuiseuxGerm>) -> Result<Self> {
        let branches = self
            .branches
            .iter()
            .map(|(s, g)| Ok((s.clone(), f(g)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(GenScalar::canonical(branches))
    }

    fn combine(&self, other: &Self, op: impl Fn(&PuiseuxGerm, &PuiseuxGerm) -> PuiseuxGerm) -> Self {
        GenScalar::canonical(self.zip(other).into_iter().map(|(s, f, g)| (s, op(f, g))).collect())
    }

    pub fn has_exact_coeffs(&self) -> bool {
        self.branches.iter().all(|(_, g)| g.has_exact_coeffs())
    }

    /// Every branch fully known with rational coefficients.
    pub fn is_exact(&self) -> bool {
        self.branches.iter().all(|(_, g)| g.is_exact())
    }

    pub fn ensure_exact_coeffs(&self) -> Result<()> {
        if self.has_exact_coeffs() {
            Ok(())
        } else {
            Err(GqError::ApproximateInput)
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        self.map(|g| g.pow(n))
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.map(|g| g.scale(&Coeff::Exact(c.clone())))
    }

    pub fn is_zero(&self) -> Result<bool> {
        for (_, g) in &self.branches {
            if !g.is_zero()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn try_eq(&self, other: &Self) -> Result<bool> {
        (self - other).is_zero()
    }

    /// Union of the branches carrying the zero germ: the zero set `Z(x̂)` up
    /// to finitely many blocks.
    pub fn zero_set(&self) -> Result<BlockSet> {
        let mut z = BlockSet::empty();
        for (s, g) in &self.branches {
            if g.is_zero()? {
                z = z.union(s);
            }
        }
        Ok(z)
    }

    /// Union of the branches with nonzero germ.
    pub fn support(&self) -> Result<BlockSet> {
        Ok(self.zero_set()?.complement())
    }

    /// Invertible iff the zero set does not accumulate.
    pub fn is_unit(&self) -> Result<bool> {
        Ok(self.zero_set()?.is_empty())
    }

    /// Zero branches judged structurally, so approximate coefficients pass.
    fn structural_zero_set(&self) -> Result<BlockSet> {
        let mut z = BlockSet::empty();
        for (s, g) in &self.branches {
            if g.leading()?.is_none() {
                z = z.union(s);
            }
        }
        Ok(z)
    }

    /// Inverse to relative order `n` on every branch. Approximate
    /// coefficients are accepted; only structurally zero branches block it.
    pub fn invert(&self, n: &Q) -> Result<Self> {
        let z = self.structural_zero_set()?;
        if z.is_all() {
            return Err(GqError::ZeroInput);
        }
        if !z.is_empty() {
            return Err(GqError::NotInvertible { witness: Some(z) });
        }
        self.try_map(|g| g.invert(n))
    }

    /// The idempotent `e = χ_Z` with `x·e = 0`, for a nonzero non-unit `x`.
    pub fn annihilator_idempotent(&self) -> Result<IdempotentScalar> {
        let z = self.zero_set()?;
        if z.is_all() {
            return Err(GqError::ZeroInput);
        }
        if z.is_empty() {
            return Err(GqError::IsUnit);
        }
        Ok(IdempotentScalar::new(&z))
    }

    /// Minimum of the branch leading exponents.
    ///
    /// A branch known only as `O(ε^N)` still settles the minimum when some
    /// other branch has a known leading exponent below `N`.
    pub fn valuation(&self) -> Result<Valuation> {
        self.ensure_exact_coeffs()?;
        let mut known: Option<&Q> = None;
        let mut unknown: Option<&Q> = None;
        for (_, g) in &self.branches {
            match (g.terms().first(), g.precision().order()) {
                (Some((e, _)), _) => known = Some(known.map_or(e, |k| k.min(e))),
                (None, Some(n)) => unknown = Some(unknown.map_or(n, |u| u.min(n))),
                (None, None) => {}
            }
        }
        match (known, unknown) {
            (Some(k), Some(u)) if k < u => Ok(Valuation::Finite(k.clone())),
            (_, Some(u)) => Err(GqError::IndeterminateAtPrecision(u.clone())),
            (Some(k), None) => Ok(Valuation::Finite(k.clone())),
            (None, None) => Ok(Valuation::Infinite),
        }
    }

    pub fn sharp_norm(&self) -> Result<f64> {
        Ok(self.valuation()?.sharp_norm())
    }

    /// Ultrametric `d(x, y) = ‖x − y‖`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        (self - other).sharp_norm()
    }

    fn branch_signs(&self) -> Result<Vec<Option<bool>>> {
        self.ensure_exact_coeffs()?;
        self.branches
            .iter()
            .map(|(_, g)| Ok(g.leading()?.map(|(_, c)| c.is_positive())))
            .collect()
    }

    /// `x ≥ 0`: every branch germ is zero or has positive leading coefficient.
    pub fn is_qpositive(&self) -> Result<bool> {
        Ok(self.branch_signs()?.into_iter().all(|s| s != Some(false)))
    }

    /// `self ≤ other` in the partial order.
    pub fn order_leq(&self, other: &Self) -> Result<bool> {
        (other - self).is_qpositive()
    }

    pub fn abs(&self) -> Result<Self> {
        self.ensure_exact_coeffs()?;
        self.try_map(|g| match g.leading()? {
            Some((_, c)) if c.is_negative() => Ok(-g),
            _ => Ok(g.clone()),
        })
    }

    /// q-positive square root, to relative order `n` per branch.
    pub fn sqrt(&self, n: &Q) -> Result<Self> {
        if !self.is_qpositive()? {
            return Err(GqError::NotQPositive);
        }
        self.try_map(|g| g.sqrt(n))
    }

    /// `x ≈ 0`: every branch tends to 0.
    pub fn associates_zero(&self) -> Result<bool> {
        self.ensure_exact_coeffs()?;
        for (_, g) in &self.branches {
            let tends_to_zero = match (g.terms().first(), g.precision().order()) {
                (Some((e, _)), _) => e.is_positive(),
                (None, None) => true,
                (None, Some(n)) if n.is_positive() => true,
                (None, Some(n)) => return Err(GqError::IndeterminateAtPrecision(n.clone())),
            };
            if !tends_to_zero {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn associated(&self, other: &Self) -> Result<bool> {
        (self - other).associates_zero()
    }

    /// The real number `a` with `x ≈ a`, if there is one.
    pub fn shadow(&self) -> Result<Option<Q>> {
        self.ensure_exact_coeffs()?;
        let mut common: Option<Q> = None;
        for (_, g) in &self.branches {
            let a = g
                .terms()
                .iter()
                .find(|(e, _)| e.is_zero())
                .and_then(|(_, c)| c.exact().cloned())
                .unwrap_or_else(Q::zero);
            match &common {
                Some(c) if *c != a => return Ok(None),
                _ => common = Some(a),
            }
        }
        let a = common.expect("at least one branch");
        if self.associated(&GenScalar::constant(a.clone()))? {
            Ok(Some(a))
        } else {
            Ok(None)
        }
    }

    /// An idempotent `e` with `x + e` a unit: the indicator of the zero
    /// branches (0 when `x` is already a unit).
    pub fn exchange_idempotent(&self) -> Result<IdempotentScalar> {
        Ok(IdempotentScalar::new(&self.zero_set()?))
    }

    /// A unit within sharp distance `e^{-s}`: `x + ε^s·χ_Z`.
    pub fn unit_within_radius(&self, s: &Q) -> Result<Self> {
        let z = self.zero_set()?;
        if z.is_empty() {
            return Ok(self.clone());
        }
        Ok(self + &GenScalar::alpha(s.clone()).restrict(&z))
    }

    /// `Some(A)` exactly when `x = χ_A`.
    pub fn is_idempotent(&self) -> Option<IdempotentScalar> {
        let mut ones = BlockSet::empty();
        for (s, g) in &self.branches {
            if *g == PuiseuxGerm::one() {
                ones = ones.union(s);
            } else if !g.is_exact_zero() {
                return None;
            }
        }
        let e = IdempotentScalar::new(&ones);
        debug_assert_eq!(&(self * self), self);
        Some(e)
    }

    /// Germ of the branch containing block `k`.
    pub fn germ_at_block(&self, k: usize) -> &PuiseuxGerm {
        self.branches
            .iter()
            .find(|(s, _)| s.contains(k))
            .map(|(_, g)| g)
            .expect("branches cover every block")
    }

    /// Value of the representative at `eps ∈ (0, 1]`.
    pub fn eval(&self, eps: f64) -> f64 {
        self.germ_at_block(block_of(eps)).eval(eps)
    }

    /// When `self` is a plain rational constant, that constant.
    pub fn as_rational(&self) -> Option<Q> {
        match self.branches.as_slice() {
            [(_, g)] if g.is_exact() => match g.terms() {
                [] => Some(Q::zero()),
                [(e, Coeff::Exact(c))] if e.is_zero() => Some(c.clone()),
                _ => None,
            },
            _ => None,
        }
    }

    /// True when every branch germ has no terms at `ε^0` or above... i.e. the
    /// value is a single exact term `c·ε^0` on all of ℕ. Used by printers.
    pub fn is_simple_constant(&self) -> bool {
        self.as_rational().is_some_and(|c| !c.is_zero())
    }
}

impl fmt::Display for GenScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let [(_, g)] = self.branches.as_slice() {
            return write!(f, "{g}");
        }
        f.write_str("{")?;
        for (i, (s, g)) in self.branches.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{s} : {g}")?;
        }
        f.write_str("}")
    }
}

macro_rules! scalar_binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for &GenScalar {
            type Output = GenScalar;
            fn $m(self, rhs: &GenScalar) -> GenScalar {
                self.combine(rhs, |f, g| f $op g)
            }
        }
        impl $tr for GenScalar {
            type Output = GenScalar;
            fn $m(self, rhs: GenScalar) -> GenScalar {
                (&self).$m(&rhs)
            }
        }
    };
}
scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl Neg for &GenScalar {
    type Output = GenScalar;
    fn neg(self) -> GenScalar {
        self.map(|g| -g)
    }
}

impl Neg for GenScalar {
    type Output = GenScalar;
    fn neg(self) -> GenScalar {
        -&self
    }
}

impl From<Q> for GenScalar {
    fn from(c: Q) -> Self {
        GenScalar::constant(c)
    }
}

#[derive(Serialize, Deserialize)]
struct BranchRepr {
    set: BlockSet,
    #[serde(flatten)]
    germ: GermRepr,
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    branches: Vec<BranchRepr>,
}

impl Serialize for GenScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScalarRepr {
            branches: self
                .branches
                .iter()
                .map(|(set, g)| BranchRepr { set: set.clone(), germ: GermRepr::from(g) })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GenScalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ScalarRepr::deserialize(d)?;
        let branches = repr
            .branches
            .into_iter()
            .map(|b| Ok((b.set, PuiseuxGerm::try_from(b.germ)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        GenScalar::from_branches(branches).map_err(serde::de::Error::custom)
    }
}

impl Serialize for IdempotentScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.set.serialize(s)
    }
}
