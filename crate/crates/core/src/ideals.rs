//! Finitely generated ideals in Bezout normal form.
//!
//! An ideal `⟨a_1, …, a_m⟩` is stored with the principal generator
//! `g = Σ normsq(a_i)` and its support. On the support `g` is a unit germ
//! branch by branch, and germ quotients are always moderate, so membership
//! reduces to support containment. Ideals are two-sided because the ring is
//! duo.

use std::fmt;

use serde::Serialize;

use crate::blocksets::BlockSet;
use crate::error::{GqError, Result};
use crate::ghquat::{scalar_residual_order, GenQuaternion};
use crate::gnum::{GenScalar, IdempotentScalar};
use crate::rational::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RingKind {
    Scalar,
    Quaternion,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FgIdeal {
    kind: RingKind,
    generators: Vec<GenQuaternion>,
    g: GenScalar,
    supp: BlockSet,
}

/// Evidence that `x ∈ gR`: `x = χ_supp·x` exactly and `g·ĝ⁺ = χ_supp` up to
/// `O(ε^m)` with `m > N`, where `q = ĝ⁺·x` is the quotient.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipCertificate {
    pub quotient: GenQuaternion,
    pub pseudo_inverse: GenScalar,
    pub supported: bool,
    #[serde(serialize_with = "crate::rational::serialize_opt_q")]
    pub residual_order: Option<Q>,
    #[serde(serialize_with = "crate::rational::serialize_q")]
    pub order: Q,
}

impl MembershipCertificate {
    pub fn verifies(&self) -> bool {
        self.supported && self.residual_order.as_ref().is_none_or(|m| m > &self.order)
    }
}

/// Evidence that `⟨gens⟩ = gR`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BezoutCertificate {
    pub g: GenScalar,
    /// `g = Σ a_i · conj(a_i)` holds exactly.
    pub combination_exact: bool,
    pub memberships: Vec<MembershipCertificate>,
}

impl BezoutCertificate {
    pub fn verifies(&self) -> bool {
        self.combination_exact && self.memberships.iter().all(MembershipCertificate::verifies)
    }
}

/// `Σ normsq(a_i)`.
pub fn principal_generator(gens: &[GenQuaternion]) -> GenScalar {
    gens.iter().fold(GenScalar::zero(), |acc, a| &acc + &a.normsq())
}

impl FgIdeal {
    pub fn scalar(gens: Vec<GenScalar>) -> Result<Self> {
        FgIdeal::build(RingKind::Scalar, gens.into_iter().map(GenQuaternion::embed).collect())
    }

    pub fn quaternion(gens: Vec<GenQuaternion>) -> Result<Self> {
        FgIdeal::build(RingKind::Quaternion, gens)
    }

    fn build(kind: RingKind, generators: Vec<GenQuaternion>) -> Result<Self> {
        if let Some(bad) = generators.iter().find(|a| !a.is_exact()) {
            return Err(if bad.has_exact_coeffs() {
                GqError::IndeterminateAtPrecision(
                    crate::ghquat::residual_order(bad).unwrap_or_else(|| Q::from_integer(0.into())),
                )
            } else {
                GqError::ApproximateInput
            });
        }
        let g = principal_generator(&generators);
        let supp = g.support()?;
        Ok(FgIdeal { kind, generators, g, supp })
    }

    pub fn kind(&self) -> RingKind {
        self.kind
    }

    pub fn generators(&self) -> &[GenQuaternion] {
        &self.generators
    }

    pub fn generator(&self) -> &GenScalar {
        &self.g
    }

    pub fn support(&self) -> &BlockSet {
        &self.supp
    }

    /// `x ∈ I` iff the support of `normsq(x)` lies in `supp(I)`.
    pub fn contains_element(&self, x: &GenQuaternion) -> Result<bool> {
        Ok(x.normsq().support()?.is_subset(&self.supp))
    }

    pub fn contains_scalar(&self, x: &GenScalar) -> Result<bool> {
        self.contains_element(&GenQuaternion::embed(x.clone()))
    }

    /// Quotient `q` with `g·q = x` to order `n`, plus the checks backing it.
    pub fn certificate(&self, x: &GenQuaternion, n: &Q) -> Result<MembershipCertificate> {
        let chi = GenScalar::chi(&self.supp);
        let supported = x.scale(&chi) == *x;
        let pseudo_inverse = if self.supp.is_empty() {
            GenScalar::zero()
        } else {
            let padded = &self.g + &GenScalar::chi(&self.supp.complement());
            &padded.invert(n)? * &chi
        };
        let residual_order = scalar_residual_order(&(&(&self.g * &pseudo_inverse) - &chi));
        Ok(MembershipCertificate {
            quotient: x.scale(&pseudo_inverse),
            pseudo_inverse,
            supported,
            residual_order,
            order: n.clone(),
        })
    }

    /// Both containments `a_i ∈ gR` and `g ∈ Σ a_i R`.
    pub fn bezout_certificate(&self, n: &Q) -> Result<BezoutCertificate> {
        let combo = self
            .generators
            .iter()
            .fold(GenQuaternion::zero(), |acc, a| &acc + &(a * &a.conj()));
        let memberships = self.generators.iter().map(|a| self.certificate(a, n)).collect::<Result<_>>()?;
        Ok(BezoutCertificate {
            g: self.g.clone(),
            combination_exact: combo == GenQuaternion::embed(self.g.clone()),
            memberships,
        })
    }

    /// `J ⊆ I`.
    pub fn contains(&self, other: &FgIdeal) -> bool {
        other.supp.is_subset(&self.supp)
    }

    pub fn same_ideal(&self, other: &FgIdeal) -> bool {
        self.supp == other.supp
    }

    /// `I ≠ R`, i.e. the complement of the support accumulates.
    pub fn is_proper(&self) -> bool {
        !self.supp.is_all()
    }

    /// `χ_{supp^c}` when it is nonzero; it annihilates every element of `I`.
    pub fn right_annihilator_idempotent(&self) -> Option<IdempotentScalar> {
        let c = self.supp.complement();
        (!c.is_empty()).then(|| IdempotentScalar::new(&c))
    }

    /// Essential iff the annihilator idempotent is zero.
    pub fn is_essential(&self) -> bool {
        self.right_annihilator_idempotent().is_none()
    }

    /// The scalar ideal generated by the `normsq(a_i)`, with principal
    /// generator `Σ normsq(a_i)`.
    pub fn norm_ideal(&self) -> FgIdeal {
        let generators = self.generators.iter().map(|a| GenQuaternion::embed(a.normsq())).collect();
        FgIdeal { kind: RingKind::Scalar, generators, g: self.g.clone(), supp: self.supp.clone() }
    }

    /// `e = χ_supp` with `I ⊆ R·e`, for a proper ideal; each generator is
    /// checked to satisfy `a·e = a`.
    pub fn containing_idempotent(&self) -> Option<IdempotentScalar> {
        if !self.is_proper() {
            return None;
        }
        let e = IdempotentScalar::new(&self.supp);
        let es = e.to_scalar();
        self.generators.iter().all(|a| a.scale(&es) == *a).then_some(e)
    }

    /// `I² = I`, using the products `a_i·a_j` as generators of `I²`.
    pub fn idempotency_check(&self) -> bool {
        let mut products = Vec::new();
        for a in &self.generators {
            for b in &self.generators {
                products.push(a * b);
            }
        }
        let sq = FgIdeal::build(self.kind, products).expect("products of exact generators are exact");
        sq.same_ideal(self)
    }

    /// The implication `xⁿ ∈ I ⇒ x ∈ I`.
    pub fn radical_check(&self, x: &GenQuaternion, n: u32) -> Result<bool> {
        let mut p = GenQuaternion::one();
        for _ in 0..n {
            p = &p * x;
        }
        Ok(!self.contains_element(&p)? || self.contains_element(x)?)
    }
}

impl fmt::Display for FgIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}> on {}", self.g, self.supp)
    }
}
