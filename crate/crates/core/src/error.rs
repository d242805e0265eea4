use num_rational::BigRational;
use thiserror::Error;

use crate::blocksets::BlockSet;

/// Errors raised by the decision procedures and arithmetic of the kernel.
///
/// Every message starts with the variant name so front-ends can surface it
/// verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GqError {
    #[error("NotAccumulating: block set {0} is finite, so it stays away from e -> 0 and has no sample points near 0")]
    NotAccumulating(BlockSet),

    #[error("IndeterminateAtPrecision: a germ is only known modulo O(e^{0}); its vanishing or leading term cannot be certified")]
    IndeterminateAtPrecision(BigRational),

    #[error("NotInvertible: the element is a zero divisor (its zero set accumulates at 0){}", witness_suffix(.witness))]
    NotInvertible { witness: Option<BlockSet> },

    #[error("ZeroInput: the operation is undefined on the zero element")]
    ZeroInput,

    #[error("NotQPositive: the element has a branch with negative leading coefficient, so it has no square root in the ring")]
    NotQPositive,

    #[error("NotQPositiveLeading: leading coefficient {0} is not positive, so the germ has no real square root")]
    NotQPositiveLeading(String),

    #[error("IsUnit: the element is invertible, so no nonzero idempotent annihilates it")]
    IsUnit,

    #[error("ApproximateInput: decisions are refused on values carrying approximate (floating) coefficients")]
    ApproximateInput,

    #[error("InvalidPartition: {0}")]
    InvalidPartition(String),

    #[error("ParseError: {0}")]
    Parse(String),
}

fn witness_suffix(w: &Option<BlockSet>) -> String {
    match w {
        Some(set) => format!("; annihilated by the idempotent chi({set})"),
        None => String::new(),
    }
}

impl GqError {
    /// Variant name, as it appears at the start of the message.
    pub fn name(&self) -> &'static str {
        match self {
            GqError::NotAccumulating(_) => "NotAccumulating",
            GqError::IndeterminateAtPrecision(_) => "IndeterminateAtPrecision",
            GqError::NotInvertible { .. } => "NotInvertible",
            GqError::ZeroInput => "ZeroInput",
            GqError::NotQPositive => "NotQPositive",
            GqError::NotQPositiveLeading(_) => "NotQPositiveLeading",
            GqError::IsUnit => "IsUnit",
            GqError::ApproximateInput => "ApproximateInput",
            GqError::InvalidPartition(_) => "InvalidPartition",
            GqError::Parse(_) => "ParseError",
        }
    }
}

pub type Result<T> = std::result::Result<T, GqError>;
