//! Exact arithmetic for generalized scalars and quaternions modeled as
//! branch-partitioned asymptotic germs in a regularization parameter `ε`.

pub mod blocksets;
pub mod error;
pub mod ghquat;
pub mod gnum;
pub mod ideals;
pub mod oracle;
pub mod puiseux;
pub mod random;
pub mod rational;

pub use blocksets::BlockSet;
pub use error::{GqError, Result};
pub use ghquat::{GenQuaternion, Polar};
pub use gnum::{GenScalar, IdempotentScalar, Valuation};
pub use ideals::{FgIdeal, RingKind};
pub use puiseux::{Coeff, Precision, PuiseuxGerm};
pub use rational::Q;
