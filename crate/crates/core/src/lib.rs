//! Exact computations in group algebras `FG` of finite groups over finite
//! fields: enumeration of the normalized unit group `V(FG)`, Engel and
//! nilpotency decisions, and verifiers that compare the structural
//! predictions for `V(FG)` with brute force.

pub mod classify;
pub mod error;
pub mod finite_field;
pub mod group_algebra;
pub mod groups;
pub mod harness;
pub mod linalg;
pub mod unit_group;

pub use error::{Error, Result};
pub use finite_field::{FieldElement, FiniteField};
pub use group_algebra::{AlgebraElement, EnumerationBudget, GroupAlgebra, IdealBasis};
pub use groups::{ElementSet, FiniteGroup, GroupOps, GroupSpec, Subgroup};
