//! Integer-matrix normal forms, closed subgroups of the torus, and the
//! isotropy-condition checkers.

pub mod conditions;
pub mod matrix;
pub mod subgroup;

pub use conditions::{
    check_conditions, check_conditions_algebraic, ConditionKind, ConditionReport,
    ConditionViolation, StratumDescriptor,
};
pub use matrix::{smith_normal_form, IntMatrix, SnfResult};
pub use subgroup::{
    decompose_subgroup, dim_classifying, p_rank, present_classifying_cohomology, ClosedSubgroup,
    SubgroupDecomposition,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("character matrix has {0} columns, torus rank is {1}")]
    DimensionMismatch(usize, usize),
    #[error("stratum `{0}` inconsistent: orbit_dim {1} but isotropy torus rank {2} in rank-{3} torus")]
    InconsistentStratum(String, usize, usize, usize),
    #[error("invalid prime {0}")]
    InvalidPrime(u64),
}
