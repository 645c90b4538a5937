//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by operations whose preconditions can fail.
///
/// Axiom violations discovered by the `validate_*` functions are *not*
/// errors; those are reported as entries in a
/// [`ValidationReport`](crate::report::ValidationReport).
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown object id `{0}`")]
    UnknownObject(String),
    #[error("unknown arrow id `{0}`")]
    UnknownArrow(String),
    #[error("malformed groupoid: {0}")]
    MalformedGroupoid(String),
    #[error("malformed functor: {0}")]
    MalformedFunctor(String),
    #[error("functor violates the functor axioms: {0}")]
    InvalidFunctor(String),
    #[error("functor is not a groupoid fibration ({missing} uncovered (h, x) pairs)")]
    NotAFibration { missing: usize },
    #[error("empty fibre over (arrow `{h}`, object `{x}`)")]
    EmptyFibre { h: String, x: String },
    #[error("subgroupoid is not a subgroup bundle: {0}")]
    NotSubgroupBundle(String),
    #[error("subgroup bundle is not normal: conjugating `{arrow}` by `{by}` leaves the bundle")]
    NotNormal { arrow: String, by: String },
    #[error("object set is not invariant: arrow `{arrow}` leaves it")]
    NotInvariant { arrow: String },
    #[error("not a subgroupoid: {0}")]
    NotSubgroupoid(String),
    #[error("classical action is invalid: {0}")]
    InvalidAction(String),
    #[error("bibundle is invalid: {0}")]
    InvalidBibundle(String),
    #[error("bibundle is not a groupoid equivalence: {0}")]
    NotAnEquivalence(String),
    #[error("map is not surjective: `{0}` is not hit")]
    NotSurjective(String),
    #[error("2-cocycle is invalid: {0}")]
    InvalidCocycle(String),
    #[error("cocycle values do not lie in the {order}-th roots of unity")]
    OrderMismatch { order: u32 },
    #[error("Fell bundle is invalid: {0}")]
    InvalidBundle(String),
    #[error("Fell bundle base does not match the groupoid")]
    MismatchedBase,
    #[error("Haar system is invalid: {0}")]
    InvalidHaar(String),
    #[error("measure is not quasi-invariant: witness arrow `{0}`")]
    NotQuasiInvariant(String),
    #[error("representation is not faithful (the measure misses an orbit)")]
    NotFaithful,
    #[error("generic central element was degenerate after {0} retries")]
    DegenerateRandomElement(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
