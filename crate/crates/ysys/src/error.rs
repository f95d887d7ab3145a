//! Error type shared by every module.

use thiserror::Error;

/// Failures raised by construction, mutation and verification routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input outside the admissible range of the requested system.
    #[error("rejected input: {0}")]
    RejectedInput(String),
    /// A label that is not part of the seed or triangulation.
    #[error("unknown label {0}")]
    UnknownLabel(String),
    /// Exchange relation produced a zero denominator.
    #[error("division by zero")]
    DivisionByZero,
    /// The polygon is too large for an explicit triangulation.
    #[error("polygon with {0} vertices is too large")]
    TooLarge(String),
    /// Interval classification failed; signals a construction bug.
    #[error("classification failure: {0}")]
    ClassificationFailure(String),
    /// Two labels of one mutation set share a triangle, or a flip is not unique.
    #[error("compatibility failure at u={u}: {detail}")]
    CompatibilityFailure { u: i64, detail: String },
    /// Forward mutation disagrees with the reflection of the triangulation.
    #[error("reflection mismatch at u={0}")]
    ReflectionMismatch(i64),
    /// The rotation law fails.
    #[error("rotation mismatch at u={0}")]
    RotationMismatch(i64),
    /// The window does not contain the requested time.
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    /// Occurrences disagree with the bisection parity.
    #[error("occurrence mismatch: {0}")]
    OccurrenceMismatch(String),
    /// A relation fails at a concrete point.
    #[error("relation violation at {at}: lhs={lhs} rhs={rhs}")]
    RelationViolation { at: String, lhs: String, rhs: String },
    /// Periodicity fails at a concrete point.
    #[error("periodicity violation: {0}")]
    PeriodicityViolation(String),
    /// A proper divisor of the claimed period is also a period.
    #[error("minimality violation: {0}")]
    MinimalityViolation(String),
    /// Quadrilateral indices requested outside the plus class.
    #[error("({a},{m},{u}) is not in the plus class")]
    NotInPlusClass { a: u32, m: String, u: i64 },
    /// Repeated z values in a cross-ratio assignment.
    #[error("degenerate z assignment")]
    DegenerateZ,
    /// Argument outside the domain of a real function.
    #[error("domain error: {0}")]
    DomainError(String),
    /// A dilogarithm identity fails.
    #[error("identity violation: {0}")]
    IdentityViolation(String),
    /// A c-vector with mixed signs.
    #[error("sign incoherence: {0}")]
    SignIncoherence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
