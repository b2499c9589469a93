use crate::padic::Valuation;

/// Crate-wide error type.
///
/// Precision-related variants are not bugs: they report that a question
/// cannot be answered at the working precision, so the caller can retry
/// with a larger context.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("working precision must be at least 1")]
    ZeroPrecision,
    #[error("operands belong to different p-adic contexts")]
    ContextMismatch,
    #[error("not a unit (valuation {0})")]
    NotAUnit(Valuation),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("denominator valuation exceeds numerator valuation; quotient leaves the p-adic integers")]
    DenominatorNotDividing,
    #[error("division by an element of higher valuation")]
    DivisionByHigherValuation,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("insufficient precision: needed {needed}, have {have}")]
    InsufficientPrecision { needed: u32, have: u32 },
    #[error("prime {p} exceeds the enumeration limit {limit}")]
    PrimeTooLargeForEnumeration { p: u64, limit: u64 },
    #[error("p must exceed 3 for this method (got {0})")]
    PrimeTooSmall(u64),
    #[error("seed rejected: |f(x1)|_p >= |f'(x1)|_p^2 (v(f) = {v_f}, v(f') = {v_fprime})")]
    SeedRejected { v_f: Valuation, v_fprime: u32 },
    #[error("denominator valuation {found} differs from expected {expected}; precision exhausted or precondition violated")]
    DenominatorValuationUnexpected { expected: u32, found: Valuation },
    #[error("no convergence within {0} steps")]
    NonConvergence(u32),
    #[error("invariant violated at step {step}: {what}")]
    InvariantViolated { step: usize, what: String },
    #[error("trace too short for an order estimate")]
    InsufficientTrace,
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("error magnitude hit the floating-point floor before two ratio samples; enlarge |e1|")]
    UnderflowTooFast,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
