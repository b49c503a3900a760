use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by an element indistinguishable from zero")]
    DivisionByIndistinguishableZero,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("rank decision depends on digits beyond the working precision")]
    AmbiguousRank,
    #[error("root isolation exceeded the working precision without certification")]
    DepthExhausted,
    #[error("unsupported degree {0}")]
    UnsupportedDegree(u32),
    #[error("mass mismatch for r = {r}, f = {f}: catalog {lhs}, closed form {rhs}")]
    MassMismatch {
        r: u32,
        f: u32,
        lhs: String,
        rhs: String,
    },
    #[error("distance value not attainable in this extension: {0}")]
    InvalidDistance(String),
    #[error("degree {0} is not prime")]
    NonPrimeDegree(u32),
    #[error("cell budget exceeded ({0} cells)")]
    BudgetExceeded(u64),
    #[error("common zero of P and P' detected")]
    DegenerateRoot,
    #[error("polynomial inseparable at working precision")]
    InseparableAtPrecision,
    #[error("balls overlap")]
    OverlappingBalls,
    #[error("element does not generate the extension")]
    NotGenerator,
    #[error("mismatched parent fields or primes")]
    Mismatch,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
