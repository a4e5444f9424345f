//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero determinant")]
    ZeroDeterminant,
    #[error("0/0 is undefined")]
    Indeterminate,
    #[error("pole of a Möbius map")]
    Pole,
    #[error("empty matrix product")]
    EmptyProduct,
    #[error("division by zero")]
    DivisionByZero,
    #[error("negative radicand")]
    NegativeRadicand,
    #[error("operands lie in different quadratic fields")]
    FieldMismatch,
    #[error("parse error: {0}")]
    Parse(String),

    #[error("index {0} beyond the end of the expansion")]
    IndexBeyondExpansion(usize),
    #[error("bad index range [{0}, {1}]")]
    BadRange(i64, i64),
    #[error("singular convergent prefix at index {0}")]
    SingularPrefix(i64),
    #[error("digit at index {0} is not an integer")]
    NonIntegralDigit(i64),
    #[error("zero partial numerator at index {0}")]
    ZeroNumerator(usize),
    #[error("cannot singularise at position {0}")]
    NotSingularisable(usize),
    #[error("adjacent singularisation positions {0} and {1}")]
    AdjacentPositions(usize, usize),

    #[error("contraction plan must be strictly increasing and start at an index >= 0")]
    BadPlan,
    #[error("not contractable: Q[{0},{1}] vanishes")]
    NotContractable(i64, i64),

    #[error("{0} outside the domain of the map")]
    OutOfDomain(String),
    #[error("orbit reached 0")]
    ZeroInput,

    #[error("density is singular at the origin")]
    SingularAtOrigin,

    #[error("orbit did not enter the region within {0} steps")]
    CapExceeded(u64),
    #[error("membership undecidable on a region boundary")]
    BoundaryUndecidable,
    #[error("backward search exceeded {0} steps")]
    BackwardCapExceeded(u64),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("invalid singularisation area: condition ({0}) fails")]
    InvalidSingularisationArea(char),

    #[error("cfe mismatch at index {0}")]
    MismatchAt(usize),
    #[error("internal: {0}")]
    Internal(String),

    #[error("point lies on an excluded null set")]
    NullSetPoint,
    #[error("point lies on the fixed ray X = 0")]
    FixedRay,
    #[error("region does not satisfy s_R = 1 (found {0})")]
    NotUnitDenominator(String),

    #[error("region measure is not integrable by this method")]
    NonIntegrable,
    #[error("region is not inducible (measure {0})")]
    NotInducible(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
