use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field order {p}^{e} exceeds the supported limit of 2^20")]
    TooLarge { p: u64, e: u32 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{r} is not the order of a subfield of GF({q})")]
    BadSubfield { r: u64, q: u64 },
    #[error("operation undefined in characteristic 2")]
    EvenCharacteristic,
    #[error("element has no square root")]
    NonResidue,
    #[error("{m} does not divide {q} - 1")]
    BadOrder { m: u64, q: u64 },
    #[error("element {0:?} is not a valid element of this field")]
    InvalidElement(Vec<u64>),
    #[error("evaluation points contain duplicates")]
    DuplicatePoints,
    #[error("matrix shapes {0}x{1} and {2}x{3} are incompatible")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("expected length {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("extended dual requires v = 1, all q points and 1 <= k <= q - 1")]
    ExtendedDualUnsupported,
    #[error("the Vandermonde system has no nonzero solution over the subfield")]
    NoSubfieldSolution,
    #[error("no scaling makes these points self-dual")]
    NotSelfDualizable,
    #[error("length {0} is odd")]
    OddLength(usize),
    #[error("length {n} exceeds the maximum {max}")]
    LengthTooLong { n: usize, max: u64 },
    #[error("no square-difference set of size {n} exists in GF({q})")]
    NotFound { q: u64, n: usize },
    #[error("search node budget of {0} exhausted")]
    BudgetExhausted(u64),
    #[error("{0} is in the wrong residue class")]
    BadResidueClass(u64),
    #[error("parameter out of range: {0}")]
    RangeError(String),
    #[error("exact MDS check needs {needed} subsets, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("construction certificate violated: {0}")]
    CertificateViolation(String),
    #[error("{0}")]
    Parse(String),
}

impl Error {
    /// True for errors that mean "this construction does not apply here" as
    /// opposed to malformed input.
    pub fn is_construction_failure(&self) -> bool {
        matches!(
            self,
            Error::NotSelfDualizable
                | Error::NoSubfieldSolution
                | Error::NotFound { .. }
                | Error::BudgetExhausted(_)
                | Error::BadResidueClass(_)
                | Error::BadOrder { .. }
                | Error::EvenCharacteristic
                | Error::LengthTooLong { .. }
                | Error::OddLength(_)
                | Error::RangeError(_)
                | Error::BadSubfield { .. }
        )
    }
}
