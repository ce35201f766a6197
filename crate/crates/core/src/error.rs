use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{k} exceeds the maximum of {max}")]
    FieldTooLarge { p: u64, k: u32, max: u64 },
    #[error("{0:?} is not a prime power")]
    NotPrimePower(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid field element code {code} for a field of order {order}")]
    InvalidFieldElement { code: u32, order: u32 },

    #[error("malformed group spec {spec:?}: {reason}")]
    MalformedSpec { spec: String, reason: String },
    #[error("invalid Cayley table: {0}")]
    InvalidTable(String),
    #[error("group order {order} exceeds the limit of {max}")]
    GroupTooLarge { order: usize, max: usize },
    #[error("group is not abelian")]
    NotAbelian,
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("lattice budget exceeded: |G| = {order} > {max}")]
    LatticeBudget { order: usize, max: usize },

    #[error("algebra element has {got} coefficients, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("enumeration budget exceeded: {needed} points > {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("{0}")]
    Precondition(String),
    #[error("element is not in the unit group")]
    NotInGroup,
    #[error("implementation fault: {0}")]
    Fault(String),

    #[error("unknown group element label {0:?}")]
    UnknownLabel(String),
    #[error("cannot parse field element {0:?}")]
    BadFieldLiteral(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("JSON error: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
