use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("substitution lands on a pole: factor {0} vanishes")]
    PoleHit(String),
    #[error("substitution produces a factor outside the allowed set: {0}")]
    NotRepresentable(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("expected a univariate function of alpha")]
    NotUnivariate,
    #[error("division by a polynomial that is not a product of allowed factors")]
    NotInvertible,
    #[error("division by (z - w) is not exact")]
    NoncancellingSingularity,
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecursionError {
    #[error("missing dependency omega_{n}^[{k}]")]
    MissingDependency { n: usize, k: usize },
    #[error("non-cancelling singularity while computing omega_{n}^[{k}] ({term} term)")]
    NoncancellingSingularity { n: usize, k: usize, term: &'static str },
    #[error("n = {0} exceeds the supported number of variables")]
    TooManyVariables(usize),
    #[error("invalid request: {0}")]
    Invalid(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeviationError {
    #[error("integrand of order {0} does not decay fast enough at infinity")]
    Divergent(usize),
    #[error("a simple pole survives in omega_1^[{0}]: the antiderivative would contain a logarithm")]
    LogTermPresent(usize),
    #[error("a = {a} is not to the right of the edge 2*sqrt(t) = {edge}")]
    OutsideRegime { a: f64, edge: f64 },
    #[error("order {requested} exceeds the available order {available}")]
    OrderTooHigh { requested: usize, available: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Recursion(#[from] RecursionError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TailError {
    #[error("omega_1^[{k}] has pole order {found} at alpha = 1, expected {expected}")]
    WrongPoleOrder { k: usize, found: i64, expected: i64 },
    #[error("leading coefficient of omega_1^[{0}] has a non-dyadic denominator")]
    NonDyadicDenominator(usize),
    #[error("residual power u^{power} with nonzero coefficient {coeff}")]
    ResidualNPower { power: i64, coeff: String },
    #[error("s must be positive")]
    NonPositiveS,
    #[error("order {requested} exceeds the available order {available}")]
    OrderTooHigh { requested: usize, available: usize },
    #[error("breve entries must be contiguous from m = 1")]
    NonContiguous,
    #[error(transparent)]
    Deviation(#[from] DeviationError),
    #[error(transparent)]
    Recursion(#[from] RecursionError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("unsupported beta {0}: only 1, 2 and 4 have a Painleve representation")]
    UnsupportedBeta(String),
    #[error("mismatch at {what}: expected {expected}, found {actual}")]
    Mismatch {
        what: String,
        expected: String,
        actual: String,
    },
    #[error(transparent)]
    Tail(#[from] TailError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum McError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("predicted number of hits {expected_hits:.1} is below 100; increase samples or lower a")]
    RegimeTooRare { expected_hits: f64 },
    #[error(transparent)]
    Deviation(#[from] DeviationError),
}
