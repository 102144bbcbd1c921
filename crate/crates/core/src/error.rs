use thiserror::Error;

/// Rejections raised while validating a `(s, D, n)` triple.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("{name} must be a positive integer (got {value})")]
    NonPositive { name: &'static str, value: i64 },
    #[error("s must be odd (got s = {s})")]
    EvenS { s: i64 },
    #[error("s >= 3D violated (s = {s}, 3D = {three_d})")]
    SBelowThreeD { s: i64, three_d: i64 },
    #[error("D*n must be even (D = {d}, n = {n})")]
    OddDn { d: i64, n: i64 },
}

impl ParamError {
    /// Stable machine-readable code for each rejection.
    pub fn code(&self) -> &'static str {
        match self {
            ParamError::NonPositive { .. } => "non_positive",
            ParamError::EvenS { .. } => "s_even",
            ParamError::SBelowThreeD { .. } => "s_below_3d",
            ParamError::OddDn { .. } => "dn_odd",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("p-adic valuation of zero is undefined")]
    ZeroValuation,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("series has zero constant term and cannot be inverted")]
    NonInvertibleSeries,
    #[error("R_n has a pole at t = {0}")]
    Pole(String),
    #[error("alpha = {0} is not in (1/D)Z")]
    NotInLattice(String),
    #[error("coefficient rho_{i} = {value} should vanish for even i")]
    EvenRhoNonzero { i: u32, value: String },
    #[error("sum of residues a_(1,k) is {0}, expected 0")]
    ResidueSumNonzero(String),
    #[error("Hurwitz zeta requires i >= 2 (got {0})")]
    DivergentZeta(u32),
    #[error("alpha = {0} must lie in (0, 1]")]
    AlphaOutOfRange(String),
    #[error("j = {j} must lie in 1..={d}")]
    ShiftOutOfRange { j: u32, d: u32 },
    #[error("requested precision needs about {terms:.3e} series terms (limit {limit})")]
    InfeasiblePrecision { terms: f64, limit: u64 },
    #[error("cannot take the logarithm of a value not certified positive")]
    NonPositiveLog,
    #[error("exponential argument too large")]
    ExpOverflow,
    #[error("invalid Vandermonde input: {0}")]
    Vandermonde(String),
    #[error("invalid elimination indices: {0}")]
    Indices(String),
    #[error("{d} does not divide D = {big_d}")]
    NotDivisor { d: u64, big_d: u64 },
    #[error("epsilon must lie strictly between 0 and 1/3 (got {0})")]
    EpsilonOutOfRange(String),
    #[error("plan does not match the linear form parameters: {0}")]
    PlanMismatch(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// Whether the error stems from the request itself rather than from a failed check.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Params(_)
                | Error::ShiftOutOfRange { .. }
                | Error::InfeasiblePrecision { .. }
                | Error::Indices(_)
                | Error::NotDivisor { .. }
                | Error::EpsilonOutOfRange(_)
                | Error::PlanMismatch(_)
                | Error::Parse(_)
                | Error::DivergentZeta(_)
                | Error::AlphaOutOfRange(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
