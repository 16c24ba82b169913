use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a discriminant (must be 0 or 1 mod 4)")]
    NotDiscriminant(i64),

    #[error("unsupported weight {0}: cusp space is not one-dimensional")]
    UnsupportedWeight(i64),

    #[error("unsupported kappa {0}")]
    UnsupportedKappa(i64),

    #[error("kappa + n must be even (kappa = {kappa}, n = {n})")]
    ParityMismatch { kappa: i64, n: i64 },

    #[error("cusp space of Jacobi weight {weight} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        weight: i64,
        found: usize,
        expected: usize,
    },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("half-power exponents of mismatched parity ({0} vs {1})")]
    ParityOfHalfPowers(i64, i64),

    #[error("residual half-exponent {exponent} at p = {p} is not integral")]
    NonIntegralExponent { p: u64, exponent: i64 },

    #[error("Siegel polynomial at p = {p}: {msg}")]
    SiegelSeries { p: u64, msg: String },

    #[error("local density at p = {p} did not stabilise up to depth {depth}")]
    NoStabilization { p: u64, depth: u32 },

    #[error("enumeration of {candidates} candidates exceeds the feasibility guard")]
    Infeasible { candidates: u128 },

    #[error("coefficient index {index} exceeds table bound {bound}")]
    OutOfBound { index: u64, bound: u64 },

    #[error("theta count needs vectors of norm {needed}, enumeration bound is {bound}")]
    NormBound { needed: i64, bound: i64 },

    #[error("at T = {gram}: {source}")]
    AtForm {
        gram: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Invalid(String),
}
