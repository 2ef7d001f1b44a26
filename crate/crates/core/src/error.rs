use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Gamma pole at argument {0}")]
    Pole(f64),
    #[error("cannot add series on different ladders (offsets {0} and {1})")]
    IncompatibleLadder(f64, f64),
    #[error("truncation order exhausted: need {needed}, have {have}")]
    OrderExhausted { needed: usize, have: usize },
    #[error("indeterminate jet quotient: denominator vanishes but numerator value {0} does not")]
    Indeterminate(f64),
    #[error("non-integrable endpoint exponent {0}")]
    NonIntegrable(f64),
    #[error("index j = {j} out of range 0..={max}")]
    IndexOutOfRange { j: usize, max: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("coefficient of rho^{exponent} failed to cancel (|c| = {magnitude:e})")]
    DivergingCoefficient { exponent: f64, magnitude: f64 },
    #[error("Frobenius resonance at order {0}")]
    Resonance(f64),
    #[error("matching system is ill-conditioned (cond = {0:e})")]
    MatchingSingular(f64),
    #[error("function vanishes identically")]
    ZeroFunction,
    #[error("zonal expansion tail {tail:e} still above tolerance at degree {degree}")]
    TruncationInsufficient { degree: usize, tail: f64 },
    #[error("shifted order {0} outside (0, n/2)")]
    ShiftedOrderOutOfRange(f64),
    #[error("series composition requires an inner series with positive leading exponent")]
    Composition,
    #[error("ODE integration failed: {0}")]
    Integration(String),
}

pub type Result<T> = std::result::Result<T, Error>;
