use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input does not match the schema: {0}")]
    Schema(String),
    #[error("zero {0} does not lie in the open upper half-plane")]
    NonUpperHalfZero(String),
    #[error("evaluation point hits a pole at {0}")]
    PoleHit(String),
    #[error("generator tail bound {bound:.3e} exceeds tolerance {tol:.3e}")]
    TruncationNotConverged { bound: f64, tol: f64 },
    #[error("the inner function is constant")]
    ConstantMif,
    #[error("measure has no atoms and no mass at infinity")]
    EmptyMeasure,
    #[error("point {0} is an atom of the measure")]
    OnSupport(f64),
    #[error("recovery with a point mass at infinity is not supported")]
    InfiniteMassUnsupported,
    #[error("rational inner function has degree zero")]
    ZeroDegree,
    #[error("symbols share the zero {0}; cancel common zeros first")]
    SharedZero(String),
    #[error("quadrature failed: {0}")]
    QuadratureFail(String),
    #[error("tail is not Poisson-summable (fitted exponent {exponent:.3})")]
    TailDivergent { exponent: f64 },
    #[error("tail has not settled: {0}")]
    TailNotSettled(String),
    #[error("test not applicable: {0}")]
    NotApplicable(String),
    #[error("power-law tail fit rejected (R^2 = {r2:.4})")]
    TailModelUnfit { r2: f64 },
    #[error("numerical underflow at y = {y:.3e}; lower ymax")]
    NumericalUnderflow { y: f64 },
    #[error("window exhausted: {0}")]
    WindowExhausted(String),
    #[error("boundary behaviour uncertain: {0}")]
    BoundaryUncertain(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("E vanishes at {0}")]
    ZeroOfE(String),
    #[error("function is not increasing near x = {x}")]
    NotMonotone { x: f64 },
    #[error("principal value unstable across excision radii (spread {spread:.3e})")]
    PvNotSettled { spread: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
