use thiserror::Error;

#[derive(Debug, Error)]
pub enum AudError {
    #[error("invalid rate {name} = {value}: must be positive and finite")]
    InvalidRate { name: &'static str, value: f64 },

    #[error("unknown law name {0:?}")]
    UnknownLaw(String),

    #[error("MGF diverges: s = {s} is not below mu = {mu}")]
    MgfDomain { s: f64, mu: f64 },

    #[error("unstable queue: rho = lambda/mu = {rho} (lambda = {lambda}, mu = {mu}) must lie in (1e-6, 0.999)")]
    Unstable { rho: f64, lambda: f64, mu: f64 },

    #[error("operation requires {expected} decisions, spec has {actual}")]
    WrongDecisionLaw { expected: &'static str, actual: &'static str },

    #[error("analytic periodic-decision formulas need integer m0 = nu/mu, got {m0}")]
    NonIntegerM0 { m0: f64 },

    #[error("analytic formulas require Poisson arrivals, got {0}")]
    NonPoissonArrivals(String),

    #[error("numerical singularity: denominator {denom:e} near zero at s = {s}")]
    NumericalSingularity { s: f64, denom: f64 },

    #[error("E[Y] must be positive, got {0}")]
    NonPositiveMeanY(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}
