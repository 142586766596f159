//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures raised by model construction, numerical routines and estimators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("autoregressive roots {0} and {1} are closer than {2:e}")]
    NearMultipleRoots(usize, usize, f64),

    #[error("alpha polynomial order {0} exceeds the supported maximum {1}")]
    OrderTooLarge(usize, usize),

    #[error("both branches of eta have unit modulus (xi = {0})")]
    UnitModulusBranch(String),

    #[error("argument outside the supported domain: {0}")]
    DomainError(String),

    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),

    #[error("spectral density is not strictly positive at omega = {0}")]
    NonPositiveDensity(f64),

    #[error("lag {lag} is not below the series length {n}")]
    LagTooLarge { lag: usize, n: usize },

    #[error("prediction error variance v_{0} = {1:e} is not positive")]
    NonPositiveV(usize, f64),

    #[error("autoregressive polynomial is not causal (reflection coefficient {0} has modulus {1})")]
    NonCausalAR(usize, f64),

    #[error("order m = {m} requires {m} lags but only {available} are available; pass m explicitly")]
    MRequired { m: usize, available: usize },

    #[error("need at least {needed} points in the band, found {found}")]
    InsufficientPoints { needed: usize, found: usize },

    #[error("segment length {segment} exceeds series length {n}")]
    SegmentTooLong { segment: usize, n: usize },

    #[error("circulant embedding is not nonnegative definite: min eigenvalue {min:e}, max {max:e}")]
    EmbeddingFailure { min: f64, max: f64 },

    #[error("stationary state covariance could not be computed: {0}")]
    NonStationaryInit(String),

    #[error("Bessel function K_{nu}({x}) did not converge")]
    BesselFailure { nu: f64, x: f64 },

    #[error("invalid simulation plan: {0}")]
    InvalidPlan(String),

    #[error("invalid series: {0}")]
    InvalidSeries(String),
}

pub type Result<T> = std::result::Result<T, Error>;
