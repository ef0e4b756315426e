use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid annulus: need 0 < r_inner < r_outer, got ({r_inner}, {r_outer})")]
    InvalidAnnulus { r_inner: f64, r_outer: f64 },

    #[error("invalid rectangle: length must be positive and finite, got {0}")]
    InvalidRectangle(f64),

    #[error("regime mismatch: {0}")]
    Regime(String),

    #[error("characteristic identity deviates by {deviation:e} (relative)")]
    NonConstant { c: f64, deviation: f64 },

    #[error("argument {value} outside domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("profile is not invertible: {0}")]
    NotInvertible(String),

    #[error("quadrature did not reach tolerance: estimate {estimate}, error {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("degenerate cell at ({i}, {j}): Jacobian {jacobian:e}")]
    DegenerateCell { i: usize, j: usize, jacobian: f64 },

    #[error("perturbation rejected after {attempts} amplitude halvings (seed {seed})")]
    RejectedPerturbation { seed: u64, attempts: u32 },

    #[error("slope saturated: α/λ(x) = {target} ≥ sup G = {sup}")]
    SlopeSaturated { target: f64, sup: f64 },

    #[error("profile residual {0:e} exceeds the 1e-10 bound")]
    Residual(f64),

    #[error("improper integral for the critical profile diverges")]
    DivergentProfile,

    #[error("critical length inconclusive after {shells} shells (ratio {ratio}, partial {partial})")]
    InconclusiveConvergence { shells: usize, ratio: f64, partial: f64 },

    #[error("plateau placement failed: {0}")]
    PlateauPlacement(String),

    #[error("seam mismatch of {0:e} between y = 0 and y = 1")]
    SeamMismatch(f64),

    #[error("root bracket not found: {0}")]
    Bracket(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
