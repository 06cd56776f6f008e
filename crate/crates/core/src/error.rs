//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the numerical routines.
///
/// Variants mirror the failure modes of the individual modules; the CLI maps
/// any of these to exit code 3 with the variant name in the diagnostic.
#[derive(Debug, Error)]
pub enum KerrError {
    #[error("hilbert dimension {0} too small (need dim >= 2)")]
    Dimension(usize),

    #[error("truncation inadequate: {0}")]
    Truncation(String),

    #[error("odd cat state degenerates numerically at |alpha| = {0:.3e}")]
    DegenerateCat(f64),

    #[error("phase-space grid too coarse: {0}")]
    Grid(String),

    #[error("effective-Hamiltonian order {0} outside 1..=4")]
    Order(usize),

    #[error("integration failed to converge: {0}")]
    Convergence(String),

    #[error("eigensolver failure: {0}")]
    Eigsolver(String),

    #[error("no E=0 well loop exists for these parameters: {0}")]
    NoWell(String),

    #[error("below parametric threshold: |eps2|^2 < (Delta^2 + kappa1^2/4)/4")]
    BelowThreshold,

    #[error("not found: {0}")]
    NotFound(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("tolerance violated: {0}")]
    Tolerance(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("problem size exceeds cap: {0}")]
    Size(String),

    #[error("eigenket phase convention violated: {0}")]
    Convention(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, KerrError>;
