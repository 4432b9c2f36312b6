//! Max-plus (tropical) linear algebra, Shapley operators and mean payoff
//! game solvers, used to compute inner radii of tropical polyhedra and to
//! solve tropical linear regression problems (plain, signed and typed),
//! with an application to inferring hidden preference factors in repeated
//! auctions.

pub mod auction;
pub mod dominions;
pub mod io;
pub mod regression;
pub mod rng;
pub mod shapley;
pub mod solver;
pub mod tropical;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum TropError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("degenerate instance: {0}")]
    Degenerate(String),
    #[error("solver did not converge within {iterations} iterations (bounds [{lower}, {upper}])")]
    NonConvergence {
        iterations: usize,
        lower: f64,
        upper: f64,
    },
    #[error("certificate verification failed: {0}")]
    Certificate(String),
    #[error("positive cycle through states {0:?}")]
    PositiveCycle(Vec<usize>),
    #[error("enumeration budget exceeded ({0} policies)")]
    BudgetExceeded(u128),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, TropError>;
