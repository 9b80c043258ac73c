//! Error taxonomy shared by all solver and simulation layers.
//!
//! The variants are coarse on purpose: callers (in particular the CLI) map
//! them onto distinct exit codes, so what matters is the *class* of failure,
//! not a deep structured payload.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument left the domain on which a quantity is defined
    /// (evaluation outside a potential's trusted interval, a bracket that
    /// does not contain a root, initial data outside the hyperbolic region).
    #[error("domain error: {0}")]
    Domain(String),

    /// A state where `Φ″ ≤ 0` was reached by an operation that requires
    /// strict convexity (sound speeds, wave curves, lattice runs).
    #[error("convexity error: {0}")]
    Convexity(String),

    /// An iteration failed to converge or produced an inconsistent result
    /// (root finders, continuation, residual checks).
    #[error("numerical error: {0}")]
    Numerics(String),

    /// The API was called with structurally invalid arguments
    /// (unsupported derivative order, empty window, bad mode).
    #[error("usage error: {0}")]
    Usage(String),

    /// A run configuration could not be interpreted.
    #[error("config error: {0}")]
    Config(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
