use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameters (alpha={alpha}, rho={rho}) are not admissible")]
    Admissibility { alpha: f64, rho: f64 },

    #[error("(alpha={alpha}, rho={rho}) describes a subordinator; the Wiener-Hopf factorization is trivial")]
    Subordinator { alpha: f64, rho: f64 },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("{what} did not converge after {iterations} iterations")]
    Convergence {
        what: &'static str,
        iterations: usize,
    },

    /// The argument sits on (or within tolerance of) a zero of the Barnes double gamma
    /// function, indexed as `-(m*tau + n)`.
    #[error("argument lies on the zero lattice of G(z; tau) at (m={m}, n={n})")]
    LatticeZero { m: i64, n: i64 },

    /// A pole of the evaluated function. `residue` is attached when it could be computed.
    #[error("pole at {location}")]
    Pole {
        location: Complex64,
        residue: Option<Complex64>,
    },

    #[error("argument lies on the branch cut arg(z) = +-pi")]
    BranchCut,

    #[error(
        "small denominator at k={k} (|sin| = {size:e}); alpha is too close to a rational number"
    )]
    SmallDenominator { k: usize, size: f64 },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("estimated error {achieved:e} exceeds requested tolerance {requested:e}")]
    Accuracy { achieved: f64, requested: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
