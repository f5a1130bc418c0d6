use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Operand dimensions do not fit the requested operation.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A matrix failed a Hermiticity check.
    #[error("matrix is not Hermitian: {0}")]
    NotHermitian(String),

    /// The Jacobi eigensolver ran out of sweeps.
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    /// Input lies outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument is out of range (moment counts, Hankel orders, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A state, map, or file violates a structural invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// A numerical guard tripped: a quantity fell outside its rounding budget.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics themselves, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::Numerical(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
