use alloc::string::String;

/// Failure modes shared by every layer of the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("integral diverges: {0}")]
    ConvergenceDomain(String),
    #[error("quadrature did not converge after {refinements} refinements (last difference {difference:e})")]
    NonConvergence { refinements: u32, difference: f64 },
    #[error("decay rate must be positive, got {0}")]
    InvalidDecay(f64),
    #[error("endpoint exponents must exceed -1, got ({0}, {1})")]
    InvalidExponent(f64, f64),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("{0} points exceed the exact enumeration limit of {max}", max = crate::subsets::MAX_POINTS)]
    SubsetBlowup(usize),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("imaginary residual {residual:e} exceeds tolerance for value {value:e}")]
    ImaginaryResidual { value: f64, residual: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(alloc::format!($($arg)*)) };
}
pub(crate) use domain;
