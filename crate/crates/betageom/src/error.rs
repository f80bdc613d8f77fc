use betageom_core::Error as CoreError;

/// Failures of a CLI run, each mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
        }
    }

    /// Short machine-readable tag for the error object.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Domain(e) => match e {
                CoreError::Domain(_) => "domain",
                CoreError::ConvergenceDomain(_) => "convergence_domain",
                CoreError::NonConvergence { .. } => "non_convergence",
                CoreError::InvalidDecay(_) => "invalid_decay",
                CoreError::InvalidExponent(..) => "invalid_exponent",
                CoreError::Index(_) => "index",
                CoreError::SubsetBlowup(_) => "subset_blowup",
                CoreError::DegenerateInput(_) => "degenerate_input",
                CoreError::ImaginaryResidual { .. } => "imaginary_residual",
            },
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub type CliResult<T> = Result<T, CliError>;
