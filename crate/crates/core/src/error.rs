use thiserror::Error;

/// Errors raised across the library.
///
/// Every variant maps onto one of the process exit codes used by the
/// command-line front end through [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("radius {0} is outside the domain r > 0")]
    Domain(f64),

    #[error("no interaction: impact parameter {rho} does not enter the support")]
    NoInteraction { rho: f64 },

    #[error("trapped or singular orbit: {0}")]
    TrappedOrSingular(String),

    #[error("integration stiff at t = {time}: {message}")]
    IntegrationStiff { time: f64, message: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("theta = {0} has no preimage on any monotonicity branch")]
    NoPreimage(f64),

    #[error("tree count overflows u64 for j = {j}, n = {n}")]
    CountOverflow { j: usize, n: usize },

    /// A parameter point violates a half-space or separation constraint.
    #[error("parameter point rejected: {0}")]
    Rejected(String),

    #[error("sample budget exhausted: {0}")]
    BudgetExhausted(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Exit code: 2 configuration, 3 numerical failure, 4 budget exhausted, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Config(_) | Error::Domain(_) | Error::Precondition(_) | Error::CountOverflow { .. } | Error::Rejected(_) => 2,
            Error::TrappedOrSingular(_) | Error::IntegrationStiff { .. } | Error::Numerical(_) | Error::NoInteraction { .. } | Error::NoPreimage(_) => 3,
            Error::BudgetExhausted(_) => 4,
            Error::Io(_) => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
