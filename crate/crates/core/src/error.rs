use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sigma undetermined at a=0")]
    SigmaUndetermined,

    #[error("sigma inconsistent with gamma = a*sigma + (1-a)*beta (residual {residual:e})")]
    SigmaInconsistent { residual: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("kernel singular point (a, z) = (1, 0)")]
    KernelSingularPoint,

    #[error("use n=1 direct kernel (no sphere reduction in dimension 1)")]
    DimensionOneKernel,

    #[error("Riesz exponent out of range: need 0 < gamma < n, got gamma={gamma}, n={n}")]
    RieszExponentOutOfRange { gamma: f64, n: u32 },

    #[error("asymptotic regime not reached: slope {slope}, fit residual {residual}")]
    AsymptoticRegimeNotReached { slope: f64, residual: f64 },

    #[error("truncation-dominated result: {0}")]
    TruncationDominated(String),

    #[error("exponent relation violated: {0}")]
    ExponentRelation(String),

    #[error("negative samples where nonnegative input is required")]
    NegativeSamples,

    #[error("Hardy step requires alpha*p != -1 (got alpha*p = {0})")]
    HardyProviso(f64),

    #[error("quadrature budget exhausted (estimated error {0:e})")]
    QuadratureBudget(f64),

    #[error("parameters outside the admissible region: {0}")]
    Inadmissible(String),

    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error("nothing to scan")]
    NothingToScan,

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
