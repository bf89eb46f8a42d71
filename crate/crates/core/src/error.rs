use thiserror::Error;

pub type Result<T, E = CtrwError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CtrwError {
    #[error("non-ergodic regime: rho = {rho} must exceed 2")]
    NonErgodic { rho: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("zero variance: {0}")]
    ZeroVariance(String),

    #[error("sample time {t} lies beyond the simulated horizon {horizon}")]
    BeyondHorizon { t: f64, horizon: f64 },

    #[error("truncated sum tail bound {bound:e} exceeds tolerance {tolerance:e}; try nu_max >= {suggested_nu_max}")]
    Truncation {
        bound: f64,
        tolerance: f64,
        suggested_nu_max: u64,
    },

    #[error("singular denominator 1 - j0 = {gap:e} at s = {s:e}; usable range is s >= {usable_min_s:e}")]
    SingularDenominator {
        s: f64,
        gap: f64,
        usable_min_s: f64,
    },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("slope fit: {0}")]
    Fit(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: timestamp {timestamp} precedes the previous record in the same session")]
    NonMonotonic { line: usize, timestamp: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CtrwError {
    /// True for failures of a numerical method rather than of the caller's input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, CtrwError::Numeric(_))
    }
}
