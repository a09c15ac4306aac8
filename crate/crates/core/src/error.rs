use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("register of {0} sites exceeds the supported maximum of {max}", max = crate::hilbert::MAX_SITES)]
    TooManySites(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("site index {site} out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("empty scan grid: {0}")]
    EmptyGrid(&'static str),

    #[error("fidelity threshold {threshold} not reached for t <= {horizon}")]
    ThresholdNotReached { threshold: f64, horizon: f64 },

    #[error("no optimal-cloner bound known for N={n}, M={m}, d={d}")]
    UnsupportedBound { n: usize, m: usize, d: usize },

    #[error("integrator step size underflow at t = {t_reached}")]
    StepSizeUnderflow { t_reached: f64 },

    #[error("Redfield tensor dimension {0} exceeds the supported maximum of 64")]
    RedfieldTooLarge(usize),

    #[error("unsupported gate for compilation: {0}")]
    UnsupportedGate(String),

    #[error("no network/gates crossover in the supplied bath-strength grid")]
    NoCrossover,

    #[error("optimizer failed: {0}")]
    Optimizer(String),
}
