use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("generator has no closed form off its sample grid")]
    UnsupportedPoint,

    #[error("Dirichlet line at sigma = {sigma} does not lie right of the declared abscissa {abscissa}")]
    DivergentSeries { sigma: f64, abscissa: f64 },

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid step {step} aliases frequency {freq} (step * |freq| must not exceed {limit})")]
    Aliasing { step: f64, freq: f64, limit: f64 },

    #[error("window of length {len} at shift {shift} leaves the rendered range")]
    WindowOutOfRange { len: f64, shift: f64 },

    #[error("shift grid is empty")]
    EmptyGrid,

    #[error("signal has {len} samples, at least {min} required")]
    TooShort { len: usize, min: usize },

    #[error("kernel spans {kernel} samples but the signal has only {signal}")]
    KernelTooWide { kernel: usize, signal: usize },

    #[error("gap half-width {delta} is not below the Nyquist frequency {nyquist}")]
    GapTooWide { delta: f64, nyquist: f64 },

    #[error("gap half-width {delta} is narrower than the resolution floor {floor}")]
    GapTooNarrow { delta: f64, floor: f64 },

    #[error("coefficient stream has {available} terms but x = {x} needs {needed}")]
    InsufficientCoefficients { x: f64, needed: usize, available: usize },

    #[error("Laplace tail at x = {x} is not controlled: bound {bound} exceeds {allowed}")]
    TailNotControlled { x: f64, bound: f64, allowed: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("kernel transform falls to {min_abs} (floor {floor})")]
    KernelVanishes { min_abs: f64, floor: f64 },

    #[error("no grid point satisfies |x| >= {tail_start}")]
    RangeTooShort { tail_start: f64 },

    #[error("subspace is not translation invariant (residual {residual})")]
    NotInvariant { residual: f64 },

    #[error("functional is not a mean: {0}")]
    NotAMean(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
