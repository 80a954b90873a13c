use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("bump radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("non-finite data in {0}")]
    NonFinite(&'static str),
    #[error("invalid radial profile: {0}")]
    BadProfile(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("window [{0}, {1}] is not well ordered")]
    BadWindow(f64, f64),
    #[error("inner family is not constant for s <= 0")]
    NotNormalized,
    #[error("interpolation parameter must satisfy lambda <= -1, got {0}")]
    BadLambda(f64),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("step size underflow at s = {s}, u = ({x}, {y})")]
    StepUnderflow { s: f64, x: f64, y: f64 },
    #[error("no bounded flow lines found")]
    NoBoundedLines,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("empty spectrum")]
    EmptySpectrum,
    #[error("search box must contain the origin and every bump disk")]
    BoxTooSmall,
    #[error("grid_n must be at least 16, got {0}")]
    GridTooCoarse(usize),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadialError {
    #[error("profile construction infeasible: {0}")]
    Infeasible(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Radial(#[from] RadialError),
    #[error("unknown fixture {0}")]
    UnknownFixture(String),
    #[error("forced value: premises are inconsistent with the spectrum")]
    EmptyIntersection,
    #[error("selector does not support this input")]
    Unsupported,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Other(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
