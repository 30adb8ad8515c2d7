use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("potential is not real-valued (conjugate symmetry violated)")]
    NonRealPotential,

    #[error("basis {basis} requires horizon t = 1, got {horizon}")]
    HorizonUnsupported { basis: &'static str, horizon: f64 },

    #[error("Dyson order n = {requested} exceeds the configured cap {cap}")]
    Capacity { requested: usize, cap: usize },

    #[error("t = {t} is beyond the convergence threshold t* = {t_star}")]
    BeyondThreshold { t: f64, t_star: f64 },

    #[error("unstable step: dt = {dt} exceeds the stability bound {bound}")]
    UnstableStep { dt: f64, bound: f64 },

    #[error("potential support {support} exceeds grid Nyquist frequency {nyquist}")]
    NyquistExceeded { support: f64, nyquist: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
