use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("{what} = {value} lies outside the admissible domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: String,
    },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("inner truncation r0 has not been set; run find_r0 first")]
    InnerUnset,

    #[error(
        "truncation certificate failed with M_max = {m_max}: tail bound {tail_bound} does not exceed {target}; increase M_max"
    )]
    Truncation {
        m_max: u32,
        tail_bound: f64,
        target: f64,
    },

    #[error("no r0 below R0 = {r_outer} reaches the threshold {threshold} (best infimum {best}); R is too small")]
    ThresholdUnreachable {
        threshold: f64,
        r_outer: f64,
        best: f64,
    },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("integrator failure: {0}")]
    Integrator(String),

    #[error("eigenvalue count mismatch: expected {expected}, found {found}")]
    CountMismatch { expected: usize, found: usize },

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error("{0} is not an eigenvalue of the complex")]
    NotInSpectrum(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = core::result::Result<T, Error>;
