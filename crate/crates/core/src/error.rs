use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("element index {index} out of range 1..={n_elements}")]
    ElementIndex { index: usize, n_elements: usize },

    #[error("index {index} out of range for {what} (len {len})")]
    Index {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("source at r = {r} m lies inside the array aperture (half-length {half_aperture} m)")]
    InsideAperture { r: f64, half_aperture: f64 },

    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("x = {x} is at or left of the pole at x = 1")]
    Pole { x: f64 },

    /// The SINR ceiling alpha_noma / alpha_legacy does not exceed the rate
    /// threshold, so the NOMA user is in outage for any channel.
    #[error("power split cannot reach the target rate (alpha_N - alpha_L * eps1 = {margin})")]
    AlwaysOutage { margin: f64 },

    #[error("outage boundary quartic has {count} positive roots, expected 2")]
    NoPositiveRoots { count: usize, roots: Vec<f64> },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
