use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point ({x:.3}, {y:.3}) lies outside the tessellated region")]
    OutOfRegion { x: f64, y: f64 },

    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error("unsupported hypergeometric parameters a={a}, b={b}, c={c}, z={z}")]
    Domain { a: f64, b: f64, c: f64, z: f64 },

    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
