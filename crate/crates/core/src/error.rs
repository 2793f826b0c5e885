use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {op}: {detail}")]
    Dimension { op: &'static str, detail: String },

    #[error("interpolation failed: {0}")]
    Interpolation(String),

    /// A formula would divide by a factor whose modulus is below the
    /// singularity guard.
    #[error("singular manifold {manifold} in {context}: |factor| = {modulus:e}")]
    Singular {
        context: &'static str,
        manifold: String,
        modulus: f64,
    },

    #[error("coincident spectral parameters lambda_{i} and lambda_{j}")]
    Coincident { i: usize, j: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("lattice length L = {requested} exceeds the interpolation budget (max L = {max})")]
    Budget { requested: usize, max: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
