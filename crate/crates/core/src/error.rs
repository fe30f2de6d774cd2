use thiserror::Error;

use crate::model::CylinderPoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),

    /// A point left the domain of the map it was fed to.
    #[error("outside the domain of {map} at (x={x}, y={y})")]
    Domain { map: &'static str, x: f64, y: f64 },

    /// The orbit left the return domain: `y + λΦ₂(x, y) <= 0`.
    #[error("orbit escaped the return domain at (x={}, y={})", .0.x, .0.y)]
    Escape(CylinderPoint),

    #[error("non-Morse configuration: degenerate critical point near x={x} (second derivative {second_derivative:e})")]
    NonMorse { x: f64, second_derivative: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error stems from bad input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::InvalidPerturbation(_)
                | Error::Config(_)
                | Error::Precondition(_)
        )
    }
}
