use thiserror::Error;

/// Errors raised while building meshes, discretizations and solving.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh resolution n = {n}: {reason}")]
    InvalidResolution { n: usize, reason: &'static str },

    #[error("mesh is not conforming to the fracture network: {0}")]
    Conformity(String),

    #[error("mesh quality: {0}")]
    MeshQuality(String),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: String,
        value: f64,
        reason: &'static str,
    },

    #[error("point {point:?} is outside of region {region}")]
    OutsideRegion { point: [f64; 3], region: String },

    #[error("non-planar face {face}: vertex deviation {deviation:.3e}")]
    NonPlanarFace { face: usize, deviation: f64 },

    #[error("zero pivot in row {row}")]
    ZeroPivot { row: usize },

    #[error("singular cell block for cell {cell}")]
    SingularCell { cell: usize },

    #[error(
        "GMRes did not converge after {iterations} iterations (relative residual {residual:.3e})"
    )]
    NotConverged { iterations: usize, residual: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
