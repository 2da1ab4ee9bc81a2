use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("horizon mismatch: {0} vs {1}")]
    HorizonMismatch(f64, f64),

    #[error("set resolution {resolution} is not finer than cell width {cell_width}")]
    ResolutionTooCoarse { resolution: f64, cell_width: f64 },

    #[error("box size {scale} is not above the sample resolution {resolution}")]
    ScaleBelowResolution { scale: f64, resolution: f64 },

    #[error("point {index} carries no structure flag")]
    MissingFlags { index: usize },

    #[error("incompatible grids: {0}")]
    GridMismatch(String),

    #[error("supports differ: {0}")]
    SupportMismatch(String),

    #[error("reference law has no mass at the empty pattern")]
    NoAtom,

    #[error("start point {0} is not a resolved element of the countable set")]
    StartNotInSet(f64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("count overflow while forming a product law")]
    CountOverflow,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
