use alloc::string::String;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite input at index {index}: {value}")]
    NonFinite { index: usize, value: f64 },

    #[error("value {value} outside domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("linear pieces do not meet at {center}: gap {gap:e}")]
    Discontinuous { center: f64, gap: f64 },

    #[error("transition intervals overlap: 2*epsilon = {width} but breakpoint gap is {gap}")]
    OverlappingTransitions { width: f64, gap: f64 },

    #[error("no root in bracket [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },

    #[error("non-finite value at layer {layer}")]
    NumericalOverflow { layer: usize },

    #[error("correlation saturated at layer {layer}: 1 - c = {value}")]
    SaturatedCorrelation { layer: usize, value: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("training diverged at epoch {epoch}")]
    Diverged { epoch: usize },

    #[error("IDX magic mismatch: expected {expected:#010x}, found {found:#010x}")]
    IdxMagic { expected: u32, found: u32 },

    #[error("IDX data truncated: need {needed} bytes, have {available}")]
    IdxTruncated { needed: usize, available: usize },

    #[error("IDX count mismatch: {images} images but {labels} labels")]
    IdxCount { images: usize, labels: usize },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
