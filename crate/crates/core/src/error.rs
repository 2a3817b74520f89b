use alloc::boxed::Box;
use alloc::string::String;

use crate::qgan::TrainHistory;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("value {value} outside representable range [{lo}, {hi}]")]
    Range { value: f64, lo: f64, hi: f64 },

    #[error("{context}: coefficient {value} outside [{lo}, {hi}]")]
    CoefficientRange {
        context: String,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("circuit error: {0}")]
    Circuit(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("training diverged at iteration {iteration}")]
    Training {
        iteration: usize,
        history: Box<TrainHistory>,
    },
}

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
