//! Probabilistic amplitude shaping: layered rate planning, a constant
//! composition distribution matcher, and frame assembly onto constellations
//! that decompose as `q` rotations of a fundamental set.

mod ccdm;
mod composition;
mod frame;
mod map;
pub mod plan;

use thiserror::Error;

use crate::constellation::ConstellationError;

pub use ccdm::{ccdm_decode, ccdm_encode, input_bits, sequence_count};
pub use composition::{kl_bits, quantize_composition, Composition};
pub use frame::{
    parse_frame, pas_deframe, pas_deframe_points, pas_frame, plan_frame, plan_frame_with, Frame,
    FramePlan, FrameRecord, FRAME_MAGIC, FRAME_Q,
};
pub use map::{pas_demap_hard, pas_map, RegionMap};
pub use plan::{
    compatibility_residual, max_entropy, min_code_rate, plan_rates, split_for, FrameLengths,
    Layering, PasPlan,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PasError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("incompatible rates: {0}")]
    IncompatibleRates(String),
    #[error("length mismatch: {0}")]
    Length(String),
    #[error("composition violated: {0}")]
    Composition(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("malformed frame: {0}")]
    Format(String),
    #[error(transparent)]
    Constellation(#[from] ConstellationError),
}

pub type Result<T> = std::result::Result<T, PasError>;
