use thiserror::Error;

use crate::boundary::ElectrodeId;
use crate::fields::ReferenceFrame;

pub type Result<T> = std::result::Result<T, WaveguideError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WaveguideError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid mode: {0}")]
    InvalidMode(String),

    #[error("reference frame {frame:?} is not defined for {mode}")]
    InvalidFrame { frame: ReferenceFrame, mode: String },

    #[error("point ({x}, {y}) lies outside the guide cross-section")]
    OutOfCrossSection { x: f64, y: f64 },

    #[error("electrode {electrode:?} is not defined for {mode}")]
    UndefinedElectrode {
        electrode: ElectrodeId,
        mode: String,
    },

    #[error("finite-difference stencil does not fit inside the domain at {point:?}")]
    StencilOutOfBounds { point: [f64; 3] },

    #[error("quadrature grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("longitudinal wavevector must be nonzero")]
    DegenerateWavevector,

    #[error("scaling factor must be nonzero")]
    DegenerateScale,

    #[error("{0} has no residual gauge freedom")]
    GaugeFullyFixed(String),
}
