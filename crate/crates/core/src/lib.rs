//! Quantum description of Cartesian waveguides.
//!
//! Parallel-plate and rectangular guides are described mode by mode: the
//! modal field tables, the gauge potentials in the flux gauge, the surface
//! charges and currents carried by real and virtual electrodes, the
//! generalized flux on each electrode pair, the constants of motion and the
//! second-quantized amplitudes. Every closed form is paired with a numerical
//! route (finite-difference Maxwell residuals, volume quadrature, charge
//! conservation) so the two can be checked against each other.
//!
//! All quantities are SI. Operations are pure functions over immutable
//! values and may be called concurrently.

pub mod boundary;
pub mod constants;
pub mod error;
pub mod fields;
pub mod gauge;
pub mod geometry;
pub mod motion;
pub mod numerics;
pub mod quanta;
pub mod verify;

pub use boundary::{ElectrodeId, FluxField, Reality, SurfaceDensity};
pub use error::{Result, WaveguideError};
pub use fields::{Excitation, FieldSample, GVector, Quadratures, ReferenceFrame};
pub use gauge::{Parity, PotentialSample};
pub use geometry::{DispersionPoint, Family, Geometry, GuideKind, Mode, ModeClass, ModeId};
pub use motion::{ModalCoefficients, MotionConstants};
pub use numerics::{Residual, Vec3};
pub use quanta::QuantumAmplitudes;
