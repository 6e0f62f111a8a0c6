//! Numerical laboratory for directional Lelong–Demailly masses of model
//! positive currents.

pub mod calibration;
pub mod currents;
pub mod error;
pub mod fields;
pub mod forms;
pub mod lelong;
pub mod quadrature;
pub mod scenario;
pub mod weights;

pub use error::{LelongError, Result};
