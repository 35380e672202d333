//! Elastic obstacle scattering in three dimensions: modal transparent boundary
//! operators, a spectral forward solver for rigid obstacles, shape
//! derivatives, and a multi-frequency shape reconstruction.

pub mod derivative;
pub mod error;
pub mod forward;
pub mod geometry;
pub mod inverse;
pub mod modal;
pub mod specfun;
pub mod vec3;

pub use error::{Error, Result};
