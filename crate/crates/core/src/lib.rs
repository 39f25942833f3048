//! Simulation engine for a hybrid optomechanical cavity + membrane +
//! microwave LC-circuit system: mean-field dynamics, multistable steady
//! states, linearized fluctuations and the Gaussian observables derived from
//! them (logarithmic negativity, phonon number, squeezing).

pub mod error;
pub mod fluct;
pub mod gaussian;
pub mod meanfield;
pub mod ode;
pub mod params;
pub mod presets;
pub mod sweep;

pub use error::{Error, Result};
