//! Detector response, X-state entanglement and acceleration sweeps for
//! Unruh-DeWitt detectors in a cavity.

mod error;
pub mod gme;
pub mod polylog;
pub mod quadrature;
pub mod response;
pub mod scenarios;
pub mod sweep;

pub use error::{Error, Result};
pub use num_complex::Complex64;
