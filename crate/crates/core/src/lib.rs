//! Numerics for the noncommutative 2-torus generated by a smooth circle
//! diffeomorphism conjugate to an irrational rotation.

pub mod dynamics;
pub mod config;
pub mod dirac;
pub mod error;
pub mod fourier;
pub mod gns;
pub mod modular;
pub mod spectral;
pub mod summation;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};
pub use spectral::C64;
