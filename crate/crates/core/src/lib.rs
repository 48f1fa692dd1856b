//! Nonlinear Fourier transform for the focusing nonlinear Schrödinger
//! equation, built on spectral parameter power series (SPPS) for the
//! Zakharov–Shabat system.

pub mod direct;
pub mod error;
pub mod evolution;
pub mod grid_quad;
pub mod inverse;
pub mod io;
mod linalg;
pub mod oracles;
pub mod potentials;
pub mod roots;
pub mod scattering;
pub mod spps;
pub mod validation;
pub mod zs_base;

pub use error::{Error, Result};
