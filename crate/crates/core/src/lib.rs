//! Simulation and variational toolkit for
//! `i u_t + Δu - ε D^{-2β} u + ς|u|²u = 0` on periodic boxes.

pub mod error;
pub mod functionals;
pub mod global_monitor;
pub mod ground_state;
pub mod params;
pub mod propagator;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use params::{beta_star, PhysicsParams, ZeroModePolicy};
pub use spectral::{Field, GridSpec, MultiplierSymbol, Spectrum};
