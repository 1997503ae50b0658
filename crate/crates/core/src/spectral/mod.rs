//! Periodic grids, transforms and radial Fourier multipliers.
//!
//! Sample `j` sits at `x_j = -L/2 + jL/N`; the forward transform carries
//! the `1/N^n` factor, so spectra hold the Fourier-series coefficients of
//! the band-limited interpolant.

pub mod dyadic;
mod fft;
mod field;
mod grid;
pub mod snapshot;
mod symbol;

pub use dyadic::{chi, dyadic_projection, dyadic_scales, rho, rho_lambda};
pub use fft::FftNd;
pub use field::{Field, Spectrum};
pub use grid::{box_length_for_tail, GridDescriptor, GridSpec};
pub use symbol::{
    apply_multiplier, dispersion_symbol, lbeta_apply, mean_projections, power_symbol, resolve_mean,
    MultiplierSymbol,
};

/// Shorthand for [`GridSpec::new`].
pub fn make_grid(dim: usize, points: usize, length: f64) -> crate::Result<GridSpec> {
    GridSpec::new(dim, points, length)
}
