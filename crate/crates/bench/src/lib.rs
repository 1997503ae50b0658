//! Fixtures shared by the benchmarks.

use convnls_core::{Complex64, Field, GridSpec, PhysicsParams};

/// Gaussian times a plane wave, so both real and imaginary parts are busy.
pub fn packet(dim: usize, points: usize, length: f64) -> Field {
    let grid = GridSpec::new(dim, points, length).expect("power-of-two grid");
    Field::from_fn(grid, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        Complex64::from_polar((-r2).exp(), 2.0 * x[0])
    })
    .expect("finite samples")
}

pub fn params() -> PhysicsParams {
    PhysicsParams::new(0.5, 1.0, 1, 1.0).expect("valid parameters")
}
