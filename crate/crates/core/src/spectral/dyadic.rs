use super::fft::FftNd;
use super::field::Field;
use super::grid::GridSpec;
use super::symbol::multiply_raw;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Even smooth cutoff: 1 on `[-1, 1]`, 0 outside `(-2, 2)`.
pub fn chi(s: f64) -> f64 {
    let a = s.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        let t = a - 1.0;
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

/// `rho(s) = chi(s) - chi(2s)`, supported in `1/2 <= |s| <= 2`.
pub fn rho(s: f64) -> f64 {
    chi(s) - chi(2.0 * s)
}

/// `rho(|xi| / lambda)`.
pub fn rho_lambda(r: f64, lambda: f64) -> f64 {
    rho(r / lambda)
}

/// Errors unless `lambda` is an exact power of two.
pub fn check_dyadic(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() && lambda.log2().fract() == 0.0 {
        Ok(())
    } else {
        Err(Error::BadParams(format!("lambda = {lambda} is not a power of two")))
    }
}

/// Littlewood-Paley piece `P_lambda u`.
pub fn dyadic_projection(u: &Field, lambda: f64) -> Result<Field> {
    check_dyadic(lambda)?;
    let plans = FftNd::new(u.grid().dim(), u.grid().points());
    let mags = u.grid().magnitudes();
    Ok(multiply_raw(u, &plans, |i| Complex64::new(rho_lambda(mags[i], lambda), 0.0)))
}

/// Dyadic scales whose pieces sum to `u - mean(u)` on `grid`.
pub fn dyadic_scales(grid: &GridSpec) -> Vec<f64> {
    let mags = grid.magnitudes();
    let rmin = mags.iter().cloned().filter(|&r| r > 0.0).fold(f64::INFINITY, f64::min);
    let rmax = mags.iter().cloned().fold(0.0, f64::max);
    let j0 = rmin.log2().floor() as i32;
    let j1 = rmax.log2().ceil() as i32;
    (j0..=j1).map(|j| 2f64.powi(j)).collect()
}
