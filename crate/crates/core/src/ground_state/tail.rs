use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagator::least_squares;
use crate::spectral::Field;

/// RMS misfit of `log|φ|` above which a fit is rejected.
pub const TAIL_NOISE_THRESHOLD: f64 = 0.05;

/// `|φ(x)| ≈ e^{intercept} |x|^{-exponent}` over the window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub exponent: f64,
    pub intercept: f64,
    pub residual: f64,
    pub samples: usize,
}

/// Fits an algebraic decay rate to the samples with `r_min <= |x| <= r_max`
/// (distances from the origin sample).
pub fn tail_decay_fit(profile: &Field, window: (f64, f64), noise_threshold: f64) -> Result<TailFit> {
    let (r_min, r_max) = window;
    let g = profile.grid();
    if !(r_min > 0.0 && r_max > r_min && r_max < 0.5 * g.length()) {
        return Err(Error::BadWindow(format!(
            "window [{r_min}, {r_max}] must sit inside (0, L/2 = {})",
            0.5 * g.length()
        )));
    }
    let peak = profile.max_abs();
    let radii = g.radii();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut outer_max: f64 = 0.0;
    for (r, v) in radii.iter().zip(profile.values()) {
        if *r >= r_min {
            outer_max = outer_max.max(v.norm());
        }
        if *r >= r_min && *r <= r_max {
            let a = v.norm();
            if a == 0.0 {
                return Err(Error::WindowTooNoisy { residual: f64::INFINITY, threshold: noise_threshold });
            }
            xs.push(r.ln());
            ys.push(a.ln());
        }
    }
    if outer_max > 1e-3 * peak {
        return Err(Error::BadWindow(format!(
            "profile is still {:.2e} of its peak beyond r_min = {r_min}",
            outer_max / peak
        )));
    }
    if xs.len() < 3 {
        return Err(Error::BadWindow("fewer than three samples in the window".into()));
    }
    let (slope, intercept, residual) = least_squares(&xs, &ys);
    if residual > noise_threshold {
        return Err(Error::WindowTooNoisy { residual, threshold: noise_threshold });
    }
    Ok(TailFit {
        exponent: -slope,
        intercept,
        residual,
        samples: xs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;

    #[test]
    fn synthetic_bracket_power() {
        let g = GridSpec::new(1, 4096, 400.0).unwrap();
        let f = Field::radial(g, |r| (1.0 + r * r).powf(-1.5)).unwrap();
        let fit = tail_decay_fit(&f, (20.0, 150.0), TAIL_NOISE_THRESHOLD).unwrap();
        assert!((fit.exponent - 3.0).abs() < 0.05);
    }

    #[test]
    fn window_checks() {
        let g = GridSpec::new(1, 1024, 100.0).unwrap();
        let f = Field::radial(g, |r| (1.0 + r * r).powf(-1.5)).unwrap();
        assert!(matches!(tail_decay_fit(&f, (1.0, 20.0), 0.05), Err(Error::BadWindow(_))));
        assert!(matches!(tail_decay_fit(&f, (20.0, 60.0), 0.05), Err(Error::BadWindow(_))));
        let wavy = f.map(|v| v * (1.0 + 0.5 * (v.re * 1e5).sin()));
        assert!(matches!(tail_decay_fit(&wavy, (15.0, 45.0), 0.05), Err(Error::WindowTooNoisy { .. })));
    }
}
