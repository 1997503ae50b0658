use serde::{Deserialize, Serialize};

use super::{petviashvili_solve, SolverOptions, Target};
use crate::error::{Error, Result};
use crate::params::PhysicsParams;
use crate::spectral::{Field, GridSpec};

/// Reference profiles of the classical problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    /// `√(2ω) sech(√ω x)`, one dimension.
    Phi0,
    /// Ground state of `-Δψ + ψ = |ψ|^p ψ` in `n` dimensions.
    PsiNls { n: usize, p: f64 },
    /// `W(x) = (1 + |x|²/8)^{-1}` in four dimensions.
    WCritical,
}

/// Samples the profile on `grid`. `PsiNls` for `n >= 2` is solved numerically.
pub fn classical_profile(kind: ProfileKind, omega: f64, grid: &GridSpec) -> Result<Field> {
    match kind {
        ProfileKind::Phi0 => {
            if grid.dim() != 1 {
                return Err(Error::BadParams("phi0 is one-dimensional".into()));
            }
            if !(omega > 0.0) {
                return Err(Error::BadParams(format!("phi0 needs omega > 0, got {omega}")));
            }
            let (a, s) = ((2.0 * omega).sqrt(), omega.sqrt());
            Field::radial(grid.clone(), |r| a / (s * r).cosh())
        }
        ProfileKind::PsiNls { n, p } => {
            if grid.dim() != n {
                return Err(Error::BadParams(format!("psi for n = {n} on a {}-d grid", grid.dim())));
            }
            if !(p > 0.0) {
                return Err(Error::BadParams(format!("power p = {p} must be positive")));
            }
            if n == 1 {
                let amp = (0.5 * (p + 2.0)).powf(1.0 / p);
                return Field::radial(grid.clone(), |r| amp * (0.5 * p * r).cosh().powf(-2.0 / p));
            }
            let params = PhysicsParams::new(0.5, 0.0, 1, 1.0)?;
            let opts = SolverOptions {
                tol: 1e-11,
                max_iter: 5000,
                power: p,
                ..Default::default()
            };
            Ok(petviashvili_solve(&params, grid, Target::Standing, &opts)?.centered())
        }
        ProfileKind::WCritical => {
            if grid.dim() != 4 {
                return Err(Error::BadParams("W is four-dimensional".into()));
            }
            Field::radial(grid.clone(), |r| 1.0 / (1.0 + r * r / 8.0))
        }
    }
}

/// `(mass, ||ψ'||², ||ψ||⁴_{L⁴})` of the one-dimensional cubic ground state
/// `√2 sech x`; `None` elsewhere.
pub fn psi_closed_form_norms(n: usize, p: f64) -> Option<(f64, f64, f64)> {
    (n == 1 && p == 2.0).then_some((4.0, 4.0 / 3.0, 16.0 / 3.0))
}
