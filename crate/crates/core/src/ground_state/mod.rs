//! Standing waves by Petviashvili iteration, kernel evaluation and decay fits.

mod kernel;
mod profiles;
mod sweep;
mod tail;

pub use kernel::{
    kernel_field, kernel_symbol, lbeta_kernel_fft, printed_residue_integral, residue_kernel_oracle,
    residue_roots, stated_tail_constant, tail_constant,
};
pub use profiles::{classical_profile, psi_closed_form_norms, ProfileKind};
pub use sweep::{epsilon_sweep, prepare_sweep, solve_sweep_entry, sweep_limit, SweepEntry, SweepRecord};
pub use tail::{tail_decay_fit, TailFit, TAIL_NOISE_THRESHOLD};

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{self, NormReport};
use crate::params::{PhysicsParams, ZeroModePolicy};
use crate::spectral::{snapshot, FftNd, Field, GridSpec, Spectrum};

/// Which stationary equation to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// `ω φ - Δφ + ε L_β φ = |φ|^p φ`
    Standing,
    /// `L_β φ - Δφ = |φ|^p φ`
    ZeroMass,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Nonlinearity power `p` in `|φ|^p φ`.
    pub power: f64,
    /// Remove the zero mode even when `ε = 0`.
    pub project_mean: bool,
    /// Starting profile; defaults to `√(2ω) sech(√ω |x|)` (mean removed when needed).
    pub seed: Option<Field>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 2000,
            power: 2.0,
            project_mean: false,
            seed: None,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_seed(mut self, seed: Field) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Converged stationary profile with its diagnostics.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub profile: Field,
    pub spectrum: Spectrum,
    pub params: PhysicsParams,
    pub target: Target,
    pub power: f64,
    pub project_mean: bool,
    pub residual: f64,
    pub iterations: usize,
    /// Final Petviashvili stabiliser `S`; tends to 1.
    pub stabilizer: f64,
    pub norms: NormReport,
    /// `<Mφ, φ> - ||φ||^{p+2}_{p+2}`
    pub nehari: f64,
    /// Quadratic form `<Mφ, φ>`.
    pub quadratic: f64,
}

/// JSON companion of a saved ground state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateSidecar {
    pub version: String,
    pub target: Target,
    pub beta: f64,
    pub eps: f64,
    pub sigma: i32,
    pub omega: f64,
    pub power: f64,
    pub dim: usize,
    pub points: usize,
    pub box_length: f64,
    pub zero_mode_policy: String,
    pub residual: f64,
    pub iterations: usize,
    pub stabilizer: f64,
    pub norms: NormReport,
    pub nehari: f64,
    pub mean: f64,
}

impl GroundState {
    pub fn sidecar(&self) -> GroundStateSidecar {
        let g = self.profile.grid();
        GroundStateSidecar {
            version: crate::propagator::CODE_VERSION.into(),
            target: self.target,
            beta: self.params.beta,
            eps: self.params.eps,
            sigma: self.params.sigma,
            omega: self.params.omega,
            power: self.power,
            dim: g.dim(),
            points: g.points(),
            box_length: g.length(),
            zero_mode_policy: self.params.zero_mode_policy.label().into(),
            residual: self.residual,
            iterations: self.iterations,
            stabilizer: self.stabilizer,
            norms: self.norms,
            nehari: self.nehari,
            mean: self.profile.integral().re,
        }
    }

    /// Writes `<stem>.cnls` and `<stem>.json`.
    pub fn save(&self, stem: impl AsRef<Path>) -> Result<()> {
        let stem = stem.as_ref();
        snapshot::save(stem.with_extension("cnls"), &self.profile)?;
        let json = serde_json::to_string_pretty(&self.sidecar())?;
        std::fs::write(stem.with_extension("json"), json + "\n")?;
        Ok(())
    }

    /// `|∫φ|` against the scale `||φ||_{L²} |box|^{1/2}`.
    pub fn mean_ratio(&self) -> f64 {
        let g = self.profile.grid();
        self.profile.integral().norm() / (self.profile.l2_norm() * g.volume().sqrt())
    }

    /// Residual of the band-limited profile evaluated on a grid with
    /// `points` per axis (same box).
    pub fn residual_on(&self, points: usize) -> Result<f64> {
        let grid = self.profile.grid().with_points(points)?;
        let spec = self.spectrum.resample(&grid)?;
        let phi = spec.to_field()?;
        let m = operator_table(self.target, &self.params, &grid, self.project_mean);
        let nl = phi.map(|v| v * v.norm().powf(self.power)).to_spectrum();
        let mut num = 0.0;
        for ((c, n), &mk) in spec.coeffs().iter().zip(nl.coeffs()).zip(&m) {
            if mk.is_finite() {
                num += (c * mk - n).norm_sqr();
            }
        }
        Ok((grid.volume() * num).sqrt() / phi.l2_norm())
    }

    /// Peak-centred copy of the profile.
    pub fn centered(&self) -> Field {
        self.profile.centered_on_peak()
    }
}

/// Fourier symbol of the linear operator `M`, `+inf` on removed modes.
pub fn operator_table(target: Target, params: &PhysicsParams, grid: &GridSpec, project_mean: bool) -> Vec<f64> {
    let beta = params.beta;
    grid.magnitudes()
        .iter()
        .map(|&r| match target {
            Target::Standing => {
                if r == 0.0 {
                    if params.eps > 0.0 || project_mean {
                        f64::INFINITY
                    } else {
                        params.omega
                    }
                } else if params.eps == 0.0 {
                    params.omega + r * r
                } else {
                    params.omega + r * r + params.eps * r.powf(-2.0 * beta)
                }
            }
            Target::ZeroMass => {
                if r == 0.0 {
                    f64::INFINITY
                } else {
                    r * r + r.powf(-2.0 * beta)
                }
            }
        })
        .collect()
}

fn check_solvable(params: &PhysicsParams, grid: &GridSpec, target: Target, opts: &SolverOptions) -> Result<()> {
    params.validate_for_dim(grid.dim())?;
    params.require_coercive()?;
    if !(opts.power > 0.0) {
        return Err(Error::BadParams(format!("power p = {} must be positive", opts.power)));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::BadParams("tolerance must be positive".into()));
    }
    if target == Target::Standing {
        if params.eps > 0.0 {
            let bs = params.beta_star()?;
            if params.omega <= bs {
                return Err(Error::BadParams(format!(
                    "omega = {} must exceed beta_* = {bs:.6}",
                    params.omega
                )));
            }
        } else if params.omega <= 0.0 {
            return Err(Error::BadParams(format!(
                "omega = {} must be positive when eps = 0",
                params.omega
            )));
        }
    }
    Ok(())
}

/// Default starting profile for a target.
pub fn default_seed(params: &PhysicsParams, grid: &GridSpec, target: Target) -> Field {
    let w = if target == Target::Standing && params.omega > 0.0 { params.omega } else { 1.0 };
    let a = (2.0 * w).sqrt();
    let s = w.sqrt();
    let f = Field::radial(grid.clone(), |r| a / (s * r).cosh()).expect("finite seed");
    if target == Target::ZeroMass || params.eps > 0.0 {
        f.without_mean()
    } else {
        f
    }
}

/// Solves the stationary equation by Petviashvili iteration
/// `φ̂ <- S^γ M^{-1} (|φ|^p φ)^`, `S = <Mφ,φ>/<|φ|^pφ, φ>`, `γ = (p+1)/p`.
///
/// The residual is `||Mφ - P(|φ|^pφ)||/||φ||` with `P` dropping removed modes;
/// `Mφ_k` is taken as `S^γ (|φ_{k-1}|^p φ_{k-1})^` to avoid amplifying roundoff
/// through the large high-frequency symbol.
pub fn petviashvili_solve(
    params: &PhysicsParams,
    grid: &GridSpec,
    target: Target,
    opts: &SolverOptions,
) -> Result<GroundState> {
    check_solvable(params, grid, target, opts)?;
    let seed = match &opts.seed {
        Some(s) => {
            if !s.grid().same_as(grid) {
                return Err(Error::GridMismatch);
            }
            s.clone()
        }
        None => default_seed(params, grid, target),
    };
    let m = operator_table(target, params, grid, opts.project_mean);
    let plans = FftNd::new(grid.dim(), grid.points());
    let total = grid.len();
    let norm = 1.0 / total as f64;
    let p = opts.power;
    let gamma = (p + 1.0) / p;

    let mut hat: Vec<Complex64> = seed.values().iter().map(|v| Complex64::new(v.re, 0.0)).collect();
    plans.forward(&mut hat);
    for (h, &mk) in hat.iter_mut().zip(&m) {
        *h = if mk.is_finite() { *h * norm } else { Complex64::default() };
    }
    if hat.iter().all(|h| h.norm_sqr() == 0.0) {
        return Err(Error::ZeroField);
    }
    let mut applied: Vec<Complex64> = hat.iter().zip(&m).map(|(h, &mk)| if mk.is_finite() { h * mk } else { Complex64::default() }).collect();
    let mut phi = vec![Complex64::default(); total];
    let mut nl = vec![Complex64::default(); total];
    let mut residual = f64::INFINITY;

    for k in 0..=opts.max_iter {
        phi.copy_from_slice(&hat);
        plans.inverse(&mut phi);
        for (n, v) in nl.iter_mut().zip(&phi) {
            let x = v.re;
            *n = Complex64::new(x * x.abs().powf(p), 0.0);
        }
        plans.forward(&mut nl);
        let (mut r2, mut h2, mut num, mut den) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..total {
            if !m[i].is_finite() {
                nl[i] = Complex64::default();
                continue;
            }
            nl[i] *= norm;
            r2 += (applied[i] - nl[i]).norm_sqr();
            let a = hat[i].norm_sqr();
            h2 += a;
            num += m[i] * a;
            den += (nl[i].conj() * hat[i]).re;
        }
        residual = (r2 / h2).sqrt();
        let s = num / den;
        if residual < opts.tol {
            let profile = Field::new(grid.clone(), phi.iter().map(|v| Complex64::new(v.re, 0.0)).collect())?;
            return finish(profile, params, target, opts, residual, k, s, &m);
        }
        if k == opts.max_iter || !(s.is_finite() && s > 0.0) || !residual.is_finite() {
            break;
        }
        let sg = s.powf(gamma);
        for i in 0..total {
            if m[i].is_finite() {
                applied[i] = nl[i] * sg;
                hat[i] = applied[i] / m[i];
            } else {
                applied[i] = Complex64::default();
                hat[i] = Complex64::default();
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual,
    })
}

#[allow(clippy::too_many_arguments)]
fn finish(
    profile: Field,
    params: &PhysicsParams,
    target: Target,
    opts: &SolverOptions,
    residual: f64,
    iterations: usize,
    stabilizer: f64,
    m: &[f64],
) -> Result<GroundState> {
    let spectrum = profile.to_spectrum();
    let g = profile.grid().clone();
    let quadratic = g.volume()
        * spectrum
            .coeffs()
            .iter()
            .zip(m)
            .filter(|(_, mk)| mk.is_finite())
            .map(|(c, mk)| mk * c.norm_sqr())
            .sum::<f64>();
    let lp = profile.lp_norm(opts.power + 2.0).powf(opts.power + 2.0);
    let norm_params = params.with_policy(ZeroModePolicy::ZeroOut);
    // the mean is residual roundoff only when the operator removed the zero mode
    let measured = if m[0].is_finite() { profile.clone() } else { profile.without_mean() };
    let norms = functionals::xbeta_norms(&measured, &norm_params)?;
    Ok(GroundState {
        profile,
        spectrum,
        params: *params,
        target,
        power: opts.power,
        project_mean: opts.project_mean,
        residual,
        iterations,
        stabilizer,
        norms,
        nehari: quadratic - lp,
        quadratic,
    })
}
