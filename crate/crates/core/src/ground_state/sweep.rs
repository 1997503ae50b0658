use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{petviashvili_solve, GroundState, SolverOptions, Target};
use crate::error::{Error, Result};
use crate::functionals;
use crate::params::PhysicsParams;
use crate::spectral::{Field, GridSpec};

/// One solved point of an `ε` sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub eps: f64,
    /// `I_ε(φ)/||φ||²_{L⁴}`
    pub m_eps: f64,
    /// `||φ - φ₀||_{H¹}` after peak centring.
    pub h1_dist: f64,
    /// `ε ||L_{β/2} φ||²`
    pub lbeta_term: f64,
    /// `||φ - φ_lim||_{H¹}` to the mean-free `ε = 0` solution on the same box.
    pub h1_dist_limit: f64,
    pub residual: f64,
    pub iterations: usize,
    pub mean_ratio: f64,
    pub nehari: f64,
    pub xbeta_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub omega: f64,
    pub beta: f64,
    pub eps_values: Vec<f64>,
    pub m_eps: Vec<f64>,
    pub h1_distance_to_phi0: Vec<f64>,
    pub lbeta_term: Vec<f64>,
    pub h1_distance_to_limit: Vec<f64>,
    pub entries: Vec<SweepEntry>,
    /// Entries that failed, with the error text.
    pub failures: Vec<(f64, String)>,
}

impl SweepRecord {
    /// Assembles a record from per-entry outcomes in sweep order.
    pub fn from_outcomes(omega: f64, beta: f64, outcomes: Vec<(f64, Result<SweepEntry>)>) -> Self {
        let mut rec = SweepRecord {
            omega,
            beta,
            eps_values: Vec::new(),
            m_eps: Vec::new(),
            h1_distance_to_phi0: Vec::new(),
            lbeta_term: Vec::new(),
            h1_distance_to_limit: Vec::new(),
            entries: Vec::new(),
            failures: Vec::new(),
        };
        for (eps, o) in outcomes {
            match o {
                Ok(e) => {
                    rec.eps_values.push(e.eps);
                    rec.m_eps.push(e.m_eps);
                    rec.h1_distance_to_phi0.push(e.h1_dist);
                    rec.lbeta_term.push(e.lbeta_term);
                    rec.h1_distance_to_limit.push(e.h1_dist_limit);
                    rec.entries.push(e);
                }
                Err(err) => rec.failures.push((eps, err.to_string())),
            }
        }
        rec
    }

    pub fn is_partial(&self) -> bool {
        !self.failures.is_empty()
    }

    /// `m_ε` never increases along the sweep (ε decreasing), up to `slack`.
    pub fn m_nonincreasing(&self, slack: f64) -> bool {
        self.m_eps.windows(2).all(|w| w[1] <= w[0] + slack)
    }

    /// Largest `|Δm/Δε|` between neighbours.
    pub fn lipschitz_constant(&self) -> f64 {
        self.eps_values
            .windows(2)
            .zip(self.m_eps.windows(2))
            .map(|(e, m)| ((m[1] - m[0]) / (e[1] - e[0])).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self, meta: &[(String, String)]) -> String {
        let mut out = String::new();
        for (k, v) in meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        for (eps, err) in &self.failures {
            let _ = writeln!(out, "# failed eps={eps}: {err}");
        }
        out.push_str("eps,m_eps,h1_dist,lbeta_term,h1_dist_limit\n");
        for e in &self.entries {
            let _ = writeln!(out, "{},{},{},{},{}", e.eps, e.m_eps, e.h1_dist, e.lbeta_term, e.h1_dist_limit);
        }
        out
    }
}

fn h1_norm(f: &Field) -> f64 {
    (functionals::mass(f) + functionals::gradient_norm_sqr(f)).sqrt()
}

/// `ε → 0` limit on the torus: `ωφ - Δφ = P(φ³)` with the mean removed.
pub fn sweep_limit(omega: f64, beta: f64, grid: &GridSpec, opts: &SolverOptions) -> Result<GroundState> {
    let params = PhysicsParams::new(beta, 0.0, 1, omega)?;
    let opts = SolverOptions {
        project_mean: true,
        ..opts.clone()
    };
    petviashvili_solve(&params, grid, Target::Standing, &opts)
}

/// Solves one sweep point and measures it against `φ₀` and `limit`.
pub fn solve_sweep_entry(
    eps: f64,
    omega: f64,
    beta: f64,
    grid: &GridSpec,
    opts: &SolverOptions,
    limit: &Field,
) -> Result<SweepEntry> {
    let params = PhysicsParams::new(beta, eps, 1, omega)?;
    let gs = petviashvili_solve(&params, grid, Target::Standing, opts)?;
    let phi = gs.centered();
    let (a, s) = ((2.0 * omega).sqrt(), omega.sqrt());
    let phi0 = Field::radial(grid.clone(), |r| a / (s * r).cosh())?;
    let lb = functionals::lbeta_half_norm_sqr(&phi, &params)?;
    let m = functionals::m_quotient(&phi, &params)?;
    Ok(SweepEntry {
        eps,
        m_eps: m,
        h1_dist: h1_norm(&phi.sub(&phi0)?),
        lbeta_term: eps * lb,
        h1_dist_limit: h1_norm(&phi.sub(limit)?),
        residual: gs.residual,
        iterations: gs.iterations,
        mean_ratio: gs.mean_ratio(),
        nehari: gs.nehari,
        xbeta_sq: gs.norms.xbeta.powi(2),
    })
}

pub(crate) fn check_eps_list(omega: f64, beta: f64, eps_list: &[f64]) -> Result<()> {
    if eps_list.is_empty() {
        return Err(Error::BadParams("empty eps list".into()));
    }
    if eps_list.iter().any(|&e| !(e > 0.0)) || eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::BadParams("eps list must be positive and strictly decreasing".into()));
    }
    for &e in eps_list {
        let bs = crate::params::beta_star(beta, e)?;
        if omega <= bs {
            return Err(Error::BadParams(format!("omega = {omega} <= beta_* = {bs} at eps = {e}")));
        }
    }
    Ok(())
}

/// Sequential sweep over decreasing `eps_list`; each entry starts from the
/// default seed so entries are independent.
pub fn epsilon_sweep(
    omega: f64,
    beta: f64,
    grid: &GridSpec,
    eps_list: &[f64],
    opts: &SolverOptions,
) -> Result<SweepRecord> {
    check_eps_list(omega, beta, eps_list)?;
    let limit = sweep_limit(omega, beta, grid, opts)?.centered();
    let outcomes = eps_list
        .iter()
        .map(|&e| (e, solve_sweep_entry(e, omega, beta, grid, opts, &limit)))
        .collect();
    Ok(SweepRecord::from_outcomes(omega, beta, outcomes))
}

/// Validates the list and returns the mean-free limit profile, for callers
/// that run the entries themselves.
pub fn prepare_sweep(omega: f64, beta: f64, grid: &GridSpec, eps_list: &[f64], opts: &SolverOptions) -> Result<Field> {
    check_eps_list(omega, beta, eps_list)?;
    Ok(sweep_limit(omega, beta, grid, opts)?.centered())
}
