//! Conserved quantities, norms and variational functionals on discrete fields.
//!
//! Derivative terms are evaluated on the Fourier side; `L^p` norms by direct
//! physical-space summation `h sum |u|^p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::PhysicsParams;
use crate::spectral::{resolve_mean, Field, Spectrum};

/// Mass, momentum and energy at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservedTriple {
    pub mass: f64,
    pub momentum: Vec<f64>,
    pub energy: f64,
}

/// Energy split into its terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// `1/2 ||grad u||^2`
    pub kinetic: f64,
    /// `eps/2 ||L_{beta/2} u||^2`
    pub potential: f64,
    /// `-sigma/4 ||u||_{L^4}^4`
    pub nonlinear: f64,
    pub energy: f64,
    /// Energy with the `eps` term dropped.
    pub energy0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub l2: f64,
    pub h1: f64,
    pub xbeta: f64,
    pub xbeta_dot: f64,
    /// `H^1_beta` norm.
    pub hs_beta: f64,
    pub l4: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionReport {
    pub s_omega: f64,
    pub i_eps: f64,
    pub nehari: f64,
    /// `None` for the zero field.
    pub m_quotient: Option<f64>,
}

// Spectral quadratic sums shared by the functionals, all scaled by L^n.
#[derive(Debug, Clone)]
struct Sums {
    l2: f64,
    grad: f64,
    // sum over xi != 0 of |xi|^{-2 beta} |c|^2
    lbeta: f64,
    momentum: Vec<f64>,
}

fn sums(u: &Field, beta: f64) -> Sums {
    let spec = u.to_spectrum();
    sums_of(&spec, beta)
}

fn sums_of(spec: &Spectrum, beta: f64) -> Sums {
    let g = spec.grid();
    let mags = g.magnitudes();
    let (mut l2, mut grad, mut lbeta) = (0.0, 0.0, 0.0);
    let mut momentum = vec![0.0; g.dim()];
    let n = g.points();
    let dk = g.frequency_step();
    for (i, c) in spec.coeffs().iter().enumerate() {
        let a = c.norm_sqr();
        if a == 0.0 {
            continue;
        }
        let r = mags[i];
        l2 += a;
        grad += r * r * a;
        if r > 0.0 {
            lbeta += r.powf(-2.0 * beta) * a;
        }
        let mut rem = i;
        for d in (0..g.dim()).rev() {
            let j = rem % n;
            rem /= n;
            // unpaired Nyquist mode carries no momentum
            if j != n / 2 {
                momentum[d] += dk * g.wavenumber(j) as f64 * a;
            }
        }
    }
    let v = g.volume();
    Sums {
        l2: v * l2,
        grad: v * grad,
        lbeta: v * lbeta,
        momentum: momentum.into_iter().map(|m| v * m).collect(),
    }
}

/// `h sum |u|^2`.
pub fn mass(u: &Field) -> f64 {
    u.l2_norm().powi(2)
}

/// `Im <u, grad u>`; a plane wave `e^{ik.x}` gives `k` times its mass.
pub fn momentum(u: &Field) -> Vec<f64> {
    sums(u, 1.0).momentum
}

/// `||grad u||^2_{L^2}`.
pub fn gradient_norm_sqr(u: &Field) -> f64 {
    sums(u, 1.0).grad
}

/// `||L_{beta/2} u||^2 = ||D^{-beta} u||^2`, mean resolved by the policy.
pub fn lbeta_half_norm_sqr(u: &Field, params: &PhysicsParams) -> Result<f64> {
    resolve_mean(u, params.zero_mode_policy)?;
    Ok(sums(u, params.beta).lbeta)
}

/// Discrete `||u||_{L^p}`.
pub fn lp_norm(u: &Field, p: f64) -> f64 {
    u.lp_norm(p)
}

/// `||u||^4_{L^4}`.
pub fn l4_pow4(u: &Field) -> f64 {
    u.grid().cell_volume() * u.values().iter().map(|v| v.norm_sqr().powi(2)).sum::<f64>()
}

pub fn energy(u: &Field, params: &PhysicsParams) -> Result<EnergyReport> {
    let s = if params.eps != 0.0 {
        resolve_mean(u, params.zero_mode_policy)?;
        sums(u, params.beta)
    } else {
        sums(u, 1.0)
    };
    let kinetic = 0.5 * s.grad;
    let potential = if params.eps != 0.0 { 0.5 * params.eps * s.lbeta } else { 0.0 };
    let nonlinear = -0.25 * params.sigma as f64 * l4_pow4(u);
    Ok(EnergyReport {
        kinetic,
        potential,
        nonlinear,
        energy: kinetic + potential + nonlinear,
        energy0: kinetic + nonlinear,
    })
}

pub fn conserved(u: &Field, params: &PhysicsParams) -> Result<ConservedTriple> {
    resolve_mean(u, params.zero_mode_policy)?;
    let s = sums(u, params.beta);
    let energy = 0.5 * s.grad + 0.5 * params.eps * s.lbeta - 0.25 * params.sigma as f64 * l4_pow4(u);
    Ok(ConservedTriple {
        mass: mass(u),
        momentum: s.momentum,
        energy,
    })
}

/// `||u||_{H^s_beta} = || |xi|^{-beta} <xi>^{s+beta} u^ ||`, zero mode excluded.
pub fn hs_beta_norm(u: &Field, beta: f64, s: f64) -> f64 {
    u.to_spectrum()
        .weighted_norm_sqr(|r| {
            if r == 0.0 {
                0.0
            } else {
                r.powf(-2.0 * beta) * (1.0 + r * r).powf(s + beta)
            }
        })
        .sqrt()
}

/// `X_beta`-type norms; `||.||_{Xdot}^2 = ||grad u||^2 + ||L_{beta/2} u||^2`
/// independent of `eps`.
pub fn xbeta_norms(u: &Field, params: &PhysicsParams) -> Result<NormReport> {
    resolve_mean(u, params.zero_mode_policy)?;
    let spec = u.to_spectrum();
    let s = sums_of(&spec, params.beta);
    let beta = params.beta;
    let hs = spec
        .weighted_norm_sqr(|r| {
            if r == 0.0 {
                0.0
            } else {
                r.powf(-2.0 * beta) * (1.0 + r * r).powf(1.0 + beta)
            }
        })
        .sqrt();
    let l2sq = mass(u);
    Ok(NormReport {
        l2: l2sq.sqrt(),
        h1: (l2sq + s.grad).sqrt(),
        xbeta: (l2sq + s.grad + s.lbeta).sqrt(),
        xbeta_dot: (s.grad + s.lbeta).sqrt(),
        hs_beta: hs,
        l4: l4_pow4(u).powf(0.25),
    })
}

/// Upper constant `c` in `||u||_{Xdot} <= ||u||_X <= c ||u||_{Xdot}`.
pub fn norm_equivalence_constant(beta: f64) -> f64 {
    (1.0 + beta.powf(beta / (1.0 + beta)) / (1.0 + beta)).sqrt()
}

/// `I_eps(u) = eps ||L_{beta/2} u||^2 + ||grad u||^2 + omega ||u||^2`.
pub fn i_eps(u: &Field, params: &PhysicsParams) -> Result<f64> {
    resolve_mean(u, params.zero_mode_policy)?;
    let s = sums(u, params.beta);
    Ok(params.eps * s.lbeta + s.grad + params.omega * s.l2)
}

pub fn m_quotient(u: &Field, params: &PhysicsParams) -> Result<f64> {
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    Ok(i_eps(u, params)? / l4_pow4(u).sqrt())
}

/// Action `S_omega`, Nehari functional and minimisation quotient.
pub fn action_functionals(u: &Field, params: &PhysicsParams) -> Result<ActionReport> {
    let i = i_eps(u, params)?;
    let q = l4_pow4(u);
    Ok(ActionReport {
        s_omega: 0.5 * i - 0.25 * q,
        i_eps: i,
        nehari: i - q,
        m_quotient: if u.is_zero() { None } else { Some(i / q.sqrt()) },
    })
}

/// `||u||^{p+2}_{L^{p+2}} / (||u||^{2 + p(2-n)/2} ||grad u||^{np/2})`.
pub fn gn_quotient(u: &Field, p: f64) -> Result<f64> {
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    let n = u.grid().dim() as f64;
    let num = u.lp_norm(p + 2.0).powf(p + 2.0);
    let l2 = u.l2_norm();
    let grad = gradient_norm_sqr(u).sqrt();
    Ok(num / (l2.powf(2.0 + 0.5 * p * (2.0 - n)) * grad.powf(0.5 * n * p)))
}

/// Largest admissible `kappa` for the embedding inequality.
pub fn kappa_max(n: usize, p: f64) -> f64 {
    (4.0 + p * (2.0 - n as f64)) / (2.0 * (p + 2.0))
}

/// Both sides of the `L^{p+2}` embedding with constant `rho`:
/// `||u||_{p+2} <= rho ||u||^{a - kappa} ||grad u||^{b + kappa beta/(beta+1)} ||L_{beta/2} u||^{kappa/(beta+1)}`.
pub fn embedding_sides(
    u: &Field,
    params: &PhysicsParams,
    p: f64,
    kappa: f64,
    rho: f64,
) -> Result<(f64, f64)> {
    let n = u.grid().dim();
    let kmax = kappa_max(n, p);
    if !(0.0..=kmax).contains(&kappa) {
        return Err(Error::BadParams(format!("kappa = {kappa} outside [0, {kmax}]")));
    }
    resolve_mean(u, params.zero_mode_policy)?;
    let beta = params.beta;
    let s = sums(u, beta);
    let a = kmax;
    let b = n as f64 * p / (2.0 * (p + 2.0));
    let lhs = u.lp_norm(p + 2.0);
    let rhs = rho
        * s.l2.sqrt().powf(a - kappa)
        * s.grad.sqrt().powf(b + kappa * beta / (beta + 1.0))
        * s.lbeta.sqrt().powf(kappa / (beta + 1.0));
    Ok((lhs, rhs))
}
