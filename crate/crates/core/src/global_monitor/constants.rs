use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals;
use crate::ground_state::{GroundState, Target};
use crate::spectral::Field;

/// `2* = 4/(n-2)` for `n > 2`, unbounded otherwise.
pub fn critical_power(n: usize) -> f64 {
    if n > 2 {
        4.0 / (n as f64 - 2.0)
    } else {
        f64::INFINITY
    }
}

fn check_np(n: usize, p: f64) -> Result<()> {
    if !(1..=4).contains(&n) {
        return Err(Error::UnsupportedDim(n));
    }
    let pc = critical_power(n);
    if !(p > 0.0 && p <= pc && p.is_finite()) {
        return Err(Error::BadParams(format!("power p = {p} outside (0, {pc}] for n = {n}")));
    }
    Ok(())
}

/// Sharp Gagliardo–Nirenberg constant
/// `||u||^{p+2}_{p+2} <= rho0 ||u||^{2+p(2-n)/2} ||grad u||^{np/2}`,
/// from the `L²` norm (not squared) of the matching ground state.
pub fn rho0(n: usize, p: f64, psi_l2: f64) -> Result<f64> {
    check_np(n, p)?;
    if p == critical_power(n) {
        return Err(Error::BadParams(format!(
            "p = {p} is energy-critical for n = {n}; the mass form degenerates"
        )));
    }
    if !(psi_l2 > 0.0 && psi_l2.is_finite()) {
        return Err(Error::BadParams(format!("ground-state norm {psi_l2} must be positive")));
    }
    let (nf, r) = (n as f64, 2.0 * (p + 2.0) / (n as f64 * p));
    Ok(r * (r - 1.0).powf(nf * p / 4.0 - 1.0) * psi_l2.powf(-p))
}

/// Constant of the unpowered embedding `||u||_{p+2} <= rho ...`; equals
/// `rho0^{1/(p+2)}`, for every admissible `kappa`.
pub fn embedding_constant(n: usize, p: f64, psi_l2: f64) -> Result<f64> {
    Ok(rho0(n, p, psi_l2)?.powf(1.0 / (p + 2.0)))
}

fn c_exponents(beta: f64, n: usize, p: f64) -> (f64, f64, f64) {
    let nf = n as f64;
    let d = 2.0 * p + 4.0 - nf * p;
    (
        0.5 * (p + 2.0),
        beta / (4.0 * (beta + 1.0)) * d + nf * p / 4.0,
        d / (4.0 * (beta + 1.0)),
    )
}

fn check_cbeta(beta: f64, n: usize, p: f64) -> Result<()> {
    check_np(n, p)?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::BadParams(format!("beta = {beta} must be positive")));
    }
    Ok(())
}

/// `C_{β,n,p}` of the zero-mass inequality.
pub fn c_beta_n_p(beta: f64, n: usize, p: f64) -> Result<f64> {
    check_cbeta(beta, n, p)?;
    let (e1, e2, e3) = c_exponents(beta, n, p);
    let nf = n as f64;
    Ok((1.0 / (2.0 * (1.0 + beta) * (2.0 + p))).powf(e1)
        * (p * (nf + 2.0 * beta) + 4.0 * beta).powf(e2)
        * (4.0 - p * (nf - 2.0)).powf(e3))
}

/// Same constant through logarithms with the exponents expanded term by term;
/// an independent check on [`c_beta_n_p`].
pub fn c_beta_n_p_log(beta: f64, n: usize, p: f64) -> Result<f64> {
    check_cbeta(beta, n, p)?;
    let nf = n as f64;
    let d = 2.0 * p + 4.0 - nf * p;
    let q = 4.0 * (beta + 1.0);
    let mut ln = -(p / 2.0 + 1.0) * (2.0f64.ln() + (1.0 + beta).ln() + (2.0 + p).ln());
    ln += (beta * d / q + nf * p / 4.0) * (p * nf + 2.0 * p * beta + 4.0 * beta).ln();
    let base = 4.0 + 2.0 * p - nf * p;
    let e3 = d / q;
    if base == 0.0 {
        // at the critical power the exponent vanishes too: 0^0 = 1
        if e3 != 0.0 {
            return Ok(0.0);
        }
    } else {
        ln += e3 * base.ln();
    }
    Ok(ln.exp())
}

/// Rounding allowance when asserting `C_{β,n,p} < 1`.
pub const C_BELOW_ONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroMassConstants {
    #[serde(rename = "C_beta_n_p")]
    pub c_beta_n_p: f64,
    pub rho_star_inv: f64,
    /// Powers of `||grad u||` and `||L_{β/2} u||` on the right-hand side.
    pub grad_exponent: f64,
    pub lbeta_exponent: f64,
}

impl ZeroMassConstants {
    pub fn rho_star(&self) -> f64 {
        1.0 / self.rho_star_inv
    }
}

pub(crate) fn zero_mass_exponents(beta: f64, n: usize, p: f64) -> (f64, f64) {
    let nf = n as f64;
    let d = 2.0 * p + 4.0 - nf * p;
    (beta / (2.0 * (beta + 1.0)) * d + nf * p / 2.0, d / (2.0 * (beta + 1.0)))
}

/// Builds the constants from `C_{β,n,p}` and `||Q★||_{Xdot}` directly.
pub fn zero_mass_constants_from_norm(beta: f64, n: usize, p: f64, q_xdot: f64) -> Result<ZeroMassConstants> {
    let c = c_beta_n_p(beta, n, p)?;
    let (a, b) = zero_mass_exponents(beta, n, p);
    Ok(ZeroMassConstants {
        c_beta_n_p: c,
        rho_star_inv: c * q_xdot.powf(p),
        grad_exponent: a,
        lbeta_exponent: b,
    })
}

/// `C_{β,n,p}` and `rho★^{-1} = C_{β,n,p} ||Q★||^p_{Xdot}`. Fails when
/// `C_{β,n,p}` is not below 1 by more than rounding; at `n = 4, p = 2` it is exactly 1.
pub fn zero_mass_constants(beta: f64, n: usize, p: f64, qstar: &GroundState) -> Result<ZeroMassConstants> {
    if qstar.target != Target::ZeroMass
        || qstar.params.beta != beta
        || qstar.power != p
        || qstar.profile.grid().dim() != n
    {
        return Err(Error::InconsistentState(format!(
            "Q* was solved for {:?}, beta = {}, p = {}, n = {}",
            qstar.target,
            qstar.params.beta,
            qstar.power,
            qstar.profile.grid().dim()
        )));
    }
    let k = zero_mass_constants_from_norm(beta, n, p, qstar.norms.xbeta_dot)?;
    if k.c_beta_n_p >= 1.0 - C_BELOW_ONE_SLACK {
        return Err(Error::InconsistentState(format!(
            "C_(beta,n,p) = {} is not below 1",
            k.c_beta_n_p
        )));
    }
    Ok(k)
}

/// Both sides of `||u||^{p+2}_{p+2} <= rho★ ||grad u||^a ||L_{β/2} u||^b`.
pub fn zero_mass_sides(u: &Field, beta: f64, p: f64, k: &ZeroMassConstants) -> Result<(f64, f64)> {
    let params = crate::params::PhysicsParams::new(beta, 1.0, 1, 0.0)?;
    let lhs = u.lp_norm(p + 2.0).powf(p + 2.0);
    let grad = functionals::gradient_norm_sqr(u).sqrt();
    let lb = functionals::lbeta_half_norm_sqr(u, &params)?.sqrt();
    Ok((lhs, k.rho_star() * grad.powf(k.grad_exponent) * lb.powf(k.lbeta_exponent)))
}

/// `c_{β,m} = (β+1) β^{-mβ/(2(β+1))}`.
pub fn c_beta_m(beta: f64, m: f64) -> f64 {
    (beta + 1.0) * beta.powf(-m * beta / (2.0 * (beta + 1.0)))
}

/// `C_W = ||W||⁴_{L⁴} / ||grad W||⁴ = 3/(32π²)` for `W = (1 + |x|²/8)^{-1}` in four dimensions.
pub fn c_w_closed_form() -> f64 {
    3.0 / (32.0 * PI * PI)
}

/// `||W||⁴_{L⁴} = ||grad W||² = 32π²/3`.
pub fn w_norms_closed_form() -> (f64, f64) {
    let v = 32.0 * PI * PI / 3.0;
    (v, v)
}

fn w4_radial(r2: f64) -> f64 {
    (1.0 + r2 / 8.0).powi(-4)
}

fn grad_w_sq_radial(r2: f64) -> f64 {
    r2 / 16.0 * (1.0 + r2 / 8.0).powi(-4)
}

/// `(||W||⁴_{L⁴}, ||grad W||²)` by double-exponential quadrature of the radial integrals.
pub fn w_norms_radial() -> (f64, f64) {
    let area = 2.0 * PI * PI;
    let integ = |f: fn(f64) -> f64| {
        let g = |t: f64| {
            if t >= 1.0 {
                return 0.0;
            }
            let r = t / (1.0 - t);
            r.powi(3) * f(r * r) / ((1.0 - t) * (1.0 - t))
        };
        area * quadrature::double_exponential::integrate(g, 0.0, 1.0, 1e-14).integral
    };
    (integ(w4_radial), integ(grad_w_sq_radial))
}

/// Unit-spacing lattice sums of `W⁴` and `|grad W|²` over the cube `[-h, h)⁴`.
pub fn w_norms_lattice(half: usize) -> (f64, f64) {
    let h = half as i64;
    let top = (2 * h * h) as usize;
    let mut c2 = vec![0u64; top + 1];
    for i in -h..h {
        for j in -h..h {
            c2[(i * i + j * j) as usize] += 1;
        }
    }
    let nz: Vec<(f64, f64)> = c2
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(s, &c)| (s as f64, c as f64))
        .collect();
    let (mut w4, mut g2) = (0.0, 0.0);
    for &(s1, a) in &nz {
        let (mut x, mut y) = (0.0, 0.0);
        for &(s2, b) in &nz {
            x += b * w4_radial(s1 + s2);
            y += b * grad_w_sq_radial(s1 + s2);
        }
        w4 += a * x;
        g2 += a * y;
    }
    (w4, g2)
}

/// Grid estimate of `C_W` from two box sizes, extrapolated in `1/L²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CwLattice {
    pub half_small: usize,
    pub half_large: usize,
    pub c_small: f64,
    pub c_large: f64,
    pub w4: f64,
    pub grad_sq: f64,
    pub extrapolated: f64,
}

pub fn c_w_lattice(half_small: usize, half_large: usize) -> CwLattice {
    let (a1, b1) = w_norms_lattice(half_small);
    let (a2, b2) = w_norms_lattice(half_large);
    let r = (half_large as f64 / half_small as f64).powi(2);
    let rich = |s: f64, l: f64| (r * l - s) / (r - 1.0);
    let (w4, g2) = (rich(a1, a2), rich(b1, b2));
    CwLattice {
        half_small,
        half_large,
        c_small: a1 / (b1 * b1),
        c_large: a2 / (b2 * b2),
        w4,
        grad_sq: g2,
        extrapolated: w4 / (g2 * g2),
    }
}
