//! The kernel `K_β` with `K̂_β = |ξ|^{2β}/(ε + ω|ξ|^{2β} + |ξ|^{2+2β})` and a
//! contour-integral oracle for `L_β K_β` in one dimension.

use std::cell::Cell;
use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::params::PhysicsParams;
use crate::spectral::{Field, GridSpec, MultiplierSymbol, Spectrum};

const DENOM_FLOOR: f64 = 1e-8;

fn check_kernel_params(params: &PhysicsParams) -> Result<()> {
    params.validate()?;
    if params.eps < 0.0 {
        return Err(Error::BadParams(format!("kernel needs eps >= 0, got {}", params.eps)));
    }
    if params.eps == 0.0 && params.omega <= 0.0 {
        return Err(Error::BadParams("kernel needs omega > 0 when eps = 0".into()));
    }
    if params.eps > 0.0 && params.omega <= params.beta_star()? {
        return Err(Error::BadParams(format!(
            "denominator vanishes on the real axis for omega = {}",
            params.omega
        )));
    }
    Ok(())
}

/// `K̂_β`, zero at the origin.
pub fn kernel_symbol(params: &PhysicsParams) -> Result<MultiplierSymbol> {
    check_kernel_params(params)?;
    let PhysicsParams { beta, eps, omega, .. } = *params;
    Ok(MultiplierSymbol::radial(
        move |r| {
            let a = r.powf(2.0 * beta);
            a / (eps + omega * a + r * r * a)
        },
        0.0,
    ))
}

// Continuum inverse transform of a radial symbol sampled on the lattice.
fn inverse_continuum(grid: &GridSpec, sym: &MultiplierSymbol) -> Result<Field> {
    let scale = 1.0 / grid.volume();
    let coeffs = sym.table(grid).into_iter().map(|v| Complex64::new(v * scale, 0.0)).collect();
    Spectrum::new(grid.clone(), coeffs)?.to_field()
}

/// `K_β` on `grid` (periodised).
pub fn kernel_field(params: &PhysicsParams, grid: &GridSpec) -> Result<Field> {
    inverse_continuum(grid, &kernel_symbol(params)?)
}

/// `L_β K_β` on `grid` via its symbol `1/(ε + ω|ξ|^{2β} + |ξ|^{2+2β})`.
pub fn lbeta_kernel_fft(params: &PhysicsParams, grid: &GridSpec) -> Result<Field> {
    check_kernel_params(params)?;
    if !(params.eps > 0.0) {
        return Err(Error::BadParams("L_beta K_beta needs eps > 0".into()));
    }
    let PhysicsParams { beta, eps, omega, .. } = *params;
    let sym = MultiplierSymbol::radial(
        move |r| 1.0 / (eps + omega * r.powf(2.0 * beta) + r.powf(2.0 + 2.0 * beta)),
        1.0 / eps,
    );
    inverse_continuum(grid, &sym)
}

fn poly(z: Complex64, p: &PhysicsParams) -> Complex64 {
    let b = p.beta;
    p.eps + p.omega * z.powf(2.0 * b) + z.powf(2.0 + 2.0 * b)
}

fn dpoly(z: Complex64, p: &PhysicsParams) -> Complex64 {
    let b = p.beta;
    2.0 * b * p.omega * z.powf(2.0 * b - 1.0) + (2.0 + 2.0 * b) * z.powf(1.0 + 2.0 * b)
}

/// Zeros of `ε + ω z^{2β} + z^{2+2β}` (principal branch) in the open first
/// quadrant; their count is confirmed by the argument principle.
pub fn residue_roots(params: &PhysicsParams) -> Result<Vec<Complex64>> {
    let radius = (params.eps + params.omega.abs()).sqrt() + 1.0;
    let mut roots: Vec<Complex64> = Vec::new();
    for i in 1..=40 {
        let r = radius * i as f64 / 40.0;
        for j in 1..40 {
            let th = 0.5 * PI * j as f64 / 40.0;
            let mut z = Complex64::from_polar(r, th);
            for _ in 0..80 {
                let d = dpoly(z, params);
                if d.norm() == 0.0 {
                    break;
                }
                z -= poly(z, params) / d;
                if !(z.re.is_finite() && z.im.is_finite()) {
                    break;
                }
            }
            let ok = z.re > 1e-12 && z.im > 1e-12 && z.norm() < radius && poly(z, params).norm() < 1e-12;
            if ok && roots.iter().all(|q| (q - z).norm() > 1e-8) {
                roots.push(z);
            }
        }
    }
    let count = winding_count(params, radius);
    if count != roots.len() as i64 {
        return Err(Error::InconsistentState(format!(
            "found {} roots but the argument principle counts {count}",
            roots.len()
        )));
    }
    roots.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
    Ok(roots)
}

// Winding of P around the quarter-disk boundary, inner radius 1e-9.
fn winding_count(params: &PhysicsParams, radius: f64) -> i64 {
    let delta = 1e-9;
    let m = 20_000;
    let mut path = Vec::with_capacity(4 * m);
    for i in 0..m {
        path.push(Complex64::new(delta + (radius - delta) * i as f64 / m as f64, 0.0));
    }
    for i in 0..m {
        path.push(Complex64::from_polar(radius, 0.5 * PI * i as f64 / m as f64));
    }
    for i in 0..m {
        path.push(Complex64::new(0.0, radius - (radius - delta) * i as f64 / m as f64));
    }
    for i in 0..m {
        path.push(Complex64::from_polar(delta, 0.5 * PI * (1.0 - i as f64 / m as f64)));
    }
    path.push(path[0]);
    let mut total = 0.0;
    let mut prev = poly(path[0], params).arg();
    for z in &path[1..] {
        let a = poly(*z, params).arg();
        let mut d = a - prev;
        while d > PI {
            d -= 2.0 * PI;
        }
        while d < -PI {
            d += 2.0 * PI;
        }
        total += d;
        prev = a;
    }
    (total / (2.0 * PI)).round() as i64
}

// Composite double-exponential quadrature of f over [0, inf).
fn integrate_half_line(f: &dyn Fn(f64) -> f64, breaks: &[f64], tol: f64) -> (f64, f64) {
    let mut total = 0.0;
    let mut err = 0.0;
    for w in breaks.windows(2) {
        let o = quadrature::double_exponential::integrate(f, w[0], w[1], tol);
        total += o.integral;
        err += o.error_estimate;
    }
    // tail [Y, inf) with y = Y / t
    let y = *breaks.last().unwrap();
    let o = quadrature::double_exponential::integrate(|t: f64| if t <= 0.0 { 0.0 } else { f(y / t) * y / (t * t) }, 0.0, 1.0, tol);
    (total + o.integral, err + o.error_estimate)
}

fn breakpoints(x: f64, omega: f64) -> Vec<f64> {
    let scale = if x > 0.0 { (1.0 / x).min(1.0) } else { 1.0 };
    let mut b = vec![0.0];
    let mut y = scale / 16.0;
    let top = if x > 0.0 { (60.0 / x).max(4.0 * omega.abs().sqrt() + 4.0) } else { 1e3 };
    while y < top {
        b.push(y);
        y *= 2.0;
    }
    if omega > 0.0 {
        b.push(omega.sqrt());
    }
    b.push(top);
    b.sort_by(|a, c| a.partial_cmp(c).unwrap());
    b.dedup();
    b
}

fn oracle_preconditions(params: &PhysicsParams) -> Result<()> {
    params.validate()?;
    if !(params.beta > 0.0 && params.beta <= 0.5) {
        return Err(Error::BadParams(format!("oracle needs 0 < beta <= 1/2, got {}", params.beta)));
    }
    if !(params.eps > 0.0 && params.omega > 0.0) {
        return Err(Error::BadParams("oracle needs eps > 0 and omega > 0".into()));
    }
    Ok(())
}

/// `L_β K_β(x)` in one dimension by contour deformation onto the imaginary
/// axis: a real integral plus the residues of the first-quadrant zeros.
pub fn residue_kernel_oracle(x: f64, params: &PhysicsParams) -> Result<f64> {
    oracle_preconditions(params)?;
    let x = x.abs();
    let PhysicsParams { beta, eps, omega, .. } = *params;
    let (sb, cb) = (PI * beta).sin_cos();
    let low = Cell::new(f64::INFINITY);
    let f = |y: f64| {
        let q = omega - y * y;
        let yb = y.powf(2.0 * beta);
        let den = eps * eps + 2.0 * eps * yb * q * cb + yb * yb * q * q;
        if den < low.get() {
            low.set(den);
        }
        sb * yb * q * (-x * y).exp() / den / PI
    };
    let (mut v, err) = integrate_half_line(&f, &breakpoints(x, omega), 1e-14);
    if low.get() < DENOM_FLOOR {
        return Err(Error::DenominatorVanishes { y: low.get() });
    }
    if err > 1e-8 {
        return Err(Error::NoConvergence { iterations: 0, residual: err });
    }
    for z in residue_roots(params)? {
        v -= 2.0 * ((Complex64::i() * x * z).exp() / dpoly(z, params)).im;
    }
    Ok(v)
}

/// The real-line integral `∫ sin(βπ) y^{2β} e^{-|x|y} / (y^{4β}(ω-y²) + ε² + 2ε y^{2β} cos(βπ)) dy`
/// with the uncorrected denominator. Errors if that denominator changes sign.
pub fn printed_residue_integral(x: f64, params: &PhysicsParams) -> Result<f64> {
    oracle_preconditions(params)?;
    let x = x.abs();
    let PhysicsParams { beta, eps, omega, .. } = *params;
    let (sb, cb) = (PI * beta).sin_cos();
    let den = |y: f64| {
        let yb = y.powf(2.0 * beta);
        yb * yb * (omega - y * y) + eps * eps + 2.0 * eps * yb * cb
    };
    // the y^{4β}(ω - y²) term eventually dominates, so a sign change is certain
    // for large y; locate the first one
    let (mut y0, mut d0) = (0.0, den(0.0));
    let mut y = 1e-3;
    while y < 1e6 {
        let d = den(y);
        if d.signum() != d0.signum() || d.abs() < DENOM_FLOOR {
            let (mut a, mut b) = (y0, y);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if den(m).signum() == d0.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            return Err(Error::DenominatorVanishes { y: 0.5 * (a + b) });
        }
        (y0, d0) = (y, d);
        y *= 1.01;
    }
    let f = |y: f64| sb * y.powf(2.0 * beta) * (-x * y).exp() / den(y);
    Ok(integrate_half_line(&f, &breakpoints(x, omega), 1e-14).0)
}

/// `lim |x|^{2β+1} L_β K_β(x) = ω sin(βπ) Γ(2β+1) / (π ε²)`.
pub fn tail_constant(params: &PhysicsParams) -> f64 {
    let b = params.beta;
    params.omega * (PI * b).sin() * gamma(2.0 * b + 1.0) / (PI * params.eps * params.eps)
}

/// The uncorrected limit `sin(βπ) Γ(2β+1) / ε²`, missing `ω/π`.
pub fn stated_tail_constant(params: &PhysicsParams) -> f64 {
    let b = params.beta;
    (PI * b).sin() * gamma(2.0 * b + 1.0) / (params.eps * params.eps)
}
