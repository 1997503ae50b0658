//! Exact linear flow, Strang splitting and the dispersive decay probe.
//!
//! The linear part of `i u_t + Δu - ε L_β u = 0` acts as `û -> exp(-i t m(ξ)) û`;
//! standing waves `e^{iωt}φ` therefore rotate with positive phase.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals;
use crate::params::{PhysicsParams, ZeroModePolicy};
use crate::spectral::dyadic::{check_dyadic, rho_lambda};
use crate::spectral::{dispersion_symbol, resolve_mean, FftNd, Field, GridSpec, Spectrum};

/// Version string embedded in every output file.
pub const CODE_VERSION: &str = concat!("convnls ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Record diagnostics every this many steps (and at the final time).
    pub monitor_every: usize,
    /// 2/3-rule dealiasing of the nonlinear products.
    pub dealias: bool,
    /// Relative mass drift that aborts the run.
    pub drift_abort: f64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            monitor_every: 10,
            dealias: true,
            drift_abort: 1e-6,
        }
    }
}

impl EvolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::BadParams(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::BadParams(format!("t_end = {} must be >= 0", self.t_end)));
        }
        if self.monitor_every == 0 {
            return Err(Error::BadParams("monitor_every must be >= 1".into()));
        }
        if !(self.drift_abort > 0.0) {
            return Err(Error::BadParams("drift_abort must be positive".into()));
        }
        Ok(())
    }

    /// Number of steps; the last one is shortened to land on `t_end`.
    pub fn steps(&self) -> usize {
        let n = self.t_end / self.dt;
        let r = n.round();
        if (n - r).abs() < 1e-9 * n.max(1.0) {
            r as usize
        } else {
            n.ceil() as usize
        }
    }
}

/// Split-step integrator holding plans and symbol tables for one grid.
pub struct Propagator {
    grid: GridSpec,
    params: PhysicsParams,
    plans: FftNd,
    symbol: Vec<f64>,
    mask: Option<Vec<f64>>,
    // cached exp(-i dt m) for the last dt used
    phase_dt: f64,
    phase: Vec<Complex64>,
    nonlinear: bool,
}

impl Propagator {
    pub fn new(grid: &GridSpec, params: &PhysicsParams, dealias: bool) -> Self {
        let symbol = dispersion_symbol(params).table(grid);
        let mask = dealias.then(|| dealias_mask(grid));
        Self {
            grid: grid.clone(),
            params: *params,
            plans: FftNd::new(grid.dim(), grid.points()),
            symbol,
            mask,
            phase_dt: f64::NAN,
            phase: Vec::new(),
            nonlinear: true,
        }
    }

    /// Drops the cubic term, leaving the linear flow.
    pub fn without_nonlinearity(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn plans(&self) -> &FftNd {
        &self.plans
    }

    /// Largest `|m(ξ)|` on the lattice.
    pub fn max_symbol(&self) -> f64 {
        self.symbol.iter().fold(0.0, |a, &b| a.max(b.abs()))
    }

    /// In-place linear flow over time `t`.
    pub fn linear(&mut self, values: &mut [Complex64], t: f64) {
        self.ensure_phase(t);
        self.plans.forward(values);
        let norm = 1.0 / values.len() as f64;
        match &self.mask {
            Some(mask) => {
                for ((v, p), m) in values.iter_mut().zip(&self.phase).zip(mask) {
                    *v *= p * (norm * m);
                }
            }
            None => {
                for (v, p) in values.iter_mut().zip(&self.phase) {
                    *v *= p * norm;
                }
            }
        }
        self.plans.inverse(values);
    }

    /// `u <- u exp(i sigma |u|^2 delta)`, the exact cubic flow.
    pub fn nonlinear(&self, values: &mut [Complex64], delta: f64) {
        if !self.nonlinear {
            return;
        }
        let s = self.params.sigma as f64 * delta;
        for v in values.iter_mut() {
            *v *= Complex64::from_polar(1.0, s * v.norm_sqr());
        }
    }

    /// Half nonlinear, full linear, half nonlinear.
    pub fn strang_step(&mut self, values: &mut [Complex64], dt: f64) {
        self.nonlinear(values, 0.5 * dt);
        self.linear(values, dt);
        self.nonlinear(values, 0.5 * dt);
    }

    fn ensure_phase(&mut self, t: f64) {
        if self.phase_dt.to_bits() != t.to_bits() || self.phase.is_empty() {
            self.phase = self.symbol.iter().map(|&m| Complex64::from_polar(1.0, -t * m)).collect();
            self.phase_dt = t;
        }
    }
}

// 1 where every |k_d| <= N/3, else 0.
fn dealias_mask(grid: &GridSpec) -> Vec<f64> {
    let cut = grid.points() as i64 / 3;
    (0..grid.len())
        .map(|i| {
            if grid.lattice_point(i).iter().all(|k| k.abs() <= cut) {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// Linear flow of `u` over time `t`.
pub fn linear_propagate(u: &Field, t: f64, params: &PhysicsParams) -> Field {
    let mut p = Propagator::new(u.grid(), params, false);
    let mut v = u.values().to_vec();
    p.linear(&mut v, t);
    Field::from_parts_unchecked(u.grid().clone(), v)
}

/// One undealiased Strang step.
pub fn strang_step(u: &Field, dt: f64, params: &PhysicsParams) -> Result<Field> {
    if !(dt > 0.0) {
        return Err(Error::BadParams(format!("dt = {dt} must be positive")));
    }
    let mut p = Propagator::new(u.grid(), params, false);
    let mut v = u.values().to_vec();
    p.strang_step(&mut v, dt);
    Field::new(u.grid().clone(), v)
}

/// One diagnostics sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRecord {
    pub t: f64,
    pub mass: f64,
    pub momentum: Vec<f64>,
    pub energy: f64,
    pub energy0: f64,
    pub xbeta: f64,
    pub xbeta_dot: f64,
    pub threshold_margin: Option<f64>,
}

impl DiagnosticRecord {
    /// Diagnostics of `u` at time `t`; the zero mode is excluded from the
    /// `L_{β/2}` terms.
    pub fn sample(u: &Field, t: f64, params: &PhysicsParams) -> Result<Self> {
        let p = params.with_policy(ZeroModePolicy::ZeroOut);
        let c = functionals::conserved(u, &p)?;
        let e = functionals::energy(u, &p)?;
        let n = functionals::xbeta_norms(u, &p)?;
        Ok(Self {
            t,
            mass: c.mass,
            momentum: c.momentum,
            energy: e.energy,
            energy0: e.energy0,
            xbeta: n.xbeta,
            xbeta_dot: n.xbeta_dot,
            threshold_margin: None,
        })
    }
}

/// Time-stamped diagnostics plus the settings that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticSeries {
    pub dim: usize,
    /// `key=value` pairs written as `#` comment lines.
    pub meta: Vec<(String, String)>,
    pub records: Vec<DiagnosticRecord>,
}

impl DiagnosticSeries {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            meta: vec![("version".into(), CODE_VERSION.into())],
            records: Vec::new(),
        }
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.meta.push((key.into(), value.to_string()));
        self
    }

    pub fn header(&self) -> String {
        let mut h = String::from("t,mass");
        for d in 1..=self.dim {
            let _ = write!(h, ",momentum_{d}");
        }
        h.push_str(",energy,energy0,xbeta,xbeta_dot,threshold_margin");
        h
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str(&self.header());
        out.push('\n');
        for r in &self.records {
            let _ = write!(out, "{},{}", r.t, r.mass);
            for p in &r.momentum {
                let _ = write!(out, ",{p}");
            }
            let margin = r.threshold_margin.map_or_else(|| "nan".to_string(), |m| m.to_string());
            let _ = writeln!(out, ",{},{},{},{},{margin}", r.energy, r.energy0, r.xbeta, r.xbeta_dot);
        }
        out
    }

    /// Largest `|q(t) - q(0)| / |q(0)|` for the selected quantity.
    pub fn max_relative_drift(&self, q: impl Fn(&DiagnosticRecord) -> f64) -> f64 {
        let Some(first) = self.records.first() else {
            return 0.0;
        };
        let q0 = q(first);
        self.records
            .iter()
            .map(|r| ((q(r) - q0) / q0).abs())
            .fold(0.0, f64::max)
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    ResolutionLoss { t: f64, drift: f64 },
    NonFinite { t: f64 },
}

/// Result of [`evolve`]. Aborted runs keep the diagnostics gathered so far.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub field: Field,
    pub series: DiagnosticSeries,
    pub status: RunStatus,
    pub warnings: Vec<String>,
}

impl Evolution {
    /// The abort status as an error.
    pub fn check(&self) -> Result<()> {
        match self.status {
            RunStatus::Completed => Ok(()),
            RunStatus::ResolutionLoss { t, drift } => Err(Error::ResolutionLoss { t, drift }),
            RunStatus::NonFinite { t } => Err(Error::NonFinite(format!("field blew up by t = {t}"))),
        }
    }
}

/// Hook called on every diagnostics sample; may fill the margin or abort.
pub type Observer<'a> = dyn FnMut(&Field, &mut DiagnosticRecord) -> Result<()> + 'a;

/// Integrates from `u0` to `cfg.t_end` with Strang splitting.
pub fn evolve(u0: &Field, params: &PhysicsParams, cfg: &EvolveConfig) -> Result<Evolution> {
    evolve_observed(u0, params, cfg, &mut |_, _| Ok(()))
}

pub fn evolve_observed(
    u0: &Field,
    params: &PhysicsParams,
    cfg: &EvolveConfig,
    observer: &mut Observer<'_>,
) -> Result<Evolution> {
    cfg.validate()?;
    params.validate_for_dim(u0.grid().dim())?;
    if !u0.is_finite() {
        return Err(Error::NonFinite("initial data".into()));
    }
    resolve_mean(u0, params.zero_mode_policy)?;
    let grid = u0.grid().clone();
    let mut prop = Propagator::new(&grid, params, cfg.dealias);
    let mut warnings = Vec::new();
    let wrap = cfg.dt * prop.max_symbol();
    if wrap >= 2.0 * std::f64::consts::PI * 1e3 {
        warnings.push(format!("dt * max|m| = {wrap:.3e} wraps the phase heavily per step"));
    }
    if params.eps < 0.0 {
        warnings.push("eps < 0: threshold results do not apply".into());
    }

    let mut series = DiagnosticSeries::new(grid.dim())
        .with_meta("dim", grid.dim())
        .with_meta("points", grid.points())
        .with_meta("box", grid.length())
        .with_meta("beta", params.beta)
        .with_meta("eps", params.eps)
        .with_meta("sigma", params.sigma)
        .with_meta("omega", params.omega)
        .with_meta("zero_mode_policy", params.zero_mode_policy.label())
        .with_meta("dt", cfg.dt)
        .with_meta("t_end", cfg.t_end)
        .with_meta("monitor_every", cfg.monitor_every)
        .with_meta("dealias", cfg.dealias)
        .with_meta("drift_abort", cfg.drift_abort);

    let mut values = u0.values().to_vec();
    if cfg.dealias {
        // start on the dealiased band so the mask sheds no mass later
        prop.linear(&mut values, 0.0);
    }
    let start = Field::from_parts_unchecked(grid.clone(), values.clone());
    let shed = (functionals::mass(u0) - functionals::mass(&start)).abs();
    if shed > 1e-12 * functionals::mass(u0) {
        warnings.push(format!("dealiasing removed {shed:.3e} of initial mass"));
    }
    let mut rec = DiagnosticRecord::sample(&start, 0.0, params)?;
    observer(&start, &mut rec)?;
    let mass0 = rec.mass;
    series.records.push(rec);

    let steps = cfg.steps();
    let mut status = RunStatus::Completed;
    for step in 1..=steps {
        let dt = if step == steps { cfg.t_end - cfg.dt * (steps - 1) as f64 } else { cfg.dt };
        if dt > 0.0 {
            prop.strang_step(&mut values, dt);
        }
        let t = if step == steps { cfg.t_end } else { cfg.dt * step as f64 };
        if step % cfg.monitor_every != 0 && step != steps {
            continue;
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            status = RunStatus::NonFinite { t };
            break;
        }
        let u = Field::from_parts_unchecked(grid.clone(), values.clone());
        let mut rec = DiagnosticRecord::sample(&u, t, params)?;
        observer(&u, &mut rec)?;
        let drift = if mass0 > 0.0 { ((rec.mass - mass0) / mass0).abs() } else { rec.mass };
        series.records.push(rec);
        if drift > cfg.drift_abort {
            status = RunStatus::ResolutionLoss { t, drift };
            break;
        }
    }
    let field = if matches!(status, RunStatus::NonFinite { .. }) {
        Field::from_parts_unchecked(grid, values)
    } else {
        Field::new(grid, values)?
    };
    Ok(Evolution {
        field,
        series,
        status,
        warnings,
    })
}

/// Sup-norm decay of the frequency-localised linear kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayProbeResult {
    pub lambda: f64,
    pub times: Vec<f64>,
    pub sup_abs: Vec<f64>,
    pub fitted_slope: f64,
    pub fit_residual: f64,
    /// Set when `beta >= 1` or `|eps| != 1`.
    pub outside_hypothesis: bool,
}

/// Samples `sup_x |∫ e^{i(x·ξ - t m(ξ))} ρ_λ(|ξ|) dξ|` at each time and fits
/// the log-log slope.
pub fn decay_probe(lambda: f64, params: &PhysicsParams, grid: &GridSpec, times: &[f64]) -> Result<DecayProbeResult> {
    check_dyadic(lambda)?;
    if lambda < 8.0 {
        return Err(Error::BadParams(format!("lambda = {lambda} must be >= 8")));
    }
    if grid.max_axis_frequency() < 2.0 * lambda {
        return Err(Error::BadParams(format!(
            "grid resolves |xi| <= {:.3}, band needs {}",
            grid.max_axis_frequency(),
            2.0 * lambda
        )));
    }
    if times.len() < 2 {
        return Err(Error::BadParams("need at least two probe times".into()));
    }
    if times[0] <= 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BadParams("probe times must be positive and increasing".into()));
    }
    let speed = group_speed_bound(lambda, params);
    let t_max = *times.last().unwrap();
    if speed * t_max >= 0.5 * grid.length() {
        return Err(Error::BoxExit(format!(
            "group speed {speed:.3} times t = {t_max} reaches L/2 = {}",
            0.5 * grid.length()
        )));
    }

    let sym = dispersion_symbol(params).table(grid);
    let mags = grid.magnitudes();
    let weight = grid.frequency_step().powi(grid.dim() as i32);
    let plans = FftNd::new(grid.dim(), grid.points());
    let mut sup_abs = Vec::with_capacity(times.len());
    for &t in times {
        let coeffs = mags
            .iter()
            .zip(&sym)
            .map(|(&r, &m)| Complex64::from_polar(weight * rho_lambda(r, lambda), -t * m))
            .collect();
        let field = Spectrum::new(grid.clone(), coeffs)?.to_field_with(&plans)?;
        sup_abs.push(field.max_abs());
    }
    let lx: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = sup_abs.iter().map(|s| s.ln()).collect();
    let (slope, _, residual) = least_squares(&lx, &ly);
    Ok(DecayProbeResult {
        lambda,
        times: times.to_vec(),
        sup_abs,
        fitted_slope: slope,
        fit_residual: residual,
        outside_hypothesis: params.beta >= 1.0 || params.eps.abs() != 1.0,
    })
}

/// `max |m'(r)|` over the band `λ/2 <= r <= 2λ`.
pub fn group_speed_bound(lambda: f64, params: &PhysicsParams) -> f64 {
    let (eps, beta) = (params.eps, params.beta);
    let dm = |r: f64| (2.0 * r - 2.0 * beta * eps * r.powf(-2.0 * beta - 1.0)).abs();
    // |m'| is monotone away from its single zero, so the endpoints dominate
    dm(0.5 * lambda).max(dm(2.0 * lambda))
}

/// `times.len()` points log-spaced over `[t0, t1]`.
pub fn log_times(t0: f64, t1: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![t0];
    }
    let (a, b) = (t0.ln(), t1.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Slope, intercept and RMS residual of the least-squares line.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    (slope, intercept, (rss / n).sqrt())
}
