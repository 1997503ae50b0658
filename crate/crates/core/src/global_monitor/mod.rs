//! Sharp constants, global-boundedness thresholds and the trapping monitor.
//!
//! The trapped quantity is `G(u) = ||grad u||² + ε||L_{β/2} u||²`, which is
//! `||u||²_{Xdot}` at `ε = 1`; the mass-type cases hold for any `ε > 0`, while
//! the zero-mass and interpolated constants assume `ε = 1`.

mod constants;
mod store;
mod trap;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use constants::{
    c_beta_m, c_beta_n_p, c_beta_n_p_log, c_w_closed_form, c_w_lattice, critical_power, embedding_constant, rho0,
    w_norms_closed_form, w_norms_lattice, w_norms_radial, zero_mass_constants, zero_mass_constants_from_norm,
    zero_mass_sides, CwLattice, ZeroMassConstants, C_BELOW_ONE_SLACK,
};
pub use store::{
    check_quarter_energy, ComputedProfiles, ConstantsStore, CriticalNorms, ProfileNorms, ProfileProvider, STORE_ENV,
};
pub use trap::{assert_trapped, begout_trap, BegoutTrap, TrapViolation};

use crate::error::{Error, Result};
use crate::functionals;
use crate::params::{PhysicsParams, ZeroModePolicy};
use crate::propagator::{evolve_observed, EvolveConfig, Evolution, CODE_VERSION};
use crate::spectral::Field;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum CaseId {
    Defocusing,
    N1,
    N2Mass,
    N3Pair,
    N4Critical,
    ZeroMassPair,
    Interpolated { kappa: f64, m: f64 },
}

impl CaseId {
    /// Parses the CLI spelling (`defocusing`, `n1`, `n2mass`, `n3pair`,
    /// `n4critical`, `zeromass`).
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "defocusing" => Self::Defocusing,
            "n1" => Self::N1,
            "n2mass" | "n2" => Self::N2Mass,
            "n3pair" | "n3" => Self::N3Pair,
            "n4critical" | "n4" => Self::N4Critical,
            "zeromass" | "zeromasspair" => Self::ZeroMassPair,
            _ => return Err(Error::BadParams(format!("unknown threshold case '{s}'"))),
        })
    }
}

/// One inequality `lhs < rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl Margin {
    fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
        }
    }

    pub fn value(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// The quantity held below `bound` along a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "quantity", rename_all = "snake_case")]
pub enum Trapped {
    /// `G(u)`
    Xdot,
    /// `G(u)^{(2-m)/2} F(u0)^{(θ+m)/2}`
    Interpolated { m: f64, theta: f64, mass0: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapSpec {
    pub quantity: Trapped,
    pub bound: f64,
    pub begout: Option<BegoutTrap>,
}

impl TrapSpec {
    pub fn evaluate(&self, u: &Field, params: &PhysicsParams) -> Result<f64> {
        let g = trapped_g(u, params)?;
        Ok(match self.quantity {
            Trapped::Xdot => g,
            Trapped::Interpolated { m, theta, mass0 } => g.powf(0.5 * (2.0 - m)) * mass0.powf(0.5 * (theta + m)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub version: String,
    pub case_id: CaseId,
    /// Every entry of `margins` strictly positive.
    pub satisfied: bool,
    pub margins: Vec<Margin>,
    /// Equivalent or alternative statements, reported but not decisive.
    pub reference_margins: Vec<Margin>,
    pub constants_used: BTreeMap<String, f64>,
    pub trap: Option<TrapSpec>,
    pub warnings: Vec<String>,
}

impl ThresholdReport {
    fn new(case_id: CaseId) -> Self {
        Self {
            version: CODE_VERSION.into(),
            case_id,
            satisfied: false,
            margins: Vec::new(),
            reference_margins: Vec::new(),
            constants_used: BTreeMap::new(),
            trap: None,
            warnings: Vec::new(),
        }
    }

    fn constant(&mut self, k: &str, v: f64) {
        self.constants_used.insert(k.into(), v);
    }

    fn finish(mut self, finite: bool) -> Self {
        self.satisfied = finite && self.margins.iter().all(|m| m.value() > 0.0);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `||grad u||² + ε ||L_{β/2} u||²`, zero mode excluded.
pub fn trapped_g(u: &Field, params: &PhysicsParams) -> Result<f64> {
    let p = params.with_policy(ZeroModePolicy::ZeroOut);
    Ok(functionals::gradient_norm_sqr(u) + params.eps * functionals::lbeta_half_norm_sqr(u, &p)?)
}

struct Start {
    mass: f64,
    energy: f64,
    g: f64,
    finite: bool,
}

fn start(u0: &Field, params: &PhysicsParams) -> Result<Start> {
    if !(params.eps > 0.0) {
        return Err(Error::BadParams(format!("thresholds need eps > 0, got {}", params.eps)));
    }
    let n = u0.grid().dim();
    if !(1..=4).contains(&n) {
        return Err(Error::UnsupportedDim(n));
    }
    let p = params.with_policy(ZeroModePolicy::ZeroOut);
    let mass = functionals::mass(u0);
    let energy = functionals::energy(u0, &p)?.energy;
    let g = trapped_g(u0, params)?;
    Ok(Start {
        mass,
        energy,
        g,
        finite: u0.is_finite() && mass.is_finite() && energy.is_finite() && g.is_finite(),
    })
}

/// The default case for the dimension and sign of the nonlinearity.
pub fn default_case(n: usize, sigma: i32) -> Result<CaseId> {
    if sigma < 0 {
        return Ok(CaseId::Defocusing);
    }
    Ok(match n {
        1 => CaseId::N1,
        2 => CaseId::N2Mass,
        3 => CaseId::N3Pair,
        4 => CaseId::N4Critical,
        _ => return Err(Error::UnsupportedDim(n)),
    })
}

pub fn check_global(u0: &Field, params: &PhysicsParams, profiles: &mut dyn ProfileProvider) -> Result<ThresholdReport> {
    let case = default_case(u0.grid().dim(), params.sigma)?;
    check_case(u0, params, profiles, case)
}

fn require_dim(case: CaseId, n: usize, want: usize) -> Result<()> {
    if n != want {
        return Err(Error::BadParams(format!("case {case:?} needs n = {want}, got n = {n}")));
    }
    Ok(())
}

fn begout(report: &mut ThresholdReport, s: &Start, b: f64, q: f64) -> Result<()> {
    let t = begout_trap(2.0 * s.energy, b, q)?;
    report.margins.push(Margin::new("G0 < theta", s.g, t.theta));
    report.margins.push(Margin::new("2E < (1-1/q) theta", t.a, (1.0 - 1.0 / q) * t.theta));
    report.constant("theta", t.theta);
    report.constant("b", b);
    report.constant("q", q);
    report.trap = Some(TrapSpec {
        quantity: Trapped::Xdot,
        bound: t.theta,
        begout: Some(t),
    });
    Ok(())
}

/// Evaluates one case of the global-boundedness conditions at `u0`.
pub fn check_case(
    u0: &Field,
    params: &PhysicsParams,
    profiles: &mut dyn ProfileProvider,
    case: CaseId,
) -> Result<ThresholdReport> {
    if let CaseId::Interpolated { kappa, m } = case {
        return check_interpolated(u0, params, kappa, m, profiles);
    }
    let s = start(u0, params)?;
    let n = u0.grid().dim();
    if (case == CaseId::Defocusing) != (params.sigma < 0) {
        return Err(Error::BadParams(format!("case {case:?} does not match sigma = {}", params.sigma)));
    }
    let mut r = ThresholdReport::new(case);
    r.constant("mass", s.mass);
    r.constant("energy", s.energy);
    r.constant("G0", s.g);
    match case {
        CaseId::Defocusing => {
            r.trap = Some(TrapSpec {
                quantity: Trapped::Xdot,
                bound: 2.0 * s.energy,
                begout: None,
            });
        }
        CaseId::N1 => {
            require_dim(case, n, 1)?;
            let psi = profiles.psi(1, 2.0)?;
            let r0 = rho0(1, 2.0, psi.mass.sqrt())?;
            r.constant("rho0", r0);
            // Young on 2E >= G - (rho0/2) F^{3/2} G^{1/2}
            r.trap = Some(TrapSpec {
                quantity: Trapped::Xdot,
                bound: 4.0 * s.energy + 0.25 * r0 * r0 * s.mass.powi(3),
                begout: None,
            });
        }
        CaseId::N2Mass => {
            require_dim(case, n, 2)?;
            let psi = profiles.psi(2, 2.0)?;
            r.constant("psi_mass", psi.mass);
            r.constant("rho0", rho0(2, 2.0, psi.mass.sqrt())?);
            r.margins.push(Margin::new("F(u0) < F(psi)", s.mass, psi.mass));
            if s.mass < psi.mass {
                r.trap = Some(TrapSpec {
                    quantity: Trapped::Xdot,
                    bound: 2.0 * s.energy / (1.0 - s.mass / psi.mass),
                    begout: None,
                });
            }
        }
        CaseId::N3Pair => {
            require_dim(case, n, 3)?;
            let psi = profiles.psi(3, 2.0)?;
            let r0 = rho0(3, 2.0, psi.mass.sqrt())?;
            r.constant("rho0", r0);
            r.constant("psi_mass", psi.mass);
            r.constant("pohozaev_grad", psi.grad_sq / (0.75 * psi.lp_pow));
            r.constant("pohozaev_energy0", psi.energy0 / (0.5 * psi.mass));
            begout(&mut r, &s, 0.5 * r0 * s.mass.sqrt(), 1.5)?;
            r.reference_margins.push(Margin::new(
                "G0 F(u0) < |grad psi|^2 F(psi)",
                s.g * s.mass,
                psi.grad_sq * psi.mass,
            ));
            r.reference_margins.push(Margin::new(
                "E(u0) F(u0) < E0(psi) F(psi)",
                s.energy * s.mass,
                psi.energy0 * psi.mass,
            ));
        }
        CaseId::N4Critical => {
            require_dim(case, n, 4)?;
            let w = profiles.w_critical()?;
            r.constant("C_W", w.c_w);
            begout(&mut r, &s, 0.5 * w.c_w, 2.0)?;
            r.reference_margins.push(Margin::new("|u0|_Xdot < |grad W|", s.g.sqrt(), w.grad_sq.sqrt()));
            r.reference_margins.push(Margin::new(
                "E(u0) < E0(W)",
                s.energy,
                0.5 * w.grad_sq - 0.25 * w.l4_pow4,
            ));
        }
        CaseId::ZeroMassPair => {
            let q = profiles.q_star(params.beta, n, 2.0)?;
            r.constant("quarter_energy_defect", check_quarter_energy(&q)?);
            let k = zero_mass_constants_from_norm(params.beta, n, 2.0, q.xdot_sq().sqrt())?;
            if k.c_beta_n_p >= 1.0 - C_BELOW_ONE_SLACK {
                r.warnings.push(format!("C_(beta,n,2) = {} is not below 1", k.c_beta_n_p));
            }
            r.constant("C_beta_n_2", k.c_beta_n_p);
            r.constant("rho_star_inv", k.rho_star_inv);
            if params.eps != 1.0 {
                r.warnings.push("zero-mass constants assume eps = 1".into());
            }
            begout(&mut r, &s, 0.5 * k.rho_star(), 2.0)?;
            r.reference_margins.push(Margin::new(
                "|u0|_Xdot < C |Q*|_Xdot",
                s.g.sqrt(),
                k.c_beta_n_p * q.xdot_sq().sqrt(),
            ));
            r.reference_margins.push(Margin::new("E(u0) < C E(Q*)", s.energy, k.c_beta_n_p * q.energy));
        }
        CaseId::Interpolated { .. } => unreachable!(),
    }
    Ok(r.finish(s.finite))
}

/// Mass-interpolated conditions; `ϱ` is taken in its powered form
/// `||u||⁴_{L⁴} <= ϱ ...`, i.e. `rho0` of the cubic problem.
pub fn check_interpolated(
    u0: &Field,
    params: &PhysicsParams,
    kappa: f64,
    m: f64,
    profiles: &mut dyn ProfileProvider,
) -> Result<ThresholdReport> {
    let n = u0.grid().dim() as f64;
    let upper = 1.0 - kappa - n / 4.0;
    if !(kappa >= 0.0 && m >= 0.0 && m / 2.0 <= upper + 1e-15) {
        return Err(Error::BadParams(format!(
            "need 0 <= m/2 <= 1 - kappa - n/4 (kappa = {kappa}, m = {m}, n = {n})"
        )));
    }
    if params.sigma < 0 {
        return Err(Error::BadParams("interpolated conditions are for sigma = +1".into()));
    }
    let k = n + 4.0 * kappa;
    let den = m - 2.0 + 4.0 * kappa + n;
    if !(k > 2.0) || den == 0.0 {
        return Err(Error::BadParams(format!("k = n + 4 kappa = {k} must exceed 2")));
    }
    let s = start(u0, params)?;
    let theta = (4.0 * (2.0 - m - kappa) - n) / den;
    let c = c_beta_m(params.beta, m);
    let nn = u0.grid().dim();
    // at n = 4 the cubic power is energy-critical and the constant is C_W
    let rho = if nn == 4 {
        profiles.w_critical()?.c_w
    } else {
        rho0(nn, 2.0, profiles.psi(nn, 2.0)?.mass.sqrt())?
    };
    let mut r = ThresholdReport::new(CaseId::Interpolated { kappa, m });
    r.constant("mass", s.mass);
    r.constant("energy", s.energy);
    r.constant("G0", s.g);
    r.constant("k", k);
    r.constant("theta", theta);
    r.constant("c_beta_m", c);
    r.constant("rho", rho);
    r.constant("rho_embed", rho.powf(0.25));
    // exponent that matches F^{θ/2}·E against the embedding after
    // writing the nonlinear term as a power of G^{(2-m)/2} F^{(θ+m)/2}
    r.constant("theta_matched", (8.0 - 4.0 * m - 2.0 * k) / den);
    if params.eps != 1.0 {
        r.warnings.push("interpolation constants assume eps = 1".into());
    }
    let g0 = s.g.powf(0.5 * (2.0 - m)) * s.mass.powf(0.5 * (theta + m));
    let rhs1 = (4.0 * c / (rho * k)).powf(2.0 / (k - 2.0));
    // E^{k-2} keeps the sign of E
    let e_pow = s.energy.signum() * s.energy.abs().powf(k - 2.0);
    let lhs2 = e_pow * s.mass.powf((k - 2.0) * theta / (2.0 * k));
    let rhs2 = c.powf(k) * ((k - 2.0) / (2.0 * k)).powf(2.0 * (k - 2.0) / k) * (4.0 / (rho * k)).powi(2);
    r.margins.push(Margin::new("interpolated G0", g0, rhs1));
    r.margins.push(Margin::new("interpolated energy", lhs2, rhs2));
    r.trap = Some(TrapSpec {
        quantity: Trapped::Interpolated {
            m,
            theta,
            mass0: s.mass,
        },
        bound: rhs1,
        begout: None,
    });
    Ok(r.finish(s.finite))
}

/// Evolves `u0` and records `bound - quantity` as the threshold margin.
/// With a satisfied report, reaching the bound is a [`Error::TrapViolation`];
/// otherwise the run proceeds and only records margins.
pub fn monitor_run(u0: &Field, params: &PhysicsParams, cfg: &EvolveConfig, report: &ThresholdReport) -> Result<Evolution> {
    let mut warnings = Vec::new();
    if !report.satisfied {
        warnings.push(format!("{:?} hypotheses not satisfied; no trapping claimed", report.case_id));
    }
    let enforce = report.satisfied;
    let trap = report.trap.clone();
    let mut obs = |u: &Field, rec: &mut crate::propagator::DiagnosticRecord| -> Result<()> {
        if let Some(t) = &trap {
            let v = t.evaluate(u, params)?;
            rec.threshold_margin = Some(t.bound - v);
            if enforce && !(v < t.bound) {
                return Err(Error::TrapViolation {
                    t: rec.t,
                    value: v,
                    bound: t.bound,
                });
            }
        }
        Ok(())
    };
    let mut ev = evolve_observed(u0, params, cfg, &mut obs)?;
    ev.series.meta.push(("threshold_case".into(), serde_json::to_string(&report.case_id)?));
    ev.series.meta.push(("threshold_satisfied".into(), report.satisfied.to_string()));
    if let Some(t) = &report.trap {
        ev.series.meta.push(("threshold_bound".into(), t.bound.to_string()));
    }
    warnings.append(&mut ev.warnings);
    ev.warnings = warnings;
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;

    fn gauss(g: &GridSpec, amp: f64) -> Field {
        Field::radial(g.clone(), |r| amp * (-r * r / 2.0).exp()).unwrap()
    }

    #[test]
    fn defocusing_always_satisfied() {
        let g = GridSpec::new(1, 128, 30.0).unwrap();
        let p = PhysicsParams::new(0.5, 1.0, -1, 0.0).unwrap();
        let mut prov = ComputedProfiles::new(ConstantsStore::in_memory());
        let r = check_global(&gauss(&g, 5.0), &p, &mut prov).unwrap();
        assert_eq!(r.case_id, CaseId::Defocusing);
        assert!(r.satisfied);
        assert!(r.to_json().unwrap().contains("\"case\": \"defocusing\""));
        let bad = PhysicsParams::new(0.5, 0.0, -1, 0.0).unwrap();
        assert!(check_global(&gauss(&g, 1.0), &bad, &mut prov).is_err());
    }

    #[test]
    fn n1_bound_dominates_start() {
        let g = GridSpec::new(1, 256, 40.0).unwrap();
        let p = PhysicsParams::new(0.5, 1.0, 1, 0.0).unwrap();
        let mut prov = ComputedProfiles::new(ConstantsStore::in_memory());
        let u = gauss(&g, 2.0);
        let r = check_global(&u, &p, &mut prov).unwrap();
        assert!(r.satisfied);
        let t = r.trap.unwrap();
        assert!(t.evaluate(&u, &p).unwrap() < t.bound);
    }

    #[test]
    fn interpolated_gates() {
        let g4 = GridSpec::new(4, 8, 10.0).unwrap();
        let p = PhysicsParams::new(0.5, 1.0, 1, 0.0).unwrap();
        let mut prov = ComputedProfiles::new(ConstantsStore::in_memory());
        let u = gauss(&g4, 0.1);
        assert!(check_interpolated(&u, &p, 0.0, 0.5, &mut prov).is_err());
        let r = check_interpolated(&u, &p, 0.0, 0.0, &mut prov).unwrap();
        assert_eq!(r.constants_used["k"], 4.0);
        assert_eq!(r.constants_used["theta"], 2.0);
        assert!(CaseId::parse("n2mass").unwrap() == CaseId::N2Mass);
        assert!(CaseId::parse("bogus").is_err());
    }
}
