use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the `xi = 0` mode of negative-order symbols is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum ZeroModePolicy {
    /// Project the mean out (counted, see [`crate::spectral::mean_projections`]).
    #[default]
    ZeroOut,
    /// Refuse fields whose mean exceeds `tol` in modulus.
    RejectNonzeroMean { tol: f64 },
}

impl ZeroModePolicy {
    pub const DEFAULT_TOL: f64 = 1e-10;

    pub fn strict() -> Self {
        Self::RejectNonzeroMean { tol: Self::DEFAULT_TOL }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::ZeroOut => "zero_out",
            Self::RejectNonzeroMean { .. } => "reject_nonzero_mean",
        }
    }
}

/// Physical parameters `(beta, eps, sigma, omega)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicsParams {
    pub beta: f64,
    pub eps: f64,
    /// +1 focusing, -1 defocusing.
    pub sigma: i32,
    pub omega: f64,
    #[serde(default)]
    pub zero_mode_policy: ZeroModePolicy,
}

impl PhysicsParams {
    pub fn new(beta: f64, eps: f64, sigma: i32, omega: f64) -> Result<Self> {
        let p = Self {
            beta,
            eps,
            sigma,
            omega,
            zero_mode_policy: ZeroModePolicy::ZeroOut,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_policy(mut self, policy: ZeroModePolicy) -> Self {
        self.zero_mode_policy = policy;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    /// Dimension-free checks.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("beta", self.beta), ("eps", self.eps), ("omega", self.omega)] {
            if !v.is_finite() {
                return Err(Error::BadParams(format!("{name} = {v} is not finite")));
            }
        }
        if self.beta <= 0.0 {
            return Err(Error::BadParams(format!("beta = {} must be positive", self.beta)));
        }
        if self.sigma != 1 && self.sigma != -1 {
            return Err(Error::BadParams(format!("sigma = {} must be +1 or -1", self.sigma)));
        }
        if let ZeroModePolicy::RejectNonzeroMean { tol } = self.zero_mode_policy {
            if !(tol >= 0.0) {
                return Err(Error::BadParams(format!("mean tolerance {tol} must be >= 0")));
            }
        }
        Ok(())
    }

    /// Full check against the spatial dimension: `0 < beta <= n/2`.
    ///
    /// The endpoint `beta = n/2` is accepted; on the torus the zero mode is
    /// handled by the policy, so nothing degenerates there.
    pub fn validate_for_dim(&self, dim: usize) -> Result<()> {
        self.validate()?;
        if self.beta > 0.5 * dim as f64 {
            return Err(Error::BadParams(format!(
                "beta = {} exceeds n/2 = {}",
                self.beta,
                0.5 * dim as f64
            )));
        }
        Ok(())
    }

    /// Errors unless `eps >= 0`; ground states and threshold checks need it.
    pub fn require_coercive(&self) -> Result<()> {
        if self.eps < 0.0 {
            return Err(Error::BadParams(format!(
                "eps = {} < 0 is not supported here",
                self.eps
            )));
        }
        Ok(())
    }

    /// `beta_* = -(eps beta^{-beta})^{1/(beta+1)} (1 + beta)`.
    pub fn beta_star(&self) -> Result<f64> {
        beta_star(self.beta, self.eps)
    }
}

/// Lower admissibility threshold for `omega`; the standing-wave operator
/// `omega + |xi|^2 + eps |xi|^{-2 beta}` is positive exactly when `omega > beta_*`.
pub fn beta_star(beta: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::BadParams(format!("beta_* needs eps > 0, got {eps}")));
    }
    if !(beta > 0.0) {
        return Err(Error::BadParams(format!("beta_* needs beta > 0, got {beta}")));
    }
    Ok(-(eps * beta.powf(-beta)).powf(1.0 / (beta + 1.0)) * (1.0 + beta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_star_values() {
        assert!((beta_star(1.0, 1.0).unwrap() + 2.0).abs() < 1e-15);
        let b = beta_star(0.5, 1.0).unwrap();
        assert!((b + 1.5 * 2f64.powf(1.0 / 3.0)).abs() < 1e-14);
        let small = beta_star(0.5, 1e-12).unwrap();
        assert!(small < 0.0 && small > -1e-7);
        assert!(matches!(beta_star(1.0, 0.0), Err(Error::BadParams(_))));
    }

    #[test]
    fn beta_star_is_the_minimum_of_the_symbol() {
        // omega > beta_* iff r^2 + eps r^{-2 beta} + omega > 0 for every r > 0
        for (beta, eps) in [(0.25, 1.0), (0.5, 0.3), (1.0, 2.0)] {
            let bs = beta_star(beta, eps).unwrap();
            let min = (1..200_000)
                .map(|i| {
                    let r = i as f64 * 1e-5;
                    r * r + eps * r.powf(-2.0 * beta)
                })
                .fold(f64::INFINITY, f64::min);
            assert!((min + bs).abs() < 1e-6, "beta {beta} eps {eps}");
        }
    }

    #[test]
    fn dimension_gate() {
        let p = PhysicsParams::new(0.9, 1.0, 1, 1.0).unwrap();
        assert!(p.validate_for_dim(1).is_err());
        assert!(p.validate_for_dim(2).is_ok());
        let edge = PhysicsParams::new(0.5, 1.0, 1, 1.0).unwrap();
        assert!(edge.validate_for_dim(1).is_ok());
        assert!(PhysicsParams::new(0.5, 1.0, 0, 1.0).is_err());
        assert!(PhysicsParams::new(-0.1, 1.0, 1, 1.0).is_err());
    }
}
