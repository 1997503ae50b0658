use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of `f(r) = a - r + b r^q` and the level `ϑ = (bq)^{-1/(q-1)}`
/// below which a continuous `G` with `f∘G >= 0` stays trapped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BegoutTrap {
    pub a: f64,
    pub b: f64,
    pub q: f64,
    pub theta: f64,
}

/// Why a series is not trapped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum TrapViolation {
    /// `a >= (1 - 1/q) ϑ`
    Offset,
    /// Sample `index` (0 is `G(0)`) reached `ϑ`.
    Sample { index: usize, value: f64 },
}

pub fn begout_trap(a: f64, b: f64, q: f64) -> Result<BegoutTrap> {
    if !(q > 1.0 && q.is_finite()) || !(b > 0.0 && b.is_finite()) || !a.is_finite() {
        return Err(Error::BadParams(format!("trap needs q > 1, b > 0, finite a (a = {a}, b = {b}, q = {q})")));
    }
    Ok(BegoutTrap {
        a,
        b,
        q,
        theta: (b * q).powf(-1.0 / (q - 1.0)),
    })
}

impl BegoutTrap {
    /// `a < (1 - 1/q) ϑ`
    pub fn offset_ok(&self) -> bool {
        self.a < (1.0 - 1.0 / self.q) * self.theta
    }

    pub fn f(&self, r: f64) -> f64 {
        self.a - r + self.b * r.powf(self.q)
    }

    /// First reason the sampled `G` escapes the trap, if any.
    pub fn first_violation(&self, series: &[f64]) -> Option<TrapViolation> {
        if !self.offset_ok() {
            return Some(TrapViolation::Offset);
        }
        series
            .iter()
            .position(|g| !(*g < self.theta))
            .map(|index| TrapViolation::Sample { index, value: series[index] })
    }
}

/// True iff `G(0) < ϑ`, `a < (1 - 1/q)ϑ` and every sample stays below `ϑ`.
/// `series[0]` is `G(0)`.
pub fn assert_trapped(trap: &BegoutTrap, series: &[f64]) -> bool {
    !series.is_empty() && trap.first_violation(series).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let t = begout_trap(0.2, 1.0, 2.0).unwrap();
        assert_eq!(t.theta, 0.5);
        assert!(assert_trapped(&t, &[0.1, 0.3, 0.4]));
        assert_eq!(
            t.first_violation(&[0.1, 0.5, 0.2]),
            Some(TrapViolation::Sample { index: 1, value: 0.5 })
        );
        let t = begout_trap(0.3, 1.0, 2.0).unwrap();
        assert!(!assert_trapped(&t, &[0.1]));
        assert_eq!(t.first_violation(&[0.1]), Some(TrapViolation::Offset));
        assert!(begout_trap(0.0, 1.0, 1.0).is_err());
        assert!(begout_trap(0.0, 0.0, 2.0).is_err());
    }
}
