use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals;
use crate::ground_state::{classical_profile, petviashvili_solve, ProfileKind, SolverOptions, Target};
use crate::params::PhysicsParams;
use crate::spectral::{Field, GridSpec};

use super::constants::w_norms_closed_form;

/// Environment variable naming the constants store file.
pub const STORE_ENV: &str = "CONVNLS_CONSTANTS_STORE";

/// Norms of a reference profile, as cached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileNorms {
    /// `||ψ||²_{L²}`
    pub mass: f64,
    pub grad_sq: f64,
    /// `||ψ||^{p+2}_{L^{p+2}}`
    pub lp_pow: f64,
    /// `||L_{β/2} ψ||²`; zero for the classical profiles.
    pub lbeta_sq: f64,
    /// Energy with `ε = 1`, `ς = +1`.
    pub energy: f64,
    pub energy0: f64,
    pub points: usize,
    pub box_length: f64,
}

impl ProfileNorms {
    pub fn xdot_sq(&self) -> f64 {
        self.grad_sq + self.lbeta_sq
    }

    fn measure(u: &Field, p: f64, beta: Option<f64>) -> Result<Self> {
        let grad_sq = functionals::gradient_norm_sqr(u);
        let lbeta_sq = match beta {
            Some(b) => functionals::lbeta_half_norm_sqr(u, &PhysicsParams::new(b, 1.0, 1, 0.0)?)?,
            None => 0.0,
        };
        let lp_pow = u.lp_norm(p + 2.0).powf(p + 2.0);
        let g = u.grid();
        Ok(Self {
            mass: functionals::mass(u),
            grad_sq,
            lp_pow,
            lbeta_sq,
            energy: 0.5 * (grad_sq + lbeta_sq) - lp_pow / (p + 2.0),
            energy0: 0.5 * grad_sq - lp_pow / (p + 2.0),
            points: g.points(),
            box_length: g.length(),
        })
    }
}

/// `W` is explicit, so only its closed-form norms are served.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalNorms {
    pub grad_sq: f64,
    pub l4_pow4: f64,
    pub c_w: f64,
}

/// Source of the reference profiles `ψ`, `W` and `Q★`.
pub trait ProfileProvider {
    fn psi(&mut self, n: usize, p: f64) -> Result<ProfileNorms>;
    fn w_critical(&mut self) -> Result<CriticalNorms>;
    fn q_star(&mut self, beta: f64, n: usize, p: f64) -> Result<ProfileNorms>;
}

/// JSON map from profile key (parameters plus grid) to norms.
#[derive(Debug, Clone, Default)]
pub struct ConstantsStore {
    path: Option<PathBuf>,
    entries: BTreeMap<String, ProfileNorms>,
}

impl ConstantsStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Loads `path` if it exists; later inserts are written back to it.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let entries = if path.exists() {
            serde_json::from_str(&fs::read_to_string(&path)?)?
        } else {
            BTreeMap::new()
        };
        Ok(Self {
            path: Some(path),
            entries,
        })
    }

    /// Store at `$CONVNLS_CONSTANTS_STORE`, or in memory when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(STORE_ENV) {
            Some(p) if !p.is_empty() => Self::open(p),
            _ => Ok(Self::in_memory()),
        }
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, key: &str) -> Option<ProfileNorms> {
        self.entries.get(key).copied()
    }

    pub fn entries(&self) -> &BTreeMap<String, ProfileNorms> {
        &self.entries
    }

    pub fn insert(&mut self, key: String, norms: ProfileNorms) -> Result<()> {
        self.entries.insert(key, norms);
        if let Some(p) = &self.path {
            fs::write(p, serde_json::to_string_pretty(&self.entries)?)?;
        }
        Ok(())
    }
}

/// Computes profiles on fixed grids and caches their norms.
#[derive(Debug, Clone)]
pub struct ComputedProfiles {
    pub store: ConstantsStore,
    /// `(points, box)` per dimension 1..=4.
    pub psi_grids: [(usize, f64); 4],
    pub qstar_grids: [(usize, f64); 4],
    pub tol: f64,
}

impl ComputedProfiles {
    pub fn new(store: ConstantsStore) -> Self {
        Self {
            store,
            psi_grids: [(1024, 40.0), (256, 40.0), (128, 24.0), (32, 16.0)],
            qstar_grids: [(2048, 128.0), (256, 64.0), (64, 32.0), (32, 32.0)],
            tol: 1e-12,
        }
    }

    fn grid(table: &[(usize, f64); 4], n: usize) -> Result<GridSpec> {
        if !(1..=4).contains(&n) {
            return Err(Error::UnsupportedDim(n));
        }
        let (pts, len) = table[n - 1];
        GridSpec::new(n, pts, len)
    }

    fn cached(&mut self, key: String, compute: impl FnOnce() -> Result<ProfileNorms>) -> Result<ProfileNorms> {
        if let Some(v) = self.store.get(&key) {
            return Ok(v);
        }
        let v = compute()?;
        self.store.insert(key, v)?;
        Ok(v)
    }
}

impl ProfileProvider for ComputedProfiles {
    fn psi(&mut self, n: usize, p: f64) -> Result<ProfileNorms> {
        let g = Self::grid(&self.psi_grids, n)?;
        let key = format!("psi n={n} p={p} N={} L={}", g.points(), g.length());
        self.cached(key, || {
            let f = classical_profile(ProfileKind::PsiNls { n, p }, 1.0, &g)?;
            ProfileNorms::measure(&f, p, None)
        })
    }

    fn w_critical(&mut self) -> Result<CriticalNorms> {
        let (l4, grad) = w_norms_closed_form();
        Ok(CriticalNorms {
            grad_sq: grad,
            l4_pow4: l4,
            c_w: l4 / (grad * grad),
        })
    }

    fn q_star(&mut self, beta: f64, n: usize, p: f64) -> Result<ProfileNorms> {
        let g = Self::grid(&self.qstar_grids, n)?;
        let key = format!("qstar beta={beta} n={n} p={p} N={} L={}", g.points(), g.length());
        let tol = self.tol;
        self.cached(key, || {
            let params = PhysicsParams::new(beta, 1.0, 1, 0.0)?;
            let opts = SolverOptions {
                tol,
                max_iter: 5000,
                power: p,
                ..Default::default()
            };
            let gs = petviashvili_solve(&params, &g, Target::ZeroMass, &opts)?;
            let norms = ProfileNorms::measure(&gs.profile, p, Some(beta))?;
            if p == 2.0 {
                check_quarter_energy(&norms)?;
            }
            Ok(norms)
        })
    }
}

/// `4 E(Q★) = ||Q★||²_{Xdot}` to `1e-6` relative; thresholds built on an
/// unconverged `Q★` are refused.
pub fn check_quarter_energy(q: &ProfileNorms) -> Result<f64> {
    let x = q.xdot_sq();
    let rel = (4.0 * q.energy - x).abs() / x;
    if rel > 1e-6 {
        return Err(Error::InconsistentState(format!(
            "4E(Q*) = {} differs from ||Q*||^2 = {x} by {rel:.3e}",
            4.0 * q.energy
        )));
    }
    Ok(rel)
}
