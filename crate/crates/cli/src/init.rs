//! Grid defaults and initial-data generators.

use std::path::Path;

use convnls_core::ground_state::{classical_profile, ProfileKind};
use convnls_core::spectral::snapshot;
use convnls_core::{Complex64, Field, GridSpec};

use crate::args::{GridArgs, InitArgs};
use crate::config::ConfigFile;
use crate::error::{CliError, CliResult};

/// `(points, box)` used when neither flag nor file sets them.
pub fn default_grid(dim: usize) -> (usize, f64) {
    match dim {
        1 => (512, 40.0),
        2 => (128, 24.0),
        3 => (64, 16.0),
        _ => (16, 16.0),
    }
}

pub struct Resolved {
    pub dim: usize,
    pub points: usize,
    pub box_len: f64,
}

pub fn resolve_grid(a: &GridArgs, file: &ConfigFile, default_dim: usize) -> CliResult<Resolved> {
    let dim = file.pick(a.dim, "dim", default_dim)?;
    let (dn, dl) = default_grid(dim);
    Ok(Resolved {
        dim,
        points: file.pick(a.n, "n", dn)?,
        box_len: file.pick(a.box_len, "box", dl)?,
    })
}

pub struct InitChoice {
    pub init: String,
    pub amp: f64,
    pub width: f64,
}

pub fn resolve_init(a: &InitArgs, file: &ConfigFile, default: &str) -> CliResult<InitChoice> {
    Ok(InitChoice {
        init: file.pick(a.init.clone(), "init", default.to_string())?,
        amp: file.pick(a.amp, "amp", 1.0)?,
        width: file.pick(a.width, "width", 1.0)?,
    })
}

/// Snapshot path when `init` is `snapshot:PATH`.
pub fn snapshot_path(init: &str) -> Option<&str> {
    init.strip_prefix("snapshot:")
}

/// Loads a snapshot init up front so its grid can override the defaults.
pub fn load_snapshot(init: &str) -> CliResult<Option<Field>> {
    match snapshot_path(init) {
        None => Ok(None),
        Some(p) => {
            let path = Path::new(p);
            if !path.exists() {
                return Err(CliError::Config(format!("snapshot {p} does not exist")));
            }
            Ok(Some(snapshot::load(path)?))
        }
    }
}

/// Checks explicit grid flags against a snapshot's grid and adopts the latter.
pub fn adopt_snapshot_grid(a: &GridArgs, file: &ConfigFile, g: &GridSpec) -> CliResult<Resolved> {
    let clash = |name: &str, set: Option<String>, have: String| -> CliResult<()> {
        match set {
            Some(s) if s != have => Err(CliError::Config(format!("--{name} {s} conflicts with the snapshot ({have})"))),
            _ => Ok(()),
        }
    };
    clash("dim", file.pick_opt(a.dim, "dim")?.map(|v: usize| v.to_string()), g.dim().to_string())?;
    clash("n", file.pick_opt(a.n, "n")?.map(|v: usize| v.to_string()), g.points().to_string())?;
    clash("box", file.pick_opt(a.box_len, "box")?.map(|v: f64| v.to_string()), g.length().to_string())?;
    Ok(Resolved {
        dim: g.dim(),
        points: g.points(),
        box_len: g.length(),
    })
}

/// Builds the initial field; `omega` is used by `phi0`.
pub fn build(choice: &InitChoice, grid: &GridSpec, omega: f64, loaded: Option<Field>) -> CliResult<Field> {
    let amp = choice.amp;
    if let Some(f) = loaded {
        return Ok(if amp == 1.0 { f } else { f.scale(amp) });
    }
    let f = match choice.init.as_str() {
        "gauss" => {
            let w = choice.width;
            if !(w > 0.0) {
                return Err(CliError::Config(format!("width = {w} must be positive")));
            }
            Field::from_fn(grid.clone(), |x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                Complex64::new(amp * (-0.5 * r2 / (w * w)).exp(), 0.0)
            })?
        }
        "phi0" => classical_profile(ProfileKind::Phi0, omega, grid)?.scale(amp),
        "townes" => classical_profile(ProfileKind::PsiNls { n: grid.dim(), p: 2.0 }, 1.0, grid)?.scale(amp),
        other => {
            return Err(CliError::Config(format!(
                "unknown init '{other}' (gauss, phi0, townes, snapshot:PATH)"
            )))
        }
    };
    Ok(f)
}
