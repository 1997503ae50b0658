use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use convnls_core::ground_state::{petviashvili_solve, prepare_sweep, solve_sweep_entry, SolverOptions, SweepRecord, Target};
use convnls_core::propagator::CODE_VERSION;
use convnls_core::spectral::snapshot;
use convnls_core::{GridSpec, PhysicsParams};

use crate::args::GroundstateArgs;
use crate::config::{parse_list, ConfigFile};
use crate::error::{CliError, CliResult};
use crate::init;
use crate::output;

#[derive(Debug, Serialize)]
pub struct GroundstateRun {
    pub target: String,
    pub dim: usize,
    pub n: usize,
    #[serde(rename = "box")]
    pub box_len: f64,
    pub beta: f64,
    pub eps: f64,
    pub omega: f64,
    pub power: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub project_mean: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<f64>>,
    pub out: PathBuf,
}

fn target(s: &str) -> CliResult<Target> {
    match s {
        "standing" => Ok(Target::Standing),
        "zeromass" | "zero_mass" | "zero-mass" => Ok(Target::ZeroMass),
        _ => Err(CliError::Config(format!("target '{s}' must be standing or zeromass"))),
    }
}

pub fn run(a: GroundstateArgs, file: &ConfigFile, save: Option<&Path>, jobs: usize) -> CliResult<()> {
    let g = init::resolve_grid(&a.grid, file, 1)?;
    let (dn, dl) = if g.dim == 1 { (1024, 60.0) } else { (g.points, g.box_len) };
    let sweep = match a.sweep {
        Some(s) => Some(parse_list(&s)?),
        None => file.pick_list(None, "sweep")?,
    };
    let cfg = GroundstateRun {
        target: file.pick(a.target, "target", "standing".to_string())?,
        dim: g.dim,
        n: file.pick(a.grid.n, "n", dn)?,
        box_len: file.pick(a.grid.box_len, "box", dl)?,
        beta: file.pick(a.phys.beta, "beta", 0.5)?,
        eps: file.pick(a.phys.eps, "eps", 1.0)?,
        omega: file.pick(a.phys.omega, "omega", 1.0)?,
        power: file.pick(a.power, "power", 2.0)?,
        tol: file.pick(a.tol, "tol", 1e-12)?,
        max_iter: file.pick(a.max_iter, "max_iter", 5000)?,
        project_mean: file.pick(a.project_mean, "project_mean", false)?,
        sweep,
        out: file.pick(a.out, "out", PathBuf::from("groundstate"))?,
    };
    if file.pick(a.phys.sigma, "sigma", 1)? != 1 {
        return Err(CliError::Config("ground states are computed for sigma = +1 only".into()));
    }
    output::save_config(save, &cfg)?;

    let tgt = target(&cfg.target)?;
    let params = PhysicsParams::new(cfg.beta, cfg.eps, 1, cfg.omega)?;
    params.validate_for_dim(cfg.dim)?;
    let grid = GridSpec::new(cfg.dim, cfg.n, cfg.box_len)?;
    let opts = SolverOptions {
        tol: cfg.tol,
        max_iter: cfg.max_iter,
        power: cfg.power,
        project_mean: cfg.project_mean,
        seed: None,
    };

    match &cfg.sweep {
        None => {
            let gs = petviashvili_solve(&params, &grid, tgt, &opts)?;
            snapshot::save(cfg.out.with_extension("cnls"), &gs.profile)?;
            let mut side = serde_json::to_value(gs.sidecar())?;
            side["config"] = serde_json::to_value(&cfg)?;
            output::emit_json(Some(&cfg.out.with_extension("json")), &side)
        }
        Some(list) => {
            if tgt != Target::Standing {
                return Err(CliError::Config("--sweep runs the standing-wave target only".into()));
            }
            let record = run_sweep(&cfg, &grid, list, &opts, jobs)?;
            let meta = vec![
                ("version".to_string(), CODE_VERSION.to_string()),
                ("config".to_string(), output::config_line(&cfg)?),
            ];
            output::write_text(&cfg.out.with_extension("csv"), &record.to_csv(&meta))?;
            let body = output::report(&cfg, json!({ "sweep": record }))?;
            output::emit_json(Some(&cfg.out.with_extension("json")), &body)?;
            if record.is_partial() {
                let failed: Vec<String> = record.failures.iter().map(|(e, m)| format!("eps={e}: {m}")).collect();
                return Err(CliError::Aborted {
                    code: 2,
                    message: format!("sweep partial; {}", failed.join("; ")),
                });
            }
            Ok(())
        }
    }
}

/// Entries are independent solves, so the thread count does not change the output.
fn run_sweep(cfg: &GroundstateRun, grid: &GridSpec, list: &[f64], opts: &SolverOptions, jobs: usize) -> CliResult<SweepRecord> {
    let limit = prepare_sweep(cfg.omega, cfg.beta, grid, list, opts)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let outcomes = pool.install(|| {
        list.par_iter()
            .map(|&e| (e, solve_sweep_entry(e, cfg.omega, cfg.beta, grid, opts, &limit)))
            .collect::<Vec<_>>()
    });
    Ok(SweepRecord::from_outcomes(cfg.omega, cfg.beta, outcomes))
}
