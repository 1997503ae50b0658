use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use convnls_core::global_monitor::{check_case, default_case, monitor_run, CaseId, ComputedProfiles, ConstantsStore};
use convnls_core::propagator::{evolve, EvolveConfig, RunStatus};
use convnls_core::spectral::snapshot;
use convnls_core::{GridSpec, PhysicsParams, ZeroModePolicy};

use crate::args::EvolveArgs;
use crate::config::ConfigFile;
use crate::error::{CliError, CliResult};
use crate::init;
use crate::output;

#[derive(Debug, Serialize)]
pub struct EvolveRun {
    pub dim: usize,
    pub n: usize,
    #[serde(rename = "box")]
    pub box_len: f64,
    pub beta: f64,
    pub eps: f64,
    pub sigma: i32,
    pub omega: f64,
    pub init: String,
    pub amp: f64,
    pub width: f64,
    pub dt: f64,
    pub t_end: f64,
    pub monitor_every: usize,
    pub dealias: bool,
    pub drift_abort: f64,
    pub zero_mode: String,
    pub threshold_case: String,
    pub out_series: PathBuf,
    pub out_final: PathBuf,
}

pub fn zero_mode_policy(s: &str) -> CliResult<ZeroModePolicy> {
    match s {
        "zero_out" | "zero-out" => Ok(ZeroModePolicy::ZeroOut),
        "reject" => Ok(ZeroModePolicy::strict()),
        _ => Err(CliError::Config(format!("zero_mode '{s}' must be zero_out or reject"))),
    }
}

pub fn run(a: EvolveArgs, file: &ConfigFile, save: Option<&Path>) -> CliResult<()> {
    let choice = init::resolve_init(&a.init, file, "gauss")?;
    let loaded = init::load_snapshot(&choice.init)?;
    let g = match &loaded {
        Some(f) => init::adopt_snapshot_grid(&a.grid, file, f.grid())?,
        None => init::resolve_grid(&a.grid, file, 1)?,
    };
    let cfg = EvolveRun {
        dim: g.dim,
        n: g.points,
        box_len: g.box_len,
        beta: file.pick(a.phys.beta, "beta", 0.5)?,
        eps: file.pick(a.phys.eps, "eps", 1.0)?,
        sigma: file.pick(a.phys.sigma, "sigma", 1)?,
        omega: file.pick(a.phys.omega, "omega", 1.0)?,
        init: choice.init.clone(),
        amp: choice.amp,
        width: choice.width,
        dt: file.pick(a.dt, "dt", 1e-3)?,
        t_end: file.pick(a.t_end, "t_end", 1.0)?,
        monitor_every: file.pick(a.monitor_every, "monitor_every", 10)?,
        dealias: file.pick(a.dealias, "dealias", true)?,
        drift_abort: file.pick(a.drift_abort, "drift_abort", 1e-6)?,
        zero_mode: file.pick(a.zero_mode, "zero_mode", "zero_out".to_string())?,
        threshold_case: file.pick(a.threshold_case, "threshold_case", "none".to_string())?,
        out_series: file.pick(a.out_series, "out_series", PathBuf::from("series.csv"))?,
        out_final: file.pick(a.out_final, "out_final", PathBuf::from("final.cnls"))?,
    };
    output::save_config(save, &cfg)?;

    let params = PhysicsParams::new(cfg.beta, cfg.eps, cfg.sigma, cfg.omega)?.with_policy(zero_mode_policy(&cfg.zero_mode)?);
    params.validate_for_dim(cfg.dim)?;
    let ecfg = EvolveConfig {
        dt: cfg.dt,
        t_end: cfg.t_end,
        monitor_every: cfg.monitor_every,
        dealias: cfg.dealias,
        drift_abort: cfg.drift_abort,
    };
    ecfg.validate()?;
    let grid = GridSpec::new(cfg.dim, cfg.n, cfg.box_len)?;
    let u0 = init::build(&choice, &grid, cfg.omega, loaded)?;

    let report = match cfg.threshold_case.as_str() {
        "none" => None,
        name => {
            let case = if name == "auto" { default_case(cfg.dim, cfg.sigma)? } else { CaseId::parse(name)? };
            let mut profiles = ComputedProfiles::new(ConstantsStore::from_env()?);
            Some(check_case(&u0, &params, &mut profiles, case)?)
        }
    };
    let ev = match &report {
        Some(r) => monitor_run(&u0, &params, &ecfg, r)?,
        None => evolve(&u0, &params, &ecfg)?,
    };

    let line = output::config_line(&cfg)?;
    let series = ev.series.clone().with_meta("config", line);
    output::write_text(&cfg.out_series, &series.to_csv())?;
    for w in &ev.warnings {
        eprintln!("convnls: warning: {w}");
    }

    let finite = !matches!(ev.status, RunStatus::NonFinite { .. });
    if finite {
        snapshot::save(&cfg.out_final, &ev.field)?;
    }
    let sidecar = output::report(
        &cfg,
        json!({
            "status": ev.status,
            "warnings": ev.warnings,
            "final": ev.series.records.last(),
            "snapshot_written": finite,
            "threshold": report,
        }),
    )?;
    output::emit_json(Some(&cfg.out_final.with_extension("json")), &sidecar)?;

    match ev.check() {
        Ok(()) => Ok(()),
        Err(e) => Err(CliError::Aborted {
            code: crate::error::core_exit_code(&e),
            message: format!("{e}; partial diagnostics in {}", cfg.out_series.display()),
        }),
    }
}
