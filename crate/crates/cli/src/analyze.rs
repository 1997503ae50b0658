use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use convnls_core::global_monitor::{check_case, default_case, CaseId, ComputedProfiles, ConstantsStore};
use convnls_core::ground_state::{lbeta_kernel_fft, residue_kernel_oracle, tail_decay_fit, TAIL_NOISE_THRESHOLD};
use convnls_core::propagator::{decay_probe, group_speed_bound, log_times};
use convnls_core::spectral::snapshot;
use convnls_core::{GridSpec, PhysicsParams};

use crate::args::{AnalyzeCmd, DecayArgs, OracleArgs, TailArgs, ThresholdArgs};
use crate::config::{parse_list, ConfigFile};
use crate::error::{CliError, CliResult};
use crate::init;
use crate::output;

pub fn run(cmd: AnalyzeCmd, file: &ConfigFile, save: Option<&Path>) -> CliResult<()> {
    match cmd {
        AnalyzeCmd::DecayProbe(a) => decay(a, file, save),
        AnalyzeCmd::TailFit(a) => tail(a, file, save),
        AnalyzeCmd::Thresholds(a) => thresholds(a, file, save),
        AnalyzeCmd::KernelOracle(a) => oracle(a, file, save),
    }
}

fn list_opt(flag: Option<String>, file: &ConfigFile, key: &str) -> CliResult<Option<Vec<f64>>> {
    match flag {
        Some(s) => parse_list(&s).map(Some),
        None => file.pick_list(None, key),
    }
}

#[derive(Debug, Serialize)]
struct DecayRun {
    dim: usize,
    n: usize,
    #[serde(rename = "box")]
    box_len: f64,
    beta: f64,
    eps: f64,
    lambda: f64,
    times: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
}

fn decay(a: DecayArgs, file: &ConfigFile, save: Option<&Path>) -> CliResult<()> {
    let dim = file.pick(a.grid.dim, "dim", 1)?;
    let (dn, dl) = match dim {
        1 => (8192, 200.0),
        2 => (1024, 100.0),
        _ => (256, 24.0),
    };
    let n = file.pick(a.grid.n, "n", dn)?;
    let box_len = file.pick(a.grid.box_len, "box", dl)?;
    let beta = file.pick(a.phys.beta, "beta", 0.5)?;
    let eps = file.pick(a.phys.eps, "eps", 1.0)?;
    let lambda = file.pick(a.lambda, "lambda", 16.0)?;
    let params = PhysicsParams::new(beta, eps, 1, 0.0)?;
    params.validate_for_dim(dim)?;
    let times = match list_opt(a.times, file, "times")? {
        Some(t) => t,
        None => {
            // stay clear of the box edge by default
            let reach = 0.9 * 0.5 * box_len / group_speed_bound(lambda, &params);
            let t0 = file.pick(a.t0, "t0", 0.05)?;
            let t1 = file.pick_opt(a.t1, "t1")?.unwrap_or_else(|| reach.min(0.4));
            log_times(t0, t1, file.pick(a.count, "count", 12)?)
        }
    };
    let cfg = DecayRun {
        dim,
        n,
        box_len,
        beta,
        eps,
        lambda,
        times,
        out: file.pick_opt(a.out, "out")?,
    };
    output::save_config(save, &cfg)?;
    let grid = GridSpec::new(dim, n, box_len)?;
    let r = decay_probe(lambda, &params, &grid, &cfg.times)?;
    let v = output::report(&cfg, json!({ "expected_slope": -0.5 * dim as f64, "result": r }))?;
    output::emit_json(cfg.out.as_deref(), &v)
}

#[derive(Debug, Serialize)]
struct TailRun {
    snapshot: PathBuf,
    rmin: f64,
    rmax: f64,
    threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
}

fn tail(a: TailArgs, file: &ConfigFile, save: Option<&Path>) -> CliResult<()> {
    let snapshot = file
        .pick_opt(a.snapshot, "snapshot")?
        .ok_or_else(|| CliError::Config("tail-fit needs --snapshot".into()))?;
    let missing = |k: &str| CliError::Config(format!("tail-fit needs --{k}"));
    let cfg = TailRun {
        snapshot,
        rmin: file.pick_opt(a.rmin, "rmin")?.ok_or_else(|| missing("rmin"))?,
        rmax: file.pick_opt(a.rmax, "rmax")?.ok_or_else(|| missing("rmax"))?,
        threshold: file.pick(a.threshold, "threshold", TAIL_NOISE_THRESHOLD)?,
        out: file.pick_opt(a.out, "out")?,
    };
    output::save_config(save, &cfg)?;
    if !cfg.snapshot.exists() {
        return Err(CliError::Config(format!("snapshot {} does not exist", cfg.snapshot.display())));
    }
    let f = snapshot::load(&cfg.snapshot)?;
    let fit = tail_decay_fit(&f, (cfg.rmin, cfg.rmax), cfg.threshold)?;
    output::emit_json(cfg.out.as_deref(), &output::report(&cfg, json!({ "fit": fit }))?)
}

#[derive(Debug, Serialize)]
struct ThresholdRun {
    case: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<f64>,
    dim: usize,
    n: usize,
    #[serde(rename = "box")]
    box_len: f64,
    beta: f64,
    eps: f64,
    sigma: i32,
    init: String,
    amp: f64,
    width: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
}

fn case_dim(case: &str) -> usize {
    match CaseId::parse(case) {
        Ok(CaseId::N2Mass) => 2,
        Ok(CaseId::N3Pair) => 3,
        Ok(CaseId::N4Critical) => 4,
        _ => 1,
    }
}

fn thresholds(a: ThresholdArgs, file: &ConfigFile, save: Option<&Path>) -> CliResult<()> {
    let case_name = file.pick(a.case, "case", "auto".to_string())?;
    let kappa = file.pick_opt(a.kappa, "kappa")?;
    let m = file.pick_opt(a.m, "m")?;
    let choice = init::resolve_init(&a.init, file, "gauss")?;
    let loaded = init::load_snapshot(&choice.init)?;
    let g = match &loaded {
        Some(f) => init::adopt_snapshot_grid(&a.grid, file, f.grid())?,
        None => init::resolve_grid(&a.grid, file, case_dim(&case_name))?,
    };
    let default_sigma = if CaseId::parse(&case_name).ok() == Some(CaseId::Defocusing) { -1 } else { 1 };
    let cfg = ThresholdRun {
        case: case_name,
        kappa,
        m,
        dim: g.dim,
        n: g.points,
        box_len: g.box_len,
        beta: file.pick(a.phys.beta, "beta", 0.5)?,
        eps: file.pick(a.phys.eps, "eps", 1.0)?,
        sigma: file.pick(a.phys.sigma, "sigma", default_sigma)?,
        init: choice.init.clone(),
        amp: choice.amp,
        width: choice.width,
        out: file.pick_opt(a.out, "out")?,
    };
    output::save_config(save, &cfg)?;

    let case = match (cfg.kappa, cfg.m) {
        (Some(kappa), Some(m)) => CaseId::Interpolated { kappa, m },
        (None, None) if cfg.case == "auto" => default_case(cfg.dim, cfg.sigma)?,
        (None, None) => CaseId::parse(&cfg.case)?,
        _ => return Err(CliError::Config("--kappa and --m go together".into())),
    };
    let params = PhysicsParams::new(cfg.beta, cfg.eps, cfg.sigma, 0.0)?;
    params.validate_for_dim(cfg.dim)?;
    let grid = GridSpec::new(cfg.dim, cfg.n, cfg.box_len)?;
    let u0 = init::build(&choice, &grid, 1.0, loaded)?;
    let mut profiles = ComputedProfiles::new(ConstantsStore::from_env()?);
    let r = check_case(&u0, &params, &mut profiles, case)?;
    for w in &r.warnings {
        eprintln!("convnls: warning: {w}");
    }
    output::emit_json(cfg.out.as_deref(), &output::report(&cfg, json!({ "report": r }))?)
}

#[derive(Debug, Serialize)]
struct OracleRun {
    x: Vec<f64>,
    beta: f64,
    eps: f64,
    omega: f64,
    fft: bool,
    fft_points: usize,
    fft_box: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct OracleValue {
    x: f64,
    oracle: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    fft: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    abs_diff: Option<f64>,
}

fn oracle(a: OracleArgs, file: &ConfigFile, save: Option<&Path>) -> CliResult<()> {
    let cfg = OracleRun {
        x: list_opt(a.x, file, "x")?.ok_or_else(|| CliError::Config("kernel-oracle needs --x".into()))?,
        beta: file.pick(a.phys.beta, "beta", 0.5)?,
        eps: file.pick(a.phys.eps, "eps", 1.0)?,
        omega: file.pick(a.phys.omega, "omega", 1.0)?,
        fft: a.fft || file.pick(None, "fft", false)?,
        fft_points: file.pick(a.fft_points, "fft_points", 1 << 18)?,
        fft_box: file.pick(a.fft_box, "fft_box", 4096.0)?,
        out: file.pick_opt(a.out, "out")?,
    };
    output::save_config(save, &cfg)?;
    let params = PhysicsParams::new(cfg.beta, cfg.eps, 1, cfg.omega)?;
    let fft = if cfg.fft {
        let g = GridSpec::new(1, cfg.fft_points, cfg.fft_box)?;
        Some((lbeta_kernel_fft(&params, &g)?, g))
    } else {
        None
    };
    let mut values = Vec::with_capacity(cfg.x.len());
    for &x in &cfg.x {
        let oracle = residue_kernel_oracle(x, &params)?;
        let at = match &fft {
            Some((f, g)) => {
                let steps = x / g.spacing();
                if (steps - steps.round()).abs() > 1e-9 || x.abs() >= 0.5 * g.length() {
                    return Err(CliError::Config(format!("x = {x} is not a node of the FFT grid")));
                }
                let j = (g.origin_index() as i64 + steps.round() as i64) as usize;
                Some(f.values()[j].re)
            }
            None => None,
        };
        values.push(OracleValue {
            x,
            oracle,
            fft: at,
            abs_diff: at.map(|v| (v - oracle).abs()),
        });
    }
    output::emit_json(cfg.out.as_deref(), &output::report(&cfg, json!({ "values": values }))?)
}
