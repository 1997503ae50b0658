use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn convnls(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_convnls"))
        .current_dir(dir)
        .env_remove("CONVNLS_CONSTANTS_STORE")
        .args(args)
        .output()
        .expect("spawn convnls")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    assert_eq!(code(o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn csv_column(text: &str, name: &str) -> Vec<f64> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect()
}

#[test]
fn beta_above_half_dimension_exits_one() {
    let d = tempfile::tempdir().unwrap();
    let o = convnls(d.path(), &["evolve", "--beta", "0.9", "--dim", "1"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("beta"));
}

#[test]
fn usage_errors_exit_one() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&convnls(d.path(), &["evolve", "--no-such-flag"])), 1);
    assert_eq!(code(&convnls(d.path(), &["evolve", "--init", "bogus"])), 1);
    assert_eq!(code(&convnls(d.path(), &["--help"])), 0);
}

#[test]
fn omega_below_admissibility_exits_one() {
    let d = tempfile::tempdir().unwrap();
    let o = convnls(d.path(), &["groundstate", "--omega", "-5", "--eps", "1", "--beta", "1"]);
    assert_eq!(code(&o), 1);
    // same gate with beta inside the dimension bound
    let o = convnls(d.path(), &["groundstate", "--omega", "-5", "--eps", "1", "--beta", "0.5"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn defocusing_run_writes_series_and_snapshot() {
    let d = tempfile::tempdir().unwrap();
    let o = convnls(
        d.path(),
        &["evolve", "--dim", "1", "--beta", "0.5", "--eps", "1", "--sigma", "-1", "--t-end", "0.5"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(d.path().join("series.csv")).unwrap();
    assert!(csv.contains("# version=convnls "));
    assert!(csv.contains("# config={"));
    let xd = csv_column(&csv, "xbeta_dot");
    assert!(xd.len() > 5);
    // defocusing energy controls ||u||²_{Xdot}: G <= 2E
    let e0 = csv_column(&csv, "energy")[0];
    assert!(xd.iter().all(|v| v.is_finite() && v * v <= 2.0 * e0), "{xd:?} vs 2E = {}", 2.0 * e0);
    assert!(d.path().join("final.cnls").exists());
    let side: Value = serde_json::from_str(&fs::read_to_string(d.path().join("final.json")).unwrap()).unwrap();
    assert_eq!(side["status"]["status"], "completed");
    assert_eq!(side["config"]["sigma"], -1);
}

#[test]
fn classical_ground_state_and_soliton_run() {
    let d = tempfile::tempdir().unwrap();
    let o = convnls(
        d.path(),
        &["groundstate", "--target", "standing", "--omega", "1", "--eps", "0", "--out", "gs"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let side: Value = serde_json::from_str(&fs::read_to_string(d.path().join("gs.json")).unwrap()).unwrap();
    let res = side["residual"].as_f64().unwrap();
    assert!(res < 1e-12, "residual {res}");
    // mass of sqrt(2) sech is 4
    let m = side["norms"]["l2"].as_f64().unwrap().powi(2);
    assert!((m - 4.0).abs() < 1e-8, "mass {m}");
    assert_eq!(side["config"]["target"], "standing");

    let o = convnls(
        d.path(),
        &[
            "evolve", "--init", "snapshot:gs.cnls", "--eps", "0.1", "--sigma", "1", "--dt", "1e-3", "--t-end", "0.5",
            "--drift-abort", "1e-10",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(d.path().join("series.csv")).unwrap();
    let mass = csv_column(&csv, "mass");
    let drift = mass.iter().map(|m| ((m - mass[0]) / mass[0]).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-10, "drift {drift}");
}

#[test]
fn snapshot_grid_conflict_is_a_config_error() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&convnls(d.path(), &["evolve", "--t-end", "0.01", "--n", "256"])), 0);
    let o = convnls(d.path(), &["evolve", "--init", "snapshot:final.cnls", "--n", "128"]);
    assert_eq!(code(&o), 1);
    let o = convnls(d.path(), &["evolve", "--init", "snapshot:missing.cnls"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn sweep_m_eps_is_nonincreasing() {
    let d = tempfile::tempdir().unwrap();
    let o = convnls(
        d.path(),
        &["--jobs", "2", "groundstate", "--sweep", "eps=1,0.3,0.1,0.03,0.01", "--out", "sweep"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(d.path().join("sweep.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "eps,m_eps,h1_dist,lbeta_term,h1_dist_limit"));
    let m = csv_column(&csv, "m_eps");
    assert_eq!(m.len(), 5);
    assert!(m.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{m:?}");
    let eps = csv_column(&csv, "eps");
    assert_eq!(eps, vec![1.0, 0.3, 0.1, 0.03, 0.01]);
}

#[test]
fn sweep_output_does_not_depend_on_jobs() {
    let d = tempfile::tempdir().unwrap();
    let args = |jobs: &'static str, out: &'static str| {
        vec!["--jobs", jobs, "groundstate", "--sweep", "1,0.1", "--n", "256", "--box", "40", "--out", out]
    };
    assert_eq!(code(&convnls(d.path(), &args("1", "a"))), 0);
    assert_eq!(code(&convnls(d.path(), &args("3", "b"))), 0);
    let strip = |s: String| s.lines().filter(|l| !l.starts_with("# config=")).collect::<Vec<_>>().join("\n");
    let a = strip(fs::read_to_string(d.path().join("a.csv")).unwrap());
    let b = strip(fs::read_to_string(d.path().join("b.csv")).unwrap());
    assert_eq!(a, b);
}

#[test]
fn thresholds_report_for_mass_case() {
    let d = tempfile::tempdir().unwrap();
    let o = convnls(d.path(), &["analyze", "thresholds", "--case", "n2mass", "--init", "townes", "--amp", "0.9"]);
    let v = stdout_json(&o);
    let r = &v["report"];
    assert_eq!(r["case_id"]["case"], "n2_mass");
    assert_eq!(r["satisfied"], true);
    assert!(!r["margins"].as_array().unwrap().is_empty());
    assert_eq!(v["config"]["dim"], 2);

    let o = convnls(d.path(), &["analyze", "thresholds", "--case", "n2mass", "--init", "townes", "--amp", "1.1"]);
    assert_eq!(stdout_json(&o)["report"]["satisfied"], false);
}

#[test]
fn kernel_oracle_matches_fft() {
    let d = tempfile::tempdir().unwrap();
    let o = convnls(d.path(), &["analyze", "kernel-oracle", "--x", "1,2,5", "--fft"]);
    let v = stdout_json(&o);
    let vals = v["values"].as_array().unwrap();
    assert_eq!(vals.len(), 3);
    for e in vals {
        let diff = e["abs_diff"].as_f64().unwrap();
        assert!(diff < 1e-5, "{e}");
    }
}

#[test]
fn decay_probe_slope_one_dim() {
    let d = tempfile::tempdir().unwrap();
    let o = convnls(d.path(), &["analyze", "decay-probe", "--dim", "1", "--lambda", "16"]);
    let v = stdout_json(&o);
    let s = v["result"]["fitted_slope"].as_f64().unwrap();
    assert!((s + 0.5).abs() < 0.1, "slope {s}");
}

#[test]
fn tail_fit_errors_map_to_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&convnls(d.path(), &["evolve", "--t-end", "0.01"])), 0);
    // window past the half box
    let o = convnls(d.path(), &["analyze", "tail-fit", "--snapshot", "final.cnls", "--rmin", "5", "--rmax", "30"]);
    assert_eq!(code(&o), 1);
    assert_eq!(code(&convnls(d.path(), &["analyze", "tail-fit", "--rmin", "1", "--rmax", "2"])), 1);
}

#[test]
fn config_file_round_trip_is_byte_identical() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("run.toml"), "beta = 0.25\nt-end = 0.2\nsigma = -1\nout_series = \"a.csv\"\n").unwrap();
    let o = convnls(d.path(), &["--config", "run.toml", "--save-config", "resolved.toml", "evolve", "--dt", "0.002"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let saved = fs::read_to_string(d.path().join("resolved.toml")).unwrap();
    assert!(saved.contains("beta = 0.25"));
    assert!(saved.contains("dt = 0.002"));
    let again = saved.replace("a.csv", "b.csv");
    fs::write(d.path().join("again.toml"), again).unwrap();
    assert_eq!(code(&convnls(d.path(), &["--config", "again.toml", "evolve"])), 0);
    let a = fs::read_to_string(d.path().join("a.csv")).unwrap().replace("a.csv", "b.csv");
    let b = fs::read_to_string(d.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn resolution_loss_exits_two() {
    let d = tempfile::tempdir().unwrap();
    // undealiased, coarse, strongly focusing: mass leaks through the band edge check
    let o = convnls(
        d.path(),
        &["evolve", "--n", "32", "--box", "10", "--amp", "4", "--width", "0.3", "--dt", "0.01", "--t-end", "1", "--drift-abort", "1e-14"],
    );
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(d.path().join("series.csv").exists());
}
