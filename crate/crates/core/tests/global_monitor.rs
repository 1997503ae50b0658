use convnls_core::functionals::{energy, gn_quotient};
use convnls_core::global_monitor::*;
use convnls_core::ground_state::{classical_profile, petviashvili_solve, ProfileKind, SolverOptions, Target};
use convnls_core::propagator::EvolveConfig;
use convnls_core::{Complex64, Error, Field, GridSpec, PhysicsParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn townes(g: &GridSpec) -> Field {
    classical_profile(ProfileKind::PsiNls { n: 2, p: 2.0 }, 1.0, g).unwrap()
}

#[test]
fn townes_scalings_straddle_the_mass_threshold() {
    let g = GridSpec::new(2, 256, 40.0).unwrap();
    let p = PhysicsParams::new(0.5, 1.0, 1, 0.0).unwrap();
    let psi = townes(&g);
    let mut prov = ComputedProfiles::new(ConstantsStore::in_memory());
    let below = check_global(&psi.scale(0.9), &p, &mut prov).unwrap();
    assert_eq!(below.case_id, CaseId::N2Mass);
    assert!(below.satisfied);
    let above = check_global(&psi.scale(1.1), &p, &mut prov).unwrap();
    assert!(!above.satisfied);
    let mut last = f64::INFINITY;
    for i in 1..=12 {
        let r = check_global(&psi.scale(0.1 * i as f64), &p, &mut prov).unwrap();
        let m = r.margins[0].value();
        assert!(m < last);
        last = m;
    }
}

#[test]
fn theta_identity_on_random_traps() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let b = rng.gen_range(1e-3..1e3);
        let q = rng.gen_range(1.01..6.0);
        let t = begout_trap(0.0, b, q).unwrap();
        assert!((t.theta * (b * q).powf(1.0 / (q - 1.0)) - 1.0).abs() < 1e-14);
    }
}

#[test]
fn sech_is_a_gagliardo_nirenberg_extremizer() {
    let g = GridSpec::new(1, 4096, 80.0).unwrap();
    let r0 = rho0(1, 2.0, 2.0).unwrap();
    for &a in &[0.3, 1.0, 7.0] {
        let u = Field::radial(g.clone(), |r| a / r.cosh()).unwrap();
        assert!((gn_quotient(&u, 2.0).unwrap() - r0).abs() < 1e-4);
    }
    let gauss = Field::radial(g, |r| (-r * r).exp()).unwrap();
    assert!(gn_quotient(&gauss, 2.0).unwrap() < r0);
}

#[test]
fn critical_constant_radial_vs_grid() {
    let (w4, g2) = w_norms_radial();
    let radial = w4 / (g2 * g2);
    let grid = c_w_lattice(64, 128).extrapolated;
    assert!((grid / radial - 1.0).abs() < 1e-3, "{grid} vs {radial}");
    assert!((radial - c_w_closed_form()).abs() < 1e-12);
}

#[test]
fn c_beta_below_one_except_critical_endpoint() {
    for &b in &[0.125, 0.25, 0.5, 1.0, 2.0, 4.0] {
        for n in 1..=3 {
            for &p in &[0.5, 1.0, 2.0, 3.0] {
                if p <= critical_power(n) {
                    assert!(c_beta_n_p(b, n, p).unwrap() < 1.0 - C_BELOW_ONE_SLACK, "{b} {n} {p}");
                }
            }
        }
        assert!((c_beta_n_p(b, 4, 2.0).unwrap() - 1.0).abs() < 1e-14);
    }
}

#[test]
fn zero_mass_inequality_on_random_mean_free_fields() {
    let g = GridSpec::new(1, 1024, 80.0).unwrap();
    let params = PhysicsParams::new(0.25, 1.0, 1, 0.0).unwrap();
    let opts = SolverOptions::default().with_tol(1e-12);
    let q = petviashvili_solve(&params, &g, Target::ZeroMass, &opts).unwrap();
    let k = zero_mass_constants(0.25, 1, 2.0, &q).unwrap();
    let e = energy(&q.profile, &params).unwrap().energy;
    let x2 = q.norms.xbeta_dot.powi(2);
    assert!((4.0 * e - x2).abs() < 1e-6 * x2);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let u = Field::from_fn(g.clone(), |x| {
            let y = x[0];
            let v = c[0] * (-(y - 8.0 * c[1]).powi(2) * (0.2 + c[2].abs())).exp()
                + c[3] * (-(y - 8.0 * c[4]).powi(2) * (0.2 + c[5].abs())).exp();
            Complex64::new(v, 0.0)
        })
        .unwrap()
        .without_mean();
        let (lhs, rhs) = zero_mass_sides(&u, 0.25, 2.0, &k).unwrap();
        assert!(lhs <= rhs * (1.0 + 1e-8), "{lhs} > {rhs}");
    }

    let wrong = petviashvili_solve(
        &PhysicsParams::new(0.5, 1.0, 1, 0.0).unwrap(),
        &g,
        Target::ZeroMass,
        &opts,
    )
    .unwrap();
    assert!(matches!(zero_mass_constants(0.25, 1, 2.0, &wrong), Err(Error::InconsistentState(_))));
}

#[test]
fn defocusing_run_respects_energy_bound() {
    let g = GridSpec::new(1, 256, 40.0).unwrap();
    let p = PhysicsParams::new(0.5, 1.0, -1, 0.0).unwrap();
    let u0 = Field::radial(g, |r| 2.0 * (-r * r / 4.0).exp()).unwrap();
    let mut prov = ComputedProfiles::new(ConstantsStore::in_memory());
    let report = check_global(&u0, &p, &mut prov).unwrap();
    let cfg = EvolveConfig {
        t_end: 2.0,
        ..Default::default()
    };
    let ev = monitor_run(&u0, &p, &cfg, &report).unwrap();
    ev.check().unwrap();
    assert!(ev.series.records.iter().all(|r| r.threshold_margin.unwrap() > 0.0));
    assert!(ev.series.to_csv().contains("# threshold_satisfied=true"));
}

#[test]
fn unsatisfied_report_runs_without_claims() {
    let g = GridSpec::new(2, 128, 30.0).unwrap();
    let p = PhysicsParams::new(0.5, 1.0, 1, 0.0).unwrap();
    let u0 = townes(&g).scale(1.2);
    let mut prov = ComputedProfiles::new(ConstantsStore::in_memory());
    let report = check_global(&u0, &p, &mut prov).unwrap();
    assert!(!report.satisfied);
    let cfg = EvolveConfig {
        dt: 1e-3,
        t_end: 0.2,
        ..Default::default()
    };
    let ev = monitor_run(&u0, &p, &cfg, &report).unwrap();
    assert!(ev.warnings.iter().any(|w| w.contains("no trapping claimed")));
}

#[test]
fn report_json_shape() {
    let g = GridSpec::new(2, 128, 30.0).unwrap();
    let p = PhysicsParams::new(0.5, 1.0, 1, 0.0).unwrap();
    let mut prov = ComputedProfiles::new(ConstantsStore::in_memory());
    let r = check_global(&townes(&g).scale(0.5), &p, &mut prov).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
    assert_eq!(v["case_id"]["case"], "n2_mass");
    assert_eq!(v["satisfied"], true);
    assert!(v["constants_used"]["psi_mass"].as_f64().unwrap() > 11.0);
    assert!(v["version"].as_str().unwrap().starts_with("convnls"));
}
