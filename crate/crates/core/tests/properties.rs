use proptest::prelude::*;

use convnls_core::functionals::{
    embedding_sides, gn_quotient, kappa_max, m_quotient, mass, norm_equivalence_constant, xbeta_norms,
};
use convnls_core::global_monitor::{embedding_constant, rho0};
use convnls_core::propagator::{linear_propagate, strang_step};
use convnls_core::spectral::lbeta_apply;
use convnls_core::{Complex64, Field, GridSpec, PhysicsParams};

fn grid() -> GridSpec {
    GridSpec::new(1, 512, 40.0).unwrap()
}

/// Two complex Gaussian bumps well inside the box.
fn bumps(c: &[f64]) -> Field {
    Field::from_fn(grid(), |x| {
        let y = x[0];
        let b = |a: f64, s: f64, w: f64, k: f64| {
            Complex64::from_polar(a * (-(y - 6.0 * s).powi(2) * (0.3 + w.abs())).exp(), 3.0 * k * y)
        };
        b(c[0], c[1], c[2], c[3]) + b(c[4], c[5], c[6], c[7])
    })
    .unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 8).prop_filter("nonzero amplitude", |c| c[0].abs() + c[4].abs() > 0.1)
}

fn beta() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.25, 0.5, 1.0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn mass_is_quadratic_and_m_quotient_scale_free(c in coeffs(), s in 0.1f64..5.0, neg in any::<bool>()) {
        let u = bumps(&c).without_mean();
        let s = if neg { -s } else { s };
        let v = u.scale(s);
        prop_assert!((mass(&v) - s * s * mass(&u)).abs() <= 1e-12 * s * s * mass(&u));
        let p = PhysicsParams::new(0.5, 1.0, 1, 1.0).unwrap();
        let (a, b) = (m_quotient(&u, &p).unwrap(), m_quotient(&v, &p).unwrap());
        prop_assert!((a - b).abs() <= 1e-10 * a.abs());
    }

    #[test]
    fn norm_equivalence_bracket(c in coeffs(), b in beta()) {
        let u = bumps(&c).without_mean();
        let p = PhysicsParams::new(b, 1.0, 1, 1.0).unwrap();
        let r = xbeta_norms(&u, &p).unwrap();
        let k = norm_equivalence_constant(b);
        prop_assert!(r.xbeta_dot <= r.xbeta * (1.0 + 1e-12));
        prop_assert!(r.xbeta <= k * r.xbeta_dot * (1.0 + 1e-12), "{} > {} * {}", r.xbeta, k, r.xbeta_dot);
    }

    #[test]
    fn embedding_holds_across_kappa(c in coeffs(), b in beta(), which in 0usize..3) {
        let u = bumps(&c).without_mean();
        let p = PhysicsParams::new(b, 1.0, 1, 1.0).unwrap();
        let kmax = kappa_max(1, 2.0);
        let kappa = [0.0, 0.5 * kmax, kmax][which];
        let rho = embedding_constant(1, 2.0, 2.0).unwrap();
        let (lhs, rhs) = embedding_sides(&u, &p, 2.0, kappa, rho).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-9), "kappa {kappa}: {lhs} > {rhs}");
    }

    #[test]
    fn gagliardo_nirenberg_quotient_below_sharp_constant(c in coeffs()) {
        let u = bumps(&c);
        let q = gn_quotient(&u, 2.0).unwrap();
        prop_assert!(q <= rho0(1, 2.0, 2.0).unwrap() * (1.0 + 1e-9));
    }

    #[test]
    fn lbeta_is_symmetric(c in coeffs(), d in coeffs(), s in 0.1f64..1.0) {
        let (u, v) = (bumps(&c).without_mean(), bumps(&d).without_mean());
        let p = PhysicsParams::new(0.5, 1.0, 1, 1.0).unwrap();
        let a = lbeta_apply(&u, s, &p).unwrap().inner(&v).unwrap();
        let b = u.inner(&lbeta_apply(&v, s, &p).unwrap()).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn flows_preserve_mass(c in coeffs(), t in 0.0f64..3.0) {
        let u = bumps(&c).without_mean();
        let p = PhysicsParams::new(0.5, 1.0, 1, 1.0).unwrap();
        let m0 = mass(&u);
        prop_assert!((mass(&linear_propagate(&u, t, &p)) - m0).abs() <= 1e-12 * m0);
        prop_assert!((mass(&strang_step(&u, 1e-2, &p).unwrap()) - m0).abs() <= 1e-12 * m0);
    }
}
