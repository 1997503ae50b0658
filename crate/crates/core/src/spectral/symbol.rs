use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_complex::Complex64;

use super::fft::FftNd;
use super::field::Field;
use super::grid::GridSpec;
use crate::error::{Error, Result};
use crate::params::{PhysicsParams, ZeroModePolicy};

static MEAN_PROJECTIONS: AtomicU64 = AtomicU64::new(0);

/// Number of times a nonzero mean was silently projected out under
/// [`ZeroModePolicy::ZeroOut`] in this process.
pub fn mean_projections() -> u64 {
    MEAN_PROJECTIONS.load(Ordering::Relaxed)
}

/// Radial Fourier multiplier `sigma(|xi|)` with an explicit value at `xi = 0`.
#[derive(Clone)]
pub struct MultiplierSymbol {
    evaluator: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    zero_mode_value: f64,
}

impl MultiplierSymbol {
    pub fn radial(f: impl Fn(f64) -> f64 + Send + Sync + 'static, zero_mode_value: f64) -> Self {
        Self {
            evaluator: Arc::new(f),
            zero_mode_value,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::radial(move |_| c, c)
    }

    /// Value at `|xi| = r`; the zero-mode value at `r == 0`.
    pub fn eval(&self, r: f64) -> f64 {
        if r == 0.0 {
            self.zero_mode_value
        } else {
            (self.evaluator)(r)
        }
    }

    /// Value at a frequency vector.
    pub fn eval_at(&self, xi: &[f64]) -> f64 {
        self.eval(xi.iter().map(|x| x * x).sum::<f64>().sqrt())
    }

    pub fn zero_mode_value(&self) -> f64 {
        self.zero_mode_value
    }

    /// Symbol values over the lattice of `grid`, FFT order.
    pub fn table(&self, grid: &GridSpec) -> Vec<f64> {
        grid.magnitudes().iter().map(|&r| self.eval(r)).collect()
    }
}

impl fmt::Debug for MultiplierSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierSymbol")
            .field("zero_mode_value", &self.zero_mode_value)
            .finish_non_exhaustive()
    }
}

/// `m(xi) = |xi|^2 + eps |xi|^{-2 beta}`, zero at the origin.
pub fn dispersion_symbol(params: &PhysicsParams) -> MultiplierSymbol {
    let (eps, beta) = (params.eps, params.beta);
    if eps == 0.0 {
        return MultiplierSymbol::radial(|r| r * r, 0.0);
    }
    MultiplierSymbol::radial(move |r| r * r + eps * r.powf(-2.0 * beta), 0.0)
}

/// `|xi|^{2s}`. The origin maps to 1 for `s = 0` and to 0 otherwise.
pub fn power_symbol(s: f64) -> MultiplierSymbol {
    if s == 0.0 {
        return MultiplierSymbol::constant(1.0);
    }
    MultiplierSymbol::radial(move |r| r.powf(2.0 * s), 0.0)
}

/// Multiplies `u` by `sym` in Fourier space, or by `exp(i t sym)` when
/// `phase_time` is given.
pub fn apply_multiplier(u: &Field, sym: &MultiplierSymbol, phase_time: Option<f64>) -> Field {
    let plans = FftNd::new(u.grid().dim(), u.grid().points());
    let table = sym.table(u.grid());
    match phase_time {
        None => multiply_raw(u, &plans, |i| Complex64::new(table[i], 0.0)),
        Some(t) => multiply_raw(u, &plans, |i| Complex64::from_polar(1.0, t * table[i])),
    }
}

/// `D^{2s} u`. Negative `s` needs the mean resolved by the policy.
pub fn lbeta_apply(u: &Field, s: f64, params: &PhysicsParams) -> Result<Field> {
    if s < 0.0 {
        resolve_mean(u, params.zero_mode_policy)?;
    }
    Ok(apply_multiplier(u, &power_symbol(s), None))
}

/// Applies the zero-mode policy to `u`: errors under the strict policy when
/// the mean is too large, counts a projection otherwise.
pub fn resolve_mean(u: &Field, policy: ZeroModePolicy) -> Result<()> {
    let mean = u.mean().norm();
    match policy {
        ZeroModePolicy::RejectNonzeroMean { tol } if mean > tol => Err(Error::NonzeroMean { mean, tol }),
        ZeroModePolicy::RejectNonzeroMean { .. } => Ok(()),
        ZeroModePolicy::ZeroOut => {
            // roundoff-level means are not worth counting
            if mean > ZeroModePolicy::DEFAULT_TOL * u.max_abs().max(1.0) {
                MEAN_PROJECTIONS.fetch_add(1, Ordering::Relaxed);
            }
            Ok(())
        }
    }
}

// FFT, multiply mode i by factor(i), inverse. The parity phase of the
// public spectrum cancels and is skipped.
pub(crate) fn multiply_raw(u: &Field, plans: &FftNd, factor: impl Fn(usize) -> Complex64) -> Field {
    let mut data = u.values().to_vec();
    plans.forward(&mut data);
    let norm = 1.0 / data.len() as f64;
    for (i, v) in data.iter_mut().enumerate() {
        *v *= factor(i) * norm;
    }
    plans.inverse(&mut data);
    Field::from_parts_unchecked(u.grid().clone(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;
    use std::f64::consts::PI;

    fn params(beta: f64, eps: f64) -> PhysicsParams {
        PhysicsParams::new(beta, eps, 1, 1.0).unwrap()
    }

    fn plane(grid: &GridSpec, k: f64) -> Field {
        Field::from_fn(grid.clone(), |x| Complex64::from_polar(1.0, k * x[0])).unwrap()
    }

    #[test]
    fn dispersion_values() {
        assert_eq!(dispersion_symbol(&params(0.5, 1.0)).eval(1.0), 2.0);
        assert_eq!(dispersion_symbol(&params(0.25, 1.0)).eval(4.0), 16.5);
        let free = dispersion_symbol(&params(0.25, 0.0));
        for r in [0.0, 0.5, 3.0] {
            assert_eq!(free.eval(r), r * r);
        }
        assert_eq!(dispersion_symbol(&params(0.25, 1.0)).zero_mode_value(), 0.0);
    }

    #[test]
    fn dispersion_is_exactly_radial_on_the_lattice() {
        let g = GridSpec::new(3, 16, 7.3).unwrap();
        let table = dispersion_symbol(&params(0.3, 0.7)).table(&g);
        let mut seen: HashMap<i64, f64> = HashMap::new();
        for (i, v) in table.iter().enumerate() {
            let k2: i64 = g.lattice_point(i).iter().map(|k| k * k).sum();
            let prev = *seen.entry(k2).or_insert(*v);
            assert_eq!(prev.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn identity_and_phase_multipliers() {
        let g = GridSpec::new(1, 32, 2.0 * PI).unwrap();
        let u = Field::radial(g.clone(), |r| (-(r * r)).exp()).unwrap();
        let same = apply_multiplier(&u, &MultiplierSymbol::constant(1.0), None);
        assert!(u.max_abs_diff(&same).unwrap() < 1e-15);

        let sym = dispersion_symbol(&params(0.5, 1.0));
        let w = plane(&g, 3.0);
        let t = 0.37;
        let out = apply_multiplier(&w, &sym, Some(t));
        let expect = w.map(|v| v * Complex64::from_polar(1.0, t * sym.eval(3.0)));
        assert!(out.max_abs_diff(&expect).unwrap() < 1e-13);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = Field::new(
            g.clone(),
            (0..g.len()).map(|_| Complex64::new(rng.gen(), rng.gen())).collect(),
        )
        .unwrap();
        for t in [0.1, 10.0, -3.0] {
            let o = apply_multiplier(&r, &sym, Some(t));
            assert!((o.l2_norm() / r.l2_norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lbeta_examples() {
        let g = GridSpec::new(1, 32, 2.0 * PI).unwrap();
        let p = params(0.5, 1.0);
        let u = plane(&g, 1.0);
        let out = lbeta_apply(&u, -p.beta, &p).unwrap();
        assert!(out.max_abs_diff(&u).unwrap() < 1e-14);
        let u2 = plane(&g, 2.0);
        let out = lbeta_apply(&u2, -0.5, &p).unwrap();
        assert!(out.max_abs_diff(&u2.scale(0.5)).unwrap() < 1e-14);

        let c = Field::from_fn(g, |_| Complex64::new(1.0, 0.0)).unwrap();
        let strict = p.with_policy(ZeroModePolicy::strict());
        assert!(matches!(lbeta_apply(&c, -0.5, &strict), Err(Error::NonzeroMean { .. })));
        let before = mean_projections();
        let z = lbeta_apply(&c, -0.5, &p).unwrap();
        assert!(z.max_abs() < 1e-14);
        assert!(mean_projections() > before);
    }

    #[test]
    fn lbeta_is_self_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = GridSpec::new(2, 16, 5.0).unwrap();
        let p = params(0.4, 1.0).with_policy(ZeroModePolicy::strict());
        for _ in 0..20 {
            let mut mk = || {
                Field::new(
                    g.clone(),
                    (0..g.len())
                        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect(),
                )
                .unwrap()
                .without_mean()
            };
            let (u, v) = (mk(), mk());
            for s in [-0.4, -0.2, 0.3] {
                let a = lbeta_apply(&u, s, &p).unwrap().inner(&v).unwrap();
                let b = u.inner(&lbeta_apply(&v, s, &p).unwrap()).unwrap();
                assert!((a - b).norm() < 1e-10 * a.norm().max(1.0));
            }
        }
    }

    #[test]
    fn fractional_exponential_bound() {
        let g = GridSpec::new(1, 4096, 80.0).unwrap();
        let p = params(0.25, 1.0);
        let a = 1.0;
        let u = Field::radial(g.clone(), |r| (-a * r).exp()).unwrap();
        let du = lbeta_apply(&u, p.beta, &p).unwrap();
        let mut worst_near_cusp: f64 = 0.0;
        for (i, v) in du.values().iter().enumerate() {
            let x = g.position(i)[0].abs();
            let excess = v.re - a.powf(2.0 * p.beta) * (-a * x).exp();
            if x <= 20.0 && x >= 0.125 {
                assert!(excess <= 1e-6, "x = {x}");
            }
            if x < 0.125 {
                worst_near_cusp = worst_near_cusp.max(excess);
            }
        }
        // At the cusp the bound is false: the continuum value at 0 is sqrt(2) > 1.
        assert!(worst_near_cusp > 0.3);
        assert!((du.values()[g.origin_index()].re - 2f64.sqrt()).abs() < 0.1);
    }
}
