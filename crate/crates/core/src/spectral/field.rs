use num_complex::Complex64;

use super::fft::FftNd;
use super::grid::{advance, GridSpec};
use crate::error::{Error, Result};

/// Complex field sampled on a periodic grid (physical space, row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<Complex64>,
}

/// Fourier coefficients `c_k` with `u(x) = sum_k c_k e^{i xi_k . x}`, FFT order.
///
/// The forward transform carries the `1/N^n` factor, so the continuum
/// Plancherel identity reads `h sum |u_j|^2 = L^n sum |c_k|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(format!("field sample {i} is {}", values[i])));
        }
        Ok(Self { grid, values })
    }

    /// Field from real samples.
    pub fn from_real(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.position(i))).collect();
        Self::new(grid, values)
    }

    /// Samples a radial real profile `f(|x|)`.
    pub fn radial(grid: GridSpec, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.radii().into_iter().map(f).collect();
        Self::from_real(grid, values)
    }

    pub fn zeros(grid: GridSpec) -> Self {
        let values = vec![Complex64::default(); grid.len()];
        Self { grid, values }
    }

    // Used by hot loops that already guarantee finiteness.
    pub(crate) fn from_parts_unchecked(grid: GridSpec, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.norm_sqr() == 0.0)
    }

    /// Real parts of the samples.
    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Largest `|Im u|`; zero for real-valued fields.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Flat index of the largest `|u|` (first occurrence).
    pub fn argmax_abs(&self) -> usize {
        let mut best = 0;
        let mut val = -1.0;
        for (i, v) in self.values.iter().enumerate() {
            let a = v.norm_sqr();
            if a > val {
                val = a;
                best = i;
            }
        }
        best
    }

    /// `h sum u`.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.grid.cell_volume()
    }

    /// Box average of `u`.
    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    /// `u - mean(u)`.
    pub fn without_mean(&self) -> Field {
        let m = self.mean();
        self.map(|v| v - m)
    }

    /// `<u, v> = h sum conj(u) v`.
    pub fn inner(&self, other: &Field) -> Result<Complex64> {
        self.check_grid(other)?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.grid.cell_volume())
    }

    /// Discrete `||u||_{L^p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let h = self.grid.cell_volume();
        if p.is_infinite() {
            return self.max_abs();
        }
        (h * self.values.iter().map(|v| v.norm().powf(p)).sum::<f64>()).powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        (self.grid.cell_volume() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field::from_parts_unchecked(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, c: f64) -> Field {
        self.map(|v| v * c)
    }

    pub fn conj(&self) -> Field {
        self.map(|v| v.conj())
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn zip_with(&self, other: &Field, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Field> {
        self.check_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Field::from_parts_unchecked(self.grid.clone(), values))
    }

    /// Largest pointwise `|u - v|`.
    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Periodic shift moving sample `from` onto sample `to`.
    pub fn roll_to(&self, from: usize, to: usize) -> Field {
        let n = self.grid.points();
        let dim = self.grid.dim();
        let split = |mut f: usize| {
            let mut v = vec![0usize; dim];
            for d in (0..dim).rev() {
                v[d] = f % n;
                f /= n;
            }
            v
        };
        let a = split(from);
        let b = split(to);
        let shift: Vec<usize> = a.iter().zip(&b).map(|(&x, &y)| (y + n - x) % n).collect();
        let mut out = vec![Complex64::default(); self.values.len()];
        let mut idx = vec![0usize; dim];
        for v in &self.values {
            let mut target = 0;
            for d in 0..dim {
                target = target * n + (idx[d] + shift[d]) % n;
            }
            out[target] = *v;
            advance(&mut idx, n);
        }
        Field::from_parts_unchecked(self.grid.clone(), out)
    }

    /// Shift so that the largest `|u|` sits at the origin sample.
    pub fn centered_on_peak(&self) -> Field {
        self.roll_to(self.argmax_abs(), self.grid.origin_index())
    }

    /// Largest `|u(x) - u(-x)|`.
    pub fn max_reflection_asymmetry(&self) -> f64 {
        (0..self.values.len())
            .map(|i| (self.values[i] - self.values[self.grid.reflected_index(i)]).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_spectrum(&self) -> Spectrum {
        let plans = FftNd::new(self.grid.dim(), self.grid.points());
        self.to_spectrum_with(&plans)
    }

    pub fn to_spectrum_with(&self, plans: &FftNd) -> Spectrum {
        let mut data = self.values.clone();
        plans.forward(&mut data);
        let norm = 1.0 / self.values.len() as f64;
        apply_parity(&self.grid, &mut data, norm);
        Spectrum {
            grid: self.grid.clone(),
            coeffs: data,
        }
    }

    /// Band-limited interpolation onto `grid` (same box, any resolution).
    pub fn resample(&self, grid: &GridSpec) -> Result<Field> {
        self.to_spectrum().resample(grid)?.to_field()
    }

    fn check_grid(&self, other: &Field) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

impl Spectrum {
    pub fn new(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} coefficients for a grid of {} points",
                coeffs.len(),
                grid.len()
            )));
        }
        if coeffs.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("spectral coefficient".into()));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        let coeffs = vec![Complex64::default(); grid.len()];
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Coefficients in FFT order.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at integer wavenumber `k` (`None` outside the lattice).
    pub fn coeff(&self, k: &[i64]) -> Option<Complex64> {
        self.grid.lattice_index(k).map(|i| self.coeffs[i])
    }

    /// `L^n sum |c_k|^2`, equal to the discrete `||u||^2_{L^2}`.
    pub fn l2_norm_sqr(&self) -> f64 {
        self.grid.volume() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// `L^n sum w(|xi_k|) |c_k|^2`.
    pub fn weighted_norm_sqr(&self, w: impl Fn(f64) -> f64) -> f64 {
        let mags = self.grid.magnitudes();
        self.grid.volume()
            * self
                .coeffs
                .iter()
                .zip(mags)
                .map(|(c, &r)| {
                    let n = c.norm_sqr();
                    if n == 0.0 {
                        0.0
                    } else {
                        w(r) * n
                    }
                })
                .sum::<f64>()
    }

    pub fn to_field(&self) -> Result<Field> {
        let plans = FftNd::new(self.grid.dim(), self.grid.points());
        self.to_field_with(&plans)
    }

    pub fn to_field_with(&self, plans: &FftNd) -> Result<Field> {
        let mut data = self.coeffs.clone();
        apply_parity(&self.grid, &mut data, 1.0);
        plans.inverse(&mut data);
        Field::new(self.grid.clone(), data)
    }

    /// Zero-pads or truncates onto `grid` (same dimension and box length).
    /// Padding splits the Nyquist coefficient evenly between `±N/2`, which
    /// keeps real fields real; truncation folds `±N/2` back together, so the
    /// two are inverse to each other.
    pub fn resample(&self, grid: &GridSpec) -> Result<Spectrum> {
        if grid.dim() != self.grid.dim() || grid.length() != self.grid.length() {
            return Err(Error::GridMismatch);
        }
        let (ns, nt) = (self.grid.points() as i64, grid.points() as i64);
        if ns == nt {
            return Spectrum::new(grid.clone(), self.coeffs.clone());
        }
        let mut out = Spectrum::zeros(grid.clone());
        let mut k = vec![0i64; grid.dim()];
        for (i, c) in self.coeffs.iter().enumerate() {
            let src = self.grid.lattice_point(i);
            if nt < ns && src.iter().any(|&ki| ki.abs() > nt / 2) {
                continue;
            }
            // axes sitting on the source Nyquist are split in two
            let split: Vec<usize> = (0..src.len()).filter(|&d| nt > ns && src[d] == -ns / 2).collect();
            let share = *c * 0.5f64.powi(split.len() as i32);
            for mask in 0..1usize << split.len() {
                k.copy_from_slice(&src);
                for (b, &d) in split.iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        k[d] = ns / 2;
                    }
                }
                if nt < ns {
                    for kd in k.iter_mut().filter(|kd| **kd == nt / 2) {
                        *kd = -nt / 2;
                    }
                }
                if let Some(j) = grid.lattice_index(&k) {
                    out.coeffs[j] += share;
                }
            }
        }
        Ok(out)
    }
}

// Multiplies each entry by `scale * (-1)^{k_1 + .. + k_n}`, the phase from
// placing sample 0 at x = -L/2.
pub(crate) fn apply_parity(grid: &GridSpec, data: &mut [Complex64], scale: f64) {
    let n = grid.points();
    let mut idx = vec![0usize; grid.dim()];
    for v in data.iter_mut() {
        // wavenumber(i) and i share parity because N is even
        let odd = idx.iter().sum::<usize>() % 2 == 1;
        *v *= if odd { -scale } else { scale };
        advance(&mut idx, n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(grid: &GridSpec, rng: &mut ChaCha8Rng) -> Field {
        let values = (0..grid.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Field::new(grid.clone(), values).unwrap()
    }

    #[test]
    fn rejects_non_finite_samples() {
        let g = GridSpec::new(1, 4, 1.0).unwrap();
        let v = vec![Complex64::new(f64::NAN, 0.0); 4];
        assert!(matches!(Field::new(g.clone(), v), Err(Error::NonFinite(_))));
        let v = vec![Complex64::new(0.0, f64::INFINITY); 4];
        assert!(matches!(Field::new(g, v), Err(Error::NonFinite(_))));
    }

    #[test]
    fn constant_field_has_only_zero_mode() {
        let g = GridSpec::new(2, 8, 3.0).unwrap();
        let u = Field::from_fn(g, |_| Complex64::new(2.5, -1.0)).unwrap();
        let s = u.to_spectrum();
        for (i, c) in s.coeffs().iter().enumerate() {
            if i == 0 {
                assert!((c - Complex64::new(2.5, -1.0)).norm() < 1e-14);
            } else {
                assert!(c.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn plane_wave_lands_on_single_coefficient() {
        let g = GridSpec::new(1, 8, 2.0 * PI).unwrap();
        let u = Field::from_fn(g, |x| Complex64::from_polar(1.0, x[0])).unwrap();
        let s = u.to_spectrum();
        for k in -4..4i64 {
            let c = s.coeff(&[k]).unwrap();
            let expect = if k == 1 { 1.0 } else { 0.0 };
            assert!((c - Complex64::new(expect, 0.0)).norm() < 1e-14, "k = {k}");
        }
    }

    #[test]
    fn round_trip_and_plancherel_on_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (dim, n, l) in [(1, 64, 5.0), (2, 16, 2.0), (3, 8, 7.0)] {
            let g = GridSpec::new(dim, n, l).unwrap();
            for _ in 0..100 {
                let u = random_field(&g, &mut rng);
                let s = u.to_spectrum();
                let back = s.to_field().unwrap();
                let err = u.max_abs_diff(&back).unwrap() / u.max_abs();
                assert!(err < 1e-12);
                let lhs = u.l2_norm().powi(2);
                let rhs = s.l2_norm_sqr();
                assert!(((lhs - rhs) / lhs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn resample_preserves_band_limited_field() {
        let g = GridSpec::new(1, 32, 2.0 * PI).unwrap();
        let fine = g.with_points(128).unwrap();
        let f = |x: &[f64]| Complex64::new((3.0 * x[0]).cos() + (x[0]).sin(), 0.0);
        let u = Field::from_fn(g.clone(), f).unwrap();
        let up = u.resample(&fine).unwrap();
        let exact = Field::from_fn(fine.clone(), f).unwrap();
        assert!(up.max_abs_diff(&exact).unwrap() < 1e-13);
        // Nyquist content survives a round trip and stays real when padded
        let nyq = |x: &[f64]| Complex64::new((16.0 * x[0]).cos(), 0.0);
        let v = Field::from_fn(g.clone(), nyq).unwrap();
        let same = v.resample(&g).unwrap();
        assert!(same.max_abs_diff(&v).unwrap() < 1e-14);
        let padded = v.resample(&fine).unwrap();
        assert!(padded.max_imag() < 1e-14);
        let back = padded.resample(&g).unwrap();
        assert!(back.max_abs_diff(&v).unwrap() < 1e-13);
    }

    #[test]
    fn roll_centres_peak() {
        let g = GridSpec::new(2, 16, 8.0).unwrap();
        let u = Field::radial(g.clone(), |r| (-(r * r)).exp())
            .unwrap()
            .roll_to(g.origin_index(), 3);
        assert_eq!(u.argmax_abs(), 3);
        let c = u.centered_on_peak();
        assert_eq!(c.argmax_abs(), g.origin_index());
        assert!(c.max_reflection_asymmetry() < 1e-15);
    }
}
