use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometry of the periodic box `[-L/2, L/2)^n` sampled with `N` points per axis.
///
/// Physical samples are stored row-major with the last axis contiguous; the
/// sample `j` on each axis sits at `x_j = -L/2 + j L / N`. Spectral arrays use
/// the usual FFT ordering per axis: integer wavenumbers `0, 1, .., N/2 - 1,
/// -N/2, .., -1`, with physical frequency `xi_k = 2 pi k / L`.
#[derive(Clone)]
pub struct GridSpec {
    dim: usize,
    points: usize,
    length: f64,
    // |xi| for every lattice point, in FFT order; shared between clones.
    magnitudes: Arc<[f64]>,
}

impl GridSpec {
    pub fn new(dim: usize, points: usize, length: f64) -> Result<Self> {
        if !(1..=4).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=4")));
        }
        if points < 2 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "{points} points per axis is not a power of two >= 2"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("box length {length} must be positive")));
        }
        let total = points.pow(dim as u32);
        let dk = 2.0 * PI / length;
        let ints: Vec<i64> = (0..points).map(|i| wavenumber(i, points)).collect();
        let mut magnitudes = Vec::with_capacity(total);
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            // Integer sum of squares keeps equal-|k| lattice points bit-identical.
            let k2: i64 = idx.iter().map(|&i| ints[i] * ints[i]).sum();
            magnitudes.push(dk * (k2 as f64).sqrt());
            advance(&mut idx, points);
        }
        Ok(Self {
            dim,
            points,
            length,
            magnitudes: magnitudes.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Total number of lattice points, `N^n`.
    pub fn len(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitudes.is_empty()
    }

    /// Grid spacing `L / N`.
    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    /// Cell volume `h = (L/N)^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Box volume `L^n`.
    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Frequency spacing `2 pi / L`.
    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Largest resolved frequency along an axis, `pi N / L`.
    pub fn max_axis_frequency(&self) -> f64 {
        PI * self.points as f64 / self.length
    }

    /// Memoised `|xi|` in FFT order.
    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    /// Integer wavenumber of FFT index `i` on one axis.
    pub fn wavenumber(&self, i: usize) -> i64 {
        wavenumber(i, self.points)
    }

    /// FFT-order index for integer wavenumber `k` on one axis.
    pub fn fft_index(&self, k: i64) -> Option<usize> {
        let n = self.points as i64;
        if k < -n / 2 || k >= n / 2 {
            return None;
        }
        Some(k.rem_euclid(n) as usize)
    }

    /// Flat FFT-order index of the lattice point with integer wavenumbers `k`.
    pub fn lattice_index(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.dim {
            return None;
        }
        let mut flat = 0;
        for &ki in k {
            flat = flat * self.points + self.fft_index(ki)?;
        }
        Some(flat)
    }

    /// Integer wavenumbers of the flat FFT-order index `flat`.
    pub fn lattice_point(&self, flat: usize) -> Vec<i64> {
        let mut out = vec![0i64; self.dim];
        let mut rem = flat;
        for d in (0..self.dim).rev() {
            out[d] = wavenumber(rem % self.points, self.points);
            rem /= self.points;
        }
        out
    }

    /// Physical frequency vector of the flat FFT-order index `flat`.
    pub fn frequency(&self, flat: usize) -> Vec<f64> {
        let dk = self.frequency_step();
        self.lattice_point(flat).into_iter().map(|k| dk * k as f64).collect()
    }

    /// 1-D frequencies along one axis in FFT order.
    pub fn axis_frequencies(&self) -> Vec<f64> {
        let dk = self.frequency_step();
        (0..self.points).map(|i| dk * self.wavenumber(i) as f64).collect()
    }

    /// 1-D physical coordinates along one axis.
    pub fn axis_coordinates(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points)
            .map(|j| -0.5 * self.length + j as f64 * h)
            .collect()
    }

    /// Physical position of the flat row-major sample index `flat`.
    pub fn position(&self, flat: usize) -> Vec<f64> {
        let h = self.spacing();
        let mut out = vec![0.0; self.dim];
        let mut rem = flat;
        for d in (0..self.dim).rev() {
            out[d] = -0.5 * self.length + (rem % self.points) as f64 * h;
            rem /= self.points;
        }
        out
    }

    /// `|x|` for every sample, row-major.
    pub fn radii(&self) -> Vec<f64> {
        let coords = self.axis_coordinates();
        let mut out = Vec::with_capacity(self.len());
        let mut idx = vec![0usize; self.dim];
        for _ in 0..self.len() {
            let r2: f64 = idx.iter().map(|&i| coords[i] * coords[i]).sum();
            out.push(r2.sqrt());
            advance(&mut idx, self.points);
        }
        out
    }

    /// Flat index of the sample sitting at the origin.
    pub fn origin_index(&self) -> usize {
        let half = self.points / 2;
        (0..self.dim).fold(0, |acc, _| acc * self.points + half)
    }

    /// Row-major index of the reflected sample `x -> -x`.
    pub fn reflected_index(&self, flat: usize) -> usize {
        let mut out = 0;
        let mut stride = 1;
        let mut rem = flat;
        for _ in 0..self.dim {
            let j = rem % self.points;
            rem /= self.points;
            // x_j = -L/2 + j h reflects to index N - j (mod N).
            let r = (self.points - j) % self.points;
            out += r * stride;
            stride *= self.points;
        }
        out
    }

    /// Same grid with `points` replaced.
    pub fn with_points(&self, points: usize) -> Result<Self> {
        Self::new(self.dim, points, self.length)
    }

    pub fn same_as(&self, other: &GridSpec) -> bool {
        self.dim == other.dim && self.points == other.points && self.length == other.length
    }

    pub fn descriptor(&self) -> GridDescriptor {
        GridDescriptor {
            dim: self.dim,
            points: self.points,
            length: self.length,
        }
    }
}

impl PartialEq for GridSpec {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl fmt::Debug for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridSpec")
            .field("dim", &self.dim)
            .field("points", &self.points)
            .field("length", &self.length)
            .finish()
    }
}

/// Serializable summary of a [`GridSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridDescriptor {
    pub dim: usize,
    pub points: usize,
    pub length: f64,
}

impl GridDescriptor {
    pub fn build(&self) -> Result<GridSpec> {
        GridSpec::new(self.dim, self.points, self.length)
    }
}

/// Box length such that a profile with tail bound `tail(r)` is below `threshold`
/// at `r = L/2`. Doubles from `start` until the bound is met.
pub fn box_length_for_tail(tail: impl Fn(f64) -> f64, start: f64, threshold: f64) -> Result<f64> {
    if !(start > 0.0) {
        return Err(Error::BadParams("start length must be positive".into()));
    }
    let mut l = start;
    for _ in 0..64 {
        if tail(0.5 * l).abs() < threshold {
            return Ok(l);
        }
        l *= 2.0;
    }
    Err(Error::BadParams("tail bound never drops below threshold".into()))
}

pub(crate) fn wavenumber(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

// Row-major odometer increment (last axis fastest).
pub(crate) fn advance(idx: &mut [usize], n: usize) {
    for d in (0..idx.len()).rev() {
        idx[d] += 1;
        if idx[d] < n {
            return;
        }
        idx[d] = 0;
    }
}
