//! Unnormalised n-dimensional FFT over row-major arrays.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

// Lanes gathered per batch for the strided axes.
const LANE_BATCH: usize = 16;

/// Forward/inverse plans for `N^n` row-major arrays.
#[derive(Clone)]
pub struct FftNd {
    dim: usize,
    points: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftNd {
    pub fn new(dim: usize, points: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            dim,
            points,
            forward: planner.plan_fft_forward(points),
            inverse: planner.plan_fft_inverse(points),
        }
    }

    /// In-place `sum_j u_j e^{-2 pi i k j / N}` along every axis.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// In-place `sum_k c_k e^{+2 pi i k j / N}` along every axis (no 1/N).
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
    }

    fn run(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.points;
        debug_assert_eq!(data.len(), n.pow(self.dim as u32));
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        // contiguous last axis
        plan.process_with_scratch(data, &mut scratch);
        if self.dim == 1 {
            return;
        }
        let total = data.len();
        let mut buf = Vec::new();
        for axis in 0..self.dim - 1 {
            let inner = n.pow((self.dim - 1 - axis) as u32);
            let outer = total / (inner * n);
            for o in 0..outer {
                let base = o * inner * n;
                let mut lane0 = 0;
                while lane0 < inner {
                    let lanes = LANE_BATCH.min(inner - lane0);
                    buf.resize(lanes * n, Complex64::default());
                    for j in 0..n {
                        let row = base + j * inner + lane0;
                        for l in 0..lanes {
                            buf[l * n + j] = data[row + l];
                        }
                    }
                    plan.process_with_scratch(&mut buf, &mut scratch);
                    for j in 0..n {
                        let row = base + j * inner + lane0;
                        for l in 0..lanes {
                            data[row + l] = buf[l * n + j];
                        }
                    }
                    lane0 += lanes;
                }
            }
        }
    }
}
