//! Multidimensional FFT with Fourier-series normalization on `[-R, R)^d`.
//!
//! For samples `f_j = f(x_j)` with `x_j = -R + j·(2R/n)` the true
//! Fourier-series coefficient of the mode `e^{iξ_k x}` (ξ_k = πk/R) is
//!
//! ```text
//! c_k = (1/2R) ∫ f e^{-iξ_k x} dx ≈ (1/n) Σ_j f_j e^{-iξ_k x_j}
//!     = (-1)^k (1/n) Σ_j f_j e^{-2πikj/n},
//! ```
//!
//! because the origin of the box sits at `-R`, not 0:
//! `e^{-iξ_k x_j} = e^{iπk} e^{-2πikj/n}`. So [`forward`] is a raw FFT
//! followed by the alternating-sign phase and `1/N` scaling, and for
//! band-limited data the round trip is exact to rounding. In `d` dimensions
//! the phase is `(-1)^{Σ_a k_a}`, one sign per axis.
//!
//! With this normalization Parseval reads
//! `∫ |f|² dx = (2R)^d Σ_k |c_k|² = dV Σ_j |f_j|²`.

use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::grid::Grid;

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

/// Raw (unnormalized) FFT along one axis of row-major data, in place.
fn transform_axis(data: &mut [Complex64], grid: &Grid, axis: usize, forward: bool) {
    let n = grid.points(axis);
    let strides = grid.strides();
    let stride = strides[axis];
    let total = grid.len();
    let fft = {
        let mut p = planner().lock().unwrap();
        if forward {
            p.plan_fft_forward(n)
        } else {
            p.plan_fft_inverse(n)
        }
    };
    let mut line = vec![Complex64::default(); n];
    let block = n * stride;
    let mut base = 0;
    while base < total {
        for inner in 0..stride {
            for (j, slot) in line.iter_mut().enumerate() {
                *slot = data[base + j * stride + inner];
            }
            fft.process(&mut line);
            for (j, v) in line.iter().enumerate() {
                data[base + j * stride + inner] = *v;
            }
        }
        base += block;
    }
}

/// Alternating-sign phase `(-1)^{Σ_a idx_a}` applied in place.
fn apply_checkerboard(data: &mut [Complex64], grid: &Grid) {
    let dims = grid.points_all().to_vec();
    let strides = grid.strides();
    for (lin, v) in data.iter_mut().enumerate() {
        let mut parity = 0usize;
        let mut rem = lin;
        for a in 0..dims.len() {
            let idx = rem / strides[a];
            rem %= strides[a];
            parity += idx;
        }
        if parity % 2 == 1 {
            *v = -*v;
        }
    }
}

/// Physical samples (row-major) → Fourier-series coefficients `c_k`,
/// indexed by FFT bin (use [`Grid::frequency`] to map bin → ξ).
pub fn forward(grid: &Grid, values: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(values.len(), grid.len());
    let mut data = values.to_vec();
    for axis in 0..grid.dim() {
        transform_axis(&mut data, grid, axis, true);
    }
    apply_checkerboard(&mut data, grid);
    let scale = 1.0 / grid.len() as f64;
    for v in &mut data {
        *v *= scale;
    }
    data
}

/// Fourier-series coefficients `c_k` → physical samples, the exact inverse
/// of [`forward`].
pub fn inverse(grid: &Grid, coeffs: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(coeffs.len(), grid.len());
    let mut data = coeffs.to_vec();
    apply_checkerboard(&mut data, grid);
    for axis in 0..grid.dim() {
        transform_axis(&mut data, grid, axis, false);
    }
    data
}
