//! Fourier-multiplier operators on the periodic grid.
//!
//! Every operator here is diagonal in the Fourier basis: it maps the
//! coefficient of `e^{iξ·x}` to `σ(ξ)` times itself. The symbols:
//!
//! - `fractional_laplacian` (power `s`): `σ(ξ) = |ξ|^s`, with the zero mode
//!   sent to 0 (also for negative `s`, so the inverse is well defined on
//!   mean-zero data);
//! - `bessel` (power `s`): `σ(ξ) = (1 + |ξ|²)^{s/2}`, invertible for all `s`;
//! - `directional_fractional` (axis `k`, power `s`): `σ(ξ) = |ξ_k|^s` with
//!   `σ = 0` on the hyperplane `ξ_k = 0`;
//! - `transverse_bessel` (axis `k`, power `s`):
//!   `σ(ξ) = (1 + Σ_{i≠k} ξ_i²)^{s/2}`;
//! - `hilbert` (axis `k`): `σ(ξ) = -i·sgn(ξ_k)` with `sgn(0) = 0`, so the
//!   operator squares to minus the identity on fields with no `ξ_k = 0`
//!   content and annihilates that hyperplane;
//! - `derivative` (multi-index `α`): `σ(ξ) = Π_a (iξ_a)^{α_a}`.
//!
//! The half-power commutator with the coordinate obeys the closed form
//! `[A^{1/2}, x] f = ½ H A^{-1/2} f` in one dimension, where `A` is the
//! fractional Laplacian and `H` the Hilbert multiplier; equivalently the
//! commutator has symbol action `-(i/2)·sgn(ξ)·|ξ|^{-1/2}` on the transform
//! of `f`. On the box this holds up to a boundary term controlled by the
//! mass of `x·f` near `±R`; tests use windowed data to keep it negligible.

use num_complex::Complex64;

use crate::fft;
use crate::grid::Grid;

/// Apply a frequency symbol to one sample vector: FFT, multiply by
/// `sym(ξ)`, inverse FFT.
pub fn apply_symbol(
    grid: &Grid,
    values: &[Complex64],
    sym: impl Fn(&[f64]) -> Complex64,
) -> Vec<Complex64> {
    let mut coeffs = fft::forward(grid, values);
    multiply_symbol(grid, &mut coeffs, sym);
    fft::inverse(grid, &coeffs)
}

/// Multiply coefficients (FFT-bin indexed) by `sym(ξ)` in place.
pub fn multiply_symbol(
    grid: &Grid,
    coeffs: &mut [Complex64],
    sym: impl Fn(&[f64]) -> Complex64,
) {
    let d = grid.dim();
    let strides = grid.strides();
    let mut xi = vec![0.0f64; d];
    for (lin, c) in coeffs.iter_mut().enumerate() {
        let mut rem = lin;
        for a in 0..d {
            let idx = rem / strides[a];
            rem %= strides[a];
            xi[a] = grid.frequency(a, idx);
        }
        *c *= sym(&xi);
    }
}

fn real_symbol(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// `(-Δ)^{s/2}`-type operator: symbol `|ξ|^s`, zero mode → 0.
pub fn fractional_laplacian(grid: &Grid, values: &[Complex64], s: f64) -> Vec<Complex64> {
    apply_symbol(grid, values, |xi| {
        let m2: f64 = xi.iter().map(|x| x * x).sum();
        if m2 == 0.0 {
            Complex64::default()
        } else {
            real_symbol(m2.powf(s / 2.0))
        }
    })
}

/// Bessel-type operator `(1-Δ)^{s/2}`: symbol `(1+|ξ|²)^{s/2}`.
pub fn bessel(grid: &Grid, values: &[Complex64], s: f64) -> Vec<Complex64> {
    apply_symbol(grid, values, |xi| {
        let m2: f64 = xi.iter().map(|x| x * x).sum();
        real_symbol((1.0 + m2).powf(s / 2.0))
    })
}

/// One-axis fractional derivative magnitude: symbol `|ξ_k|^s`, zero on the
/// hyperplane `ξ_k = 0`.
pub fn directional_fractional(
    grid: &Grid,
    values: &[Complex64],
    axis: usize,
    s: f64,
) -> Vec<Complex64> {
    apply_symbol(grid, values, |xi| {
        let x = xi[axis].abs();
        if x == 0.0 {
            Complex64::default()
        } else {
            real_symbol(x.powf(s))
        }
    })
}

/// Bessel operator in the directions transverse to `axis`:
/// symbol `(1 + Σ_{i≠axis} ξ_i²)^{s/2}`.
pub fn transverse_bessel(
    grid: &Grid,
    values: &[Complex64],
    axis: usize,
    s: f64,
) -> Vec<Complex64> {
    apply_symbol(grid, values, |xi| {
        let m2: f64 = xi
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != axis)
            .map(|(_, x)| x * x)
            .sum();
        real_symbol((1.0 + m2).powf(s / 2.0))
    })
}

/// Hilbert-type multiplier along one axis: symbol `-i·sgn(ξ_k)`,
/// `sgn(0) = 0`.
pub fn hilbert(grid: &Grid, values: &[Complex64], axis: usize) -> Vec<Complex64> {
    apply_symbol(grid, values, |xi| {
        let s = if xi[axis] > 0.0 {
            1.0
        } else if xi[axis] < 0.0 {
            -1.0
        } else {
            0.0
        };
        Complex64::new(0.0, -s)
    })
}

/// Spectral partial derivative `∂^α` with symbol `Π_a (iξ_a)^{α_a}`.
pub fn derivative(grid: &Grid, values: &[Complex64], orders: &[u32]) -> Vec<Complex64> {
    assert_eq!(orders.len(), grid.dim());
    apply_symbol(grid, values, |xi| {
        let mut s = Complex64::new(1.0, 0.0);
        for (a, &o) in orders.iter().enumerate() {
            for _ in 0..o {
                s *= Complex64::new(0.0, xi[a]);
            }
        }
        s
    })
}

/// First derivative along one axis.
pub fn partial(grid: &Grid, values: &[Complex64], axis: usize) -> Vec<Complex64> {
    let mut orders = vec![0u32; grid.dim()];
    orders[axis] = 1;
    derivative(grid, values, &orders)
}

/// Zero every coefficient with `|k_a| > n_a/3` on any axis (the 2/3 rule),
/// in place on physical samples.
pub fn dealias(grid: &Grid, values: &mut Vec<Complex64>) {
    let mut coeffs = fft::forward(grid, values);
    dealias_coeffs(grid, &mut coeffs);
    *values = fft::inverse(grid, &coeffs);
}

/// The 2/3-rule cutoff applied directly to coefficients.
pub fn dealias_coeffs(grid: &Grid, coeffs: &mut [Complex64]) {
    let d = grid.dim();
    let strides = grid.strides();
    for (lin, c) in coeffs.iter_mut().enumerate() {
        let mut rem = lin;
        for a in 0..d {
            let idx = rem / strides[a];
            rem %= strides[a];
            let k = grid.wavenumber(a, idx).unsigned_abs() as usize;
            if 3 * k > grid.points(a) {
                *c = Complex64::default();
                break;
            }
        }
    }
}

/// `[A^{1/2}, x] f` computed literally: `A^{1/2}(x f) - x A^{1/2} f`,
/// with `A` the one-dimensional fractional Laplacian.
pub fn half_commutator_with_x(grid: &Grid, values: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(grid.dim(), 1, "coordinate commutator is a one-dimensional identity");
    let xf: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(j, v)| v * grid.coord(0, j))
        .collect();
    let mut lhs = fractional_laplacian(grid, &xf, 0.5);
    let dhalf = fractional_laplacian(grid, values, 0.5);
    for (j, l) in lhs.iter_mut().enumerate() {
        *l -= dhalf[j] * grid.coord(0, j);
    }
    lhs
}

/// The closed-form right-hand side `½ H A^{-1/2} f` of the coordinate
/// commutator identity.
pub fn half_commutator_closed_form(grid: &Grid, values: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(grid.dim(), 1);
    apply_symbol(grid, values, |xi| {
        let x = xi[0];
        if x == 0.0 {
            Complex64::default()
        } else {
            let s = if x > 0.0 { 1.0 } else { -1.0 };
            Complex64::new(0.0, -0.5 * s * x.abs().powf(-0.5))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn gaussian_1d(grid: &Grid) -> Vec<Complex64> {
        (0..grid.len())
            .map(|j| {
                let x = grid.coord(0, j);
                Complex64::new((-x * x / 2.0).exp(), 0.5 * (-x * x / 3.0).exp())
            })
            .collect()
    }

    #[test]
    fn laplacian_matches_second_derivative_of_sine() {
        // f = sin(2x) on R = π grid: (-Δ)^1 f = 4 f exactly.
        let grid = Grid::cubic(1, 64, std::f64::consts::PI).unwrap();
        let f: Vec<Complex64> = (0..64)
            .map(|j| Complex64::new((2.0 * grid.coord(0, j)).sin(), 0.0))
            .collect();
        let g = fractional_laplacian(&grid, &f, 2.0);
        for (a, b) in f.iter().zip(&g) {
            assert_abs_diff_eq!(b.re, 4.0 * a.re, epsilon = 1e-10);
        }
    }

    #[test]
    fn hilbert_squares_to_minus_identity_off_the_zero_line() {
        let grid = Grid::cubic(1, 64, 8.0).unwrap();
        let mut f = gaussian_1d(&grid);
        // Remove the ξ = 0 content so H² = -I holds exactly.
        let mut c = fft::forward(&grid, &f);
        c[0] = Complex64::default();
        f = fft::inverse(&grid, &c);
        let hhf = hilbert(&grid, &hilbert(&grid, &f, 0), 0);
        for (a, b) in f.iter().zip(&hhf) {
            assert_abs_diff_eq!(b.re, -a.re, epsilon = 1e-12);
            assert_abs_diff_eq!(b.im, -a.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn bessel_inverts() {
        let grid = Grid::cubic(2, 16, 4.0).unwrap();
        let f: Vec<Complex64> = (0..grid.len())
            .map(|lin| {
                let idx = grid.unravel(lin);
                let x = grid.coord(0, idx[0]);
                let y = grid.coord(1, idx[1]);
                Complex64::new((x * 0.5).sin(), (y * 0.7).cos())
            })
            .collect();
        let g = bessel(&grid, &bessel(&grid, &f, 1.7), -1.7);
        for (a, b) in f.iter().zip(&g) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-11);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-11);
        }
    }

    #[test]
    fn half_powers_compose_to_full_power() {
        let grid = Grid::cubic(1, 64, 8.0).unwrap();
        let f = gaussian_1d(&grid);
        let two_halves =
            fractional_laplacian(&grid, &fractional_laplacian(&grid, &f, 0.5), 0.5);
        let whole = fractional_laplacian(&grid, &f, 1.0);
        for (a, b) in two_halves.iter().zip(&whole) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-11);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-11);
        }
    }

    #[test]
    fn dealias_kills_top_third() {
        let grid = Grid::cubic(1, 24, std::f64::consts::PI).unwrap();
        // Mode k = 9 survives (3·9 > 24 ⇒ killed? 27 > 24, killed); k = 8 survives.
        let mut f: Vec<Complex64> = (0..24)
            .map(|j| {
                let x = grid.coord(0, j);
                Complex64::new((8.0 * x).cos() + (9.0 * x).cos(), 0.0)
            })
            .collect();
        dealias(&grid, &mut f);
        let c = fft::forward(&grid, &f);
        assert!(c[8].norm() > 0.4);
        assert!(c[9].norm() < 1e-13);
    }

    #[test]
    fn coordinate_commutator_matches_closed_form_on_windowed_data() {
        let grid = Grid::cubic(1, 256, 20.0 * std::f64::consts::PI).unwrap();
        // Modulated Gaussian with its spectrum centered mid-band: the
        // fractional symbols are smooth on the spectral support (the kink
        // at ξ = 0 and the Nyquist wrap are both many standard deviations
        // away), so both sides are computed to spectral accuracy.
        let f: Vec<Complex64> = (0..grid.len())
            .map(|j| {
                let x = grid.coord(0, j);
                Complex64::new(0.0, 3.2 * x).exp() * (-x * x / 12.5).exp()
            })
            .collect();
        let lhs = half_commutator_with_x(&grid, &f);
        let rhs = half_commutator_closed_form(&grid, &f);
        let dv = grid.cell_volume();
        let err: f64 = lhs
            .iter()
            .zip(&rhs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            * dv;
        let base: f64 = rhs.iter().map(|v| v.norm_sqr()).sum::<f64>() * dv;
        assert!(
            err.sqrt() / base.sqrt() < 1e-6,
            "relative error {}",
            err.sqrt() / base.sqrt()
        );
    }
}
