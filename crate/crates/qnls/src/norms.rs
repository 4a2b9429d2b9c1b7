//! Discrete norms: Lebesgue, Sobolev, dyadic BMO, decay-weighted and
//! hyperplane-slice norms.
//!
//! All integrals are the trapezoid-free periodic quadrature `dV Σ_j`, which
//! is spectrally accurate for smooth periodic integrands. Sobolev norms are
//! evaluated in coefficient space through Parseval:
//! `‖(1-Δ)^{s/2} f‖²_{L²} = (2R)^d Σ_k (1+|ξ_k|²)^s |c_k|²`.
//!
//! The decay weight is the bracket `⟨x⟩ = 1 + |x|` applied to a single
//! coordinate; its companion identity `d/dx (x/⟨x⟩) = 1/⟨x⟩²` (with
//! `sgn(0) = 0`) is what makes the weighted ledgers in
//! [`crate::functionals`] close. Weighted quantities silently assume the
//! field carries negligible mass near the box boundary;
//! [`boundary_mass_fraction`] measures that assumption.

use num_complex::Complex64;

use crate::fft;
use crate::grid::Grid;

/// The decay bracket `⟨x⟩ = 1 + |x|`.
pub fn bracket(x: f64) -> f64 {
    1.0 + x.abs()
}

/// Sign with `sgn(0) = 0`, matching the weak derivative convention used by
/// the weight identities.
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `d/dx (x/⟨x⟩) = 1/⟨x⟩²` — the bounded weight and its exact derivative.
pub fn weight_x_over_bracket(x: f64) -> f64 {
    x / bracket(x)
}

/// Derivative of [`weight_x_over_bracket`].
pub fn weight_x_over_bracket_derivative(x: f64) -> f64 {
    1.0 / (bracket(x) * bracket(x))
}

/// `L^p` norm, `1 <= p < ∞`.
pub fn lp_norm(grid: &Grid, values: &[Complex64], p: f64) -> f64 {
    assert!(p >= 1.0 && p.is_finite());
    let dv = grid.cell_volume();
    (values.iter().map(|v| v.norm().powf(p)).sum::<f64>() * dv).powf(1.0 / p)
}

/// `L²` norm.
pub fn l2_norm(grid: &Grid, values: &[Complex64]) -> f64 {
    let dv = grid.cell_volume();
    (values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dv).sqrt()
}

/// `L^∞` norm (max over grid points).
pub fn linf_norm(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Inhomogeneous Sobolev norm `‖(1-Δ)^{s/2} f‖_{L²}`.
pub fn sobolev_norm(grid: &Grid, values: &[Complex64], s: f64) -> f64 {
    let coeffs = fft::forward(grid, values);
    sobolev_norm_from_coeffs(grid, &coeffs, s)
}

/// Same as [`sobolev_norm`] but starting from coefficients.
pub fn sobolev_norm_from_coeffs(grid: &Grid, coeffs: &[Complex64], s: f64) -> f64 {
    let d = grid.dim();
    let strides = grid.strides();
    let mut acc = 0.0;
    for (lin, c) in coeffs.iter().enumerate() {
        let mut rem = lin;
        let mut m2 = 0.0;
        for a in 0..d {
            let idx = rem / strides[a];
            rem %= strides[a];
            let xi = grid.frequency(a, idx);
            m2 += xi * xi;
        }
        acc += (1.0 + m2).powf(s) * c.norm_sqr();
    }
    (acc * grid.box_volume()).sqrt()
}

/// Homogeneous Sobolev norm `‖(-Δ)^{s/2} f‖_{L²}` (zero mode dropped).
pub fn homogeneous_sobolev_norm(grid: &Grid, values: &[Complex64], s: f64) -> f64 {
    let coeffs = fft::forward(grid, values);
    let d = grid.dim();
    let strides = grid.strides();
    let mut acc = 0.0;
    for (lin, c) in coeffs.iter().enumerate() {
        let mut rem = lin;
        let mut m2 = 0.0;
        for a in 0..d {
            let idx = rem / strides[a];
            rem %= strides[a];
            let xi = grid.frequency(a, idx);
            m2 += xi * xi;
        }
        if m2 > 0.0 {
            acc += m2.powf(s) * c.norm_sqr();
        }
    }
    (acc * grid.box_volume()).sqrt()
}

/// `L²` norm against a pointwise weight: `sqrt(dV Σ_j w(x_j)² |f_j|²)`.
pub fn weighted_l2(grid: &Grid, values: &[Complex64], weight: impl Fn(&[f64]) -> f64) -> f64 {
    let dv = grid.cell_volume();
    let d = grid.dim();
    let mut acc = 0.0;
    for (lin, v) in values.iter().enumerate() {
        let idx = grid.unravel(lin);
        let x: Vec<f64> = (0..d).map(|a| grid.coord(a, idx[a])).collect();
        let w = weight(&x);
        acc += w * w * v.norm_sqr();
    }
    (acc * dv).sqrt()
}

/// `‖f/⟨x_k⟩‖_{L²}` — the good-term weight along one axis.
pub fn inverse_bracket_l2(grid: &Grid, values: &[Complex64], axis: usize) -> f64 {
    weighted_l2(grid, values, |x| 1.0 / bracket(x[axis]))
}

/// `‖⟨x_k⟩² f‖_{L²}` — the quartic decay-weight norm along one axis.
pub fn bracket_squared_l2(grid: &Grid, values: &[Complex64], axis: usize) -> f64 {
    weighted_l2(grid, values, |x| {
        let b = bracket(x[axis]);
        b * b
    })
}

/// `L²` norm of `f` restricted to the hyperplane `x_axis = coord(axis, index)`,
/// using the transverse quadrature. In one dimension this is `|f(x_j)|`.
pub fn slice_l2(grid: &Grid, values: &[Complex64], axis: usize, index: usize) -> f64 {
    let d = grid.dim();
    let transverse_dv: f64 = (0..d).filter(|&a| a != axis).map(|a| grid.spacing(a)).product();
    let strides = grid.strides();
    let mut acc = 0.0;
    for (lin, v) in values.iter().enumerate() {
        let idx_axis = (lin / strides[axis]) % grid.points(axis);
        if idx_axis == index {
            acc += v.norm_sqr();
        }
    }
    (acc * transverse_dv).sqrt()
}

/// Dyadic-mean-oscillation norm: for each depth `ℓ = 0..=max_depth` split
/// the box into `2^{ℓd}` congruent cubes and take the supremum over all
/// cubes of the mean of `|f - mean_cube(f)|`. `max_depth = 6` resolves
/// oscillation down to 1/64 of the box side.
pub fn bmo_norm(grid: &Grid, values: &[Complex64], max_depth: u32) -> f64 {
    let d = grid.dim();
    let mut sup = 0.0f64;
    for level in 0..=max_depth {
        let cubes_per_axis = 1usize << level;
        // Cube index per point along each axis.
        let axis_cube: Vec<Vec<usize>> = (0..d)
            .map(|a| {
                let n = grid.points(a);
                (0..n).map(|j| (j * cubes_per_axis) / n).collect()
            })
            .collect();
        let num_cubes = cubes_per_axis.pow(d as u32);
        let mut sums = vec![Complex64::default(); num_cubes];
        let mut counts = vec![0usize; num_cubes];
        let strides = grid.strides();
        let cube_of = |lin: usize| -> usize {
            let mut rem = lin;
            let mut cube = 0usize;
            for a in 0..d {
                let idx = rem / strides[a];
                rem %= strides[a];
                cube = cube * cubes_per_axis + axis_cube[a][idx];
            }
            cube
        };
        for (lin, v) in values.iter().enumerate() {
            let cu = cube_of(lin);
            sums[cu] += v;
            counts[cu] += 1;
        }
        let means: Vec<Complex64> = sums
            .iter()
            .zip(&counts)
            .map(|(s, &c)| if c > 0 { s / c as f64 } else { Complex64::default() })
            .collect();
        let mut osc = vec![0.0f64; num_cubes];
        for (lin, v) in values.iter().enumerate() {
            let cu = cube_of(lin);
            osc[cu] += (v - means[cu]).norm();
        }
        for (o, &c) in osc.iter().zip(&counts) {
            if c > 0 {
                sup = sup.max(o / c as f64);
            }
        }
    }
    sup
}

/// Fraction of the `L²` mass lying within the outer `margin` fraction of any
/// axis range (e.g. `margin = 0.1` probes the outer 10% shell). Weighted
/// norms are only trustworthy while this is small.
pub fn boundary_mass_fraction(grid: &Grid, values: &[Complex64], margin: f64) -> f64 {
    let d = grid.dim();
    let mut shell = 0.0;
    let mut total = 0.0;
    for (lin, v) in values.iter().enumerate() {
        let idx = grid.unravel(lin);
        let m = v.norm_sqr();
        total += m;
        let near = (0..d).any(|a| {
            let x = grid.coord(a, idx[a]);
            x.abs() >= (1.0 - margin) * grid.half_width(a)
        });
        if near {
            shell += m;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        shell / total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid1(n: usize, r: f64) -> Grid {
        Grid::cubic(1, n, r).unwrap()
    }

    #[test]
    fn weight_derivative_closed_form_values() {
        // 1/⟨1⟩² = 1/4 and 1/⟨-3⟩² = 1/16.
        assert_abs_diff_eq!(weight_x_over_bracket_derivative(1.0), 0.25);
        assert_abs_diff_eq!(weight_x_over_bracket_derivative(-3.0), 1.0 / 16.0);
        assert_eq!(sgn(0.0), 0.0);
    }

    #[test]
    fn sobolev_zero_is_l2() {
        let g = grid1(64, 6.0);
        let f: Vec<Complex64> = (0..64)
            .map(|j| {
                let x = g.coord(0, j);
                Complex64::new((-x * x).exp(), x.sin() * (-x * x / 4.0).exp())
            })
            .collect();
        assert_abs_diff_eq!(
            sobolev_norm(&g, &f, 0.0),
            l2_norm(&g, &f),
            epsilon = 1e-10
        );
    }

    #[test]
    fn sobolev_norm_of_single_mode() {
        // f = e^{iξ_2 x} with R = π: ξ = 2, ‖J^s f‖² = 2π (1+4)^s.
        let g = grid1(32, std::f64::consts::PI);
        let f: Vec<Complex64> = (0..32)
            .map(|j| Complex64::new(0.0, 2.0 * g.coord(0, j)).exp())
            .collect();
        let s = 1.5;
        let expect = (2.0 * std::f64::consts::PI * 5.0f64.powf(s)).sqrt();
        assert_abs_diff_eq!(sobolev_norm(&g, &f, s), expect, epsilon = 1e-10);
        // Homogeneous counterpart: 2π · 4^s.
        let expect_h = (2.0 * std::f64::consts::PI * 4.0f64.powf(s)).sqrt();
        assert_abs_diff_eq!(homogeneous_sobolev_norm(&g, &f, s), expect_h, epsilon = 1e-10);
    }

    #[test]
    fn bmo_of_constant_is_zero_and_scales_linearly() {
        let g = grid1(128, 4.0);
        let c: Vec<Complex64> = vec![Complex64::new(3.0, -1.0); 128];
        assert_abs_diff_eq!(bmo_norm(&g, &c, 6), 0.0, epsilon = 1e-13);
        let f: Vec<Complex64> = (0..128)
            .map(|j| Complex64::new((g.coord(0, j) * 2.0).sin(), 0.0))
            .collect();
        let f2: Vec<Complex64> = f.iter().map(|v| v * 2.0).collect();
        assert_abs_diff_eq!(bmo_norm(&g, &f2, 6), 2.0 * bmo_norm(&g, &f, 6), epsilon = 1e-12);
    }

    #[test]
    fn slice_norm_in_1d_is_pointwise_modulus() {
        let g = grid1(16, 2.0);
        let f: Vec<Complex64> = (0..16)
            .map(|j| Complex64::new(g.coord(0, j), 1.0))
            .collect();
        assert_abs_diff_eq!(slice_l2(&g, &f, 0, 5), f[5].norm(), epsilon = 1e-14);
    }

    #[test]
    fn slice_norms_square_sum_to_l2() {
        let g = Grid::cubic(2, 16, 3.0).unwrap();
        let f: Vec<Complex64> = (0..g.len())
            .map(|lin| {
                let idx = g.unravel(lin);
                Complex64::new(g.coord(0, idx[0]).sin(), g.coord(1, idx[1]).cos())
            })
            .collect();
        // Σ_j Δx · slice(j)² = ‖f‖²_{L²}.
        let sum: f64 = (0..16).map(|j| g.spacing(0) * slice_l2(&g, &f, 0, j).powi(2)).sum();
        assert_abs_diff_eq!(sum, l2_norm(&g, &f).powi(2), epsilon = 1e-10);
    }

    #[test]
    fn boundary_fraction_detects_localization() {
        let g = grid1(256, 20.0 * std::f64::consts::PI);
        let f: Vec<Complex64> = (0..256)
            .map(|j| Complex64::new((-g.coord(0, j).powi(2) / 8.0).exp(), 0.0))
            .collect();
        assert!(boundary_mass_fraction(&g, &f, 0.1) < 1e-12);
        let flat: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); 256];
        assert!(boundary_mass_fraction(&g, &flat, 0.1) > 0.05);
    }
}
