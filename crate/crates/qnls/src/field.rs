//! Vector-valued complex fields sampled on a periodic grid.
//!
//! A [`SpectralField`] holds `m ≥ 1` complex components in physical space,
//! all sharing one [`Grid`]. Spectral operators move a component to
//! coefficient space with the Fourier-series normalization of [`crate::fft`],
//! act by a symbol `ξ ↦ σ(ξ)`, and come back; see [`crate::ops`].

use num_complex::Complex64;

use crate::fft;
use crate::grid::Grid;

/// `m` complex components on a shared periodic grid, physical-space samples
/// in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    components: Vec<Vec<Complex64>>,
}

impl SpectralField {
    /// All-zero field with `m` components.
    pub fn zeros(grid: Grid, m: usize) -> Self {
        assert!(m >= 1, "field needs at least one component");
        let n = grid.len();
        Self { grid, components: vec![vec![Complex64::default(); n]; m] }
    }

    /// Sample each component from a closure of the physical coordinates.
    pub fn from_fn(grid: Grid, m: usize, f: impl Fn(usize, &[f64]) -> Complex64) -> Self {
        assert!(m >= 1, "field needs at least one component");
        let d = grid.dim();
        let components = (0..m)
            .map(|c| {
                (0..grid.len())
                    .map(|lin| {
                        let idx = grid.unravel(lin);
                        let x: Vec<f64> = (0..d).map(|a| grid.coord(a, idx[a])).collect();
                        f(c, &x)
                    })
                    .collect()
            })
            .collect();
        Self { grid, components }
    }

    /// Build from raw sample vectors (each of length `grid.len()`).
    pub fn from_components(grid: Grid, components: Vec<Vec<Complex64>>) -> Self {
        assert!(!components.is_empty());
        for c in &components {
            assert_eq!(c.len(), grid.len());
        }
        Self { grid, components }
    }

    /// The shared grid.
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Number of components `m`.
    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    /// Physical samples of component `c`.
    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.components[c]
    }

    /// Mutable physical samples of component `c`.
    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.components[c]
    }

    /// All components.
    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.components
    }

    /// Fourier-series coefficients of component `c`.
    pub fn coeffs(&self, c: usize) -> Vec<Complex64> {
        fft::forward(&self.grid, &self.components[c])
    }

    /// Replace component `c` with the inverse transform of `coeffs`.
    pub fn set_from_coeffs(&mut self, c: usize, coeffs: &[Complex64]) {
        self.components[c] = fft::inverse(&self.grid, coeffs);
    }

    /// Componentwise `self + scale · other`.
    pub fn axpy(&mut self, scale: Complex64, other: &SpectralField) {
        assert_eq!(self.grid, other.grid);
        assert_eq!(self.components.len(), other.components.len());
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += scale * y;
            }
        }
    }

    /// Scale every component in place.
    pub fn scale(&mut self, s: Complex64) {
        for comp in &mut self.components {
            for v in comp.iter_mut() {
                *v *= s;
            }
        }
    }

    /// `self - other` as a new field.
    pub fn difference(&self, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), other);
        out
    }

    /// True when every sample of every component is finite.
    pub fn is_finite(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
    }

    /// `L²` norm of one component: `sqrt(dV Σ_j |f_j|²)`.
    pub fn l2_norm(&self, c: usize) -> f64 {
        let dv = self.grid.cell_volume();
        (self.components[c].iter().map(|v| v.norm_sqr()).sum::<f64>() * dv).sqrt()
    }

    /// `L²` norm over all components: `sqrt(Σ_c ‖f_c‖²)`.
    pub fn l2_norm_all(&self) -> f64 {
        ((0..self.num_components()).map(|c| self.l2_norm(c).powi(2)).sum::<f64>()).sqrt()
    }

    /// `L²` inner product `dV Σ_j f_j conj(g_j)` of two sample vectors on
    /// this grid.
    pub fn inner(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        let dv = self.grid.cell_volume();
        f.iter().zip(g).map(|(a, b)| a * b.conj()).sum::<Complex64>() * dv
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn l2_norm_of_constant() {
        // |f| = 2 on a box of volume (2·5)² → ‖f‖ = 2·10 = 20.
        let grid = Grid::cubic(2, 16, 5.0).unwrap();
        let f = SpectralField::from_fn(grid, 1, |_, _| Complex64::new(0.0, 2.0));
        assert_abs_diff_eq!(f.l2_norm(0), 20.0, epsilon = 1e-12);
    }

    #[test]
    fn axpy_and_difference_agree() {
        let grid = Grid::cubic(1, 16, 2.0).unwrap();
        let f = SpectralField::from_fn(grid.clone(), 2, |c, x| {
            Complex64::new(x[0] * (c as f64 + 1.0), x[0].sin())
        });
        let g = SpectralField::from_fn(grid, 2, |_, x| Complex64::new(x[0].cos(), 0.5));
        let d = f.difference(&g);
        let mut h = f.clone();
        h.axpy(Complex64::new(-1.0, 0.0), &g);
        assert_eq!(d, h);
        assert!(d.is_finite());
    }

    #[test]
    fn coeff_round_trip() {
        let grid = Grid::cubic(1, 32, 4.0).unwrap();
        let f = SpectralField::from_fn(grid, 1, |_, x| {
            Complex64::new((-x[0] * x[0]).exp(), x[0].sin())
        });
        let mut g = f.clone();
        let c = f.coeffs(0);
        g.set_from_coeffs(0, &c);
        for (a, b) in f.component(0).iter().zip(g.component(0)) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-12);
        }
    }
}
