//! Periodic grid on the box `[-R, R)^d` and multi-index bookkeeping.
//!
//! The box truncates `ℝ^d`: coordinates are `x_j = -R + j·(2R/n)` and the
//! discrete frequency set is `ξ = πk/R` for integers `k ∈ [-n/2, n/2)`, so
//! every continuum multiplier formula applies verbatim to the grid
//! frequencies. Decay-weighted quantities are only meaningful while the
//! fields are negligible near the box boundary; see
//! [`crate::norms::boundary_mass_fraction`].

use serde::{Deserialize, Serialize};

use crate::error::QnlsError;

/// Uniform periodic grid on `[-R_a, R_a)` per axis `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    /// Points per axis; each entry is even and at least 8.
    points: Vec<usize>,
    /// Half-width `R` per axis; the box along axis `a` is `[-R_a, R_a)`.
    half_widths: Vec<f64>,
}

/// Default half-width: large enough that Gaussian-type data of O(1) width
/// carries negligible mass near the boundary.
pub const DEFAULT_HALF_WIDTH: f64 = 20.0 * std::f64::consts::PI;

impl Grid {
    /// Build a grid, validating the invariants (`n` even, `n >= 8`, `R > 0`,
    /// `1 <= d <= 3`).
    pub fn new(points: Vec<usize>, half_widths: Vec<f64>) -> Result<Self, QnlsError> {
        if points.is_empty() || points.len() > 3 {
            return Err(QnlsError::Config(format!(
                "grid dimension must be 1..=3, got {}",
                points.len()
            )));
        }
        if points.len() != half_widths.len() {
            return Err(QnlsError::Config(format!(
                "points ({}) and half_widths ({}) must have the same length",
                points.len(),
                half_widths.len()
            )));
        }
        for &n in &points {
            if n < 8 || n % 2 != 0 {
                return Err(QnlsError::Config(format!(
                    "points per axis must be even and >= 8, got {n}"
                )));
            }
        }
        for &r in &half_widths {
            if !(r > 0.0) || !r.is_finite() {
                return Err(QnlsError::Config(format!("half_width must be positive, got {r}")));
            }
        }
        Ok(Self { points, half_widths })
    }

    /// Cubic grid: `n` points and half-width `r` on each of `dim` axes.
    pub fn cubic(dim: usize, n: usize, r: f64) -> Result<Self, QnlsError> {
        Self::new(vec![n; dim], vec![r; dim])
    }

    /// Spatial dimension `d`.
    pub fn dim(&self) -> usize {
        self.points.len()
    }

    /// Points along axis `a`.
    pub fn points(&self, axis: usize) -> usize {
        self.points[axis]
    }

    /// All per-axis point counts.
    pub fn points_all(&self) -> &[usize] {
        &self.points
    }

    /// Half-width along axis `a`.
    pub fn half_width(&self, axis: usize) -> f64 {
        self.half_widths[axis]
    }

    /// All per-axis half-widths.
    pub fn half_widths_all(&self) -> &[f64] {
        &self.half_widths
    }

    /// Total number of grid points `Π n_a`.
    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    /// True when the grid has no points (never, for a valid grid).
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid spacing `2R/n` along axis `a`.
    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.half_widths[axis] / self.points[axis] as f64
    }

    /// Quadrature cell volume `Π (2R_a/n_a)`.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    /// Box volume `Π 2R_a`.
    pub fn box_volume(&self) -> f64 {
        self.half_widths.iter().map(|r| 2.0 * r).product()
    }

    /// Physical coordinate of index `j` along axis `a`: `-R + j·(2R/n)`.
    pub fn coord(&self, axis: usize, index: usize) -> f64 {
        -self.half_widths[axis] + index as f64 * self.spacing(axis)
    }

    /// Signed integer wavenumber for FFT bin `index` along axis `a`:
    /// `k ∈ [-n/2, n/2)`, with `k = 0` present exactly once.
    pub fn wavenumber(&self, axis: usize, index: usize) -> i64 {
        let n = self.points[axis] as i64;
        let idx = index as i64;
        if idx < n / 2 {
            idx
        } else {
            idx - n
        }
    }

    /// Continuum frequency `ξ = πk/R` for FFT bin `index` along axis `a`.
    pub fn frequency(&self, axis: usize, index: usize) -> f64 {
        std::f64::consts::PI * self.wavenumber(axis, index) as f64 / self.half_widths[axis]
    }

    /// Largest resolved frequency magnitude along axis `a` (Nyquist).
    pub fn nyquist(&self, axis: usize) -> f64 {
        std::f64::consts::PI * (self.points[axis] as f64 / 2.0) / self.half_widths[axis]
    }

    /// Row-major strides for linear indexing.
    pub fn strides(&self) -> Vec<usize> {
        let d = self.dim();
        let mut s = vec![1usize; d];
        for a in (0..d.saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.points[a + 1];
        }
        s
    }

    /// Decompose a linear (row-major) index into per-axis indices.
    pub fn unravel(&self, mut linear: usize) -> Vec<usize> {
        let strides = self.strides();
        let mut idx = vec![0usize; self.dim()];
        for a in 0..self.dim() {
            idx[a] = linear / strides[a];
            linear %= strides[a];
        }
        idx
    }
}

/// Multi-index `α = (α_1, …, α_d)` of derivative orders.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex {
    orders: Vec<u32>,
}

impl MultiIndex {
    /// Construct from per-axis orders.
    pub fn new(orders: Vec<u32>) -> Self {
        Self { orders }
    }

    /// The zero multi-index in `d` dimensions.
    pub fn zero(dim: usize) -> Self {
        Self { orders: vec![0; dim] }
    }

    /// The basis multi-index `e_axis` in `d` dimensions.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut orders = vec![0; dim];
        orders[axis] = 1;
        Self { orders }
    }

    /// Per-axis orders.
    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    /// Order along one axis.
    pub fn order(&self, axis: usize) -> u32 {
        self.orders[axis]
    }

    /// Total order `|α| = Σ α_i`.
    pub fn total(&self) -> u32 {
        self.orders.iter().sum()
    }

    /// Dimension `d`.
    pub fn dim(&self) -> usize {
        self.orders.len()
    }

    /// `α + e_axis`.
    pub fn bump(&self, axis: usize) -> Self {
        let mut orders = self.orders.clone();
        orders[axis] += 1;
        Self { orders }
    }

    /// `α - e_axis`, if `α_axis >= 1`.
    pub fn lower(&self, axis: usize) -> Option<Self> {
        if self.orders[axis] == 0 {
            return None;
        }
        let mut orders = self.orders.clone();
        orders[axis] -= 1;
        Some(Self { orders })
    }

    /// All multi-indices in `d` dimensions with `|α| <= max_total`,
    /// in a deterministic (lexicographic) order.
    pub fn all_up_to(dim: usize, max_total: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut current = vec![0u32; dim];
        fn rec(out: &mut Vec<MultiIndex>, current: &mut Vec<u32>, axis: usize, remaining: u32) {
            if axis == current.len() {
                out.push(MultiIndex::new(current.clone()));
                return;
            }
            for v in 0..=remaining {
                current[axis] = v;
                rec(out, current, axis + 1, remaining - v);
            }
            current[axis] = 0;
        }
        rec(&mut out, &mut current, 0, max_total);
        out.sort_by_key(|m| (m.total(), m.orders.clone()));
        out
    }

    /// All multi-indices with `|α| == total` exactly.
    pub fn all_exact(dim: usize, total: u32) -> Vec<MultiIndex> {
        Self::all_up_to(dim, total)
            .into_iter()
            .filter(|m| m.total() == total)
            .collect()
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, o) in self.orders.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{o}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_odd_or_small_n() {
        assert!(Grid::cubic(1, 7, 1.0).is_err());
        assert!(Grid::cubic(1, 10, 1.0).is_ok());
        assert!(Grid::cubic(1, 9, 1.0).is_err());
        assert!(Grid::cubic(4, 8, 1.0).is_err());
        assert!(Grid::cubic(1, 8, -1.0).is_err());
    }

    #[test]
    fn frequency_zero_present_once_per_axis() {
        let g = Grid::cubic(1, 16, std::f64::consts::PI).unwrap();
        let zeros = (0..16).filter(|&i| g.frequency(0, i) == 0.0).count();
        assert_eq!(zeros, 1);
        // With R = π the frequencies are exactly the integers k.
        assert_eq!(g.frequency(0, 1), 1.0);
        assert_eq!(g.frequency(0, 15), -1.0);
        assert_eq!(g.frequency(0, 8), -8.0);
    }

    #[test]
    fn coords_cover_half_open_box() {
        let g = Grid::cubic(1, 8, 2.0).unwrap();
        assert_eq!(g.coord(0, 0), -2.0);
        assert!(g.coord(0, 7) < 2.0);
        assert_eq!(g.spacing(0), 0.5);
    }

    #[test]
    fn multi_index_enumeration_counts() {
        // d=2: |α| <= 2 has 6 entries (binomial(2+2,2)).
        assert_eq!(MultiIndex::all_up_to(2, 2).len(), 6);
        assert_eq!(MultiIndex::all_exact(2, 2).len(), 3);
        for m in MultiIndex::all_up_to(3, 3) {
            assert_eq!(m.total(), m.orders().iter().sum::<u32>());
        }
    }

    #[test]
    fn strides_are_row_major() {
        let g = Grid::new(vec![8, 16], vec![1.0, 2.0]).unwrap();
        assert_eq!(g.strides(), vec![16, 1]);
        assert_eq!(g.unravel(17), vec![1, 1]);
    }
}
