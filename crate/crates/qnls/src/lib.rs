//! A pseudospectral laboratory for quasilinear Schrödinger-type flows on a
//! large periodic box.
//!
//! The crate has three layers:
//!
//! * **Spectral core** — [`grid`], [`fft`], [`field`], [`ops`], [`norms`]:
//!   a periodic grid `[-R, R)^d` with FFT-based Fourier multipliers
//!   (fractional and directional powers, Bessel potentials, Hilbert
//!   transforms, derivatives, dealiasing) and the norms and weights the
//!   energy arguments use (Sobolev, BMO-type oscillation, weighted `L²`,
//!   slice norms).
//! * **Dynamics** — [`models`], [`solver`]: symbolic model problems
//!   `iφ_t + ∂_i(g^{ij}(φ)∂_jφ) = F(φ, ∇φ)` with variable metrics of
//!   elliptic or mixed signature, integrated by integrating-factor
//!   splitting schemes with optional fourth-order spectral viscosity and a
//!   Sobolev growth guard.
//! * **Diagnostics** — [`functionals`], [`lemmas`]: the energy-method
//!   instrumentation (smoothing "good terms", weighted momentum ledgers,
//!   master energy functionals, bootstrap monitors, two-solution
//!   difference experiments) and ensemble verification of the harmonic-
//!   analysis inequalities the method rests on.
//!
//! [`scenario`], [`checkpoint`], [`export`], and [`cli`] wrap everything
//! in reproducible, hash-manifested command-line experiments.
//!
//! # Example
//!
//! Differentiating a plane wave with a spectral multiplier:
//!
//! ```
//! use num_complex::Complex64;
//! use qnls::grid::Grid;
//! use qnls::field::SpectralField;
//! use qnls::ops;
//!
//! let grid = Grid::cubic(1, 64, std::f64::consts::PI).unwrap();
//! let f = SpectralField::from_fn(grid.clone(), 1, |_, x| {
//!     Complex64::new(0.0, 3.0 * x[0]).exp()
//! });
//! let df = ops::partial(&grid, f.component(0), 0);
//! // d/dx e^{3ix} = 3i e^{3ix}
//! let expected = Complex64::new(0.0, 3.0) * f.component(0)[5];
//! assert!((df[5] - expected).norm() < 1e-10);
//! ```

pub mod checkpoint;
pub mod cli;
pub mod error;
pub mod export;
pub mod fft;
pub mod field;
pub mod functionals;
pub mod grid;
pub mod lemmas;
pub mod models;
pub mod norms;
pub mod ops;
pub mod scenario;
pub mod solver;

pub use error::QnlsError;

/// Compile and run every Rust snippet in the guide as a doc-test, so the
/// book in `book/` cannot drift out of sync with the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/grids-and-transforms.md")]
    mod grids_and_transforms {}
    #[doc = include_str!("../../../book/src/multipliers-and-norms.md")]
    mod multipliers_and_norms {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/time-stepping.md")]
    mod time_stepping {}
    #[doc = include_str!("../../../book/src/energy-diagnostics.md")]
    mod energy_diagnostics {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
}
