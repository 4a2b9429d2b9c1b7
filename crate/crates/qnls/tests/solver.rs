//! Integration tests for the time stepper: exact solutions for the free
//! flow, measured convergence orders of the two schemes, the growth guard,
//! viscous damping against its closed form, and the vanishing-viscosity
//! continuation.

use num_complex::Complex64;
use qnls::field::SpectralField;
use qnls::grid::Grid;
use qnls::models::ModelProblem;
use qnls::norms;
use qnls::solver::{free_gaussian, viscosity_continuation, Flow, Scheme, SolverConfig};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn gaussian_initial(grid: &Grid, amp: f64, sigma: f64) -> SpectralField {
    SpectralField::from_fn(grid.clone(), 1, |_, x| {
        let r2: f64 = x.iter().map(|&xi| xi * xi).sum();
        Complex64::new(amp * (-r2 / (2.0 * sigma * sigma)).exp(), 0.0)
    })
}

fn h3_distance(a: &SpectralField, b: &SpectralField) -> f64 {
    let d = a.difference(b);
    (0..d.num_components())
        .map(|c| norms::sobolev_norm(a.grid(), d.component(c), 3.0).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[test]
fn free_flow_advances_plane_wave_by_exact_phase() {
    let grid = Grid::cubic(1, 64, std::f64::consts::PI).unwrap();
    let k = 3.0;
    let initial = SpectralField::from_fn(grid.clone(), 1, |_, x| (I * k * x[0]).exp());
    let model = ModelProblem::builtin("free", 1).unwrap();
    let mut flow = Flow::new(model, initial, SolverConfig::new(1e-2)).unwrap();
    flow.advance_to(0.5).unwrap();
    let t = flow.time();
    let expect = SpectralField::from_fn(grid.clone(), 1, |_, x| {
        (I * (k * x[0] - k * k * t)).exp()
    });
    let err: f64 = flow
        .state()
        .component(0)
        .iter()
        .zip(expect.component(0))
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-11, "plane-wave phase error {err:.3e}");
}

#[test]
fn free_flow_matches_dispersing_gaussian_closed_form() {
    let grid = Grid::cubic(1, 512, 40.0 * std::f64::consts::PI).unwrap();
    let a = Complex64::new(0.5, 0.2);
    let sigma = 2.0;
    let initial = SpectralField::from_fn(grid.clone(), 1, |_, x| free_gaussian(a, sigma, 0.0, x[0]));
    let model = ModelProblem::builtin("free", 1).unwrap();
    let mut flow = Flow::new(model, initial, SolverConfig::new(1e-3)).unwrap();
    flow.advance_to(0.8).unwrap();
    let t = flow.time();
    let err: f64 = (0..grid.points(0))
        .map(|j| (flow.state().component(0)[j] - free_gaussian(a, sigma, t, grid.coord(0, j))).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-8, "dispersing Gaussian error {err:.3e}");
}

#[test]
fn scheme_orders_show_in_self_convergence() {
    // Richardson-style self-convergence on a nonlinear model: dt vs dt/2
    // vs dt/4 distances shrink by the scheme order.
    let grid = Grid::cubic(1, 128, 20.0 * std::f64::consts::PI).unwrap();
    let initial = gaussian_initial(&grid, 1e-2, 2.0);
    let model = ModelProblem::builtin("toy-quadratic", 1).unwrap();
    let t_end = 0.16;

    let run = |scheme: Scheme, dt: f64| -> SpectralField {
        let config = SolverConfig { dt, scheme, ..SolverConfig::new(dt) };
        let mut flow = Flow::new(model.clone(), initial.clone(), config).unwrap();
        flow.advance_to(t_end).unwrap();
        flow.state().clone()
    };

    for (scheme, min_factor) in [(Scheme::Euler, 1.7), (Scheme::StrangRk2, 3.4)] {
        let coarse = run(scheme, 2e-2);
        let mid = run(scheme, 1e-2);
        let fine = run(scheme, 5e-3);
        let e1 = h3_distance(&coarse, &mid);
        let e2 = h3_distance(&mid, &fine);
        let factor = e1 / e2;
        assert!(
            factor > min_factor,
            "{scheme:?}: halving shrank error only by {factor:.2}"
        );
    }
}

#[test]
fn growth_guard_trips_on_blowup_scale_data() {
    let grid = Grid::cubic(1, 64, 10.0).unwrap();
    let initial = gaussian_initial(&grid, 50.0, 1.0);
    let model = ModelProblem::builtin("toy-quadratic", 1).unwrap();
    let config = SolverConfig { guard_factor: 1.5, ..SolverConfig::new(5e-3) };
    let mut flow = Flow::new(model, initial, config).unwrap();
    let result = flow.advance_to(10.0);
    assert!(result.is_err(), "guard never tripped");
    assert_eq!(result.unwrap_err().exit_code(), 3);
}

#[test]
fn hyperviscosity_damps_single_mode_at_closed_form_rate() {
    let grid = Grid::cubic(1, 64, std::f64::consts::PI).unwrap();
    let k = 4.0;
    let initial = SpectralField::from_fn(grid.clone(), 1, |_, x| (I * k * x[0]).exp());
    let model = ModelProblem::builtin("free", 1).unwrap();
    let eps = 1e-3;
    let mut flow = Flow::new(model, initial.clone(), SolverConfig::with_viscosity(1e-3, eps)).unwrap();
    flow.advance_to(0.2).unwrap();
    let t = flow.time();
    // |φ̂(t)| = e^{-ε k⁴ t} |φ̂(0)| for the free viscous flow.
    let expect = (-eps * k.powi(4) * t).exp() * norms::l2_norm(&grid, initial.component(0));
    let got = norms::l2_norm(&grid, flow.state().component(0));
    assert!((got - expect).abs() < 1e-10 * expect, "got {got}, expected {expect}");
}

#[test]
fn advance_to_lands_within_half_a_step() {
    let grid = Grid::cubic(1, 32, 5.0).unwrap();
    let initial = gaussian_initial(&grid, 1e-3, 1.5);
    let model = ModelProblem::builtin("free", 1).unwrap();
    let dt = 7e-3;
    let mut flow = Flow::new(model, initial, SolverConfig::new(dt)).unwrap();
    flow.advance_to(0.1).unwrap();
    assert!((flow.time() - 0.1).abs() <= 0.5 * dt + 1e-12);
}

#[test]
fn flow_construction_rejects_mismatched_shapes_and_bad_steps() {
    let grid = Grid::cubic(1, 32, 5.0).unwrap();
    let initial = gaussian_initial(&grid, 1e-3, 1.5);
    let model_2d = ModelProblem::builtin("free", 2).unwrap();
    assert!(Flow::new(model_2d, initial.clone(), SolverConfig::new(1e-3)).is_err());
    let model = ModelProblem::builtin("free", 1).unwrap();
    assert!(Flow::new(model.clone(), initial.clone(), SolverConfig::new(0.0)).is_err());
    assert!(Flow::new(model, initial, SolverConfig::with_viscosity(1e-3, -1.0)).is_err());
}

#[test]
fn viscosity_continuation_distances_decrease() {
    let grid = Grid::cubic(1, 128, 20.0 * std::f64::consts::PI).unwrap();
    let initial = gaussian_initial(&grid, 1e-3, 2.0);
    let model = ModelProblem::builtin("toy-quadratic", 1).unwrap();
    let eps = [4e-4, 2e-4, 1e-4];
    let distances = viscosity_continuation(&model, &initial, &eps, 0.2, 1e-3, 3.0).unwrap();
    assert_eq!(distances.len(), 2);
    assert!(distances.iter().all(|d| d.is_finite() && *d > 0.0));
    assert!(distances[1] < distances[0], "distances {distances:?} not decreasing");
    // Too-short sequences are a configuration error.
    assert!(viscosity_continuation(&model, &initial, &[1e-3], 0.1, 1e-3, 3.0).is_err());
}
