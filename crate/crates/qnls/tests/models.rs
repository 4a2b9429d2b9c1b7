//! Integration tests for the model registry: polynomial algebra oracles,
//! Wirtinger calculus against finite differences, structural validation,
//! and the builtin catalogue.

use num_complex::Complex64;
use qnls::field::SpectralField;
use qnls::grid::Grid;
use qnls::models::{FieldJet, ModelProblem, NonlinearityClass, PolyExpr, Signature, Var};

fn test_field(dim: usize) -> SpectralField {
    let grid = Grid::cubic(dim, 16, 3.0).unwrap();
    SpectralField::from_fn(grid, 1, |_, x| {
        let r2: f64 = x.iter().map(|&xi| xi * xi).sum();
        Complex64::new(0.3 * (-r2).exp(), 0.2 * x[0] * (-r2).exp())
    })
}

#[test]
fn all_builtins_validate_in_each_supported_dimension() {
    for &name in ModelProblem::builtin_names() {
        for dim in 1..=3usize {
            match ModelProblem::builtin(name, dim) {
                Ok(m) => {
                    m.validate().unwrap_or_else(|e| panic!("{name} d={dim}: {e}"));
                    assert_eq!(m.dim, dim);
                }
                Err(_) => {
                    // Some registered reductions exist only in specific
                    // dimensions; that rejection must be a clean error,
                    // which the Err arm already witnesses.
                }
            }
        }
        // Every builtin exists in at least one dimension.
        assert!(
            (1..=3).any(|d| ModelProblem::builtin(name, d).is_ok()),
            "{name} constructible nowhere"
        );
    }
    assert!(ModelProblem::builtin("no-such-model", 1).is_err());
}

#[test]
fn polynomial_evaluation_matches_hand_computation() {
    let field = test_field(1);
    let jet = FieldJet::new(&field);
    let lin = 7usize;
    let phi = jet.value(0, lin);
    let dphi = jet.deriv(0, 0, lin);

    // |φ|² at a point.
    let e = PolyExpr::abs2(0).eval(&jet, lin);
    assert!((e - Complex64::new(phi.norm_sqr(), 0.0)).norm() < 1e-13);

    // (∂φ)² + 2 Re(φ) · conj(∂φ).
    let expr = PolyExpr::deriv(0, 0)
        .mul(&PolyExpr::deriv(0, 0))
        .add(&PolyExpr::var(Var::Re(0)).scale(Complex64::new(2.0, 0.0)).mul(&PolyExpr::deriv_conj(0, 0)));
    let got = expr.eval(&jet, lin);
    let want = dphi * dphi + 2.0 * phi.re * dphi.conj();
    assert!((got - want).norm() < 1e-13);
}

#[test]
fn wirtinger_derivatives_match_complex_finite_differences() {
    // For P(∂φ) = (∂φ)²·conj(∂φ): ∂P/∂z = 2 z z̄, ∂P/∂z̄ = z² with z = ∂φ.
    let p = PolyExpr::deriv(0, 0).mul(&PolyExpr::deriv(0, 0)).mul(&PolyExpr::deriv_conj(0, 0));
    let pz = p.wirtinger_z(0, 0);
    let pzbar = p.wirtinger_zbar(0, 0);

    let field = test_field(1);
    let jet = FieldJet::new(&field);
    for lin in [3usize, 8, 12] {
        let z = jet.deriv(0, 0, lin);
        let got_z = pz.eval(&jet, lin);
        let got_zbar = pzbar.eval(&jet, lin);
        assert!((got_z - 2.0 * z * z.conj()).norm() < 1e-12);
        assert!((got_zbar - z * z).norm() < 1e-12);
    }
}

#[test]
fn real_part_detection_and_degrees() {
    assert!(PolyExpr::abs2(0).is_real());
    assert!(!PolyExpr::component(0).is_real());
    assert!(PolyExpr::zero().is_zero());
    assert_eq!(PolyExpr::abs2(0).min_degree(), Some(2));
    assert_eq!(PolyExpr::var(Var::Re(0)).min_degree(), Some(1));
    assert_eq!(PolyExpr::zero().min_degree(), None);
}

#[test]
fn validation_rejects_asymmetric_metric() {
    let mut m = ModelProblem::builtin("toy-quadratic", 2).unwrap();
    m.metric_h[0][1] = PolyExpr::var(Var::Re(0));
    m.metric_h[1][0] = PolyExpr::zero();
    assert!(m.validate().is_err());
}

#[test]
fn validation_rejects_complex_valued_metric() {
    let mut m = ModelProblem::builtin("toy-quadratic", 1).unwrap();
    m.metric_h[0][0] = PolyExpr::component(0); // φ itself is not real
    assert!(m.validate().is_err());
}

#[test]
fn validation_enforces_class_degree_floor() {
    // Cubic class demands h of degree ≥ 2; a degree-1 bump must be refused.
    let mut m = ModelProblem::builtin("toy-cubic", 1).unwrap();
    m.metric_h[0][0] = PolyExpr::var(Var::Re(0));
    assert!(m.validate().is_err());
    // And a quadratic force under the cubic class is likewise refused.
    let mut m2 = ModelProblem::builtin("toy-cubic", 1).unwrap();
    m2.force[0] = PolyExpr::deriv(0, 0).mul(&PolyExpr::deriv(0, 0));
    assert!(m2.validate().is_err());
}

#[test]
fn validation_rejects_out_of_range_component_indices() {
    let mut m = ModelProblem::builtin("toy-quadratic", 1).unwrap();
    m.force[0] = PolyExpr::component(3).mul(&PolyExpr::component_conj(3));
    assert!(m.validate().is_err());
}

#[test]
fn mixed_signature_diagonal_and_bounds() {
    assert_eq!(Signature::Mixed(1).diagonal(3), vec![1.0, -1.0, -1.0]);
    assert_eq!(Signature::Elliptic.diagonal(2), vec![1.0, 1.0]);
    let mut m = ModelProblem::builtin("free", 2).unwrap();
    m.signature = Signature::Mixed(2); // ℓ must satisfy 1 ≤ ℓ ≤ d-1
    assert!(m.validate().is_err());
    m.signature = Signature::Mixed(1);
    assert!(m.validate().is_ok());
}

#[test]
fn metric_at_combines_signature_and_perturbation() {
    let m = ModelProblem::builtin("toy-quadratic", 2).unwrap();
    let field = test_field(2);
    let jet = FieldJet::new(&field);
    let lin = 5usize;
    let g = m.metric_at(&jet, lin);
    let h = m.h_at(&jet, lin);
    let re_phi = jet.value(0, lin).re;
    for i in 0..2 {
        for j in 0..2 {
            let base = if i == j { 1.0 } else { 0.0 };
            let bump = if i == j { re_phi } else { 0.0 };
            assert!((g[i][j] - (base + h[i][j])).abs() < 1e-14);
            assert!((h[i][j] - bump).abs() < 1e-14);
        }
    }
}

#[test]
fn force_values_vanish_for_free_model_and_match_jet_for_toy() {
    let field = test_field(1);
    let free = ModelProblem::builtin("free", 1).unwrap();
    let jet = FieldJet::new(&field);
    assert!(free.force_values(&jet, 0).iter().all(|z| z.norm() == 0.0));

    let toy = ModelProblem::builtin("toy-quadratic", 1).unwrap();
    let fv = toy.force_values(&jet, 0);
    for lin in [0usize, 4, 11] {
        let d = jet.deriv(0, 0, lin);
        assert!((fv[lin] - d * d).norm() < 1e-13);
    }
}

#[test]
fn builtin_classes_are_as_registered() {
    assert_eq!(ModelProblem::builtin("toy-quadratic", 1).unwrap().class, NonlinearityClass::Quadratic);
    assert_eq!(ModelProblem::builtin("toy-cubic", 2).unwrap().class, NonlinearityClass::Cubic);
}
