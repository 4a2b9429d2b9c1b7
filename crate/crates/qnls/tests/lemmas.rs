//! Integration tests for the inequality verifier: ensemble determinism and
//! refinement invariance, identity suites at machine precision, and ratio
//! stability of the inequality suites under grid refinement.

use qnls::grid::{Grid, MultiIndex};
use qnls::lemmas::{
    verify_bmo_embedding, verify_calderon, verify_commutator_first,
    verify_composition_identities, verify_halving, verify_hilbert_involution,
    verify_interpolation, verify_weight_derivative, verify_weight_lemma, EnsembleSpec,
};
use qnls::norms;

const R: f64 = 20.0 * std::f64::consts::PI;

#[test]
fn ensembles_are_deterministic_in_seed_and_index() {
    let spec = EnsembleSpec::d1(64, R, 4, 42);
    let a = spec.sample(2);
    let b = spec.sample(2);
    assert_eq!(a, b);
    let other_seed = EnsembleSpec { seed: 43, ..spec.clone() };
    let c = other_seed.sample(2);
    assert_ne!(a, c);
    let other_index = spec.sample(3);
    assert_ne!(a, other_index);
}

#[test]
fn refinement_keeps_the_sampled_function_fixed() {
    let spec = EnsembleSpec::d1(64, R, 2, 7);
    let coarse = spec.sample(0);
    let fine = spec.refined(2).sample(0);
    // Band-limited below the coarse Nyquist, so the fine samples agree with
    // the coarse ones at shared grid points and carry the same L² norm.
    let coarse_grid = &spec.grid;
    let fine_grid = Grid::cubic(1, 128, R).unwrap();
    for j in 0..64 {
        assert!((coarse[j] - fine[2 * j]).norm() < 1e-10);
    }
    let nc = norms::l2_norm(coarse_grid, &coarse);
    let nf = norms::l2_norm(&fine_grid, &fine);
    assert!((nc - nf).abs() < 1e-9 * nc);
}

#[test]
fn samples_hit_the_requested_amplitude() {
    let spec = EnsembleSpec { amplitude: 0.125, ..EnsembleSpec::d1(64, R, 2, 9) };
    let s = spec.sample(1);
    let n = norms::l2_norm(&spec.grid, &s);
    assert!((n - 0.125).abs() < 1e-12);
}

#[test]
fn identity_suites_are_machine_precision() {
    let spec = EnsembleSpec::d1(128, R, 16, 1);
    let inv = verify_hilbert_involution(&spec, 0);
    assert!(inv.max_ratio < 1e-10, "involution {:.3e}", inv.max_ratio);
    let comp = verify_composition_identities(&spec, 1.5);
    assert!(comp.max_ratio < 1e-9, "compositions {:.3e}", comp.max_ratio);
    // Central finite difference at h = 1e-6: truncation plus rounding
    // leaves ~1e-10 of headroom against the closed-form derivative.
    assert!(verify_weight_derivative() < 1e-8);
}

#[test]
fn inequality_ratios_are_stable_under_refinement() {
    let base = EnsembleSpec { band_points: vec![64], ..EnsembleSpec::d1(128, R, 25, 5) };
    let fine = base.refined(2);
    for (name, run) in [
        ("commutator", &(|s: &EnsembleSpec| verify_commutator_first(s, 0.5, 1.0).unwrap())
            as &dyn Fn(&EnsembleSpec) -> qnls::lemmas::LemmaReport),
        ("calderon", &|s: &EnsembleSpec| verify_calderon(s, 2.0).unwrap()),
        ("bmo", &|s: &EnsembleSpec| verify_bmo_embedding(s, 5)),
        ("interpolation", &|s: &EnsembleSpec| verify_interpolation(s, 5)),
    ] {
        let a = run(&base);
        let b = run(&fine);
        assert!(a.is_finite() && b.is_finite(), "{name} not finite");
        let drift = (a.max_ratio - b.max_ratio).abs() / a.max_ratio;
        assert!(drift < 0.10, "{name} drift {:.1}%", 100.0 * drift);
    }
}

#[test]
fn report_statistics_are_ordered() {
    let spec = EnsembleSpec::d1(64, R, 30, 11);
    let rep = verify_calderon(&spec, 2.0).unwrap();
    assert_eq!(rep.samples, 30);
    assert!(rep.mean_ratio <= rep.max_ratio);
    assert!(rep.quantile_90 <= rep.max_ratio);
    assert!(rep.worst_sample < rep.samples);
    assert!(!rep.params.is_empty());
}

#[test]
fn transverse_halving_runs_in_two_dimensions_only() {
    let spec1 = EnsembleSpec::d1(64, R, 4, 3);
    assert!(verify_halving(&spec1, 0).is_err());
    let grid = Grid::cubic(2, 32, 10.0).unwrap();
    let spec2 = EnsembleSpec {
        grid,
        band_points: vec![32, 32],
        count: 8,
        amplitude: 1.0,
        window_sigma: None,
        seed: 17,
    };
    let rep = verify_halving(&spec2, 0).unwrap();
    assert!(rep.is_finite());
    assert!(rep.max_ratio > 0.0);
}

#[test]
fn weight_lemma_requires_decaying_samples() {
    let bare = EnsembleSpec::d1(128, R, 4, 23);
    let gamma = MultiIndex::new(vec![1]);
    assert!(verify_weight_lemma(&bare, 1, &gamma).is_err());
    let windowed = EnsembleSpec { window_sigma: Some(R / 6.0), ..bare };
    let rep = verify_weight_lemma(&windowed, 1, &gamma).unwrap();
    assert!(rep.is_finite());
    assert!(rep.max_ratio > 0.0);
}

#[test]
fn parameter_validation_rejects_out_of_scope_exponents() {
    let spec = EnsembleSpec::d1(64, R, 4, 2);
    // Fractional order above 1 is outside the commutator statement.
    assert!(verify_commutator_first(&spec, 1.5, 1.0).is_err());
    // Auxiliary regularity at or below d/2 is insufficient.
    assert!(verify_commutator_first(&spec, 0.5, 0.4).is_err());
    // Lebesgue exponent below 1 is meaningless.
    assert!(verify_calderon(&spec, 0.5).is_err());
}
