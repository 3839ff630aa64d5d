//! Control family, quadrature, and the gamma maximization.
//!
//! Frozen anchors come from an independent Simpson/golden-section
//! implementation run at the same node floors.

use proptest::prelude::*;
use spinstitch::control::{
    beta_gamma, check_derivative_constraints, maximize_gamma, ControlParams, PulsedControl,
};
use spinstitch::Error;
use std::f64::consts::PI;

#[test]
fn ramp_endpoints_are_exact() {
    let p = ControlParams::two_harmonics(0.3, -0.2, 0.7).unwrap();
    // Bit-exact endpoint values, not approximations: downstream code pins
    // g(0) = 0 and g(T) = 1 to connect the two endpoint Hamiltonians.
    assert_eq!(p.value(0.0).unwrap(), 0.0);
    assert_eq!(p.value(0.7).unwrap(), 1.0);
}

#[test]
fn midpoint_isolates_the_first_harmonic() {
    let (a1, t) = (0.3, 0.7);
    let p = ControlParams::two_harmonics(a1, -0.2, t).unwrap();
    // sin(pi/2) = 1 and sin(pi) = 0, so g(T/2) = 1/2 + a1.
    assert!((p.value(0.5 * t).unwrap() - (0.5 + a1)).abs() < 1e-12);
}

#[test]
fn antiderivative_differentiates_back_to_the_control() {
    let p = ControlParams::new(vec![0.4, -0.8, 0.15], 1.3).unwrap();
    assert_eq!(p.antiderivative(0.0).unwrap(), 0.0);
    let h = 1e-6;
    for &t in &[0.2, 0.5, 0.9, 1.1] {
        let slope = (p.antiderivative(t + h).unwrap() - p.antiderivative(t - h).unwrap())
            / (2.0 * h);
        assert!(
            (slope - p.value(t).unwrap()).abs() < 1e-6,
            "d/dt G mismatch at t = {t}"
        );
    }
}

// a1 = -pi/4 cancels the ramp area against the first harmonic, closing
// G(T) = 0 for any horizon and any even-harmonic content.
#[test]
fn quarter_pi_branch_closes_the_antiderivative()
{
    for &a2 in &[0.0, 5.0, 648.334] {
        let p = ControlParams::two_harmonics(-PI / 4.0, a2, 0.37).unwrap();
        assert!(p.antiderivative(0.37).unwrap().abs() < 1e-13);
    }
}

#[test]
fn evaluation_outside_the_horizon_is_refused() {
    let p = ControlParams::two_harmonics(0.1, 0.1, 1.0).unwrap();
    assert!(matches!(p.value(-0.1), Err(Error::TimeOutOfRange { .. })));
    assert!(matches!(p.value(1.0001), Err(Error::TimeOutOfRange { .. })));
    assert!(matches!(p.antiderivative(2.0), Err(Error::TimeOutOfRange { .. })));
}

#[test]
fn degenerate_controls_are_refused() {
    assert!(matches!(ControlParams::new(vec![], 1.0), Err(Error::BadControl)));
    assert!(matches!(ControlParams::new(vec![f64::NAN], 1.0), Err(Error::BadControl)));
    assert!(matches!(ControlParams::new(vec![0.1], 0.0), Err(Error::BadControl)));
    assert!(matches!(ControlParams::new(vec![0.1], -1.0), Err(Error::BadControl)));
}

// For the bare ramp, G(t) = t^2/2T gives beta = T - T^3/10 + O(T^5) and
// gamma = T^2/3 + O(T^4); at T = 0.01 the quadrature must land on the
// corrected forms to well below 1e-9.
#[test]
fn bare_ramp_integrals_follow_the_small_time_expansion() {
    let t = 0.01;
    let p = ControlParams::two_harmonics(0.0, 0.0, t).unwrap();
    let (beta, gamma) = p.beta_gamma().unwrap();
    assert!((beta - (t - t.powi(3) / 10.0)).abs() < 1e-9, "beta = {beta:.12e}");
    assert!((gamma - t * t / 3.0).abs() < 1e-9, "gamma = {gamma:.12e}");
}

#[test]
fn two_level_pulse_matches_its_closed_form() {
    let pulse = PulsedControl { levels: (1.3, -0.4), horizon: 0.9 };
    let (c1, c2) = pulse.levels;
    let t = pulse.horizon;
    // Piecewise-linear G makes both integrals elementary on each half.
    let beta_exact = (c1 * t).sin() / (2.0 * c1)
        + ((c1 * t + c2 * t).sin() - (c1 * t).sin()) / (2.0 * c2);
    let gamma_exact = (1.0 - (c1 * t).cos()) / (2.0 * c1)
        + ((c1 * t).cos() - (c1 * t + c2 * t).cos()) / (2.0 * c2);
    let (beta, gamma) = beta_gamma(|x| pulse.antiderivative(x), t, 2001).unwrap();
    assert!((beta - beta_exact).abs() < 1e-10, "beta = {beta:.12e} vs {beta_exact:.12e}");
    assert!((gamma - gamma_exact).abs() < 1e-10, "gamma = {gamma:.12e} vs {gamma_exact:.12e}");
}

#[test]
fn harmonic_quadrature_hits_the_frozen_anchor() {
    let p = ControlParams::two_harmonics(-PI / 4.0, 648.334, 0.005).unwrap();
    let (beta, gamma) = p.beta_gamma().unwrap();
    assert!((beta - 0.001930543420).abs() < 1e-11, "beta = {beta:.12}");
    assert!((gamma - 0.003222135966).abs() < 1e-11, "gamma = {gamma:.12}");
}

#[test]
fn gamma_maximization_tracks_the_reference_rows() {
    let rows = [
        (0.005, 648.333991, 0.0032221360),
        (0.02, 162.418696, 0.0128804240),
        (0.05, 65.235574, 0.0321602971),
        (0.1, 32.841109, 0.0641837523),
    ];
    for (horizon, a2_ref, gamma_ref) in rows {
        let (a2, gamma) = maximize_gamma(horizon);
        assert!(
            (a2 - a2_ref).abs() < 1e-3 * a2_ref,
            "T = {horizon}: a2 = {a2} vs {a2_ref}"
        );
        assert!(
            (gamma - gamma_ref).abs() < 1e-9,
            "T = {horizon}: gamma = {gamma} vs {gamma_ref}"
        );
    }
}

// The reward per unit time saturates just under 0.645 deep in the
// ultrashort regime and drifts down by only ~0.4% out to T = 0.1.
#[test]
fn gamma_per_unit_time_plateaus() {
    let (_, g_small) = maximize_gamma(0.005);
    let (_, g_large) = maximize_gamma(0.1);
    assert!((g_small / 0.005 - 0.64442719).abs() < 1e-6);
    assert!((g_large / 0.1 - 0.64183752).abs() < 1e-6);
}

#[test]
fn derivative_constraints_reduce_to_the_known_window() {
    let t = 1.0;
    let report =
        check_derivative_constraints(&ControlParams::two_harmonics(0.1, 0.2, t).unwrap());
    assert!(report.satisfied);
    assert!((report.margin_start - (1.0 / PI + 0.1 + 0.4)).abs() < 1e-12);
    assert!((report.margin_end - (1.0 / PI - 0.1 + 0.4)).abs() < 1e-12);

    // For K = 2 the allowed band is |a1| < 1/pi + 2 a2; probe both edges.
    let edge = 1.0 / PI + 0.4;
    let inside =
        check_derivative_constraints(&ControlParams::two_harmonics(edge - 0.01, 0.2, t).unwrap());
    let outside =
        check_derivative_constraints(&ControlParams::two_harmonics(edge + 0.01, 0.2, t).unwrap());
    let mirrored =
        check_derivative_constraints(&ControlParams::two_harmonics(-edge - 0.01, 0.2, t).unwrap());
    assert!(inside.satisfied);
    assert!(!outside.satisfied);
    assert!(!mirrored.satisfied);
}

#[test]
fn quadrature_rejects_bad_node_requests() {
    assert!(matches!(beta_gamma(|_| 0.0, 1.0, 0), Err(Error::BadNodeCount { nodes: 0 })));
    assert!(matches!(beta_gamma(|_| 0.0, 1.0, 2), Err(Error::BadNodeCount { nodes: 2 })));
    assert!(matches!(beta_gamma(|_| 0.0, 1.0, 4), Err(Error::BadNodeCount { nodes: 4 })));
    // Odd requests below the floor are raised, not refused: G = 0 gives
    // beta = T and gamma = 0 to machine precision at any node count.
    let (beta, gamma) = beta_gamma(|_| 0.0, 1.0, 3).unwrap();
    assert!((beta - 1.0).abs() < 1e-14);
    assert!(gamma.abs() < 1e-14);
}

#[test]
fn non_finite_integrands_are_reported() {
    let result = beta_gamma(|t| if t > 0.5 { f64::NAN } else { 0.0 }, 1.0, 2001);
    assert!(matches!(result, Err(Error::NonFiniteIntegrand { .. })));
}

#[test]
fn coupling_bound_caps_every_sample() {
    let p = ControlParams::new(vec![1.7, -2.3, 0.4], 0.8).unwrap();
    let bound = p.coupling_bound();
    for i in 0..=200 {
        let t = 0.8 * i as f64 / 200.0;
        assert!(p.value(t).unwrap().abs() <= bound + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // beta and gamma are integrals of cos/sin over [0, T], so neither can
    // exceed the horizon in magnitude.
    #[test]
    fn integrals_are_bounded_by_the_horizon(
        a1 in -5.0f64..5.0,
        a2 in -5.0f64..5.0,
        horizon in 0.01f64..2.0,
    ) {
        let p = ControlParams::two_harmonics(a1, a2, horizon).unwrap();
        let (beta, gamma) = p.beta_gamma().unwrap();
        prop_assert!(beta.abs() <= horizon * (1.0 + 1e-9));
        prop_assert!(gamma.abs() <= horizon * (1.0 + 1e-9));
    }

    // Even harmonics integrate to zero over the full horizon, so G(T)
    // cannot depend on a2 at all.
    #[test]
    fn terminal_gauge_ignores_even_harmonics(
        a1 in -3.0f64..3.0,
        a2 in -50.0f64..50.0,
        a2_other in -50.0f64..50.0,
        horizon in 0.01f64..2.0,
    ) {
        let p = ControlParams::two_harmonics(a1, a2, horizon).unwrap();
        let q = ControlParams::two_harmonics(a1, a2_other, horizon).unwrap();
        let gp = p.antiderivative(horizon).unwrap();
        let gq = q.antiderivative(horizon).unwrap();
        prop_assert!((gp - gq).abs() < 1e-12 * gp.abs().max(1.0));
    }

    // The node floor is already deep in the converged regime: doubling the
    // nodes must not move either integral at the 1e-9 level.
    #[test]
    fn node_refinement_is_already_settled(
        a1 in -3.0f64..3.0,
        a2 in -3.0f64..3.0,
        horizon in 0.05f64..1.0,
    ) {
        let p = ControlParams::two_harmonics(a1, a2, horizon).unwrap();
        let floor = p.simpson_node_floor();
        // The quadrature builds nodes as i * h, so the last one can round a
        // hair past the horizon; clamp before entering the checked evaluator.
        let g = |t: f64| p.antiderivative(t.min(horizon)).unwrap();
        let coarse = beta_gamma(g, horizon, floor).unwrap();
        let fine = beta_gamma(g, horizon, 2 * floor + 1).unwrap();
        prop_assert!((coarse.0 - fine.0).abs() < 1e-9);
        prop_assert!((coarse.1 - fine.1).abs() < 1e-9);
    }
}
