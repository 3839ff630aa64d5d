//! Speed-limit accounting: hand-fed formula checks plus the frozen
//! efficiency table for the optimized drives.

use spinstitch::control::ControlParams;
use spinstitch::propagation::{step_floor, EvolutionSpec};
use spinstitch::qsl::{qsl_from_parts, qsl_ratio};
use spinstitch::spin_model::ChainConfig;

fn chain6() -> ChainConfig {
    ChainConfig::new(6, 0.9).unwrap()
}

#[test]
fn report_assembles_from_hand_numbers() {
    let report = qsl_from_parts(2.0, 0.6, 3.0);
    let bures = 0.6f64.acos();
    assert!((report.bures_angle - bures).abs() < 1e-12);
    assert_eq!(report.energy_integral, 3.0);
    assert!((report.t_qsl - 2.0 * bures / 3.0).abs() < 1e-12);
    assert!((report.ratio.unwrap() - 3.0 / bures).abs() < 1e-11);
}

#[test]
fn stationary_state_yields_no_bound() {
    let report = qsl_from_parts(1.0, 1.0, 5.0);
    assert_eq!(report.bures_angle, 0.0);
    assert_eq!(report.t_qsl, 0.0);
    assert_eq!(report.ratio, None);
    // Overlap magnitudes above 1 from rounding must clamp, not NaN.
    let clamped = qsl_from_parts(1.0, 1.0 + 1e-14, 5.0);
    assert_eq!(clamped.ratio, None);
}

#[test]
fn zero_energy_motion_degenerates_to_infinity() {
    // A precessing spin with identically zero energy expectation moves
    // without any Mandelstam-Tamm budget; the bound must go infinite
    // instead of inventing a ratio.
    let report = qsl_from_parts(1.0, 0.5, 0.0);
    assert!(report.t_qsl.is_infinite());
    assert_eq!(report.ratio, None);
}

#[test]
fn driven_chain_table_matches_frozen_values() {
    let c = chain6();
    // (T, optimized amplitudes, bures angle, energy integral, T / T_QSL);
    // the amplitudes are the frozen optimizer outputs for each horizon.
    let rows = [
        (0.005, -0.896935, 646.8506, 0.00570731, 0.47047735, 82.43420),
        (0.05, -0.872278, 63.4531, 0.05670816, 0.51192834, 9.02742),
        (0.5, -0.137094, 1.774166, 0.23632554, 3.47172405, 14.69043),
        (1.0, -0.084032, 0.417154, 0.26886034, 6.95116250, 25.85418),
    ];
    for (horizon, a1, a2, bures_ref, energy_ref, ratio_ref) in rows {
        let params = ControlParams::two_harmonics(a1, a2, horizon).unwrap();
        let steps = 2 * step_floor(&c, horizon, params.coupling_bound());
        let report = qsl_ratio(&c, &params, &EvolutionSpec::new(steps)).unwrap();
        assert!(
            (report.bures_angle - bures_ref).abs() < 1e-6,
            "T = {horizon}: bures {} vs {bures_ref}",
            report.bures_angle
        );
        assert!(
            (report.energy_integral - energy_ref).abs() < 1e-6 * energy_ref.max(1.0),
            "T = {horizon}: energy {} vs {energy_ref}",
            report.energy_integral
        );
        let ratio = report.ratio.unwrap();
        assert!(
            (ratio - ratio_ref).abs() < 1e-3 * ratio_ref,
            "T = {horizon}: ratio {ratio} vs {ratio_ref}"
        );
        // The bound is a lower bound: the evolution can never beat it.
        assert!(report.t_qsl <= horizon);
    }
}

#[test]
fn node_doubling_leaves_the_report_stable() {
    let c = chain6();
    let params = ControlParams::two_harmonics(-0.872278, 63.4531, 0.05).unwrap();
    let floor = step_floor(&c, 0.05, params.coupling_bound());
    let coarse = qsl_ratio(&c, &params, &EvolutionSpec::new(2 * floor)).unwrap();
    let fine = qsl_ratio(&c, &params, &EvolutionSpec::new(4 * floor)).unwrap();
    let rc = coarse.ratio.unwrap();
    let rf = fine.ratio.unwrap();
    assert!((rc - rf).abs() < 1e-4 * rc, "ratio moved {rc} -> {rf}");
}
