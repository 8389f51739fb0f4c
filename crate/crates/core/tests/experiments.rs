use qmeasure_core::experiments::{
    rescaled_product, run_box_model, run_diffraction, run_ozawa_commuting, run_ozawa_position, run_preparation,
    run_slit_two_body, run_spin_epr, BoxModelConfig, DiffractionConfig, OzawaCommutingConfig, OzawaPositionConfig,
    PreparationConfig, ScenarioParams, Setup, SlitConfig, SCENARIOS,
};
use qmeasure_core::Error;

fn setup() -> Setup {
    Setup::default()
}

fn bad_param(err: Error) -> &'static str {
    match err {
        Error::InvalidParameter { name, .. } => name,
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn estimated_py_on_axis_and_at_45_degrees() {
    let on_axis = DiffractionConfig { detector_position: 0.0, ..Default::default() };
    assert_eq!(on_axis.estimated_py(), 0.0);
    let diagonal = DiffractionConfig { detector_position: 1000.0, screen_distance: 1000.0, ..Default::default() };
    assert!((diagonal.estimated_py() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn rescaled_product_grows_with_distance() {
    // L/λ̄ = 10³, δỹ = 0.1.
    let cfg = DiffractionConfig { screen_distance: 1000.0, detector_size: 100.0, ..Default::default() };
    assert!((rescaled_product(&cfg, 1.0) - 10.0).abs() < 1e-12);
    let doubled = DiffractionConfig { screen_distance: 2000.0, detector_size: 200.0, ..cfg };
    assert!((rescaled_product(&doubled, 1.0) - 20.0).abs() < 1e-12);
}

#[test]
fn negative_detector_size_is_named() {
    let cfg = DiffractionConfig { detector_size: -1.0, ..Default::default() };
    assert_eq!(bad_param(run_diffraction(&cfg, &setup()).unwrap_err()), "detector_size");
}

#[test]
fn slit_narrower_than_wavelength_rejected() {
    let cfg = DiffractionConfig { slit_width: 0.5, ..Default::default() };
    assert_eq!(bad_param(run_diffraction(&cfg, &setup()).unwrap_err()), "slit_width");
}

#[test]
fn diffraction_defaults() {
    let report = run_diffraction(&DiffractionConfig::default(), &setup()).unwrap().report;
    assert!(report.flags["eq_2_10_below_bound"]);
    assert!(report.flags["far_field_regime"]);
    assert!(report.flags["grid_farfield_agreement"]);
    assert!(report.value("grid_farfield_relative_difference").unwrap() < 0.05);
    for record in report.evasions() {
        assert!(record.sector_probability < 0.01, "{record:?}");
    }
}

#[test]
fn ozawa_sector_probability_for_narrow_packets() {
    let cfg = OzawaPositionConfig { length: 100.0, width: 0.01, monte_carlo_samples: 0, ..Default::default() };
    let report = run_ozawa_position(&cfg, &setup()).unwrap().report;
    let p = report.value("eq_2_16_sector_probability").unwrap();
    assert!((p - 5e-5).abs() / 5e-5 < 1e-6, "{p}");
    assert!(report.value("eq_2_13_product").unwrap() == 0.0);
}

#[test]
fn ozawa_position_defaults() {
    let report = run_ozawa_position(&OzawaPositionConfig::default(), &setup()).unwrap().report;
    let eps = report.value("eq_2_14_epsilon_x1").unwrap();
    let expected = report.value("eq_2_14_expected_epsilon_x1").unwrap();
    assert!((eps - expected).abs() / expected < 1e-3);
    assert_eq!(report.value("eq_2_12_eta_p1"), Some(0.0));
    assert!(report.value("mc_z_score").unwrap().abs() < 4.0);
}

#[test]
fn commuting_offset_must_lie_in_the_box() {
    let cfg = OzawaCommutingConfig { offset: 80.0, ..Default::default() };
    assert_eq!(bad_param(run_ozawa_commuting(&cfg, &setup()).unwrap_err()), "offset");
}

#[test]
fn commuting_defaults() {
    let report = run_ozawa_commuting(&OzawaCommutingConfig::default(), &setup()).unwrap().report;
    let p = report.value("eq_2_19_sector_probability").unwrap();
    let expected = report.value("eq_2_19_expected_probability").unwrap();
    assert!((p - expected).abs() / expected < 1e-6);
    assert_eq!(report.value("eq_2_17_epsilon_total_momentum"), Some(0.0));
}

#[test]
fn box_model_defaults() {
    let report = run_box_model(&BoxModelConfig::default(), &setup()).unwrap().report;
    assert!(report.flags["eq_2_25_product_in_band"]);
    assert!(report.flags["eq_2_26_epsilon_below_width"]);
    let product = report.value("eq_2_27_product").unwrap();
    assert!(product <= report.value("eq_2_27_product_bound").unwrap() * (1.0 + 1e-9));
    assert!(report.value("momentum_lattice_relative_error").unwrap() < 1e-12);
}

#[test]
fn light_slit_is_rejected() {
    let cfg = SlitConfig { mass_ratio: 100.0, ..Default::default() };
    assert_eq!(bad_param(run_slit_two_body(&cfg, &setup()).unwrap_err()), "mass_ratio");
}

#[test]
fn slit_conserves_momentum() {
    let report = run_slit_two_body(&SlitConfig::default(), &setup()).unwrap().report;
    assert!(report.flags["total_momentum_conserved"]);
    assert!(report.flags["relative_momentum_conserved"]);
    assert!(report.value("eq_2_34_sector_probability").unwrap() < 0.01);
}

#[test]
fn preparation_never_evades() {
    for width in [0.05, 0.1, 0.4] {
        let cfg = PreparationConfig { width, partner_width: width, ..Default::default() };
        let report = run_preparation(&cfg, &setup()).unwrap().report;
        assert!(!report.flags["eq_2_36_evasion"]);
        assert!(!report.flags["eq_2_37_evasion"]);
        assert!((report.value("eq_2_36_product").unwrap() - 0.5).abs() < 1e-6);
    }
}

#[test]
fn spin_epr_is_exact() {
    let report = run_spin_epr(&setup()).unwrap().report;
    assert!(report.value("eq_3_4_total_spin_max_norm").unwrap() < 1e-14);
    assert!((report.value("eq_3_5_correlator").unwrap() + 0.25).abs() < 1e-14);
    assert!(report.flags["eq_3_9_states_differ"]);
    assert!(!report.flags["clear_evasion"]);
}

#[test]
fn every_scenario_runs_with_defaults() {
    for name in SCENARIOS {
        let params = ScenarioParams::defaults(name).unwrap();
        assert_eq!(params.name(), name);
        let outcome = params.run(&setup()).unwrap();
        assert_eq!(outcome.report.scenario, name);
        for record in outcome.report.evasions() {
            assert!(record.sector_probability < 0.01, "{name}: {record:?}");
        }
    }
    assert!(ScenarioParams::defaults("nope").is_none());
}

#[test]
fn runs_are_deterministic() {
    let a = run_ozawa_position(&OzawaPositionConfig::default(), &setup()).unwrap().report;
    let b = run_ozawa_position(&OzawaPositionConfig::default(), &setup()).unwrap().report;
    assert_eq!(a, b);
}
