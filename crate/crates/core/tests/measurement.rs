use qmeasure_core::grid::{gaussian_packet, packet_superposition, Grid1D, PacketAmplitudes};
use qmeasure_core::measurement::{
    entanglement_criterion, filter_momentum_spread, indirect_error_via_q, is_evasion, kennard_check, rms_disturbance,
    rms_noise, unbiased_check, Coupling, MeasurementModel, NoiseReport, NoiseValues, Pointer,
};
use qmeasure_core::two_body::{Frame, Observable, TwoBodyWaveFn};
use qmeasure_core::{Error, C64};

fn gaussian(center: f64, sigma: f64) -> qmeasure_core::grid::GridWaveFn {
    gaussian_packet(Grid1D::new(2048, 40.0, 1.0).unwrap(), center, sigma, 0.0).unwrap()
}

fn x2_reads_x1() -> MeasurementModel {
    MeasurementModel::position_pointer(Pointer::Observable(Observable::x2()))
}

#[test]
fn partner_error_for_gaussian_pair() {
    // ε² = σ₁² + σ₂² + d² for uncorrelated factors.
    let (s1, s2, d) = (0.7, 1.1, 2.0);
    let state = TwoBodyWaveFn::product(Frame::Particles, gaussian(d, s1), gaussian(0.0, s2)).unwrap();
    let eps = rms_noise(&x2_reads_x1(), &state, &Observable::x1()).unwrap();
    let expected = (s1 * s1 + s2 * s2 + d * d).sqrt();
    assert!((eps - expected).abs() / expected < 1e-8);

    let twin = TwoBodyWaveFn::product(Frame::Particles, gaussian(0.0, 1.0), gaussian(0.0, 1.0)).unwrap();
    let eps = rms_noise(&x2_reads_x1(), &twin, &Observable::x1()).unwrap();
    assert!((eps - 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn partner_error_for_uniform_box() {
    let grid = Grid1D::new(8192, 120.0, 1.0).unwrap();
    let train = packet_superposition(grid, 1.0, PacketAmplitudes::Uniform(100)).unwrap();
    let partner = gaussian_packet(Grid1D::new(256, 2.4, 1.0).unwrap(), 0.0, 0.1, 0.0).unwrap();
    let state = TwoBodyWaveFn::product(Frame::PartnerRelative, partner, train.wavefn).unwrap();
    let eps = rms_noise(&x2_reads_x1(), &state, &Observable::x1()).unwrap();
    let box_value = 100.0 / 12f64.sqrt();
    assert!((eps - box_value).abs() / box_value < 1e-3);
}

#[test]
fn identity_pointer_is_exact() {
    let state = TwoBodyWaveFn::product(Frame::Particles, gaussian(1.0, 0.5), gaussian(-2.0, 0.9)).unwrap();
    let model = MeasurementModel::new(Some(Pointer::Identity), Some(Pointer::Identity), Coupling::None).unwrap();
    assert_eq!(rms_noise(&model, &state, &Observable::x1()).unwrap(), 0.0);
    assert_eq!(rms_noise(&model, &state, &Observable::p2()).unwrap(), 0.0);
    assert_eq!(rms_disturbance(&model, &state, &Observable::p1()).unwrap(), 0.0);
}

#[test]
fn undefined_pointer() {
    let state = TwoBodyWaveFn::product(Frame::Particles, gaussian(0.0, 0.5), gaussian(0.0, 0.5)).unwrap();
    let err = rms_noise(&x2_reads_x1(), &state, &Observable::p1()).unwrap_err();
    assert_eq!(err, Error::UndefinedPointer("momentum"));
}

#[test]
fn commuting_pointer_pairs() {
    let q = Pointer::Observable(Observable::q());
    let total = Pointer::Observable(Observable::total_momentum());
    assert!(MeasurementModel::new(Some(q), Some(total), Coupling::None).is_ok());
    let p1 = Pointer::Observable(Observable::p1());
    assert_eq!(MeasurementModel::new(Some(q), Some(p1), Coupling::None).unwrap_err(), Error::NonCommutingPointers);
}

#[test]
fn gaussian_filter_kick() {
    for w in [0.05, 0.3, 2.0] {
        let spread = filter_momentum_spread(w, 1.0).unwrap();
        assert!((spread - 0.5 / w).abs() / (0.5 / w) < 1e-9);
    }
    let model = MeasurementModel::new(
        Some(Pointer::Observable(Observable::x2())),
        None,
        Coupling::PrepareThenMeasure { prepared: Observable::q(), width: 0.25 },
    )
    .unwrap();
    let state = TwoBodyWaveFn::product(Frame::Particles, gaussian(0.0, 1.0), gaussian(0.0, 1.0)).unwrap();
    let eta = rms_disturbance(&model, &state, &Observable::p1()).unwrap();
    assert!((eta - 2.0).abs() < 1e-8);
    assert_eq!(rms_disturbance(&model, &state, &Observable::x1()).unwrap(), 0.0);
    // q·P has zero lever arm.
    assert_eq!(rms_disturbance(&model, &state, &Observable::total_momentum()).unwrap(), 0.0);
}

#[test]
fn bias_of_offset_pointer() {
    let state = TwoBodyWaveFn::product(Frame::Particles, gaussian(1.0, 0.5), gaussian(1.0, 0.5)).unwrap();
    let report = unbiased_check(&x2_reads_x1(), std::slice::from_ref(&state), &Observable::x1(), None).unwrap();
    assert!(report.unbiased);
    let shifted = TwoBodyWaveFn::product(Frame::Particles, gaussian(1.0, 0.5), gaussian(0.5, 0.5)).unwrap();
    let report = unbiased_check(&x2_reads_x1(), &[state, shifted], &Observable::x1(), None).unwrap();
    assert!(!report.unbiased);
    assert!((report.max_bias - 0.5).abs() < 1e-9);
}

#[test]
fn kennard_minimal_gaussian_saturates() {
    let report = kennard_check(&gaussian(0.0, 0.8)).unwrap();
    assert!(report.pass);
    assert!((report.product - 0.5).abs() / 0.5 < 1e-6);
}

#[test]
fn kennard_rejects_boundary_support() {
    let grid = Grid1D::new(256, 10.0, 1.0).unwrap();
    let flat = qmeasure_core::grid::GridWaveFn::from_fn(grid, |_| C64::new(1.0, 0.0)).unwrap();
    assert!(matches!(kennard_check(&flat), Err(Error::BoundarySupport { .. })));
}

#[test]
fn separable_gaussians_sit_on_entanglement_boundary() {
    // σ² = ħ/2 balances Δ²(x₁−x₂) = 2σ² against Δ²(p₁+p₂) = ħ²/(2σ²).
    let s = 0.5f64.sqrt();
    let state = TwoBodyWaveFn::product(Frame::Particles, gaussian(1.0, s), gaussian(-1.0, s)).unwrap();
    let report = entanglement_criterion(&state);
    assert!((report.sum - 2.0).abs() < 1e-9, "{}", report.sum);
    assert!(!report.entangled);

    let state = TwoBodyWaveFn::product(Frame::Particles, gaussian(1.0, 0.6), gaussian(-1.0, 0.6)).unwrap();
    let report = entanglement_criterion(&state);
    let expected = 2.0 * 0.36 + 2.0 / (4.0 * 0.36);
    assert!((report.sum - expected).abs() < 1e-9);
    assert!(!report.entangled);
}

/// ψ ∝ exp(−u²e^{2r}/(4ħ) − v²e^{−2r}/(4ħ)) with u = x₁ − x₂, v = x₁ + x₂,
/// so Δ²u = ħe^{−2r} and Δ²(p₁+p₂) = ħe^{−2r}.
fn squeezed_pair(r: f64, shift: f64) -> TwoBodyWaveFn {
    let grid = Grid1D::new(512, 40.0, 1.0).unwrap();
    TwoBodyWaveFn::from_fn(Frame::Particles, grid, grid, |x1, x2| {
        let (u, v) = (x1 - x2, x1 + x2 - 2.0 * shift);
        C64::new((-u * u * (2.0 * r).exp() / 4.0 - v * v * (-2.0 * r).exp() / 4.0).exp(), 0.0)
    })
    .unwrap()
}

#[test]
fn squeezed_pair_is_entangled() {
    let report = entanglement_criterion(&squeezed_pair(1.0, 0.0));
    let expected = 2.0 * (-2.0f64).exp();
    assert!((report.sum - expected).abs() < 1e-6, "{}", report.sum);
    assert!(report.entangled);
    let moved = entanglement_criterion(&squeezed_pair(1.0, 1.5));
    assert!((moved.sum - report.sum).abs() < 1e-10);
}

#[test]
fn indirect_error_uses_partner_offset() {
    let state = TwoBodyWaveFn::product(Frame::PartnerRelative, gaussian(2.0, 0.5), gaussian(0.0, 0.3)).unwrap();
    let e = indirect_error_via_q(&state, 2.0);
    assert!((e - 0.5).abs() < 1e-9);
}

#[test]
fn evasion_threshold() {
    assert!(is_evasion(0.0, 1.0));
    assert!(!is_evasion(0.5, 1.0));
    assert!(!is_evasion(0.5 * (1.0 - 1e-7), 1.0));
    assert!(is_evasion(0.5 * (1.0 - 1e-5), 1.0));
}

#[test]
fn noise_report_products() {
    let values = NoiseValues { epsilon_x: Some(0.1), eta_p: Some(0.0), epsilon_p: Some(10.0), ..Default::default() };
    let report = NoiseReport::new(values, 1.0, 0.01);
    assert_eq!(report.product_ex_etap, Some(0.0));
    assert!(report.evasion_ex_etap);
    assert_eq!(report.product_ex_ep, Some(1.0));
    assert!(!report.evasion_ex_ep);
    assert_eq!(report.product_dx_dp, None);
    assert!(report.any_evasion());
}
