use proptest::prelude::*;
use qmeasure_core::grid::{gaussian_packet, Grid1D, GridWaveFn, Interval};
use qmeasure_core::measurement::{entanglement_criterion, kennard_check, rms_noise, MeasurementModel, Pointer};
use qmeasure_core::scaling::fit_loglog;
use qmeasure_core::two_body::{Frame, Observable, TwoBodyWaveFn};
use qmeasure_core::C64;

fn grid() -> Grid1D {
    Grid1D::new(1024, 40.0, 1.0).unwrap()
}

prop_compose! {
    fn component()(c in -6.0..6.0f64, s in 0.3..1.5f64, p in -2.0..2.0f64, re in -1.0..1.0f64, im in -1.0..1.0f64)
        -> (f64, f64, f64, C64) {
        (c, s, p, C64::new(re, im))
    }
}

fn mixture(parts: &[(f64, f64, f64, C64)]) -> Option<GridWaveFn> {
    let packets: Vec<_> = parts.iter().map(|&(c, s, p, _)| gaussian_packet(grid(), c, s, p).unwrap()).collect();
    let amps: Vec<C64> = (0..grid().points())
        .map(|j| parts.iter().zip(&packets).map(|(part, wf)| part.3 * wf.amplitudes()[j]).sum())
        .collect();
    GridWaveFn::from_amplitudes(grid(), amps).ok()?.normalized().ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kennard_holds_for_gaussian_mixtures(parts in prop::collection::vec(component(), 1..4)) {
        if let Some(wf) = mixture(&parts) {
            let report = kennard_check(&wf).unwrap();
            prop_assert!(report.pass, "product {}", report.product);
        }
    }

    #[test]
    fn reduction_is_idempotent(c in -4.0..4.0f64, s in 0.5..2.0f64, lo in -3.0..0.0f64, w in 0.5..3.0f64) {
        let wf = gaussian_packet(grid(), c, s, 0.0).unwrap();
        let sector = Interval::new(lo, lo + w);
        if let Ok((once, p)) = wf.reduce(sector) {
            prop_assert!(p > 0.0 && p <= 1.0 + 1e-12);
            let (twice, p2) = once.reduce(sector).unwrap();
            prop_assert!((p2 - 1.0).abs() < 1e-12);
            let diff = once.amplitudes().iter().zip(twice.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            prop_assert!(diff < 1e-12);
        }
    }

    #[test]
    fn propagation_preserves_norm(c in -3.0..3.0f64, s in 0.3..1.5f64, p in -2.0..2.0f64, t in 0.0..5.0f64, m in 0.5..4.0f64) {
        let wf = gaussian_packet(grid(), c, s, p).unwrap();
        let moved = wf.free_propagate(m, t).unwrap();
        prop_assert!((moved.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!((moved.std_momentum() - wf.std_momentum()).abs() < 1e-9);
    }

    #[test]
    fn relabel_preserves_norm_and_moments(c1 in -1.0..1.0f64, c2 in -1.0..1.0f64, s1 in 0.4..0.8f64, s2 in 0.4..0.8f64) {
        let g = Grid1D::new(256, 24.0, 1.0).unwrap();
        let state = TwoBodyWaveFn::product(
            Frame::Particles,
            gaussian_packet(g, c1, s1, 0.0).unwrap(),
            gaussian_packet(g, c2, s2, 0.0).unwrap(),
        ).unwrap();
        // Kept well inside the grid so that no tail wraps on the relative axis.
        let other = state.relabel().unwrap();
        prop_assert_eq!(other.frame(), Frame::PartnerRelative);
        prop_assert!((other.norm_sqr() - 1.0).abs() < 1e-12);
        for obs in [Observable::x1(), Observable::x2(), Observable::q()] {
            prop_assert!((other.mean(&obs) - state.mean(&obs)).abs() < 1e-9);
            prop_assert!((other.variance(&obs) - state.variance(&obs)).abs() < 1e-9);
        }
        let back = other.relabel().unwrap();
        prop_assert!((back.mean(&Observable::x1()) - c1).abs() < 1e-9);
    }

    #[test]
    fn entanglement_sum_is_translation_invariant(s in 0.4..1.2f64, a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let g = Grid1D::new(512, 30.0, 1.0).unwrap();
        let at = |x1: f64, x2: f64| TwoBodyWaveFn::product(
            Frame::Particles,
            gaussian_packet(g, x1, s, 0.0).unwrap(),
            gaussian_packet(g, x2, s, 0.0).unwrap(),
        ).unwrap();
        let base = entanglement_criterion(&at(0.0, 0.0)).sum;
        let moved = entanglement_criterion(&at(a, b)).sum;
        prop_assert!((base - moved).abs() < 1e-9);
        prop_assert!(base >= 2.0 - 1e-9);
    }

    #[test]
    fn loglog_recovers_exact_power_laws(slope in -3.0..3.0f64, scale in 0.01..100.0f64, n in 3usize..10) {
        let points: Vec<(f64, f64)> = (0..n).map(|k| {
            let x = 10f64.powf(k as f64 * 0.5);
            (x, scale * x.powf(slope))
        }).collect();
        let fit = fit_loglog(&points).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-9);
        prop_assert!((fit.intercept - scale.ln()).abs() < 1e-8);
    }

    #[test]
    fn error_splits_into_spread_and_bias(c1 in -3.0..3.0f64, c2 in -3.0..3.0f64, s1 in 0.3..1.5f64, s2 in 0.3..1.5f64, k in -2.0..2.0f64) {
        let state = TwoBodyWaveFn::product(
            Frame::Particles,
            gaussian_packet(grid(), c1, s1, 0.0).unwrap(),
            gaussian_packet(grid(), c2, s2, 0.0).unwrap(),
        ).unwrap();
        let pointer = Observable::x2().shifted(k);
        let model = MeasurementModel::position_pointer(Pointer::Observable(pointer));
        let eps = rms_noise(&model, &state, &Observable::x1()).unwrap();
        let diff = pointer.minus(Observable::x1()).unwrap();
        let split = state.variance(&diff) + state.mean(&diff).powi(2);
        prop_assert!((eps * eps - split).abs() < 1e-9 * (1.0 + split));
    }
}
