use std::f64::consts::PI;

use qmeasure_core::grid::{
    gaussian_packet, packet_superposition, plane_wave, Grid1D, GridWaveFn, Interval, PacketAmplitudes,
};
use qmeasure_core::{Error, C64};

fn grid() -> Grid1D {
    Grid1D::new(4096, 40.0, 1.0).unwrap()
}

#[test]
fn samples_are_cell_centred() {
    let g = Grid1D::new(16, 8.0, 1.0).unwrap();
    assert_eq!(g.spacing(), 0.5);
    assert_eq!(g.position(0), -3.75);
    assert_eq!(g.position(15), 3.75);
    let centred = Grid1D::centered(16, 8.0, 1.0, 100.0).unwrap();
    assert_eq!(centred.position(0), 96.25);
}

#[test]
fn momentum_lattice_spacing() {
    let g = Grid1D::new(1024, 50.0, 2.0).unwrap();
    assert!((g.momentum_spacing() - 2.0 * PI * 2.0 / 50.0).abs() < 1e-15);
    assert_eq!(g.wavenumber(0), 0);
    assert_eq!(g.wavenumber(511), 511);
    assert_eq!(g.wavenumber(512), -512);
    assert_eq!(g.lattice_index(-3.0 * g.momentum_spacing()).unwrap(), 1021);
    assert!(matches!(g.lattice_index(0.3 * g.momentum_spacing()), Err(Error::OffLattice(_))));
}

#[test]
fn invalid_grids() {
    assert!(Grid1D::new(100, 1.0, 1.0).is_err());
    assert!(Grid1D::new(8, 1.0, 1.0).is_err());
    assert!(Grid1D::new(64, -1.0, 1.0).is_err());
    assert!(Grid1D::new(64, 1.0, 0.0).is_err());
}

#[test]
fn gaussian_moments() {
    for (sigma, p0) in [(0.5, 0.0), (1.0, 2.5), (2.0, -1.0)] {
        let wf = gaussian_packet(grid(), 1.0, sigma, p0).unwrap();
        assert!((wf.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((wf.mean_position() - 1.0).abs() < 1e-10);
        assert!((wf.std_position() - sigma).abs() < 1e-10);
        assert!((wf.mean_momentum() - p0).abs() < 1e-9);
        assert!((wf.std_momentum() - 0.5 / sigma).abs() < 1e-9);
    }
}

#[test]
fn packet_constraints() {
    assert!(matches!(gaussian_packet(grid(), 0.0, 0.02, 0.0), Err(Error::Resolution { .. })));
    assert!(matches!(gaussian_packet(grid(), 18.0, 1.0, 0.0), Err(Error::PacketAtBoundary { .. })));
}

#[test]
fn spectral_transform_is_unitary() {
    let wf = gaussian_packet(grid(), -2.0, 0.7, 1.3).unwrap();
    let phi = wf.spectral_transform();
    assert!((phi.norm_sqr() - 1.0).abs() < 1e-12);
    let back = phi.inverse();
    let diff = wf.amplitudes().iter().zip(back.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(diff < 1e-12);
}

#[test]
fn gaussian_spectrum_has_analytic_form() {
    // φ(p) = (2σ²/(πħ²))^¼ exp(−σ²(p−p₀)²/ħ²) e^{−i(p−p₀)c/ħ}
    let (c, sigma, p0) = (0.5, 1.2, 0.8);
    let wf = gaussian_packet(grid(), c, sigma, p0).unwrap();
    let phi = wf.spectral_transform();
    let norm = (2.0 * sigma * sigma / PI).powf(0.25);
    let mut worst: f64 = 0.0;
    for (j, z) in phi.amplitudes().iter().enumerate() {
        let p = phi.grid().momentum(j);
        let d = p - p0;
        let expected = C64::from_polar(norm * (-sigma * sigma * d * d).exp(), -p * c) * C64::from_polar(1.0, p0 * c);
        worst = worst.max((z - expected).norm());
    }
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn free_spreading_matches_closed_form() {
    let (sigma, mass, t) = (0.8, 2.0, 3.0);
    let g = Grid1D::new(4096, 80.0, 1.0).unwrap();
    let wf = gaussian_packet(g, 0.0, sigma, 1.0).unwrap();
    let moved = wf.free_propagate(mass, t).unwrap();
    let expected = sigma * (1.0 + (t / (2.0 * mass * sigma * sigma)).powi(2)).sqrt();
    assert!((moved.std_position() - expected).abs() < 1e-9);
    assert!((moved.mean_position() - t / mass).abs() < 1e-9);
    assert!((moved.std_momentum() - wf.std_momentum()).abs() < 1e-10);
    assert!((moved.norm_sqr() - 1.0).abs() < 1e-12);
}

#[test]
fn interval_selection_is_half_open() {
    let g = Grid1D::new(16, 16.0, 1.0).unwrap();
    assert_eq!(g.index_range(Interval::new(-2.0, 2.0)).unwrap(), 6..10);
    assert_eq!(g.index_range(Interval::new(-1.5, 1.5)).unwrap(), 6..9);
    assert_eq!(g.index_range(Interval::new(-1.4, 1.4)).unwrap(), 7..9);
    assert!(matches!(g.index_range(Interval::new(5.0, 9.0)), Err(Error::IntervalOutsideDomain { .. })));
}

#[test]
fn plane_wave_reduction() {
    let g = grid();
    let wf = plane_wave(g, 4.0 * g.momentum_spacing()).unwrap();
    let width = 256.0 * g.spacing();
    let (reduced, p) = wf.reduce(Interval::around(0.0, width)).unwrap();
    assert!((p - width / g.length()).abs() < 1e-12);
    assert!((reduced.norm_sqr() - 1.0).abs() < 1e-12);
    let n = width / g.spacing();
    let discrete = width * ((n * n - 1.0) / (12.0 * n * n)).sqrt();
    assert!((reduced.std_position() - discrete).abs() < 1e-10);
}

#[test]
fn reduction_of_empty_sector_fails() {
    let wf = gaussian_packet(grid(), -10.0, 0.5, 0.0).unwrap();
    let err = wf.reduce(Interval::new(10.0, 12.0)).unwrap_err();
    assert!(matches!(err, Error::EmptySector { .. }));
}

#[test]
fn packet_superposition_weights() {
    let amps: Vec<C64> = [0.6, 0.0, 0.8].iter().map(|&a| C64::new(a, 0.0)).collect();
    let sup = packet_superposition(grid(), 2.0, PacketAmplitudes::Explicit(amps.clone())).unwrap();
    assert!((sup.wavefn.norm_sqr() - 1.0).abs() < 1e-10);
    for (n, a) in amps.iter().enumerate() {
        let p = sup.wavefn.sector_probability(sup.train.bin(n)).unwrap();
        assert!((p - a.norm_sqr()).abs() < 1e-10);
        let overlap = sup.packet(n).unwrap().overlap(&sup.wavefn).unwrap();
        assert!((overlap - a).norm() < 1e-10);
    }
}

#[test]
fn packet_superposition_errors() {
    let g = grid();
    assert!(matches!(
        packet_superposition(g, 2.0, PacketAmplitudes::Explicit(vec![C64::new(0.5, 0.0)])),
        Err(Error::AmplitudeNorm(_))
    ));
    assert!(matches!(
        packet_superposition(g, 2.0, PacketAmplitudes::Uniform(21)),
        Err(Error::OverlappingPackets { .. })
    ));
    assert!(matches!(packet_superposition(g, 0.05, PacketAmplitudes::Uniform(4)), Err(Error::Resolution { .. })));
}

#[test]
fn from_amplitudes_rejects_zero() {
    let g = Grid1D::new(16, 1.0, 1.0).unwrap();
    let wf = GridWaveFn::from_amplitudes(g, vec![C64::new(0.0, 0.0); 16]).unwrap();
    assert!(matches!(wf.normalized(), Err(Error::ZeroNorm)));
}
