//! The slit as a heavy second particle.
//!
//! Transversally the relative coordinate `q_y = y₁ − y₂` carries the
//! diffracted wave (propagated with the reduced mass) and `y₂` a narrow
//! Gaussian. Longitudinally `q_x = x₁ − x₂` is a plane wave of momentum `p`
//! in a box of size about `L` around the screen. The pointers `y₂ + c` and
//! `x₂ + L` read the particle's coordinates without touching it.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::diffraction::{simulate_screen, DiffractionConfig};
use super::ozawa::partner_factor;
use super::report::{ExperimentReport, Outcome, Profile};
use super::{finite, positive, Setup};
use crate::grid::{plane_wave, Grid1D, Interval};
use crate::measurement::{rms_disturbance, rms_noise, MeasurementModel, NoiseReport, NoiseValues, Pointer};
use crate::two_body::{Frame, Observable, TwoBodyWaveFn};
use crate::{Error, Result};

/// Smallest accepted `m₂/m₁`.
pub const MIN_MASS_RATIO: f64 = 1e3;

/// Relative tolerance on momentum conservation and on `|p̃|`.
pub const CONSERVATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SlitConfig {
    pub diffraction: DiffractionConfig,
    /// `m₂/m₁`.
    pub mass_ratio: f64,
    /// Constant `c` of the transverse pointer `y₂ + c`.
    pub offset: f64,
    /// Sector width `α`; defaults to the detector size.
    pub width: Option<f64>,
    /// Standard deviation of the slit's own position.
    pub slit_spread: f64,
}

impl Default for SlitConfig {
    fn default() -> Self {
        SlitConfig {
            diffraction: DiffractionConfig::default(),
            mass_ratio: 1e4,
            offset: 0.0,
            width: None,
            slit_spread: 0.1,
        }
    }
}

impl SlitConfig {
    pub fn validate(&self) -> Result<()> {
        self.diffraction.validate()?;
        positive("mass_ratio", self.mass_ratio)?;
        if self.mass_ratio < MIN_MASS_RATIO {
            return Err(Error::param("mass_ratio", alloc::format!("must be at least {MIN_MASS_RATIO}")));
        }
        finite("offset", self.offset)?;
        if let Some(w) = self.width {
            positive("width", w)?;
        }
        positive("slit_spread", self.slit_spread)
    }

    pub fn sector_width(&self) -> f64 {
        self.width.unwrap_or(self.diffraction.detector_size)
    }
}

/// Particle-1 momentum after elastic scattering into direction `dir`
/// (a unit vector), with total momentum `(p, 0)` kept and the relative
/// momentum magnitude `R = m₂p/M` unchanged.
///
/// With `s = m₁p/M`, `p₁ = s·x̂ + p̃` and `|p̃| = R`, so `p₁ = k·dir` where
/// `k = s·dₓ + √(s²dₓ² − s² + R²)`.
pub fn elastic_momentum(p: f64, mass_ratio: f64, dir: [f64; 2]) -> [f64; 2] {
    let total = 1.0 + mass_ratio;
    let s = p / total;
    let r = p * mass_ratio / total;
    let k = s * dir[0] + (s * s * dir[0] * dir[0] - s * s + r * r).sqrt();
    [k * dir[0], k * dir[1]]
}

struct Kinematics {
    total_drift: f64,
    relative_drift: f64,
}

/// Conservation residuals of the elastic map for particle-1 momentum `p1`.
fn kinematics(p: f64, mass_ratio: f64, p1: [f64; 2]) -> Kinematics {
    let total = 1.0 + mass_ratio;
    let p2 = [p - p1[0], -p1[1]];
    let sum = [p1[0] + p2[0], p1[1] + p2[1]];
    let rel = [(mass_ratio * p1[0] - p2[0]) / total, (mass_ratio * p1[1] - p2[1]) / total];
    let r0 = p * mass_ratio / total;
    Kinematics { total_drift: (sum[0] - p).hypot(sum[1]) / p, relative_drift: (rel[0].hypot(rel[1]) - r0).abs() / r0 }
}

pub fn run_slit_two_body(cfg: &SlitConfig, setup: &Setup) -> Result<Outcome> {
    cfg.validate()?;
    let hbar = setup.hbar;
    let d = &cfg.diffraction;
    d.validate_with(hbar)?;
    let alpha = cfg.sector_width();
    let (l, p, c) = (d.screen_distance, d.momentum, cfg.offset);
    let mut report = ExperimentReport::new("slit_two_body");
    report.input("momentum", p);
    report.input("slit_width", d.slit_width);
    report.input("screen_distance", l);
    report.input("detector_size", d.detector_size);
    report.input("mass", d.mass);
    report.input("mass_ratio", cfg.mass_ratio);
    report.input("offset", c);
    report.input("width", alpha);
    report.input("slit_spread", cfg.slit_spread);
    report.input("hbar", hbar);

    // Transverse pair (y₂, q_y).
    let reduced_mass = d.mass * cfg.mass_ratio / (1.0 + cfg.mass_ratio);
    let screen = simulate_screen(d, setup, reduced_mass)?.screen;
    let transverse =
        TwoBodyWaveFn::product(Frame::PartnerRelative, partner_factor(cfg.slit_spread, hbar)?, screen.clone())?;
    let y_model = MeasurementModel::position_pointer(Pointer::Observable(Observable::x2().shifted(c)));
    let eps_y = rms_noise(&y_model, &transverse, &Observable::x1())?;
    let eta_py = rms_disturbance(&y_model, &transverse, &Observable::p1())?;
    let spread = screen.std_position();
    let l_tilde = 12.0.sqrt() * spread;
    report.result("transverse_spread", spread);
    report.result("l_tilde", l_tilde);
    report.result("eq_2_30_epsilon_y1", eps_y);
    report.result("eq_2_31_eta_p1y", eta_py);
    report.note("l_tilde is the propagated transverse standard deviation times sqrt(12)");

    let sector = Interval::around(c, alpha);
    let (reduced_y, prob_y) = transverse.reduce_axis(1, sector, 0.0)?;
    let eps_y_cond = rms_noise(&y_model, &reduced_y, &Observable::x1())?;
    let product_y = eta_py * eps_y_cond;
    report.result("eq_2_34_sector_probability", prob_y);
    report.result("eq_2_34_expected_probability", (alpha / l_tilde).min(1.0));
    report.result("eq_2_34_probability_ratio", prob_y * l_tilde / alpha);
    report.result("eq_2_32_epsilon_y1", eps_y_cond);
    report.flag("eq_2_32_epsilon_below_width", eps_y_cond <= alpha);
    report.result("eq_2_31_product_y", product_y);
    report.noise_report(
        "transverse_conditioned",
        NoiseReport::new(
            NoiseValues { epsilon_x: Some(eps_y_cond), eta_p: Some(eta_py), ..Default::default() },
            hbar,
            prob_y,
        ),
    );
    report.record_evasion("eq_2_31_product_y", product_y, hbar, prob_y);

    // Longitudinal pair (x₂, q_x): the box length is rounded so that p lies
    // on the momentum lattice.
    let quanta = (p * l / (2.0 * core::f64::consts::PI * hbar)).round().max(1.0);
    let box_length = quanta * 2.0 * core::f64::consts::PI * hbar / p;
    let points = setup.grid.points_for(box_length, alpha)?;
    let grid_x = Grid1D::centered(points, box_length, hbar, l)?;
    if p >= 0.25 * points as f64 * grid_x.momentum_spacing() {
        return Err(Error::Resolution { width: alpha, required: 0.5 * hbar / p, samples: 8 });
    }
    let longitudinal =
        TwoBodyWaveFn::product(Frame::PartnerRelative, partner_factor(cfg.slit_spread, hbar)?, plane_wave(grid_x, p)?)?;
    let x_model = MeasurementModel::position_pointer(Pointer::Observable(Observable::x2().shifted(l)));
    let eps_x = rms_noise(&x_model, &longitudinal, &Observable::x1())?;
    let eta_px = rms_disturbance(&x_model, &longitudinal, &Observable::p1())?;
    let (reduced_x, prob_x) = longitudinal.reduce_axis(1, Interval::around(l, alpha), 0.0)?;
    let eps_x_cond = rms_noise(&x_model, &reduced_x, &Observable::x1())?;
    let product_x = eta_px * eps_x_cond;
    report.result("longitudinal_box_length", box_length);
    report.result("eq_2_30_epsilon_x1", eps_x);
    report.result("eq_2_31_eta_p1x", eta_px);
    report.result("longitudinal_sector_probability", prob_x);
    report.result("longitudinal_expected_probability", alpha / box_length);
    report.result("eq_2_32_epsilon_x1", eps_x_cond);
    report.result("eq_2_31_product_x", product_x);
    report.noise_report(
        "longitudinal_conditioned",
        NoiseReport::new(
            NoiseValues { epsilon_x: Some(eps_x_cond), eta_p: Some(eta_px), ..Default::default() },
            hbar,
            prob_x,
        ),
    );
    report.record_evasion("eq_2_31_product_x", product_x, hbar, prob_x);

    // Elastic kinematics toward the detector and for every propagating
    // transverse component.
    let y = d.detector_position;
    let r = l.hypot(y);
    let p1 = elastic_momentum(p, cfg.mass_ratio, [l / r, y / r]);
    let at_detector = kinematics(p, cfg.mass_ratio, p1);
    report.result("detector_p1x", p1[0]);
    report.result("detector_p1y", p1[1]);
    report.result("momentum_deficit", 1.0 - p1[0].hypot(p1[1]) / p);

    let radius = p * cfg.mass_ratio / (1.0 + cfg.mass_ratio);
    let spectrum = screen.spectral_transform();
    let weights = spectrum.probabilities();
    let mut total_drift = at_detector.total_drift;
    let mut relative_drift = at_detector.relative_drift;
    let mut evanescent = 0.0;
    let s = p / (1.0 + cfg.mass_ratio);
    for (j, w) in weights.iter().enumerate() {
        let py = spectrum.grid().momentum(j);
        if py.abs() >= radius {
            evanescent += w;
            continue;
        }
        let p1 = [s + (radius * radius - py * py).sqrt(), py];
        let k = kinematics(p, cfg.mass_ratio, p1);
        total_drift = total_drift.max(k.total_drift);
        relative_drift = relative_drift.max(k.relative_drift);
    }
    report.result("total_momentum_drift", total_drift);
    report.result("relative_momentum_drift", relative_drift);
    report.result("evanescent_weight", evanescent);
    report.flag("total_momentum_conserved", total_drift <= CONSERVATION_TOL);
    report.flag("relative_momentum_conserved", relative_drift <= CONSERVATION_TOL);

    let mut profiles = Vec::new();
    profiles.push(Profile { label: "q_y".into(), wavefn: screen });
    if let Some((_, q)) = reduced_y.factors() {
        profiles.push(Profile { label: "q_y_conditioned".into(), wavefn: q.clone() });
    }
    report.conclusion = Some(
        "zero products only on sectors of probability alpha/l_tilde and alpha/L, both vanishing as L grows".into(),
    );
    Ok(Outcome { report, profiles })
}
