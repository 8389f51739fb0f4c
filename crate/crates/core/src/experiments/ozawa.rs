//! Indirect measurements through a partner particle.
//!
//! Both runners use the `(x₂, q = x₁ − x₂)` frame. In the first, `q` is an
//! equal-weight train of packets over `[−L, L]` and `x₂` is read as `x₁`;
//! nothing acts on particle 1, so `η(p₁) = 0`. In the second the packets sit
//! in `x₂` and `q + c` is read as `x₁`, while `P` is its own pointer.
//!
//! Unconditioned products pair the rms error with the resolution `2πħ/ℓ` of
//! a box of size `ℓ` matching the packet span; conditioned products keep the
//! literal zero factor and carry the sector probability.

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::report::{ExperimentReport, Outcome, Profile};
use super::{positive, Setup};
use crate::grid::{gaussian_packet, packet_superposition, Grid1D, GridWaveFn, PacketAmplitudes, PacketSuperposition};
use crate::measurement::{
    rms_disturbance, rms_noise, unbiased_check, Coupling, MeasurementModel, NoiseReport, NoiseValues, Pointer,
};
use crate::two_body::{Frame, Observable, TwoBodyWaveFn};
use crate::{Error, Result};

/// Which part of the state the report conditions on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Conditioning {
    /// Whole state only.
    None,
    /// Whole state plus the packet around the favourable value.
    #[default]
    FavorableSector,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct OzawaPositionConfig {
    /// Half-span `L` of the packet train in `q`.
    pub length: f64,
    /// Packet width `α`.
    pub width: f64,
    /// Standard deviation of the Gaussian `x₂` factor.
    pub partner_width: f64,
    pub conditioning: Conditioning,
    /// Born-rule draws used to cross-check the sector probability (0 skips).
    pub monte_carlo_samples: usize,
}

impl Default for OzawaPositionConfig {
    fn default() -> Self {
        OzawaPositionConfig {
            length: 100.0,
            width: 0.5,
            partner_width: 0.1,
            conditioning: Conditioning::FavorableSector,
            monte_carlo_samples: 100_000,
        }
    }
}

impl OzawaPositionConfig {
    pub fn validate(&self) -> Result<()> {
        positive("length", self.length)?;
        positive("width", self.width)?;
        positive("partner_width", self.partner_width)?;
        packet_count("width", 2.0 * self.length, self.width).map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct OzawaCommutingConfig {
    /// Span `L` of the packet train in `x₂`, centred on 0.
    pub length: f64,
    pub width: f64,
    /// Constant `c` added to the `q` pointer.
    pub offset: f64,
    /// Standard deviation of the Gaussian `q` factor.
    pub partner_width: f64,
}

impl Default for OzawaCommutingConfig {
    fn default() -> Self {
        OzawaCommutingConfig { length: 100.0, width: 0.5, offset: 0.0, partner_width: 0.1 }
    }
}

impl OzawaCommutingConfig {
    pub fn validate(&self) -> Result<()> {
        positive("length", self.length)?;
        positive("width", self.width)?;
        positive("partner_width", self.partner_width)?;
        check_offset(self.offset, self.length)?;
        packet_count("width", self.length, self.width).map(|_| ())
    }
}

/// Number of width-`α` packets filling `span`, which must be an integer of
/// at least 2.
pub(super) fn packet_count(name: &'static str, span: f64, width: f64) -> Result<usize> {
    let n = span / width;
    let rounded = n.round();
    if (n - rounded).abs() > 1e-9 * n.max(1.0) || rounded < 2.0 {
        return Err(Error::param(name, alloc::format!("span {span} must hold an integer number (>= 2) of packets")));
    }
    Ok(rounded as usize)
}

pub(super) fn check_offset(c: f64, length: f64) -> Result<()> {
    if !c.is_finite() || c.abs() > 0.5 * length {
        return Err(Error::param("offset", alloc::format!("{c} lies outside the box [-{0}, {0}]", 0.5 * length)));
    }
    Ok(())
}

/// Narrow Gaussian on its own 256-point grid spanning 24 widths.
pub(super) fn partner_factor(width: f64, hbar: f64) -> Result<GridWaveFn> {
    gaussian_packet(Grid1D::new(256, 24.0 * width, hbar)?, 0.0, width, 0.0)
}

/// Uniform train of `count` packets centred on 0 on a grid of `length`.
pub(super) fn uniform_train(setup: &Setup, length: f64, width: f64, count: usize) -> Result<PacketSuperposition> {
    let points = setup.grid.points_for(length, width)?;
    let grid = Grid1D::new(points, length, setup.hbar)?;
    packet_superposition(grid, width, PacketAmplitudes::Uniform(count))
}

pub fn run_ozawa_position(cfg: &OzawaPositionConfig, setup: &Setup) -> Result<Outcome> {
    cfg.validate()?;
    let hbar = setup.hbar;
    let (l, alpha) = (cfg.length, cfg.width);
    let count = packet_count("width", 2.0 * l, alpha)?;
    let mut report = ExperimentReport::new("ozawa_position");
    report.input("length", l);
    report.input("width", alpha);
    report.input("partner_width", cfg.partner_width);
    report.input(
        "conditioning",
        match cfg.conditioning {
            Conditioning::None => "none",
            Conditioning::FavorableSector => "favorable_sector",
        },
    );
    report.input("hbar", hbar);

    let train = uniform_train(setup, 2.5 * l, alpha, count)?;
    let partner = partner_factor(cfg.partner_width, hbar)?;
    let state = TwoBodyWaveFn::product(Frame::PartnerRelative, partner, train.wavefn.clone())?;
    report.result("packet_count", count as f64);
    report.result("grid_points", train.wavefn.grid().points() as f64);

    let model = MeasurementModel::position_pointer(Pointer::Observable(Observable::x2()));
    let x1 = Observable::x1();
    let eta = rms_disturbance(&model, &state, &Observable::p1())?;
    let epsilon = rms_noise(&model, &state, &x1)?;
    let box_resolution = 2.0 * PI * hbar / (2.0 * l);
    report.result("eq_2_12_eta_p1", eta);
    report.result("eq_2_14_epsilon_x1", epsilon);
    report.result("eq_2_14_expected_epsilon_x1", l / 3.0.sqrt());
    report.result("box_momentum_resolution", box_resolution);
    report.result("unconditioned_box_product", epsilon * box_resolution);
    report.result("unbiased_max_bias", unbiased_check(&model, core::slice::from_ref(&state), &x1, None)?.max_bias);
    report.noise_report(
        "unconditioned",
        NoiseReport::new(
            NoiseValues { epsilon_x: Some(epsilon), epsilon_p: Some(box_resolution), ..Default::default() },
            hbar,
            1.0,
        ),
    );
    report.record_evasion("unconditioned_box_product", epsilon * box_resolution, hbar, 1.0);

    let mut profiles = alloc::vec![Profile { label: "q".into(), wavefn: train.wavefn.clone() }];
    if cfg.conditioning == Conditioning::FavorableSector {
        let n = train.train.bin_containing(0.0).ok_or(Error::param("length", "q = 0 lies outside the train"))?;
        let bin = train.train.bin(n);
        let (reduced, probability) = state.reduce_axis(1, bin, 0.0)?;
        let eps_cond = rms_noise(&model, &reduced, &x1)?;
        let product = eps_cond * eta;
        report.result("eq_2_16_sector_probability", probability);
        report.result("eq_2_16_expected_probability", alpha / (2.0 * l));
        report.result("eq_2_13_epsilon_x1", eps_cond);
        report.result("eq_2_13_product", product);
        report.flag("eq_2_13_epsilon_below_width", eps_cond < alpha);
        report.noise_report(
            "conditioned",
            NoiseReport::new(
                NoiseValues { epsilon_x: Some(eps_cond), eta_p: Some(eta), ..Default::default() },
                hbar,
                probability,
            ),
        );
        report.record_evasion("eq_2_13_product", product, hbar, probability);

        if cfg.monte_carlo_samples > 0 {
            let samples = state.born_sample(&mut setup.rng(), cfg.monte_carlo_samples);
            let hits = samples.iter().filter(|(_, q)| bin.contains(*q)).count();
            let draws = cfg.monte_carlo_samples as f64;
            let estimate = hits as f64 / draws;
            let stderr = (probability * (1.0 - probability) / draws).sqrt();
            report.result("mc_sector_probability", estimate);
            report.result("mc_standard_error", stderr);
            report.result("mc_z_score", (estimate - probability) / stderr);
        }
        if let Some((_, q)) = reduced.factors() {
            profiles.push(Profile { label: "q_conditioned".into(), wavefn: q.clone() });
        }
    }

    report.conclusion = Some(
        match cfg.conditioning {
            Conditioning::FavorableSector => "clear evasion only in a sector of probability alpha/(2L)",
            Conditioning::None => "no evasion without conditioning",
        }
        .into(),
    );
    Ok(Outcome { report, profiles })
}

pub fn run_ozawa_commuting(cfg: &OzawaCommutingConfig, setup: &Setup) -> Result<Outcome> {
    cfg.validate()?;
    let hbar = setup.hbar;
    let (l, alpha, c) = (cfg.length, cfg.width, cfg.offset);
    let count = packet_count("width", l, alpha)?;
    let mut report = ExperimentReport::new("ozawa_commuting");
    report.input("length", l);
    report.input("width", alpha);
    report.input("offset", c);
    report.input("partner_width", cfg.partner_width);
    report.input("hbar", hbar);

    let train = uniform_train(setup, 1.25 * l, alpha, count)?;
    let partner = partner_factor(cfg.partner_width, hbar)?;
    let state = TwoBodyWaveFn::product(Frame::PartnerRelative, train.wavefn.clone(), partner)?;
    report.result("packet_count", count as f64);
    report.result("grid_points", train.wavefn.grid().points() as f64);

    let commuting = commuting_pointers(c)?;
    let alternative = MeasurementModel::new(
        Some(Pointer::Observable(Observable::q().shifted(c))),
        Some(Pointer::Observable(Observable::total_momentum())),
        Coupling::None,
    )?;
    let x1 = Observable::x1();
    let total = Observable::total_momentum();
    let epsilon = rms_noise(&commuting, &state, &x1)?;
    let epsilon_total = rms_noise(&commuting, &state, &total)?;
    let box_resolution = 2.0 * PI * hbar / l;
    report.result("eq_2_17_epsilon_total_momentum", epsilon_total);
    report.result("eq_2_18_epsilon_x1", epsilon);
    report.result("box_momentum_resolution", box_resolution);
    report.result("unconditioned_box_product", epsilon * box_resolution);
    report.noise_report(
        "unconditioned",
        NoiseReport::new(
            NoiseValues { epsilon_x: Some(epsilon), epsilon_p: Some(box_resolution), ..Default::default() },
            hbar,
            1.0,
        ),
    );
    report.record_evasion("unconditioned_box_product", epsilon * box_resolution, hbar, 1.0);

    let eps_p1 = rms_noise(&alternative, &state, &Observable::p1())?;
    report.result("alternative_epsilon_p1", eps_p1);
    report.result("alternative_product", epsilon * eps_p1);
    report.record_evasion("alternative_product", epsilon * eps_p1, hbar, 1.0);

    let n = train.train.bin_containing(c).ok_or(Error::param("offset", "c lies outside the packet train"))?;
    let bin = train.train.bin(n);
    let (reduced, probability) = state.reduce_axis(0, bin, 0.0)?;
    let eps_cond = rms_noise(&commuting, &reduced, &x1)?;
    let product = eps_cond * rms_noise(&commuting, &reduced, &total)?;
    let eps_p1_cond = rms_noise(&alternative, &reduced, &Observable::p1())?;
    report.result("eq_2_19_sector_probability", probability);
    report.result("eq_2_19_expected_probability", alpha / l);
    report.result("eq_2_19_epsilon_x1", eps_cond);
    report.result("eq_2_17_product", product);
    report.flag("eq_2_19_epsilon_below_width", eps_cond < alpha);
    report.result("alternative_conditioned_product", eps_cond * eps_p1_cond);
    report.noise_report(
        "conditioned",
        NoiseReport::new(
            NoiseValues { epsilon_x: Some(eps_cond), epsilon_p: Some(0.0), ..Default::default() },
            hbar,
            probability,
        ),
    );
    report.record_evasion("eq_2_17_product", product, hbar, probability);
    report.record_evasion("alternative_conditioned_product", eps_cond * eps_p1_cond, hbar, probability);

    let mut profiles = alloc::vec![Profile { label: "x2".into(), wavefn: train.wavefn.clone() }];
    if let Some((x2, _)) = reduced.factors() {
        profiles.push(Profile { label: "x2_conditioned".into(), wavefn: x2.clone() });
    }
    report.conclusion = Some("clear evasion only in a sector of probability alpha/L; none through p1".into());
    Ok(Outcome { report, profiles })
}

/// `q + c` read as `x₁`, `P` read as itself.
pub(super) fn commuting_pointers(c: f64) -> Result<MeasurementModel> {
    MeasurementModel::new(
        Some(Pointer::Observable(Observable::q().shifted(c))),
        Some(Pointer::Identity),
        Coupling::None,
    )
}
