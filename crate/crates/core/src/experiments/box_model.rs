//! The commuting-pointer setup inside a periodic box of size `L`, where the
//! momentum lattice spacing `2πħ/L` is the natural momentum resolution.

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::ozawa::{check_offset, commuting_pointers, packet_count, partner_factor};
use super::report::{ExperimentReport, Outcome, Profile};
use super::{positive, Setup};
use crate::grid::{packet_superposition, Grid1D, PacketAmplitudes};
use crate::measurement::{rms_noise, NoiseReport, NoiseValues};
use crate::two_body::{Frame, Observable, TwoBodyWaveFn};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct BoxModelConfig {
    /// Box size `L`; the `x₂` grid is exactly this long.
    pub length: f64,
    pub width: f64,
    pub offset: f64,
    pub partner_width: f64,
}

impl Default for BoxModelConfig {
    fn default() -> Self {
        BoxModelConfig { length: 400.0, width: 2.0, offset: 0.0, partner_width: 0.1 }
    }
}

impl BoxModelConfig {
    pub fn validate(&self) -> Result<()> {
        positive("length", self.length)?;
        positive("width", self.width)?;
        positive("partner_width", self.partner_width)?;
        check_offset(self.offset, self.length)?;
        packet_count("width", self.length, self.width).map(|_| ())
    }
}

pub fn run_box_model(cfg: &BoxModelConfig, setup: &Setup) -> Result<Outcome> {
    cfg.validate()?;
    let hbar = setup.hbar;
    let (l, alpha, c) = (cfg.length, cfg.width, cfg.offset);
    let count = packet_count("width", l, alpha)?;
    let mut report = ExperimentReport::new("box_model");
    report.input("length", l);
    report.input("width", alpha);
    report.input("offset", c);
    report.input("partner_width", cfg.partner_width);
    report.input("hbar", hbar);

    let points = setup.grid.points_for(l, alpha)?;
    let grid = Grid1D::new(points, l, hbar)?;
    let train = packet_superposition(grid, alpha, PacketAmplitudes::Uniform(count))?;
    let partner = partner_factor(cfg.partner_width, hbar)?;
    let state = TwoBodyWaveFn::product(Frame::PartnerRelative, train.wavefn.clone(), partner)?;

    let lattice = grid.momentum_spacing();
    let expected_lattice = 2.0 * PI * hbar / l;
    report.result("grid_points", points as f64);
    report.result("momentum_lattice_spacing", lattice);
    report.result("momentum_lattice_relative_error", (lattice - expected_lattice).abs() / expected_lattice);

    let model = commuting_pointers(c)?;
    let x1 = Observable::x1();
    let epsilon = rms_noise(&model, &state, &x1)?;
    let product = epsilon * lattice;
    report.result("eq_2_23_epsilon_total_momentum", lattice);
    report.result("eq_2_24_epsilon_x1", epsilon);
    report.result("eq_2_24_uniform_epsilon_x1", l / 12.0.sqrt());
    report.flag("eq_2_24_epsilon_order_length", (0.1 * l..=l).contains(&epsilon));
    report.result("eq_2_25_product", product);
    report.flag("eq_2_25_product_in_band", (0.5 * PI * hbar..=4.0 * PI * hbar).contains(&product));
    report.noise_report(
        "unconditioned",
        NoiseReport::new(
            NoiseValues { epsilon_x: Some(epsilon), epsilon_p: Some(lattice), ..Default::default() },
            hbar,
            1.0,
        ),
    );
    report.record_evasion("eq_2_25_product", product, hbar, 1.0);

    let n = train.train.bin_containing(c).ok_or(Error::param("offset", "c lies outside the packet train"))?;
    let (reduced, probability) = state.reduce_axis(0, train.train.bin(n), 0.0)?;
    let eps_cond = rms_noise(&model, &reduced, &x1)?;
    let cond_product = eps_cond * lattice;
    report.result("eq_2_26_sector_probability", probability);
    report.result("eq_2_26_expected_probability", alpha / l);
    report.result("eq_2_26_epsilon_x1", eps_cond);
    report.flag("eq_2_26_epsilon_below_width", eps_cond <= alpha);
    report.result("eq_2_27_product", cond_product);
    report.result("eq_2_27_product_bound", alpha * lattice);
    report.result("eq_2_27_expected_bound", 2.0 * alpha * PI * hbar / l);
    report.noise_report(
        "conditioned",
        NoiseReport::new(
            NoiseValues { epsilon_x: Some(eps_cond), epsilon_p: Some(lattice), ..Default::default() },
            hbar,
            probability,
        ),
    );
    report.record_evasion("eq_2_27_product", cond_product, hbar, probability);

    let mut profiles = alloc::vec![Profile { label: "x2".into(), wavefn: train.wavefn.clone() }];
    if let Some((x2, _)) = reduced.factors() {
        profiles.push(Profile { label: "x2_conditioned".into(), wavefn: x2.clone() });
    }
    report.conclusion =
        Some("product of order 2 pi hbar unconditioned; 2 alpha pi hbar / L only with probability alpha/L".into());
    Ok(Outcome { report, profiles })
}
