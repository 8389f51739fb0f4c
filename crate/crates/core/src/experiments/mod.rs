//! Scenario runners.
//!
//! Each runner takes a validated configuration and a [`Setup`] (ħ, grid
//! options, random seed) and returns an [`Outcome`]: an [`ExperimentReport`]
//! with equation-keyed scalars, noise summaries and evasion records, plus any
//! density profiles worth dumping.

mod box_model;
mod diffraction;
mod ozawa;
mod preparation;
mod report;
mod slit;
mod spin;

pub use box_model::{run_box_model, BoxModelConfig};
pub use diffraction::{
    farfield_interval_probability, rescaled_product, ring_probability, run_diffraction, AngularProfile, Aperture,
    DiffractionConfig,
};
pub use ozawa::{run_ozawa_commuting, run_ozawa_position, Conditioning, OzawaCommutingConfig, OzawaPositionConfig};
pub use preparation::{run_preparation, PreparationConfig};
pub use report::{EvasionRecord, ExperimentReport, InputValue, Outcome, Profile};
pub use slit::{run_slit_two_body, SlitConfig};
pub use spin::run_spin_epr;

#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Samples per packet width that automatic refinement aims for.
pub const TARGET_SAMPLES_PER_WIDTH: f64 = 32.0;

/// Samples per packet width below which a run is rejected.
pub const MIN_SAMPLES_PER_WIDTH: f64 = 8.0;

/// Names of the registered scenarios, in listing order.
pub const SCENARIOS: [&str; 7] =
    ["diffraction", "ozawa_position", "ozawa_commuting", "box_model", "slit_two_body", "preparation", "spin_epr"];

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct GridOptions {
    /// Point count of the main grid (a power of two).
    pub points: usize,
    /// Raise `points` when a packet would get fewer than 32 samples.
    pub auto_refine: bool,
    /// Upper limit for refinement.
    pub max_points: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions { points: 4096, auto_refine: true, max_points: 1 << 20 }
    }
}

impl GridOptions {
    pub fn validate(&self) -> Result<()> {
        if self.points < 16 || !self.points.is_power_of_two() {
            return Err(Error::param("points", "must be a power of two of at least 16"));
        }
        if self.max_points < self.points || !self.max_points.is_power_of_two() {
            return Err(Error::param("max_points", "must be a power of two no smaller than points"));
        }
        Ok(())
    }

    /// Point count for a grid of `length` that must resolve features of
    /// `width`.
    pub fn points_for(&self, length: f64, width: f64) -> Result<usize> {
        let needed = |samples: f64| next_pow2((samples * length / width).ceil());
        let target = needed(TARGET_SAMPLES_PER_WIDTH);
        let minimum = needed(MIN_SAMPLES_PER_WIDTH);
        if target <= self.points {
            return Ok(self.points);
        }
        if self.auto_refine {
            if target <= self.max_points {
                return Ok(target);
            }
            if minimum <= self.max_points {
                return Ok(self.max_points);
            }
            return Err(Error::GridTooLarge { needed: minimum, limit: self.max_points });
        }
        if minimum <= self.points {
            Ok(self.points)
        } else {
            Err(Error::Resolution { width, required: MIN_SAMPLES_PER_WIDTH * length / self.points as f64, samples: 8 })
        }
    }
}

pub(crate) fn next_pow2(x: f64) -> usize {
    if !(x >= 1.0) {
        return 1;
    }
    if x >= (1u64 << 62) as f64 {
        return 1 << 62;
    }
    (x as usize).next_power_of_two()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct Setup {
    pub hbar: f64,
    pub grid: GridOptions,
    pub seed: u64,
}

impl Default for Setup {
    fn default() -> Self {
        Setup { hbar: 1.0, grid: GridOptions::default(), seed: 0 }
    }
}

impl Setup {
    pub fn validate(&self) -> Result<()> {
        positive("hbar", self.hbar)?;
        self.grid.validate()
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// A scenario with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioParams {
    Diffraction(DiffractionConfig),
    OzawaPosition(OzawaPositionConfig),
    OzawaCommuting(OzawaCommutingConfig),
    BoxModel(BoxModelConfig),
    SlitTwoBody(SlitConfig),
    Preparation(PreparationConfig),
    SpinEpr,
}

impl ScenarioParams {
    /// Default parameters for a registered scenario name.
    pub fn defaults(name: &str) -> Option<Self> {
        Some(match name {
            "diffraction" => ScenarioParams::Diffraction(Default::default()),
            "ozawa_position" => ScenarioParams::OzawaPosition(Default::default()),
            "ozawa_commuting" => ScenarioParams::OzawaCommuting(Default::default()),
            "box_model" => ScenarioParams::BoxModel(Default::default()),
            "slit_two_body" => ScenarioParams::SlitTwoBody(Default::default()),
            "preparation" => ScenarioParams::Preparation(Default::default()),
            "spin_epr" => ScenarioParams::SpinEpr,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioParams::Diffraction(_) => "diffraction",
            ScenarioParams::OzawaPosition(_) => "ozawa_position",
            ScenarioParams::OzawaCommuting(_) => "ozawa_commuting",
            ScenarioParams::BoxModel(_) => "box_model",
            ScenarioParams::SlitTwoBody(_) => "slit_two_body",
            ScenarioParams::Preparation(_) => "preparation",
            ScenarioParams::SpinEpr => "spin_epr",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ScenarioParams::Diffraction(c) => c.validate(),
            ScenarioParams::OzawaPosition(c) => c.validate(),
            ScenarioParams::OzawaCommuting(c) => c.validate(),
            ScenarioParams::BoxModel(c) => c.validate(),
            ScenarioParams::SlitTwoBody(c) => c.validate(),
            ScenarioParams::Preparation(c) => c.validate(),
            ScenarioParams::SpinEpr => Ok(()),
        }
    }

    pub fn run(&self, setup: &Setup) -> Result<Outcome> {
        setup.validate()?;
        let outcome = match self {
            ScenarioParams::Diffraction(c) => run_diffraction(c, setup),
            ScenarioParams::OzawaPosition(c) => run_ozawa_position(c, setup),
            ScenarioParams::OzawaCommuting(c) => run_ozawa_commuting(c, setup),
            ScenarioParams::BoxModel(c) => run_box_model(c, setup),
            ScenarioParams::SlitTwoBody(c) => run_slit_two_body(c, setup),
            ScenarioParams::Preparation(c) => run_preparation(c, setup),
            ScenarioParams::SpinEpr => run_spin_epr(setup),
        }?;
        outcome.report.validate()?;
        Ok(outcome)
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, alloc::format!("must be positive, got {value}")))
    }
}

pub(crate) fn finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, "must be finite"))
    }
}

/// Composite Simpson rule with `intervals` (rounded up to even) panels.
pub(crate) fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals.max(2).next_multiple_of(2);
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for k in 1..n {
        let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += weight * f(a + k as f64 * h);
    }
    sum * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refinement_rules() {
        let opts = GridOptions::default();
        assert_eq!(opts.points_for(10.0, 1.0).unwrap(), 4096);
        assert_eq!(opts.points_for(1000.0, 0.5).unwrap(), 1 << 16);
        assert_eq!(opts.points_for(2e4, 0.5).unwrap(), 1 << 20);
        assert!(matches!(opts.points_for(1e8, 0.5), Err(Error::GridTooLarge { .. })));
        let fixed = GridOptions { auto_refine: false, ..opts };
        assert_eq!(fixed.points_for(1000.0, 2.0).unwrap(), 4096);
        assert!(matches!(fixed.points_for(1000.0, 0.5), Err(Error::Resolution { .. })));
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 2);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn every_name_has_defaults() {
        for name in SCENARIOS {
            let params = ScenarioParams::defaults(name).unwrap();
            assert_eq!(params.name(), name);
            params.validate().unwrap();
        }
        assert!(ScenarioParams::defaults("nope").is_none());
    }
}
