//! Noise, disturbance and the standard-deviation bound.
//!
//! A [`MeasurementModel`] names the pointer observables read off as the
//! position and momentum results, and the coupling between system and
//! apparatus. Noise is `ε(A) = ⟨(μ − A)²⟩^½` on the initial state and
//! disturbance is `η(A) = ⟨(A_final − A_initial)²⟩^½`. A pointer that is
//! another observable of the same pair (for instance `x₂` read as a value of
//! `x₁`) realizes an indirect measurement.

#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::{Grid1D, GridWaveFn};
use crate::two_body::{Observable, Quadrature, TwoBodyWaveFn};
use crate::{Error, Result};

/// Absolute bias tolerance for [`unbiased_check`].
pub const BIAS_TOL: f64 = 1e-8;

/// Relative slack below `ħ/2` that [`kennard_check`] still accepts.
pub const KENNARD_SLACK: f64 = 1e-3;

/// Relative margin below `ħ/2` before a product counts as an evasion.
pub const EVASION_MARGIN: f64 = 1e-6;

/// Largest boundary probability for which a grid state is accepted.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Relative margin below `2ħ` before a state is called entangled, so that
/// separable states sitting on the boundary are not flagged by rounding.
pub const ENTANGLEMENT_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pointer {
    /// The pointer is the target observable itself.
    Identity,
    Observable(Observable),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    /// Pointers are read off without any dynamics.
    None,
    /// A Gaussian filter of width `width` on the position observable
    /// `prepared` precedes the readout.
    PrepareThenMeasure { prepared: Observable, width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementModel {
    pointer_x: Option<Pointer>,
    pointer_p: Option<Pointer>,
    coupling: Coupling,
}

impl MeasurementModel {
    pub fn new(pointer_x: Option<Pointer>, pointer_p: Option<Pointer>, coupling: Coupling) -> Result<Self> {
        if let (Some(Pointer::Observable(mx)), Some(Pointer::Observable(mp))) = (pointer_x, pointer_p) {
            if mx.quadrature != Quadrature::Position || mp.quadrature != Quadrature::Momentum {
                return Err(Error::QuadratureMismatch);
            }
            if !commute(&mx, &mp) {
                return Err(Error::NonCommutingPointers);
            }
        }
        if let Coupling::PrepareThenMeasure { prepared, width } = coupling {
            if prepared.quadrature != Quadrature::Position {
                return Err(Error::QuadratureMismatch);
            }
            if !(width > 0.0) || !width.is_finite() {
                return Err(Error::param("width", "must be positive"));
            }
        }
        Ok(MeasurementModel { pointer_x, pointer_p, coupling })
    }

    /// Position pointer only, no coupling.
    pub fn position_pointer(pointer: Pointer) -> Self {
        MeasurementModel { pointer_x: Some(pointer), pointer_p: None, coupling: Coupling::None }
    }

    pub fn pointer_x(&self) -> Option<Pointer> {
        self.pointer_x
    }

    pub fn pointer_p(&self) -> Option<Pointer> {
        self.pointer_p
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    fn pointer_for(&self, quadrature: Quadrature) -> Result<Pointer> {
        match quadrature {
            Quadrature::Position => self.pointer_x.ok_or(Error::UndefinedPointer("position")),
            Quadrature::Momentum => self.pointer_p.ok_or(Error::UndefinedPointer("momentum")),
        }
    }
}

/// `[Σaⱼxⱼ, Σbⱼpⱼ] = iħ Σaⱼbⱼ`.
fn commute(x: &Observable, p: &Observable) -> bool {
    let c = x.coeffs[0] * p.coeffs[0] + x.coeffs[1] * p.coeffs[1];
    c.abs() <= 1e-12
}

/// `ε(target) = ⟨(μ − target)²⟩^½` for the pointer of the target's quadrature.
pub fn rms_noise(model: &MeasurementModel, state: &TwoBodyWaveFn, target: &Observable) -> Result<f64> {
    match model.pointer_for(target.quadrature)? {
        Pointer::Identity => Ok(0.0),
        Pointer::Observable(mu) => {
            let deviation = mu.minus(*target)?;
            Ok(state.second_moment(&deviation).sqrt())
        }
    }
}

/// `η(target) = ⟨(target_final − target_initial)²⟩^½`.
///
/// Without coupling nothing evolves and the result is exactly zero. A
/// Gaussian filter of width `w` on `O = Σcⱼxⱼ` leaves positions alone and
/// kicks a momentum target `Σtⱼpⱼ` by `(Σcⱼtⱼ)·k`, where `k` has the momentum
/// spread of a width-`w` Gaussian.
pub fn rms_disturbance(model: &MeasurementModel, state: &TwoBodyWaveFn, target: &Observable) -> Result<f64> {
    match model.coupling {
        Coupling::None => Ok(0.0),
        Coupling::PrepareThenMeasure { prepared, width } => {
            if target.quadrature == Quadrature::Position {
                return Ok(0.0);
            }
            let lever = prepared.coeffs[0] * target.coeffs[0] + prepared.coeffs[1] * target.coeffs[1];
            if lever == 0.0 {
                return Ok(0.0);
            }
            Ok(lever.abs() * filter_momentum_spread(width, state.grid_a().hbar())?)
        }
    }
}

/// Momentum standard deviation of a width-`w` Gaussian, computed on its own
/// grid of 1024 points spanning `64w`.
pub fn filter_momentum_spread(width: f64, hbar: f64) -> Result<f64> {
    let grid = Grid1D::new(1024, 64.0 * width, hbar)?;
    Ok(crate::grid::gaussian_packet(grid, 0.0, width, 0.0)?.std_momentum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasReport {
    pub unbiased: bool,
    pub max_bias: f64,
}

/// Checks `⟨μ_x − x_target⟩ = 0` (and the momentum analog when a momentum
/// pointer is designated) on every state.
pub fn unbiased_check(
    model: &MeasurementModel,
    states: &[TwoBodyWaveFn],
    x_target: &Observable,
    p_target: Option<&Observable>,
) -> Result<BiasReport> {
    if states.is_empty() {
        return Err(Error::param("states", "need at least one state"));
    }
    let resolve = |pointer: Pointer, target: &Observable| match pointer {
        Pointer::Identity => *target,
        Pointer::Observable(mu) => mu,
    };
    let mx = resolve(model.pointer_for(Quadrature::Position)?, x_target);
    let mp = match (model.pointer_p, p_target) {
        (Some(pointer), Some(target)) => Some((resolve(pointer, target), target)),
        (Some(_), None) => return Err(Error::param("p_target", "a momentum pointer needs a momentum target")),
        _ => None,
    };
    if let Some((mp, _)) = &mp {
        if !commute(&mx, mp) {
            return Err(Error::NonCommutingPointers);
        }
    }
    let mut max_bias: f64 = 0.0;
    for state in states {
        max_bias = max_bias.max(state.mean(&mx.minus(*x_target)?).abs());
        if let Some((mp, target)) = &mp {
            max_bias = max_bias.max(state.mean(&mp.minus(**target)?).abs());
        }
    }
    Ok(BiasReport { unbiased: max_bias <= BIAS_TOL, max_bias })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KennardReport {
    pub delta_x: f64,
    pub delta_p: f64,
    pub product: f64,
    pub pass: bool,
}

/// `Δx·Δp` against `ħ/2`; rejects states that reach the grid boundary.
pub fn kennard_check(wf: &GridWaveFn) -> Result<KennardReport> {
    let boundary = wf.boundary_mass();
    if !(boundary < BOUNDARY_TOL) {
        return Err(Error::BoundarySupport { mass: boundary });
    }
    let delta_x = wf.std_position();
    let delta_p = wf.std_momentum();
    let product = delta_x * delta_p;
    let bound = 0.5 * wf.grid().hbar();
    Ok(KennardReport { delta_x, delta_p, product, pass: product >= bound * (1.0 - KENNARD_SLACK) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EntanglementReport {
    pub sum: f64,
    pub entangled: bool,
}

/// `Δ²(x₁ − x₂) + Δ²(p₁ + p₂)` and whether it falls clearly below `2ħ`.
pub fn entanglement_criterion(state: &TwoBodyWaveFn) -> EntanglementReport {
    let sum = state.variance(&Observable::q()) + state.variance(&Observable::total_momentum());
    EntanglementReport { sum, entangled: sum < 2.0 * state.grid_a().hbar() * (1.0 - ENTANGLEMENT_MARGIN) }
}

/// `⟨(x₂ − c)²⟩^½`: the error of reading `q + c` as a value of `x₁`.
pub fn indirect_error_via_q(state: &TwoBodyWaveFn, c: f64) -> f64 {
    state.second_moment(&Observable::x2().shifted(-c)).sqrt()
}

/// `true` when `product` falls clearly below `ħ/2`.
pub fn is_evasion(product: f64, hbar: f64) -> bool {
    product < 0.5 * hbar * (1.0 - EVASION_MARGIN)
}

/// Raw rms quantities feeding a [`NoiseReport`]; `None` marks a quantity
/// that the scenario does not define.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NoiseValues {
    pub epsilon_x: Option<f64>,
    pub epsilon_p: Option<f64>,
    pub eta_x: Option<f64>,
    pub eta_p: Option<f64>,
    pub delta_x: Option<f64>,
    pub delta_p: Option<f64>,
}

/// Flat summary of noise, disturbance, spreads and their products.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoiseReport {
    pub epsilon_x: Option<f64>,
    pub epsilon_p: Option<f64>,
    pub eta_x: Option<f64>,
    pub eta_p: Option<f64>,
    pub delta_x: Option<f64>,
    pub delta_p: Option<f64>,
    pub product_ex_ep: Option<f64>,
    pub product_ex_etap: Option<f64>,
    pub product_ep_etax: Option<f64>,
    pub product_dx_dp: Option<f64>,
    pub evasion_ex_ep: bool,
    pub evasion_ex_etap: bool,
    pub evasion_ep_etax: bool,
    pub evasion_dx_dp: bool,
    pub sector_probability: f64,
}

impl NoiseReport {
    pub fn new(values: NoiseValues, hbar: f64, sector_probability: f64) -> Self {
        let mul = |a: Option<f64>, b: Option<f64>| Some(a? * b?);
        let flag = |p: Option<f64>| p.is_some_and(|p| is_evasion(p, hbar));
        let product_ex_ep = mul(values.epsilon_x, values.epsilon_p);
        let product_ex_etap = mul(values.epsilon_x, values.eta_p);
        let product_ep_etax = mul(values.epsilon_p, values.eta_x);
        let product_dx_dp = mul(values.delta_x, values.delta_p);
        NoiseReport {
            epsilon_x: values.epsilon_x,
            epsilon_p: values.epsilon_p,
            eta_x: values.eta_x,
            eta_p: values.eta_p,
            delta_x: values.delta_x,
            delta_p: values.delta_p,
            product_ex_ep,
            product_ex_etap,
            product_ep_etax,
            product_dx_dp,
            evasion_ex_ep: flag(product_ex_ep),
            evasion_ex_etap: flag(product_ex_etap),
            evasion_ep_etax: flag(product_ep_etax),
            evasion_dx_dp: flag(product_dx_dp),
            sector_probability,
        }
    }

    pub fn any_evasion(&self) -> bool {
        self.evasion_ex_ep || self.evasion_ex_etap || self.evasion_ep_etax || self.evasion_dx_dp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noncommuting_pointers_rejected() {
        let x = Pointer::Observable(Observable::x2());
        let p = Pointer::Observable(Observable::p2());
        assert_eq!(MeasurementModel::new(Some(x), Some(p), Coupling::None), Err(Error::NonCommutingPointers));
        let q = Pointer::Observable(Observable::q());
        let total = Pointer::Observable(Observable::total_momentum());
        assert!(MeasurementModel::new(Some(q), Some(total), Coupling::None).is_ok());
    }

    #[test]
    fn evasion_threshold_excludes_saturation() {
        assert!(!is_evasion(0.5, 1.0));
        assert!(!is_evasion(0.5 * (1.0 - 1e-7), 1.0));
        assert!(is_evasion(0.49, 1.0));
        assert!(is_evasion(0.0, 1.0));
    }

    #[test]
    fn filter_spread_is_hbar_over_two_width() {
        let w = 0.37;
        let spread = filter_momentum_spread(w, 1.0).unwrap();
        assert!((spread - 0.5 / w).abs() < 1e-10 * spread);
    }

    #[test]
    fn report_products_and_flags() {
        let values = NoiseValues {
            epsilon_x: Some(0.0),
            eta_p: Some(3.0),
            delta_x: Some(1.0),
            delta_p: Some(0.5),
            ..Default::default()
        };
        let r = NoiseReport::new(values, 1.0, 0.01);
        assert_eq!(r.product_ex_etap, Some(0.0));
        assert!(r.evasion_ex_etap);
        assert_eq!(r.product_ex_ep, None);
        assert!(!r.evasion_dx_dp);
        assert!(r.any_evasion());
    }
}
