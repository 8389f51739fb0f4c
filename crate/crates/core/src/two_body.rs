//! Two-particle wavefunctions on a pair of periodic grids.
//!
//! A state is stored in one of two coordinate frames. In
//! [`Frame::Particles`] the axes are `(x₁, x₂)`; in
//! [`Frame::PartnerRelative`] they are `(x₂, q)` with `q = x₁ − x₂`, whose
//! conjugate momenta are `(P, p₁)` with `P = p₁ + p₂`. Linear observables are
//! written on the physical particles and mapped to whichever frame the state
//! uses, so the same [`Observable`] can be evaluated on either.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand_core::RngCore;

use crate::fft::FftPlan;
use crate::grid::{cumulative, sample_index, Grid1D, GridWaveFn, Interval, NORM_TOL};
use crate::{unit_f64, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Axes `(x₁, x₂)`.
    Particles,
    /// Axes `(x₂, q = x₁ − x₂)`.
    PartnerRelative,
}

impl Frame {
    pub fn labels(self) -> (&'static str, &'static str) {
        match self {
            Frame::Particles => ("x1", "x2"),
            Frame::PartnerRelative => ("x2", "q"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    Position,
    Momentum,
}

/// `c₁·o₁ + c₂·o₂ + offset` where `o` is `x` or `p` of each particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observable {
    pub quadrature: Quadrature,
    pub coeffs: [f64; 2],
    pub offset: f64,
}

impl Observable {
    pub fn position(c1: f64, c2: f64) -> Self {
        Observable { quadrature: Quadrature::Position, coeffs: [c1, c2], offset: 0.0 }
    }

    pub fn momentum(c1: f64, c2: f64) -> Self {
        Observable { quadrature: Quadrature::Momentum, coeffs: [c1, c2], offset: 0.0 }
    }

    pub fn x1() -> Self {
        Self::position(1.0, 0.0)
    }

    pub fn x2() -> Self {
        Self::position(0.0, 1.0)
    }

    /// Relative coordinate `q = x₁ − x₂`.
    pub fn q() -> Self {
        Self::position(1.0, -1.0)
    }

    pub fn centre_of_mass(m1: f64, m2: f64) -> Self {
        let m = m1 + m2;
        Self::position(m1 / m, m2 / m)
    }

    pub fn p1() -> Self {
        Self::momentum(1.0, 0.0)
    }

    pub fn p2() -> Self {
        Self::momentum(0.0, 1.0)
    }

    /// `P = p₁ + p₂`.
    pub fn total_momentum() -> Self {
        Self::momentum(1.0, 1.0)
    }

    /// `p̃ = (m₂p₁ − m₁p₂)/(m₁ + m₂)`, conjugate to `x₁ − x₂`.
    pub fn relative_momentum(m1: f64, m2: f64) -> Self {
        let m = m1 + m2;
        Self::momentum(m2 / m, -m1 / m)
    }

    pub fn shifted(self, offset: f64) -> Self {
        Observable { offset: self.offset + offset, ..self }
    }

    /// `self − other`.
    pub fn minus(self, other: Observable) -> Result<Self> {
        if self.quadrature != other.quadrature {
            return Err(Error::QuadratureMismatch);
        }
        Ok(Observable {
            quadrature: self.quadrature,
            coeffs: [self.coeffs[0] - other.coeffs[0], self.coeffs[1] - other.coeffs[1]],
            offset: self.offset - other.offset,
        })
    }

    /// Coefficients on the frame's axis operators.
    pub fn axis_coeffs(&self, frame: Frame) -> [f64; 2] {
        let [c1, c2] = self.coeffs;
        match (frame, self.quadrature) {
            (Frame::Particles, _) => [c1, c2],
            (Frame::PartnerRelative, Quadrature::Position) => [c1 + c2, c1],
            (Frame::PartnerRelative, Quadrature::Momentum) => [c2, c1 - c2],
        }
    }

    /// Value at axis coordinates `(a, b)` of a position observable.
    pub fn evaluate(&self, frame: Frame, a: f64, b: f64) -> f64 {
        let [u, v] = self.axis_coeffs(frame);
        u * a + v * b + self.offset
    }
}

/// Means and covariance of the two axis operators of one quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisMoments {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

impl AxisMoments {
    fn of(&self, obs: &Observable, frame: Frame) -> (f64, f64) {
        let [u, v] = obs.axis_coeffs(frame);
        let mean = u * self.mean[0] + v * self.mean[1] + obs.offset;
        let var = u * u * self.cov[0][0] + v * v * self.cov[1][1] + 2.0 * u * v * self.cov[0][1];
        (mean, var.max(0.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// Row-major, index `i·n_b + j` for axis-a sample `i`, axis-b sample `j`.
    Dense(Vec<C64>),
    Product(GridWaveFn, GridWaveFn),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoBodyWaveFn {
    grid_a: Grid1D,
    grid_b: Grid1D,
    frame: Frame,
    repr: Repr,
}

impl TwoBodyWaveFn {
    /// Uncorrelated state `ψ_a ⊗ ψ_b`; both factors are normalized.
    pub fn product(frame: Frame, a: GridWaveFn, b: GridWaveFn) -> Result<Self> {
        let (a, b) = (a.normalized()?, b.normalized()?);
        Ok(TwoBodyWaveFn { grid_a: *a.grid(), grid_b: *b.grid(), frame, repr: Repr::Product(a, b) })
    }

    /// Samples `f(a, b)` on the grid pair and normalizes.
    pub fn from_fn(frame: Frame, grid_a: Grid1D, grid_b: Grid1D, f: impl Fn(f64, f64) -> C64) -> Result<Self> {
        let xs = grid_a.positions();
        let ys = grid_b.positions();
        let mut amps = Vec::with_capacity(xs.len() * ys.len());
        for &x in &xs {
            for &y in &ys {
                amps.push(f(x, y));
            }
        }
        Self::dense(frame, grid_a, grid_b, amps)
    }

    /// Dense row-major amplitudes; normalizes.
    pub fn dense(frame: Frame, grid_a: Grid1D, grid_b: Grid1D, amplitudes: Vec<C64>) -> Result<Self> {
        let expected = grid_a.points() * grid_b.points();
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: amplitudes.len() });
        }
        let state = TwoBodyWaveFn { grid_a, grid_b, frame, repr: Repr::Dense(amplitudes) };
        state.normalized()
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn grid_a(&self) -> &Grid1D {
        &self.grid_a
    }

    pub fn grid_b(&self) -> &Grid1D {
        &self.grid_b
    }

    pub fn is_product(&self) -> bool {
        matches!(self.repr, Repr::Product(..))
    }

    /// The factors of a product state.
    pub fn factors(&self) -> Option<(&GridWaveFn, &GridWaveFn)> {
        match &self.repr {
            Repr::Product(a, b) => Some((a, b)),
            Repr::Dense(_) => None,
        }
    }

    fn cell_area(&self) -> f64 {
        self.grid_a.spacing() * self.grid_b.spacing()
    }

    pub fn norm_sqr(&self) -> f64 {
        match &self.repr {
            Repr::Dense(amps) => amps.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell_area(),
            Repr::Product(a, b) => a.norm_sqr() * b.norm_sqr(),
        }
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    fn normalized(self) -> Result<Self> {
        match self.repr {
            Repr::Dense(amps) => {
                let norm =
                    (amps.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid_a.spacing() * self.grid_b.spacing())
                        .sqrt();
                if !(norm > 0.0) || !norm.is_finite() {
                    return Err(Error::ZeroNorm);
                }
                let amps = amps.into_iter().map(|z| z / norm).collect();
                Ok(TwoBodyWaveFn { repr: Repr::Dense(amps), ..self })
            }
            Repr::Product(a, b) => Self::product(self.frame, a, b),
        }
    }

    /// Dense row-major amplitudes, materializing a product if needed.
    pub fn to_dense_amplitudes(&self) -> Vec<C64> {
        match &self.repr {
            Repr::Dense(amps) => amps.clone(),
            Repr::Product(a, b) => {
                let mut out = Vec::with_capacity(a.amplitudes().len() * b.amplitudes().len());
                for x in a.amplitudes() {
                    for y in b.amplitudes() {
                        out.push(x * y);
                    }
                }
                out
            }
        }
    }

    fn to_dense(&self) -> Self {
        TwoBodyWaveFn { repr: Repr::Dense(self.to_dense_amplitudes()), ..self.clone() }
    }

    /// Axis means and covariance for `quadrature`.
    pub fn axis_moments(&self, quadrature: Quadrature) -> AxisMoments {
        match (&self.repr, quadrature) {
            (Repr::Product(a, b), Quadrature::Position) => product_moments(a.position_moments(), b.position_moments()),
            (Repr::Product(a, b), Quadrature::Momentum) => {
                let (a, b) = (a.spectral_transform(), b.spectral_transform());
                product_moments(a.moments(), b.moments())
            }
            (Repr::Dense(amps), Quadrature::Position) => {
                let probs: Vec<f64> = amps.iter().map(|z| z.norm_sqr()).collect();
                joint_moments(&probs, &self.grid_a.positions(), &self.grid_b.positions())
            }
            (Repr::Dense(amps), Quadrature::Momentum) => {
                let spectrum = fft2(amps, self.grid_a.points(), self.grid_b.points());
                let probs: Vec<f64> = spectrum.iter().map(|z| z.norm_sqr()).collect();
                joint_moments(&probs, &self.grid_a.momenta(), &self.grid_b.momenta())
            }
        }
    }

    pub fn mean(&self, obs: &Observable) -> f64 {
        self.axis_moments(obs.quadrature).of(obs, self.frame).0
    }

    pub fn variance(&self, obs: &Observable) -> f64 {
        self.axis_moments(obs.quadrature).of(obs, self.frame).1
    }

    /// `⟨O²⟩`.
    pub fn second_moment(&self, obs: &Observable) -> f64 {
        let (mean, var) = self.axis_moments(obs.quadrature).of(obs, self.frame);
        var + mean * mean
    }

    /// Probability that axis coordinate `axis` (0 or 1) lies in `interval`.
    pub fn axis_sector_probability(&self, axis: usize, interval: Interval) -> Result<f64> {
        match &self.repr {
            Repr::Product(a, b) => [a, b][axis].sector_probability(interval),
            Repr::Dense(_) => {
                let density = self.marginal_density(axis);
                let grid = [self.grid_a, self.grid_b][axis];
                let range = grid.index_range(interval)?;
                let total: f64 = density.iter().sum();
                Ok((density[range].iter().sum::<f64>() / total).clamp(0.0, 1.0))
            }
        }
    }

    /// Cell probabilities of one axis coordinate.
    pub fn marginal_density(&self, axis: usize) -> Vec<f64> {
        assert!(axis < 2, "two-body states have axes 0 and 1");
        match &self.repr {
            Repr::Product(a, b) => [a, b][axis].cell_probabilities(),
            Repr::Dense(amps) => {
                let (na, nb) = (self.grid_a.points(), self.grid_b.points());
                let total: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
                let mut out = vec![0.0; [na, nb][axis]];
                for i in 0..na {
                    for j in 0..nb {
                        out[[i, j][axis]] += amps[i * nb + j].norm_sqr() / total;
                    }
                }
                out
            }
        }
    }

    /// Projects axis coordinate `axis` onto `interval` and renormalizes.
    /// Returns the reduced state and the probability of the sector.
    pub fn reduce_axis(&self, axis: usize, interval: Interval, floor: f64) -> Result<(Self, f64)> {
        match &self.repr {
            Repr::Product(a, b) => {
                if axis == 0 {
                    let (a, p) = a.reduce_with_floor(interval, floor)?;
                    Ok((Self::product(self.frame, a, b.clone())?, p))
                } else {
                    let (b, p) = b.reduce_with_floor(interval, floor)?;
                    Ok((Self::product(self.frame, a.clone(), b)?, p))
                }
            }
            Repr::Dense(amps) => {
                let probability = self.axis_sector_probability(axis, interval)?;
                if probability < floor || probability == 0.0 {
                    return Err(Error::EmptySector { probability, floor });
                }
                let grid = [self.grid_a, self.grid_b][axis];
                let range = grid.index_range(interval)?;
                let nb = self.grid_b.points();
                let amps = amps
                    .iter()
                    .enumerate()
                    .map(|(k, z)| {
                        let idx = [k / nb, k % nb][axis];
                        if range.contains(&idx) {
                            *z
                        } else {
                            C64::new(0.0, 0.0)
                        }
                    })
                    .collect();
                let reduced = Self::dense(self.frame, self.grid_a, self.grid_b, amps)?;
                Ok((reduced, probability))
            }
        }
    }

    /// Applies the Gaussian Kraus operator `exp(−(O − r)²/(4w²))` for a
    /// position observable `O` and renormalizes. Returns the new state and
    /// the relative weight `‖Kψ‖²` of the reading.
    pub fn gaussian_filter(&self, obs: &Observable, width: f64, reading: f64) -> Result<(Self, f64)> {
        if obs.quadrature != Quadrature::Position {
            return Err(Error::QuadratureMismatch);
        }
        if !(width > 0.0) {
            return Err(Error::param("width", "must be positive"));
        }
        let [u, v] = obs.axis_coeffs(self.frame);
        let kraus = |value: f64| {
            let d = value - reading;
            (-d * d / (4.0 * width * width)).exp()
        };
        match &self.repr {
            Repr::Product(a, b) if u == 0.0 || v == 0.0 => {
                let axis = if v == 0.0 { 0 } else { 1 };
                let coeff = [u, v][axis];
                let factor = [a, b][axis];
                let k = |x: f64| kraus(coeff * x + obs.offset);
                let weight = factor
                    .cell_probabilities()
                    .iter()
                    .zip(factor.grid().positions())
                    .map(|(w, x)| w * k(x) * k(x))
                    .sum();
                let filtered = filter_factor(factor, k)?;
                let state = if axis == 0 {
                    Self::product(self.frame, filtered, b.clone())?
                } else {
                    Self::product(self.frame, a.clone(), filtered)?
                };
                Ok((state, weight))
            }
            _ => {
                let xs = self.grid_a.positions();
                let ys = self.grid_b.positions();
                let nb = ys.len();
                let amps = self
                    .to_dense_amplitudes()
                    .into_iter()
                    .enumerate()
                    .map(|(k, z)| z * kraus(u * xs[k / nb] + v * ys[k % nb] + obs.offset))
                    .collect::<Vec<_>>();
                let weight = amps.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell_area();
                Ok((Self::dense(self.frame, self.grid_a, self.grid_b, amps)?, weight))
            }
        }
    }

    /// Rewrites the state in the other frame. Both grids must have the same
    /// point count and spacing; the relative axis is periodic, so the state
    /// should not wrap.
    pub fn relabel(&self) -> Result<Self> {
        let (ga, gb) = (self.grid_a, self.grid_b);
        let n = ga.points();
        if gb.points() != n || (ga.spacing() - gb.spacing()).abs() > 1e-12 * ga.spacing() {
            return Err(Error::GridMismatch);
        }
        let dx = ga.spacing();
        let hbar = ga.hbar();
        let half = n / 2;
        let amps = self.to_dense_amplitudes();
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        match self.frame {
            Frame::Particles => {
                // (i1, i2) → (i2, k), x₁ − x₂ = (i1 − i2)·dx + (o₁ − o₂)
                let q_first = ga.position(0) - gb.position(0) - half as f64 * dx;
                let gq = Grid1D::centered(n, ga.length(), hbar, q_first - 0.5 * dx + 0.5 * ga.length())?;
                for i1 in 0..n {
                    for i2 in 0..n {
                        let k = (i1 + n + half - i2) % n;
                        out[i2 * n + k] = amps[i1 * n + i2];
                    }
                }
                Self::dense(Frame::PartnerRelative, gb, gq, out)
            }
            Frame::PartnerRelative => {
                // (i2, k) → (i1, i2), x₁ = x₂ + q
                let x1_first = ga.position(0) + gb.position(0) + half as f64 * dx;
                let g1 = Grid1D::centered(n, ga.length(), hbar, x1_first - 0.5 * dx + 0.5 * ga.length())?;
                for i2 in 0..n {
                    for k in 0..n {
                        let i1 = (i2 + k + n - half) % n;
                        out[i1 * n + i2] = amps[i2 * n + k];
                    }
                }
                Self::dense(Frame::Particles, g1, ga, out)
            }
        }
    }

    /// Draws `count` axis-coordinate pairs from the Born distribution.
    pub fn born_sample<R: RngCore + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<(f64, f64)> {
        match &self.repr {
            Repr::Product(a, b) => {
                let ca = cumulative(&a.cell_probabilities());
                let cb = cumulative(&b.cell_probabilities());
                (0..count)
                    .map(|_| {
                        let i = sample_index(&ca, unit_f64(rng));
                        let j = sample_index(&cb, unit_f64(rng));
                        (self.grid_a.position(i), self.grid_b.position(j))
                    })
                    .collect()
            }
            Repr::Dense(amps) => {
                let total: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
                let probs: Vec<f64> = amps.iter().map(|z| z.norm_sqr() / total).collect();
                let cdf = cumulative(&probs);
                let nb = self.grid_b.points();
                (0..count)
                    .map(|_| {
                        let k = sample_index(&cdf, unit_f64(rng));
                        (self.grid_a.position(k / nb), self.grid_b.position(k % nb))
                    })
                    .collect()
            }
        }
    }

    /// Materializes a product state as a dense one (mainly for testing the
    /// two code paths against each other).
    pub fn densified(&self) -> Self {
        self.to_dense()
    }
}

fn filter_factor(wf: &GridWaveFn, weight: impl Fn(f64) -> f64) -> Result<GridWaveFn> {
    let amplitudes = wf.amplitudes().iter().zip(wf.grid().positions()).map(|(z, x)| z * weight(x)).collect();
    GridWaveFn::from_amplitudes(*wf.grid(), amplitudes)?.normalized()
}

fn product_moments(a: (f64, f64), b: (f64, f64)) -> AxisMoments {
    AxisMoments { mean: [a.0, b.0], cov: [[a.1, 0.0], [0.0, b.1]] }
}

/// Moments of a joint distribution given unnormalized weights.
fn joint_moments(weights: &[f64], xs: &[f64], ys: &[f64]) -> AxisMoments {
    let nb = ys.len();
    let total: f64 = weights.iter().sum();
    let (mut mx, mut my) = (0.0, 0.0);
    for (k, w) in weights.iter().enumerate() {
        mx += w * xs[k / nb];
        my += w * ys[k % nb];
    }
    mx /= total;
    my /= total;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (k, w) in weights.iter().enumerate() {
        let dx = xs[k / nb] - mx;
        let dy = ys[k % nb] - my;
        sxx += w * dx * dx;
        syy += w * dy * dy;
        sxy += w * dx * dy;
    }
    AxisMoments { mean: [mx, my], cov: [[sxx / total, sxy / total], [sxy / total, syy / total]] }
}

/// Unscaled 2D forward DFT of a row-major `na × nb` array.
fn fft2(data: &[C64], na: usize, nb: usize) -> Vec<C64> {
    let mut out = data.to_vec();
    let row_plan = FftPlan::new(nb);
    for row in out.chunks_mut(nb) {
        row_plan.forward(row);
    }
    let col_plan = FftPlan::new(na);
    let mut column = vec![C64::new(0.0, 0.0); na];
    for j in 0..nb {
        for i in 0..na {
            column[i] = out[i * nb + j];
        }
        col_plan.forward(&mut column);
        for i in 0..na {
            out[i * nb + j] = column[i];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::gaussian_packet;

    #[test]
    fn partner_frame_coefficients() {
        // x₁ = x₂ + q
        assert_eq!(Observable::x1().axis_coeffs(Frame::PartnerRelative), [1.0, 1.0]);
        assert_eq!(Observable::q().axis_coeffs(Frame::PartnerRelative), [0.0, 1.0]);
        // p₁ is conjugate to q, P to x₂
        assert_eq!(Observable::p1().axis_coeffs(Frame::PartnerRelative), [0.0, 1.0]);
        assert_eq!(Observable::total_momentum().axis_coeffs(Frame::PartnerRelative), [1.0, 0.0]);
        assert_eq!(Observable::p2().axis_coeffs(Frame::PartnerRelative), [1.0, -1.0]);
    }

    #[test]
    fn minus_requires_same_quadrature() {
        assert!(Observable::x1().minus(Observable::p1()).is_err());
        let d = Observable::x2().shifted(2.0).minus(Observable::x1()).unwrap();
        assert_eq!(d.coeffs, [-1.0, 1.0]);
        assert_eq!(d.offset, 2.0);
    }

    #[test]
    fn dense_and_product_paths_agree() {
        let g = Grid1D::new(128, 24.0, 1.0).unwrap();
        let a = gaussian_packet(g, 1.0, 1.2, 0.4).unwrap();
        let b = gaussian_packet(g, -2.0, 0.8, -1.0).unwrap();
        let prod = TwoBodyWaveFn::product(Frame::Particles, a, b).unwrap();
        let dense = prod.densified();
        for obs in [Observable::q(), Observable::total_momentum(), Observable::relative_momentum(1.0, 3.0)] {
            assert!((prod.mean(&obs) - dense.mean(&obs)).abs() < 1e-10);
            assert!((prod.variance(&obs) - dense.variance(&obs)).abs() < 1e-10);
        }
    }
}
