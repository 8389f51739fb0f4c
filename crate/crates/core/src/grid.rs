//! Periodic one-dimensional grids and wavefunctions sampled on them.
//!
//! Samples sit at cell centres: sample `j` of a grid with `n` points over
//! `[x₀, x₀ + L)` lies at `x₀ + (j + ½)·dx`. A half-open interval `[lo, hi)`
//! selects the samples whose positions it contains, so intervals whose ends
//! fall on cell edges select whole cells.
//!
//! Momentum amplitudes live on the lattice `p = 2πħk/L`, `k ∈ [−n/2, n/2)`,
//! stored in FFT order. They are scaled so that `Σ|φ_k|²·dp = Σ|ψ_j|²·dx`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;
use rand_core::RngCore;

use crate::fft::FftPlan;
use crate::{unit_f64, Error, Result, C64};

/// Smallest sector probability that [`GridWaveFn::reduce`] accepts.
pub const DEFAULT_REDUCTION_FLOOR: f64 = 1e-12;

/// Tolerance on the normalization of wavefunctions and amplitude lists.
pub const NORM_TOL: f64 = 1e-10;

/// Relative slack used when deciding whether a point lies on a cell edge.
const EDGE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    points: usize,
    length: f64,
    hbar: f64,
    center: f64,
}

impl Grid1D {
    /// Grid over `[−L/2, L/2)`.
    pub fn new(points: usize, length: f64, hbar: f64) -> Result<Self> {
        Self::centered(points, length, hbar, 0.0)
    }

    /// Grid over `[center − L/2, center + L/2)`.
    pub fn centered(points: usize, length: f64, hbar: f64, center: f64) -> Result<Self> {
        if points < 16 || !points.is_power_of_two() || !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidGrid { points, length });
        }
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::param("hbar", "must be positive and finite"));
        }
        if !center.is_finite() {
            return Err(Error::param("center", "must be finite"));
        }
        Ok(Grid1D { points, length, hbar, center })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    /// Left edge of the domain.
    pub fn origin(&self) -> f64 {
        self.center - 0.5 * self.length
    }

    /// Right edge of the domain (exclusive).
    pub fn end(&self) -> f64 {
        self.center + 0.5 * self.length
    }

    pub fn domain(&self) -> Interval {
        Interval { lo: self.origin(), hi: self.end() }
    }

    pub fn position(&self, j: usize) -> f64 {
        self.origin() + (j as f64 + 0.5) * self.spacing()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.position(j)).collect()
    }

    /// Lattice spacing `2πħ/L` of the conjugate momentum.
    pub fn momentum_spacing(&self) -> f64 {
        2.0 * PI * self.hbar / self.length
    }

    /// Signed lattice index of FFT slot `j`.
    pub fn wavenumber(&self, j: usize) -> i64 {
        let n = self.points as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Momentum of FFT slot `j`.
    pub fn momentum(&self, j: usize) -> f64 {
        self.wavenumber(j) as f64 * self.momentum_spacing()
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.momentum(j)).collect()
    }

    /// FFT slot of lattice momentum `p`, or an error if `p` is off the lattice
    /// or outside the representable range.
    pub fn lattice_index(&self, p: f64) -> Result<usize> {
        let k = p / self.momentum_spacing();
        let rounded = k.round();
        let half = (self.points / 2) as f64;
        if !k.is_finite() || (k - rounded).abs() > EDGE_EPS * (1.0 + rounded.abs()) {
            return Err(Error::OffLattice(p));
        }
        if rounded < -half || rounded >= half {
            return Err(Error::OffLattice(p));
        }
        let n = self.points as i64;
        Ok((rounded as i64).rem_euclid(n) as usize)
    }

    /// Sample index range `start..end` selected by `interval`.
    pub fn index_range(&self, interval: Interval) -> Result<core::ops::Range<usize>> {
        let Interval { lo, hi } = interval;
        let slack = EDGE_EPS * self.length;
        if !(lo < hi) || lo < self.origin() - slack || hi > self.end() + slack {
            return Err(Error::IntervalOutsideDomain { lo, hi });
        }
        let first = |x: f64| {
            // smallest j with x_j ≥ x
            let t = (x - self.origin()) / self.spacing() - 0.5;
            let j = (t - EDGE_EPS).ceil();
            j.clamp(0.0, self.points as f64) as usize
        };
        Ok(first(lo)..first(hi))
    }

    /// Sample index whose cell contains `x`, if `x` is inside the domain.
    pub fn cell_of(&self, x: f64) -> Option<usize> {
        let t = (x - self.origin()) / self.spacing();
        if t < 0.0 || t >= self.points as f64 {
            return None;
        }
        Some((t.floor() as usize).min(self.points - 1))
    }
}

/// Half-open position interval `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    /// Interval of width `width` centred on `center`.
    pub fn around(center: f64, width: f64) -> Self {
        Interval { lo: center - 0.5 * width, hi: center + 0.5 * width }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x < self.hi
    }
}

/// Position-space wavefunction on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridWaveFn {
    grid: Grid1D,
    amplitudes: Vec<C64>,
}

impl GridWaveFn {
    pub fn from_amplitudes(grid: Grid1D, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != grid.points() {
            return Err(Error::DimensionMismatch { expected: grid.points(), found: amplitudes.len() });
        }
        Ok(GridWaveFn { grid, amplitudes })
    }

    /// Samples `f` at the grid positions and normalizes.
    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> C64) -> Result<Self> {
        let amplitudes = grid.positions().into_iter().map(f).collect();
        GridWaveFn { grid, amplitudes }.normalized()
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// `Σ|ψ_j|²·dx`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(self.map_amplitudes(|_, z| z / norm))
    }

    /// Probability density `|ψ_j|²/‖ψ‖²` at each sample.
    pub fn density(&self) -> Vec<f64> {
        let norm = self.norm_sqr();
        self.amplitudes.iter().map(|z| z.norm_sqr() / norm).collect()
    }

    /// Probability per sample cell.
    pub fn cell_probabilities(&self) -> Vec<f64> {
        let dx = self.grid.spacing();
        self.density().into_iter().map(|d| d * dx).collect()
    }

    pub fn mean_position(&self) -> f64 {
        self.position_moments().0
    }

    pub fn std_position(&self) -> f64 {
        self.position_moments().1.sqrt()
    }

    /// Mean and variance of position.
    pub fn position_moments(&self) -> (f64, f64) {
        let probs = self.cell_probabilities();
        let positions = self.grid.positions();
        moments(&positions, &probs)
    }

    /// `⟨(x − c)²⟩`.
    pub fn second_moment_about(&self, c: f64) -> f64 {
        let probs = self.cell_probabilities();
        self.grid.positions().iter().zip(&probs).map(|(x, w)| (x - c) * (x - c) * w).sum()
    }

    pub fn mean_momentum(&self) -> f64 {
        self.spectral_transform().moments().0
    }

    pub fn std_momentum(&self) -> f64 {
        self.spectral_transform().moments().1.sqrt()
    }

    /// Probability carried by the first and last samples.
    pub fn boundary_mass(&self) -> f64 {
        let n = self.amplitudes.len();
        let dx = self.grid.spacing();
        (self.amplitudes[0].norm_sqr() + self.amplitudes[n - 1].norm_sqr()) * dx / self.norm_sqr()
    }

    pub fn spectral_transform(&self) -> MomentumWaveFn {
        let grid = self.grid;
        let mut data = self.amplitudes.clone();
        FftPlan::new(grid.points()).forward(&mut data);
        let x_first = grid.position(0);
        let scale = grid.spacing() / (2.0 * PI * grid.hbar()).sqrt();
        for (j, z) in data.iter_mut().enumerate() {
            let phase = -grid.momentum(j) * x_first / grid.hbar();
            *z *= C64::from_polar(scale, phase);
        }
        MomentumWaveFn { grid, amplitudes: data }
    }

    /// Free evolution for time `t` of a particle of mass `mass`.
    pub fn free_propagate(&self, mass: f64, t: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::param("mass", "must be positive"));
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::param("time", "must be non-negative"));
        }
        if t == 0.0 {
            return Ok(self.clone());
        }
        let grid = self.grid;
        let plan = FftPlan::new(grid.points());
        let mut data = self.amplitudes.clone();
        plan.forward(&mut data);
        for (j, z) in data.iter_mut().enumerate() {
            let p = grid.momentum(j);
            *z *= C64::from_polar(1.0, -p * p * t / (2.0 * mass * grid.hbar()));
        }
        plan.inverse(&mut data);
        Ok(GridWaveFn { grid, amplitudes: data })
    }

    pub fn sector_probability(&self, interval: Interval) -> Result<f64> {
        let range = self.grid.index_range(interval)?;
        let inside: f64 = self.amplitudes[range].iter().map(|z| z.norm_sqr()).sum();
        let total: f64 = self.amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if !(total > 0.0) {
            return Err(Error::ZeroNorm);
        }
        Ok((inside / total).clamp(0.0, 1.0))
    }

    /// Projects onto `interval` and renormalizes, returning the reduced state
    /// and the probability of the sector before reduction.
    pub fn reduce(&self, interval: Interval) -> Result<(Self, f64)> {
        self.reduce_with_floor(interval, DEFAULT_REDUCTION_FLOOR)
    }

    pub fn reduce_with_floor(&self, interval: Interval, floor: f64) -> Result<(Self, f64)> {
        let probability = self.sector_probability(interval)?;
        if probability < floor || probability == 0.0 {
            return Err(Error::EmptySector { probability, floor });
        }
        let range = self.grid.index_range(interval)?;
        let projected = self.map_amplitudes(|j, z| if range.contains(&j) { z } else { C64::new(0.0, 0.0) });
        Ok((projected.normalized()?, probability))
    }

    /// `⟨self|other⟩ = Σ conj(ψ_j) φ_j·dx`.
    pub fn overlap(&self, other: &GridWaveFn) -> Result<C64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let sum: C64 = self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum();
        Ok(sum * self.grid.spacing())
    }

    /// Draws `count` positions from the Born distribution `|ψ|²`.
    pub fn born_sample<R: RngCore + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        let cdf = cumulative(&self.cell_probabilities());
        (0..count).map(|_| self.grid.position(sample_index(&cdf, unit_f64(rng)))).collect()
    }

    /// `(x, |ψ(x)|²)` pairs for plotting.
    pub fn density_profile(&self) -> Vec<(f64, f64)> {
        self.grid.positions().into_iter().zip(self.density()).collect()
    }

    fn map_amplitudes(&self, f: impl Fn(usize, C64) -> C64) -> Self {
        let amplitudes = self.amplitudes.iter().enumerate().map(|(j, z)| f(j, *z)).collect();
        GridWaveFn { grid: self.grid, amplitudes }
    }
}

/// Momentum-space amplitudes of a [`GridWaveFn`], in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumWaveFn {
    grid: Grid1D,
    amplitudes: Vec<C64>,
}

impl MomentumWaveFn {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `Σ|φ_k|²·dp`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.momentum_spacing()
    }

    /// Probability of each lattice momentum, FFT order.
    pub fn probabilities(&self) -> Vec<f64> {
        let total: f64 = self.amplitudes.iter().map(|z| z.norm_sqr()).sum();
        self.amplitudes.iter().map(|z| z.norm_sqr() / total).collect()
    }

    /// Mean and variance of momentum on the signed lattice.
    pub fn moments(&self) -> (f64, f64) {
        moments(&self.grid.momenta(), &self.probabilities())
    }

    /// `(p, |φ(p)|²)` pairs sorted by momentum, for plotting.
    pub fn density_profile(&self) -> Vec<(f64, f64)> {
        let n = self.grid.points();
        let norm = self.norm_sqr();
        (0..n)
            .map(|i| {
                let j = (i + n / 2) % n;
                (self.grid.momentum(j), self.amplitudes[j].norm_sqr() / norm)
            })
            .collect()
    }

    /// Back to position space.
    pub fn inverse(&self) -> GridWaveFn {
        let grid = self.grid;
        let x_first = grid.position(0);
        let scale = (2.0 * PI * grid.hbar()).sqrt() / grid.spacing();
        let mut data: Vec<C64> = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(j, z)| z * C64::from_polar(scale, grid.momentum(j) * x_first / grid.hbar()))
            .collect();
        FftPlan::new(grid.points()).inverse(&mut data);
        GridWaveFn { grid, amplitudes: data }
    }
}

/// Normalized Gaussian `exp(−(x−c)²/(4σ²) + i p₀ x/ħ)` with `Δx = σ`.
pub fn gaussian_packet(grid: Grid1D, center: f64, sigma: f64, p0: f64) -> Result<GridWaveFn> {
    let required = 4.0 * grid.spacing();
    if !(sigma >= required) {
        return Err(Error::Resolution { width: sigma, required, samples: 4 });
    }
    if center - 6.0 * sigma < grid.origin() || center + 6.0 * sigma > grid.end() {
        return Err(Error::PacketAtBoundary { center, sigma });
    }
    let hbar = grid.hbar();
    GridWaveFn::from_fn(grid, |x| {
        let d = x - center;
        C64::from_polar((-d * d / (4.0 * sigma * sigma)).exp(), p0 * x / hbar)
    })
}

/// Momentum eigenstate `e^{ipx/ħ}/√L`; `p` must lie on the grid's lattice.
pub fn plane_wave(grid: Grid1D, p: f64) -> Result<GridWaveFn> {
    grid.lattice_index(p)?;
    let amp = 1.0 / grid.length().sqrt();
    let hbar = grid.hbar();
    let amplitudes = grid.positions().into_iter().map(|x| C64::from_polar(amp, p * x / hbar)).collect();
    GridWaveFn::from_amplitudes(grid, amplitudes)
}

/// Amplitudes `a_n` for [`packet_superposition`].
#[derive(Debug, Clone, PartialEq)]
pub enum PacketAmplitudes {
    /// `count` packets with equal real amplitudes `1/√count`.
    Uniform(usize),
    Explicit(Vec<C64>),
}

impl PacketAmplitudes {
    fn resolve(&self) -> Result<Vec<C64>> {
        let amplitudes = match self {
            PacketAmplitudes::Uniform(0) => return Err(Error::AmplitudeNorm(0.0)),
            PacketAmplitudes::Uniform(n) => vec![C64::new(1.0 / (*n as f64).sqrt(), 0.0); *n],
            PacketAmplitudes::Explicit(a) => a.clone(),
        };
        let total: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if amplitudes.is_empty() || (total - 1.0).abs() > NORM_TOL {
            return Err(Error::AmplitudeNorm(total));
        }
        Ok(amplitudes)
    }
}

/// Layout of `count` adjacent bins of width `width`, centred on `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketTrain {
    pub center: f64,
    pub width: f64,
    pub count: usize,
}

impl PacketTrain {
    pub fn span(&self) -> Interval {
        Interval::around(self.center, self.width * self.count as f64)
    }

    pub fn bin(&self, n: usize) -> Interval {
        let lo = self.span().lo + n as f64 * self.width;
        Interval { lo, hi: lo + self.width }
    }

    pub fn bin_containing(&self, x: f64) -> Option<usize> {
        let t = (x - self.span().lo) / self.width;
        if t < 0.0 || t >= self.count as f64 {
            None
        } else {
            Some((t.floor() as usize).min(self.count - 1))
        }
    }
}

/// Result of [`packet_superposition`].
#[derive(Debug, Clone, PartialEq)]
pub struct PacketSuperposition {
    pub wavefn: GridWaveFn,
    pub train: PacketTrain,
    pub amplitudes: Vec<C64>,
}

impl PacketSuperposition {
    /// The normalized packet `ψ_n` alone.
    pub fn packet(&self, n: usize) -> Result<GridWaveFn> {
        bin_packet(*self.wavefn.grid(), self.train.bin(n))
    }
}

/// `Σ a_n ψ_n` with each `ψ_n` a Gaussian of width `α/6` truncated to its
/// width-`α` bin. Bins are adjacent and centred on the grid centre.
pub fn packet_superposition(grid: Grid1D, width: f64, amplitudes: PacketAmplitudes) -> Result<PacketSuperposition> {
    let amplitudes = amplitudes.resolve()?;
    let count = amplitudes.len();
    check_packet_resolution(&grid, width)?;
    if width * count as f64 > grid.length() * (1.0 + EDGE_EPS) {
        return Err(Error::OverlappingPackets { count, width, length: grid.length() });
    }
    let train = PacketTrain { center: grid.center(), width, count };
    let mut total = vec![C64::new(0.0, 0.0); grid.points()];
    for (n, a) in amplitudes.iter().enumerate() {
        let (range, local) = bin_samples(&grid, train.bin(n))?;
        for (t, z) in total[range].iter_mut().zip(&local) {
            *t += a * z;
        }
    }
    let wavefn = GridWaveFn::from_amplitudes(grid, total)?;
    Ok(PacketSuperposition { wavefn, train, amplitudes })
}

/// Bins narrower than 8 samples are rejected.
pub fn check_packet_resolution(grid: &Grid1D, width: f64) -> Result<()> {
    let required = 8.0 * grid.spacing();
    if width >= required * (1.0 - EDGE_EPS) {
        Ok(())
    } else {
        Err(Error::Resolution { width, required, samples: 8 })
    }
}

fn bin_packet(grid: Grid1D, bin: Interval) -> Result<GridWaveFn> {
    let (range, local) = bin_samples(&grid, bin)?;
    let mut amplitudes = vec![C64::new(0.0, 0.0); grid.points()];
    amplitudes[range].copy_from_slice(&local);
    GridWaveFn::from_amplitudes(grid, amplitudes)
}

/// Normalized samples of the truncated Gaussian of a bin, with the index
/// range they occupy.
fn bin_samples(grid: &Grid1D, bin: Interval) -> Result<(core::ops::Range<usize>, Vec<C64>)> {
    let range = grid.index_range(bin)?;
    let center = bin.midpoint();
    let sigma = bin.width() / 6.0;
    let mut local: Vec<C64> = range
        .clone()
        .map(|j| {
            let d = grid.position(j) - center;
            C64::new((-d * d / (4.0 * sigma * sigma)).exp(), 0.0)
        })
        .collect();
    let norm = (local.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.spacing()).sqrt();
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    local.iter_mut().for_each(|z| *z /= norm);
    Ok((range, local))
}

/// Mean and variance of `values` under weights `probs` (which sum to 1).
pub(crate) fn moments(values: &[f64], probs: &[f64]) -> (f64, f64) {
    let mean: f64 = values.iter().zip(probs).map(|(v, w)| v * w).sum();
    let var: f64 = values.iter().zip(probs).map(|(v, w)| (v - mean) * (v - mean) * w).sum();
    (mean, var.max(0.0))
}

pub(crate) fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    if let Some(last) = cdf.last_mut() {
        *last = f64::INFINITY;
    }
    cdf
}

pub(crate) fn sample_index(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}
