//! Exact finite-dimensional state vectors and operators for spin-½ pairs.
//!
//! The computational basis of a single spin is the `s_z` eigenbasis
//! `u₊ = (1, 0)`, `u₋ = (0, 1)`. The `s_y` eigenvectors are fixed to the
//! phase convention `u₊ = (v₊ + v₋)/√2`, `u₋ = (v₊ − v₋)/(√2 i)`, which gives
//! `v₊ = (1, i)/√2` and `v₋ = (1, −i)/√2`. Two-spin states are Kronecker
//! ordered: index `2a + b` for spin 1 in state `a` and spin 2 in state `b`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
use core::ops::{Add, Mul, Sub};

use crate::{Error, Result, C64};

/// Absolute tolerance for exact-algebra comparisons.
pub const EXACT_TOL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: Vec<C64>,
}

impl Ket {
    pub fn new(amplitudes: Vec<C64>) -> Self {
        assert!(!amplitudes.is_empty(), "a ket needs at least one amplitude");
        Ket { amplitudes }
    }

    /// Standard basis vector `index` of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ket::new(amplitudes)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        num_traits::Float::sqrt(self.norm_sqr())
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < EXACT_TOL
    }

    pub fn normalized(&self) -> Result<Ket> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scale(C64::new(1.0 / norm, 0.0)))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Result<C64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn scale(&self, factor: C64) -> Ket {
        Ket::new(self.amplitudes.iter().map(|z| z * factor).collect())
    }

    /// Largest componentwise distance to `other`.
    pub fn max_abs_diff(&self, other: &Ket) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }
}

impl Add for &Ket {
    type Output = Ket;
    fn add(self, rhs: &Ket) -> Ket {
        assert_eq!(self.dim(), rhs.dim());
        Ket::new(self.amplitudes.iter().zip(&rhs.amplitudes).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Ket {
    type Output = Ket;
    fn sub(self, rhs: &Ket) -> Ket {
        assert_eq!(self.dim(), rhs.dim());
        Ket::new(self.amplitudes.iter().zip(&rhs.amplitudes).map(|(a, b)| a - b).collect())
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &Ket, b: &Ket) -> Ket {
    let mut amplitudes = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.amplitudes {
        for y in &b.amplitudes {
            amplitudes.push(x * y);
        }
    }
    Ket::new(amplitudes)
}

/// Dense square operator, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LinOp {
    dim: usize,
    entries: Vec<C64>,
}

impl LinOp {
    pub fn from_rows(dim: usize, entries: Vec<C64>) -> Self {
        assert_eq!(entries.len(), dim * dim, "operator needs dim² entries");
        LinOp { dim, entries }
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = ONE;
        }
        LinOp { dim, entries }
    }

    pub fn zero(dim: usize) -> Self {
        LinOp { dim, entries: vec![ZERO; dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    pub fn apply(&self, ket: &Ket) -> Result<Ket> {
        check_dim(self.dim, ket.dim())?;
        let amplitudes =
            (0..self.dim).map(|r| (0..self.dim).map(|c| self.entry(r, c) * ket.amplitudes[c]).sum()).collect();
        Ok(Ket::new(amplitudes))
    }

    pub fn scale(&self, factor: C64) -> LinOp {
        LinOp { dim: self.dim, entries: self.entries.iter().map(|z| z * factor).collect() }
    }

    pub fn adjoint(&self) -> LinOp {
        let n = self.dim;
        let mut entries = vec![ZERO; n * n];
        for r in 0..n {
            for c in 0..n {
                entries[c * n + r] = self.entry(r, c).conj();
            }
        }
        LinOp { dim: n, entries }
    }

    pub fn max_abs_diff(&self, other: &LinOp) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }
}

impl Add for &LinOp {
    type Output = LinOp;
    fn add(self, rhs: &LinOp) -> LinOp {
        assert_eq!(self.dim, rhs.dim);
        LinOp { dim: self.dim, entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &LinOp {
    type Output = LinOp;
    fn sub(self, rhs: &LinOp) -> LinOp {
        assert_eq!(self.dim, rhs.dim);
        LinOp { dim: self.dim, entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &LinOp {
    type Output = LinOp;
    fn mul(self, rhs: &LinOp) -> LinOp {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut entries = vec![ZERO; n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.entry(r, k);
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    entries[r * n + c] += a * rhs.entry(k, c);
                }
            }
        }
        LinOp { dim: n, entries }
    }
}

/// Kronecker product of operators.
pub fn kron(a: &LinOp, b: &LinOp) -> LinOp {
    let n = a.dim * b.dim;
    let mut entries = vec![ZERO; n * n];
    for ar in 0..a.dim {
        for ac in 0..a.dim {
            let x = a.entry(ar, ac);
            for br in 0..b.dim {
                for bc in 0..b.dim {
                    entries[(ar * b.dim + br) * n + ac * b.dim + bc] = x * b.entry(br, bc);
                }
            }
        }
    }
    LinOp { dim: n, entries }
}

/// `[a, b] = ab − ba`.
pub fn commutator(a: &LinOp, b: &LinOp) -> LinOp {
    &(a * b) - &(b * a)
}

/// Outer product `|a⟩⟨b|`.
pub fn outer(a: &Ket, b: &Ket) -> LinOp {
    let n = a.dim();
    assert_eq!(n, b.dim());
    let mut entries = Vec::with_capacity(n * n);
    for x in &a.amplitudes {
        for y in &b.amplitudes {
            entries.push(x * y.conj());
        }
    }
    LinOp { dim: n, entries }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinAxis {
    X,
    Y,
    Z,
}

impl SpinAxis {
    pub const ALL: [SpinAxis; 3] = [SpinAxis::X, SpinAxis::Y, SpinAxis::Z];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinSign {
    Plus,
    Minus,
}

impl SpinSign {
    pub fn value(self) -> f64 {
        match self {
            SpinSign::Plus => 1.0,
            SpinSign::Minus => -1.0,
        }
    }
}

/// Single spin-½ component `ħσ/2`.
pub fn spin_component(axis: SpinAxis, hbar: f64) -> LinOp {
    let h = C64::new(0.5 * hbar, 0.0);
    let pauli = match axis {
        SpinAxis::X => [ZERO, ONE, ONE, ZERO],
        SpinAxis::Y => [ZERO, -I, I, ZERO],
        SpinAxis::Z => [ONE, ZERO, ZERO, -ONE],
    };
    LinOp::from_rows(2, pauli.iter().map(|z| z * h).collect())
}

/// Normalized single-spin eigenvector of `s_axis` with eigenvalue `±ħ/2`.
///
/// `Z` gives `u±`, `Y` gives `v±` in the phase convention of the module docs.
pub fn spin_basis(axis: SpinAxis, sign: SpinSign) -> Ket {
    let r = C64::new(FRAC_1_SQRT_2, 0.0);
    let s = sign.value();
    match (axis, sign) {
        (SpinAxis::Z, SpinSign::Plus) => Ket::basis(2, 0),
        (SpinAxis::Z, SpinSign::Minus) => Ket::basis(2, 1),
        (SpinAxis::Y, _) => Ket::new(vec![r, I * r * s]),
        (SpinAxis::X, _) => Ket::new(vec![r, r * s]),
    }
}

/// Embeds a single-spin operator acting on `slot` (0 or 1) of a spin pair.
pub fn embed(op: &LinOp, slot: usize) -> LinOp {
    assert!(slot < 2, "spin pair has slots 0 and 1");
    let id = LinOp::identity(op.dim());
    if slot == 0 {
        kron(op, &id)
    } else {
        kron(&id, op)
    }
}

/// Total spin component `s₁ + s₂` on the pair.
pub fn total_spin(axis: SpinAxis, hbar: f64) -> LinOp {
    let s = spin_component(axis, hbar);
    &embed(&s, 0) + &embed(&s, 1)
}

/// The `S = 0` state built in the `s_y` basis: `(i/√2)[v₊v₋ − v₋v₊]`.
pub fn singlet() -> Ket {
    let vp = spin_basis(SpinAxis::Y, SpinSign::Plus);
    let vm = spin_basis(SpinAxis::Y, SpinSign::Minus);
    (&tensor(&vp, &vm) - &tensor(&vm, &vp)).scale(I * FRAC_1_SQRT_2)
}

/// The `S = 0` state built in the `s_z` basis: `(1/√2)[u₊u₋ − u₋u₊]`.
pub fn singlet_z_form() -> Ket {
    let up = spin_basis(SpinAxis::Z, SpinSign::Plus);
    let um = spin_basis(SpinAxis::Z, SpinSign::Minus);
    (&tensor(&up, &um) - &tensor(&um, &up)).scale(C64::new(FRAC_1_SQRT_2, 0.0))
}

/// Real expectation value `⟨s|op|s⟩`.
pub fn expect(op: &LinOp, state: &Ket) -> Result<f64> {
    let value = state.inner(&op.apply(state)?)?;
    if value.im.abs() > EXACT_TOL || !op.is_hermitian(EXACT_TOL) {
        return Err(Error::NonHermitian(value.im));
    }
    Ok(value.re)
}

/// Projects `state` onto the `sign` eigenspace of spin `slot` along `axis`.
///
/// Returns the renormalized post-measurement state and the Born probability
/// of the outcome.
pub fn project(state: &Ket, slot: usize, axis: SpinAxis, sign: SpinSign) -> Result<(Ket, f64)> {
    check_dim(4, state.dim())?;
    let e = spin_basis(axis, sign);
    let projector = embed(&outer(&e, &e), slot);
    let projected = projector.apply(state)?;
    let probability = projected.norm_sqr();
    Ok((projected.normalized()?, probability))
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
