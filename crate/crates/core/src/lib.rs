//! Numerical laboratory for measurement error, disturbance and uncertainty
//! products.
//!
//! The crate is `no_std` (with `alloc`) and contains only pure computation:
//!
//! * [`hilbert`]: exact two-spin linear algebra (kets, operators, singlet).
//! * [`grid`]: periodic 1D grids, wave packets, spectral transform, free
//!   propagation, sector probabilities and projective reduction.
//! * [`two_body`]: two-particle wavefunctions on pairs of grids with derived
//!   coordinates (relative/centre-of-mass positions, total/relative momenta).
//! * [`measurement`]: pointer designations, rms noise and disturbance,
//!   unbiasedness, the Kennard check and the variance entanglement criterion.
//! * [`experiments`]: seven scenario runners producing [`ExperimentReport`]s.
//! * [`scaling`]: least-squares power-law fits on log-log data.
//!
//! IO, configuration and the command line live in the `qmeasure` crate.
#![no_std]
// `!(x > 0.0)` is used on purpose to reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// The `num_traits::Float` imports are marked `allow(unused_imports)`: when
// another crate in the build links std, its inherent float methods win.

extern crate alloc;

mod error;
pub mod experiments;
pub mod fft;
pub mod grid;
pub mod hilbert;
pub mod measurement;
pub mod scaling;
pub mod two_body;

pub use error::{Error, Result};
pub use experiments::{ExperimentReport, Outcome, ScenarioParams, Setup};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;

/// Draws a uniform `f64` in `[0, 1)` from the top 53 bits of a `u64`.
pub(crate) fn unit_f64<R: rand_core::RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
