//! Configuration, sweeps, report files and acceptance checks around
//! [`qmeasure_core`].
//!
//! The `qmeasure` binary is a thin front end over [`config::load_config`],
//! [`runner::execute`], [`runner::write`] and [`acceptance::run_all`].

pub mod acceptance;
pub mod config;
pub mod output;
pub mod runner;

/// One-line descriptions for `qmeasure list`, in registration order.
pub const DESCRIPTIONS: [(&str, &str); 7] = [
    ("diffraction", "single-slit momentum estimate, ring probability and paraxial screen simulation"),
    ("ozawa_position", "uniform packet train read through a tightly bound partner"),
    ("ozawa_commuting", "commuting pointers q + c and total momentum on a packet train"),
    ("box_model", "periodic box with a momentum lattice and conditioned packet sectors"),
    ("slit_two_body", "the slit as a heavy second particle with elastic kinematics"),
    ("preparation", "Gaussian preparation filters counted as part of the measurement"),
    ("spin_epr", "exact singlet algebra for two spin-1/2 particles"),
];
