//! Two-time correlation functions and noise spectral functions of the
//! hydrogen-atom electric dipole moment, computed both from Bohmian
//! trajectories (stochastic quantum mechanics, SQM) and from conventional
//! quantum mechanics (QM).
//!
//! Internal units are `hbar = mu = e = a0 = 1`, so the natural frequency
//! `omega0 = hbar/(mu a0^2)` is 1. Spectra are the dimensionless curly-S,
//! i.e. S(omega) in units of `e^2 a0^2 / omega0`; zeroth moments are in
//! `(e a0)^2` and second moments in `e^4/(mu a0)`.

pub mod bohm;
pub mod error;
pub mod export;
pub mod hydrogen;
pub mod numerics;
pub mod observables;
pub mod qm;
pub mod sqm;

pub use error::{Error, Result};
pub use hydrogen::HydrogenState;
pub use numerics::QuadSpec;
