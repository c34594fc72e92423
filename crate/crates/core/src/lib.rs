//! Thermodynamics of the dilute Bose gas: scattering lengths of radial pair
//! potentials, the ideal-gas free energy, a lower bound on the interacting
//! free energy, and lattice checks of the operator inequalities behind it.
//!
//! Units throughout: `hbar = 2m = 1`, so the kinetic energy is `p^2`.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod bound;
pub mod cli;
pub mod error;
pub mod ideal_gas;
pub mod kernels;
pub mod ode;
pub mod potentials;
pub mod quad;
pub mod scattering;
pub mod special;

pub use error::{Error, Result};
