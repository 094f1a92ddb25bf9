//! Dynamical generation of spin squeezing, entanglement and EPR steering
//! between the two wells of a four-mode Bose–Einstein condensate.
//!
//! Two engines produce the mode moments the criteria are built from:
//!
//! - [`kerr`]: closed-form moments for coherent states under the nonlinear
//!   (Kerr) Hamiltonian without tunneling, plus a truncated Fock-basis oracle;
//! - [`wigner`]: truncated-Wigner stochastic trajectories with tunneling and
//!   one- and two-body losses.
//!
//! [`spin`] turns moments into Schwinger spin statistics and local squeezing,
//! [`criteria`] applies the optional beam splitter and evaluates the
//! entanglement and EPR-steering criteria, and [`sweep`] runs whole τ sweeps.

pub mod config;
pub mod criteria;
pub mod error;
pub mod kerr;
pub mod ops;
pub mod spin;
pub mod sweep;
pub mod wigner;

pub use config::{
    preset_couplings, validate_config, Config, Engine, InitialState, LossRates, MagneticPreset,
    PhysicalCouplings, ThetaMode, ValidatedConfig,
};
pub use error::{Error, Result};
pub use ops::{Mode, Monomial, MomentSource, NormalPoly, Site};
