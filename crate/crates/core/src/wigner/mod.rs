//! Truncated-Wigner stochastic engine for the four-mode model with tunneling
//! and one- and two-body losses.
//!
//! Trajectories start from the Wigner distribution of the coherent initial
//! state, are integrated with [`sde::step`], and their symmetric-ordered
//! moments are accumulated per output time in [`MomentAccumulator`]s.
//! [`MomentTable`] converts those to normal order so that the rest of the
//! crate can treat the ensemble as just another [`MomentSource`].
//!
//! [`MomentSource`]: crate::ops::MomentSource

mod ensemble;
mod moments;
pub mod sde;

use serde::{Deserialize, Serialize};

pub use ensemble::{jackknife_se, run_ensemble, run_trajectories, Ensemble, MomentAccumulator};
pub use moments::{moment_index, symmetric_to_normal, MomentTable, MONOMIAL_COUNT};
pub use sde::{diffusion, drift, sample_initial, TrajectoryState, WignerModel, Z_ORDER};

/// Integration scheme for a single time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stepper {
    EulerMaruyama,
    /// Semi-implicit midpoint with three fixed-point iterations.
    #[default]
    Midpoint,
}

/// Which modes the one-body loss `gamma1` acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinearLoss {
    /// All four modes.
    #[default]
    Symmetric,
    /// `a2` and `b1` only.
    LiteralOperators,
    /// `a1` and `b1` only.
    LiteralRows,
}

impl LinearLoss {
    /// Per-mode one-body rate multipliers in [`Z_ORDER`].
    pub fn mask(self) -> [f64; 4] {
        match self {
            LinearLoss::Symmetric => [1.0, 1.0, 1.0, 1.0],
            LinearLoss::LiteralOperators => [0.0, 1.0, 1.0, 0.0],
            LinearLoss::LiteralRows => [1.0, 1.0, 0.0, 0.0],
        }
    }
}

/// Ensemble size, step and random-stream parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub dtau: f64,
    pub n_traj: u64,
    pub seed: u64,
    pub stepper: Stepper,
    /// Number of contiguous trajectory blocks; the unit of parallel work and
    /// of jackknife resampling.
    pub blocks: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dtau: 1e-4,
            n_traj: 10_000,
            seed: 1,
            stepper: Stepper::Midpoint,
            blocks: 20,
        }
    }
}
