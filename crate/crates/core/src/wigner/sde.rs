//! Phase-space stochastic differential equations `dz = a dτ + B dZ`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::{InitialState, LossRates, PhysicalCouplings};
use crate::ops::Mode;

use super::{LinearLoss, Stepper};

/// Mode carried by each slot of the state vector `z = (α1, β1, α2, β2)`.
pub const Z_ORDER: [Mode; 4] = [Mode::A1, Mode::B1, Mode::A2, Mode::B2];

/// Number of complex noise increments consumed per step: four two-body
/// channels and one one-body channel per mode.
pub const NOISE_DIM: usize = 8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Phase-space amplitudes of one trajectory in [`Z_ORDER`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryState {
    pub z: [Complex64; 4],
}

impl TrajectoryState {
    pub fn amplitude(&self, mode: Mode) -> Complex64 {
        self.z[slot(mode)]
    }

    pub fn total_number(&self) -> f64 {
        self.z.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.z.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

fn slot(mode: Mode) -> usize {
    match mode {
        Mode::A1 => 0,
        Mode::B1 => 1,
        Mode::A2 => 2,
        Mode::B2 => 3,
    }
}

/// Draws one initial point: each amplitude is its coherent mean plus complex
/// Gaussian noise with `⟨|δz|²⟩ = 1/2`.
pub fn sample_initial<R: Rng + ?Sized>(initial: &InitialState, rng: &mut R) -> TrajectoryState {
    let mut z = [ZERO; 4];
    for (k, mode) in Z_ORDER.iter().enumerate() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        z[k] = initial.amplitude(*mode) + Complex64::new(re, im) * 0.5;
    }
    TrajectoryState { z }
}

/// Drift vector with the one-body loss on `α1` and `β1` only
/// ([`LinearLoss::LiteralRows`]).
pub fn drift(
    state: &TrajectoryState,
    couplings: &PhysicalCouplings,
    losses: &LossRates,
) -> [Complex64; 4] {
    WignerModel::new(*couplings, *losses, LinearLoss::LiteralRows).drift(&state.z)
}

/// Diffusion matrix for the two-body channels `(12A, 12B, 22A, 22B)` followed
/// by the one-body channels `(1A, 1B)` acting on `α1` and `β1`.
pub fn diffusion(state: &TrajectoryState, losses: &LossRates) -> [[Complex64; 6]; 4] {
    let [a1, b1, a2, b2] = state.z;
    let s12 = losses.gamma12.sqrt();
    let s22 = losses.gamma22.sqrt();
    let s1 = Complex64::from(losses.gamma1.sqrt());
    [
        [a2 * s12, ZERO, ZERO, ZERO, s1, ZERO],
        [ZERO, b2 * s12, ZERO, ZERO, ZERO, s1],
        [a1 * s12, ZERO, a2 * s22, ZERO, ZERO, ZERO],
        [ZERO, b1 * s12, ZERO, b2 * s22, ZERO, ZERO],
    ]
}

/// Couplings, losses and loss placement for the stochastic equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerModel {
    pub couplings: PhysicalCouplings,
    pub losses: LossRates,
    pub linear_loss: LinearLoss,
    linear: [f64; 4],
}

impl WignerModel {
    pub fn new(couplings: PhysicalCouplings, losses: LossRates, linear_loss: LinearLoss) -> Self {
        let linear = linear_loss.mask().map(|m| m * losses.gamma1);
        WignerModel {
            couplings,
            losses,
            linear_loss,
            linear,
        }
    }

    /// True when the equations carry no noise term.
    pub fn is_deterministic(&self) -> bool {
        self.losses.is_lossless()
    }

    /// `a = −i a_drift − a_loss`.
    pub fn drift(&self, z: &[Complex64; 4]) -> [Complex64; 4] {
        let c = &self.couplings;
        let l = &self.losses;
        let [a1, b1, a2, b2] = *z;
        let [na1, nb1, na2, nb2] = z.map(|v| v.norm_sqr());
        let hamiltonian = [
            b1 * c.kappa1 + a1 * (c.g11 * na1 + c.g12 * na2),
            a1 * c.kappa1 + b1 * (c.g11 * nb1 + c.g12 * nb2),
            b2 * c.kappa2 + a2 * (c.g12 * na1 + c.g22 * na2),
            a2 * c.kappa2 + b2 * (c.g12 * nb1 + c.g22 * nb2),
        ];
        let damping = [
            l.gamma12 * na2 + self.linear[0],
            l.gamma12 * nb2 + self.linear[1],
            l.gamma12 * na1 + 2.0 * l.gamma22 * na2 + self.linear[2],
            l.gamma12 * nb1 + 2.0 * l.gamma22 * nb2 + self.linear[3],
        ];
        let mut out = [ZERO; 4];
        for k in 0..4 {
            out[k] = Complex64::new(hamiltonian[k].im, -hamiltonian[k].re) - z[k] * damping[k];
        }
        out
    }

    /// `B dZ` for the eight noise channels.
    pub fn noise(&self, z: &[Complex64; 4], dw: &[Complex64; NOISE_DIM]) -> [Complex64; 4] {
        let [a1, b1, a2, b2] = *z;
        let s12 = self.losses.gamma12.sqrt();
        let s22 = self.losses.gamma22.sqrt();
        let mut out = [
            a2 * dw[0] * s12,
            b2 * dw[1] * s12,
            (a1 * dw[0] * s12) + a2 * dw[2] * s22,
            (b1 * dw[1] * s12) + b2 * dw[3] * s22,
        ];
        for k in 0..4 {
            out[k] += dw[4 + k] * self.linear[k].sqrt();
        }
        out
    }

    /// Advances `z` by `dtau` with Wiener increments `dw`.
    pub fn step(
        &self,
        stepper: Stepper,
        z: &[Complex64; 4],
        dtau: f64,
        dw: &[Complex64; NOISE_DIM],
    ) -> [Complex64; 4] {
        let deterministic = self.is_deterministic();
        let increment = |at: &[Complex64; 4], scale: f64| {
            let a = self.drift(at);
            let b = if deterministic { [ZERO; 4] } else { self.noise(at, dw) };
            let mut out = [ZERO; 4];
            for k in 0..4 {
                out[k] = (a[k] * dtau + b[k]) * scale;
            }
            out
        };
        match stepper {
            Stepper::EulerMaruyama => {
                let d = increment(z, 1.0);
                std::array::from_fn(|k| z[k] + d[k])
            }
            Stepper::Midpoint => {
                let mut mid = *z;
                for _ in 0..3 {
                    let d = increment(&mid, 0.5);
                    mid = std::array::from_fn(|k| z[k] + d[k]);
                }
                std::array::from_fn(|k| mid[k] * 2.0 - z[k])
            }
        }
    }
}

/// Fills `dw` with independent complex increments whose real and imaginary
/// parts each have variance `dtau / 2`.
pub fn wiener_increments<R: Rng + ?Sized>(rng: &mut R, dtau: f64, dw: &mut [Complex64; NOISE_DIM]) {
    let sigma = (dtau / 2.0).sqrt();
    for v in dw.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *v = Complex64::new(re * sigma, im * sigma);
    }
}

/// One step of the model, for callers that supply their own noise.
pub fn step(
    model: &WignerModel,
    stepper: Stepper,
    state: &TrajectoryState,
    dtau: f64,
    dw: &[Complex64; NOISE_DIM],
) -> TrajectoryState {
    TrajectoryState {
        z: model.step(stepper, &state.z, dtau, dw),
    }
}
