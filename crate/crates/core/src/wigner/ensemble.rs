//! Trajectory ensembles and mergeable moment accumulators.

use std::ops::Range;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::InitialState;
use crate::error::{ConfigErrors, Error, Result};
use crate::ops::NUM_MODES;

use super::moments::{monomials, MomentTable, MAX_ORDER, MONOMIAL_COUNT};
use super::sde::{sample_initial, wiener_increments, TrajectoryState, WignerModel, NOISE_DIM};
use super::SimConfig;

/// Running sums of every tracked symmetric-ordered monomial `z*^p z^q`, and of
/// the squares of their real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentAccumulator {
    pub count: u64,
    pub sum: Vec<Complex64>,
    pub sum_sq: Vec<[f64; 2]>,
}

impl Default for MomentAccumulator {
    fn default() -> Self {
        MomentAccumulator {
            count: 0,
            sum: vec![Complex64::new(0.0, 0.0); MONOMIAL_COUNT],
            sum_sq: vec![[0.0; 2]; MONOMIAL_COUNT],
        }
    }
}

impl MomentAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, state: &TrajectoryState) {
        const P: usize = MAX_ORDER as usize + 1;
        let mut conj = [[Complex64::new(1.0, 0.0); P]; NUM_MODES];
        let mut plain = conj;
        for mode in crate::ops::Mode::ALL {
            let z = state.amplitude(mode);
            let k = mode.index();
            for e in 1..P {
                plain[k][e] = plain[k][e - 1] * z;
                conj[k][e] = conj[k][e - 1] * z.conj();
            }
        }
        for (i, m) in monomials().iter().enumerate() {
            let mut v = Complex64::new(1.0, 0.0);
            for k in 0..NUM_MODES {
                v *= conj[k][m.create[k] as usize] * plain[k][m.annihilate[k] as usize];
            }
            self.sum[i] += v;
            self.sum_sq[i][0] += v.re * v.re;
            self.sum_sq[i][1] += v.im * v.im;
        }
        self.count += 1;
    }

    /// Adds the contents of `other`, as if its trajectories had been
    /// accumulated here.
    pub fn merge(&mut self, other: &MomentAccumulator) {
        self.count += other.count;
        for i in 0..MONOMIAL_COUNT {
            self.sum[i] += other.sum[i];
            self.sum_sq[i][0] += other.sum_sq[i][0];
            self.sum_sq[i][1] += other.sum_sq[i][1];
        }
    }

    /// Ensemble averages of the symmetric-ordered monomials.
    pub fn mean(&self) -> Vec<Complex64> {
        let n = self.count as f64;
        self.sum.iter().map(|s| s / n).collect()
    }

    /// Standard errors of the real and imaginary parts of `mean()[i]`.
    pub fn standard_error(&self, i: usize) -> [f64; 2] {
        let n = self.count as f64;
        let m = self.sum[i] / n;
        let var = |sq: f64, mean: f64| ((sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
        [
            (var(self.sum_sq[i][0], m.re) / n).sqrt(),
            (var(self.sum_sq[i][1], m.im) / n).sqrt(),
        ]
    }

    pub fn table(&self) -> MomentTable {
        MomentTable::from_symmetric(&self.mean())
    }
}

/// Integrates trajectories `range` and accumulates their moments at each
/// output time. Trajectory `k` draws from stream `k` of a generator seeded
/// with `sim.seed`, so results do not depend on how ranges are split.
pub fn run_trajectories(
    model: &WignerModel,
    initial: &InitialState,
    sim: &SimConfig,
    taus: &[f64],
    range: Range<u64>,
) -> Result<Vec<MomentAccumulator>> {
    check_inputs(sim, taus)?;
    let mut accs = vec![MomentAccumulator::new(); taus.len()];
    let deterministic = model.is_deterministic();
    let mut dw = [Complex64::new(0.0, 0.0); NOISE_DIM];
    for k in range {
        let mut rng = ChaCha8Rng::seed_from_u64(sim.seed);
        rng.set_stream(k);
        let mut state = sample_initial(initial, &mut rng);
        let mut tau = 0.0;
        let mut step = 0u64;
        for (acc, &target) in accs.iter_mut().zip(taus) {
            let span = target - tau;
            if span > 0.0 {
                let n = (span / sim.dtau - 1e-9).ceil().max(1.0) as u64;
                let h = span / n as f64;
                for j in 0..n {
                    if !deterministic {
                        wiener_increments(&mut rng, h, &mut dw);
                    }
                    state.z = model.step(sim.stepper, &state.z, h, &dw);
                    step += 1;
                    if !state.is_finite() {
                        return Err(Error::Divergence {
                            trajectory: k,
                            step,
                            tau: tau + (j + 1) as f64 * h,
                        });
                    }
                }
                tau = target;
            }
            acc.add(&state);
        }
    }
    Ok(accs)
}

fn check_inputs(sim: &SimConfig, taus: &[f64]) -> Result<()> {
    let mut errors = ConfigErrors::default();
    if !(sim.dtau > 0.0 && sim.dtau.is_finite()) {
        errors.push("wigner.dtau", format!("must be positive, got {}", sim.dtau));
    }
    if taus.is_empty() {
        errors.push("sweep.points", "no output times");
    }
    if taus.iter().any(|t| !t.is_finite() || *t < 0.0) || taus.windows(2).any(|w| w[1] < w[0]) {
        errors.push("sweep", "output times must be finite, non-negative and non-decreasing");
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Error::Config(errors))
    }
}

/// Moment time series of a full ensemble, kept per trajectory block.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub taus: Vec<f64>,
    /// `blocks[b][i]`: block `b` at output time `taus[i]`.
    pub blocks: Vec<Vec<MomentAccumulator>>,
}

impl Ensemble {
    pub fn n_traj(&self) -> u64 {
        self.blocks.iter().map(|b| b[0].count).sum()
    }

    /// Accumulator over all trajectories at output index `i`.
    pub fn total(&self, i: usize) -> MomentAccumulator {
        self.merged(i, None)
    }

    pub fn table(&self, i: usize) -> MomentTable {
        self.total(i).table()
    }

    /// Tables with one block left out each, for jackknife error estimates.
    pub fn jackknife_tables(&self, i: usize) -> Vec<MomentTable> {
        (0..self.blocks.len())
            .map(|b| self.merged(i, Some(b)).table())
            .collect()
    }

    fn merged(&self, i: usize, skip: Option<usize>) -> MomentAccumulator {
        let mut acc = MomentAccumulator::new();
        for (b, block) in self.blocks.iter().enumerate() {
            if Some(b) != skip {
                acc.merge(&block[i]);
            }
        }
        acc
    }
}

/// Runs `sim.n_traj` trajectories split into `sim.blocks` contiguous blocks,
/// integrated in parallel.
pub fn run_ensemble(
    model: &WignerModel,
    initial: &InitialState,
    sim: &SimConfig,
    taus: &[f64],
) -> Result<Ensemble> {
    check_inputs(sim, taus)?;
    if sim.n_traj < 2 || sim.blocks < 2 || sim.blocks > sim.n_traj {
        let mut errors = ConfigErrors::default();
        errors.push(
            "wigner.blocks",
            format!(
                "need 2 <= blocks <= n_traj, got blocks = {}, n_traj = {}",
                sim.blocks, sim.n_traj
            ),
        );
        return Err(Error::Config(errors));
    }
    let bounds = |b: u64| b * sim.n_traj / sim.blocks;
    let results: Vec<Result<Vec<MomentAccumulator>>> = (0..sim.blocks)
        .into_par_iter()
        .map(|b| run_trajectories(model, initial, sim, taus, bounds(b)..bounds(b + 1)))
        .collect();
    let blocks = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Ensemble {
        taus: taus.to_vec(),
        blocks,
    })
}

/// Jackknife standard error from leave-one-block-out replicates.
pub fn jackknife_se(replicates: &[f64]) -> f64 {
    let n = replicates.len() as f64;
    let mean = replicates.iter().sum::<f64>() / n;
    let ss: f64 = replicates.iter().map(|r| (r - mean).powi(2)).sum();
    ((n - 1.0) / n * ss).sqrt()
}
