//! Whole-τ sweeps on either engine, their tabular output, and the oracle
//! validation report.

use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::{Config, Engine, ThetaMode, ValidatedConfig};
use crate::criteria::{evaluate, local_squeezing, BeamSplitterSource, JointCovariance};
use crate::error::{ConfigErrors, Error, Result};
use crate::kerr::{kerr_moment, FockOracle, KerrExact};
use crate::ops::{Mode, Monomial, MomentSource};
use crate::wigner::{jackknife_se, run_ensemble, Ensemble, MomentTable, WignerModel};

/// The sweep pipelines offered by the command-line front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Local squeezing under nonlinear evolution alone.
    Squeeze,
    /// Nonlinear evolution without tunneling, then the beam splitter.
    TwoStep,
    /// Full Hamiltonian with tunneling and losses on the Wigner engine, with
    /// an optional final beam splitter.
    Dynamic,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Squeeze => "squeeze",
            Command::TwoStep => "two-step",
            Command::Dynamic => "dynamic",
        })
    }
}

/// One output line of a sweep. Angles are in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub tau: f64,
    pub theta_opt: f64,
    pub theta_epr: f64,
    /// Phase frame of site A.
    pub delta_theta: f64,
    /// Squeezing of site A before any beam splitter.
    pub s_local: f64,
    pub s_minus: f64,
    pub s_plus: f64,
    pub e_product: f64,
    pub e_epr_product: f64,
    pub g: f64,
    pub g_prime: f64,
    pub duan_sum: f64,
    /// Jackknife standard errors; Wigner rows only.
    pub stderr: Option<RowErrors>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowErrors {
    pub s_local: f64,
    pub s_minus: f64,
    pub s_plus: f64,
    pub e_product: f64,
    pub e_epr_product: f64,
    pub duan_sum: f64,
}

pub const COLUMNS: [&str; 18] = [
    "tau",
    "theta_opt",
    "theta_epr",
    "delta_theta",
    "S_local",
    "S_minus",
    "S_plus",
    "E_product",
    "E_EPR_product",
    "g",
    "g_prime",
    "duan_sum",
    "S_local_se",
    "S_minus_se",
    "S_plus_se",
    "E_product_se",
    "E_EPR_product_se",
    "duan_sum_se",
];

impl SweepRow {
    fn cells(&self) -> Vec<String> {
        let mut out: Vec<String> = [
            self.tau,
            self.theta_opt,
            self.theta_epr,
            self.delta_theta,
            self.s_local,
            self.s_minus,
            self.s_plus,
            self.e_product,
            self.e_epr_product,
            self.g,
            self.g_prime,
            self.duan_sum,
        ]
        .iter()
        .map(|v| number(*v))
        .collect();
        match &self.stderr {
            Some(e) => out.extend(
                [e.s_local, e.s_minus, e.s_plus, e.e_product, e.e_epr_product, e.duan_sum]
                    .iter()
                    .map(|v| number(*v)),
            ),
            None => out.extend(std::iter::repeat_n(String::new(), 6)),
        }
        out
    }
}

/// Shortest round-trip formatting, switching to exponent notation for very
/// small or large magnitudes.
fn number(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Criteria at one τ from the mode moments before the optional beam splitter.
pub fn evaluate_row<S: MomentSource + ?Sized>(
    tau: f64,
    source: &S,
    beam_splitter: bool,
    theta: ThetaMode,
) -> Result<SweepRow> {
    let local = JointCovariance::measure(source)?;
    let (s_local, _) = local_squeezing(&local, 0)?;
    let joint = if beam_splitter {
        JointCovariance::measure(&BeamSplitterSource::new(source))?
    } else {
        local
    };
    let r = evaluate(&joint, theta)?;
    Ok(SweepRow {
        tau,
        theta_opt: r.theta_opt,
        theta_epr: r.theta_epr,
        delta_theta: local.delta_theta[0],
        s_local,
        s_minus: r.s_minus,
        s_plus: r.s_plus,
        e_product: r.e_product,
        e_epr_product: r.e_epr_product,
        g: r.gains.g,
        g_prime: r.gains.g_prime,
        duan_sum: r.duan_sum,
        stderr: None,
    })
}

/// Rows of a sweep and, for Wigner runs, the same rows recomputed with each
/// trajectory block left out.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub command: Command,
    pub engine: Engine,
    pub rows: Vec<SweepRow>,
    /// `replicates[b][i]`: row `i` without block `b`.
    pub replicates: Option<Vec<Vec<SweepRow>>>,
}

/// Minimum of a column over τ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub tau: f64,
    pub value: f64,
    /// Grid index of the smallest sample.
    pub index: usize,
    /// Jackknife standard error of `value`; Wigner sweeps only.
    pub stderr: Option<f64>,
}

/// Grid minimum of `values`, refined by a parabola through the neighbouring
/// samples when it is interior.
pub fn refined_minimum(taus: &[f64], values: &[f64]) -> (f64, f64, usize) {
    let (i, v) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |a, (i, v)| if v < a.1 { (i, v) } else { a });
    if i == 0 || i + 1 >= values.len() {
        return (taus[i], v, i);
    }
    let (x0, x1, x2) = (taus[i - 1], taus[i], taus[i + 1]);
    let (y0, y1, y2) = (values[i - 1], v, values[i + 1]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curvature = (d12 - d01) / (x2 - x0);
    if curvature.is_nan() || curvature <= 0.0 {
        return (x1, y1, i);
    }
    let slope = d01 - curvature * (x0 + x1);
    let x = (-slope / (2.0 * curvature)).clamp(x0, x2);
    let y = y1 + (x - x1) * (d01 + curvature * (x - x0));
    (x, y.min(y1), i)
}

impl SweepResult {
    pub fn taus(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.tau).collect()
    }

    /// Minimum of `column` over the sweep.
    pub fn minimum(&self, column: impl Fn(&SweepRow) -> f64) -> Minimum {
        let taus = self.taus();
        let values: Vec<f64> = self.rows.iter().map(&column).collect();
        let (tau, value, index) = refined_minimum(&taus, &values);
        let stderr = self.replicates.as_ref().map(|reps| {
            let mins: Vec<f64> = reps
                .iter()
                .map(|rows| {
                    let v: Vec<f64> = rows.iter().map(&column).collect();
                    refined_minimum(&taus, &v).1
                })
                .collect();
            jackknife_se(&mins)
        });
        Minimum {
            tau,
            value,
            index,
            stderr,
        }
    }

    /// Jackknife standard error of `stat` evaluated on whole sweeps.
    pub fn jackknife(&self, stat: impl Fn(&[SweepRow]) -> f64) -> Option<f64> {
        self.replicates.as_ref().map(|reps| {
            let values: Vec<f64> = reps.iter().map(|rows| stat(rows)).collect();
            jackknife_se(&values)
        })
    }
}

fn config_error(field: &str, message: impl Into<String>) -> Error {
    let mut errors = ConfigErrors::default();
    errors.push(field, message);
    Error::Config(errors)
}

/// Runs `command` on the validated configuration.
pub fn run(command: Command, cfg: &ValidatedConfig) -> Result<SweepResult> {
    let (engine, couplings, beam_splitter) = match command {
        Command::Squeeze => (cfg.sweep.engine, cfg.couplings.with_tunneling(0.0), false),
        Command::TwoStep => (cfg.sweep.engine, cfg.couplings.with_tunneling(0.0), true),
        Command::Dynamic => (Engine::Wigner, cfg.couplings, cfg.sweep.beam_splitter),
    };
    if engine == Engine::Exact && !cfg.losses.is_lossless() {
        return Err(config_error(
            "losses",
            "the exact engine has no losses; use the wigner engine",
        ));
    }
    let theta = cfg.sweep.theta;
    let taus = &cfg.sweep.taus;
    let (rows, replicates) = match engine {
        Engine::Exact => {
            let rows = taus
                .par_iter()
                .map(|&tau| {
                    let source = KerrExact::new(couplings, cfg.initial, tau);
                    evaluate_row(tau, &source, beam_splitter, theta)
                })
                .collect::<Result<Vec<_>>>()?;
            (rows, None)
        }
        Engine::Wigner => {
            let model = WignerModel::new(couplings, cfg.losses, cfg.linear_loss);
            let ensemble = run_ensemble(&model, &cfg.initial, &cfg.sim, taus)?;
            let (rows, reps) = wigner_rows(&ensemble, beam_splitter, theta)?;
            (rows, Some(reps))
        }
    };
    Ok(SweepResult {
        command,
        engine,
        rows,
        replicates,
    })
}

/// Notes about how `command` reinterprets `cfg`, for display next to the
/// configuration's own warnings.
pub fn command_warnings(command: Command, cfg: &ValidatedConfig) -> Vec<String> {
    let mut out = Vec::new();
    if command != Command::Dynamic && !cfg.couplings.without_tunneling() {
        out.push(format!("{command} evolves without tunneling; kappa is ignored"));
    }
    out
}

type RowsWithReplicates = (Vec<SweepRow>, Vec<Vec<SweepRow>>);

fn wigner_rows(ensemble: &Ensemble, beam_splitter: bool, theta: ThetaMode) -> Result<RowsWithReplicates> {
    let per_tau = ensemble
        .taus
        .par_iter()
        .enumerate()
        .map(|(i, &tau)| {
            let full = evaluate_row(tau, &ensemble.table(i), beam_splitter, theta)?;
            let reps = ensemble
                .jackknife_tables(i)
                .iter()
                .map(|t: &MomentTable| evaluate_row(tau, t, beam_splitter, theta))
                .collect::<Result<Vec<_>>>()?;
            let se = |f: fn(&SweepRow) -> f64| jackknife_se(&reps.iter().map(f).collect::<Vec<_>>());
            let row = SweepRow {
                stderr: Some(RowErrors {
                    s_local: se(|r| r.s_local),
                    s_minus: se(|r| r.s_minus),
                    s_plus: se(|r| r.s_plus),
                    e_product: se(|r| r.e_product),
                    e_epr_product: se(|r| r.e_epr_product),
                    duan_sum: se(|r| r.duan_sum),
                }),
                ..full
            };
            Ok((row, reps))
        })
        .collect::<Result<Vec<_>>>()?;
    let blocks = ensemble.blocks.len();
    let mut replicates = vec![Vec::with_capacity(per_tau.len()); blocks];
    let mut rows = Vec::with_capacity(per_tau.len());
    for (row, reps) in per_tau {
        rows.push(row);
        for (b, r) in reps.into_iter().enumerate() {
            replicates[b].push(r);
        }
    }
    Ok((rows, replicates))
}

// ---------------------------------------------------------------------------
// CSV output

/// SHA-256 of the configuration's canonical JSON serialization.
pub fn config_hash(config: &Config) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    let digest = Sha256::digest(json.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `result` as CSV with a `#`-prefixed provenance header.
pub fn write_csv<W: Write>(
    mut out: W,
    result: &SweepResult,
    config: &Config,
    validated: &ValidatedConfig,
) -> Result<()> {
    writeln!(out, "# twowell {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "# command: {}", result.command)?;
    writeln!(
        out,
        "# engine: {}",
        match result.engine {
            Engine::Exact => "exact",
            Engine::Wigner => "wigner",
        }
    )?;
    writeln!(out, "# config-sha256: {}", config_hash(config))?;
    writeln!(out, "# seed: {}", validated.sim.seed)?;
    if result.engine == Engine::Wigner {
        let sim = &validated.sim;
        writeln!(
            out,
            "# trajectories: {} in {} blocks, dtau: {}, stepper: {:?}",
            sim.n_traj, sim.blocks, sim.dtau, sim.stepper
        )?;
    }
    writeln!(out, "# config: {}", serde_json::to_string(config)?)?;
    writeln!(out, "{}", COLUMNS.join(","))?;
    for row in &result.rows {
        writeln!(out, "{}", row.cells().join(","))?;
    }
    Ok(())
}

pub fn csv_string(result: &SweepResult, config: &Config, validated: &ValidatedConfig) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, result, config, validated)?;
    Ok(String::from_utf8(buf).expect("csv output is ASCII"))
}

// ---------------------------------------------------------------------------
// Validation report

/// Outcome of one oracle comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}: {}", self.name, self.detail)
    }
}

/// Largest relative deviation between the closed-form moments and the Fock
/// oracle over every monomial of order ≤ 4 at the given times.
pub fn closed_form_vs_oracle(cfg: &ValidatedConfig, taus: &[f64]) -> Result<f64> {
    let couplings = cfg.couplings.with_tunneling(0.0);
    let monomials = Monomial::enumerate(4, &Mode::ALL);
    let worst = taus
        .par_iter()
        .map(|&tau| {
            let oracle = FockOracle::new(couplings, cfg.initial, tau);
            let mut worst = 0.0f64;
            for m in &monomials {
                let exact = kerr_moment(m, &couplings, tau, &cfg.initial);
                let reference: Complex64 = oracle.moment(m)?;
                let scale = reference.norm().max(f64::MIN_POSITIVE);
                worst = worst.max((exact - reference).norm() / scale);
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}

/// Runs the oracle suites for `cfg`.
pub fn run_validate(cfg: &ValidatedConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    let taus = &cfg.sweep.taus;
    let picks: Vec<f64> = (0..5).map(|k| taus[k * (taus.len() - 1) / 4]).collect();
    let worst = closed_form_vs_oracle(cfg, &picks)?;
    checks.push(Check {
        name: "closed form vs Fock oracle".to_string(),
        passed: worst < 1e-8,
        detail: format!("max relative error {worst:.3e} over 495 monomials at 5 times (tolerance 1e-8)"),
    });

    if cfg.couplings.without_tunneling() && cfg.losses.is_lossless() {
        let exact = run(
            Command::TwoStep,
            &ValidatedConfig {
                sweep: crate::config::Sweep {
                    engine: Engine::Exact,
                    ..cfg.sweep.clone()
                },
                ..cfg.clone()
            },
        )?;
        let wigner = run(
            Command::TwoStep,
            &ValidatedConfig {
                sweep: crate::config::Sweep {
                    engine: Engine::Wigner,
                    ..cfg.sweep.clone()
                },
                ..cfg.clone()
            },
        )?;
        let worst = exact
            .rows
            .iter()
            .zip(&wigner.rows)
            .map(|(e, w)| {
                let se = w.stderr.map_or(f64::NAN, |s| s.e_product);
                ((w.e_product - e.e_product) / se).abs()
            })
            .fold(0.0, f64::max);
        checks.push(Check {
            name: "wigner vs exact E_product".to_string(),
            passed: worst < 3.0,
            detail: format!(
                "max |deviation| {worst:.2} standard errors over {} times (tolerance 3)",
                exact.rows.len()
            ),
        });
    } else {
        checks.push(Check {
            name: "wigner vs exact E_product".to_string(),
            passed: true,
            detail: "skipped: needs kappa = 0 and no losses".to_string(),
        });
    }
    Ok(checks)
}
