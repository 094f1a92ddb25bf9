//! Physical parameters, presets, and the JSON run configuration.
//!
//! All couplings, rates and times are dimensionless: energies are measured in
//! units of `g11 * N_A` and time is `tau = g11 * N_A * t`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigErrors, Error, Result};
use crate::ops::Mode;
use crate::wigner::{LinearLoss, SimConfig, Stepper};

/// Dimensionless nonlinear couplings and tunneling rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalCouplings {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
    pub kappa1: f64,
    pub kappa2: f64,
}

impl PhysicalCouplings {
    /// Couplings from scattering-length ratios `a_ij / a_11`, normalized so
    /// that `g11 = 1 / N_A`. Tunneling is off.
    pub fn from_ratios(ratio12: f64, ratio22: f64, n_a: f64) -> Self {
        PhysicalCouplings {
            g11: 1.0 / n_a,
            g12: ratio12 / n_a,
            g22: ratio22 / n_a,
            kappa1: 0.0,
            kappa2: 0.0,
        }
    }

    /// Same nonlinear couplings with tunneling `kappa` on both components.
    pub fn with_tunneling(self, kappa: f64) -> Self {
        PhysicalCouplings {
            kappa1: kappa,
            kappa2: kappa,
            ..self
        }
    }

    /// `g_ij` with components indexed 1 and 2.
    pub fn g(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (1, 1) => self.g11,
            (2, 2) => self.g22,
            (1, 2) | (2, 1) => self.g12,
            _ => panic!("component indices must be 1 or 2"),
        }
    }

    pub fn without_tunneling(&self) -> bool {
        self.kappa1 == 0.0 && self.kappa2 == 0.0
    }
}

/// Dimensionless loss rates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LossRates {
    pub gamma1: f64,
    pub gamma12: f64,
    pub gamma22: f64,
}

impl LossRates {
    pub fn none() -> Self {
        LossRates::default()
    }

    pub fn is_lossless(&self) -> bool {
        self.gamma1 == 0.0 && self.gamma12 == 0.0 && self.gamma22 == 0.0
    }
}

/// Four-mode coherent initial state: each mode of well A holds amplitude
/// `sqrt(N_A / 2) e^{i phase}`, each mode of well B `sqrt(N_B / 2) e^{i phase}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    pub n_a: f64,
    pub n_b: f64,
    /// Global phase of the coherent amplitudes. Observables do not depend on it.
    pub phase: f64,
}

impl InitialState {
    pub fn symmetric(n: f64) -> Self {
        InitialState {
            n_a: n,
            n_b: n,
            phase: 0.0,
        }
    }

    pub fn amplitude(&self, mode: Mode) -> Complex64 {
        let n = match mode.site() {
            crate::ops::Site::A => self.n_a,
            crate::ops::Site::B => self.n_b,
        };
        Complex64::from_polar((n / 2.0).sqrt(), self.phase)
    }
}

/// Tabulated <sup>87</sup>Rb scattering-length configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MagneticPreset {
    /// B = 9.086 G, a12 = 107.8 a0.
    B9p086G,
    /// B = 9.116 G, a12 = 80.8 a0.
    B9p116G,
    /// No inter-species coupling, equal intra-species couplings.
    NoCrossCoupling,
}

const A11: f64 = 100.4;
const A22: f64 = 95.5;

impl MagneticPreset {
    pub const ALL: [MagneticPreset; 3] = [
        MagneticPreset::B9p086G,
        MagneticPreset::B9p116G,
        MagneticPreset::NoCrossCoupling,
    ];

    /// Scattering lengths `(a11, a22, a12)` in Bohr radii.
    pub fn scattering_lengths(self) -> (f64, f64, f64) {
        match self {
            MagneticPreset::B9p086G => (A11, A22, 107.8),
            MagneticPreset::B9p116G => (A11, A22, 80.8),
            MagneticPreset::NoCrossCoupling => (A11, A11, 0.0),
        }
    }

    fn tag(self) -> &'static str {
        match self {
            MagneticPreset::B9p086G => "B9p086G",
            MagneticPreset::B9p116G => "B9p116G",
            MagneticPreset::NoCrossCoupling => "NoCrossCoupling",
        }
    }
}

impl fmt::Display for MagneticPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for MagneticPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MagneticPreset::ALL
            .into_iter()
            .find(|p| p.tag() == s)
            .ok_or_else(|| {
                let mut errs = ConfigErrors::default();
                errs.push("preset", format!("unknown preset tag {s:?}"));
                Error::Config(errs)
            })
    }
}

/// Couplings for a preset at `N_A` atoms in well A.
pub fn preset_couplings(preset: MagneticPreset, n_a: f64) -> Result<PhysicalCouplings> {
    if !n_a.is_finite() || n_a < 1.0 {
        let mut errs = ConfigErrors::default();
        errs.push("initial.n_a", format!("must be a finite count >= 1, got {n_a}"));
        return Err(Error::Config(errs));
    }
    let (a11, a22, a12) = preset.scattering_lengths();
    Ok(PhysicalCouplings::from_ratios(a12 / a11, a22 / a11, n_a))
}

// ---------------------------------------------------------------------------
// JSON document

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub preset: Option<PresetSection>,
    pub couplings: Option<CouplingsSection>,
    pub losses: LossesSection,
    pub initial: InitialSection,
    pub sweep: SweepSection,
    pub wigner: WignerSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetSection {
    pub name: MagneticPreset,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub kappa1: Option<f64>,
    #[serde(default)]
    pub kappa2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingsSection {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub kappa1: Option<f64>,
    #[serde(default)]
    pub kappa2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LossesSection {
    pub gamma1: f64,
    pub gamma12: f64,
    pub gamma22: f64,
    pub linear_loss: LinearLoss,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialSection {
    pub n_a: f64,
    pub n_b: Option<f64>,
    pub phase: f64,
}

impl Default for InitialSection {
    fn default() -> Self {
        InitialSection {
            n_a: 200.0,
            n_b: None,
            phase: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Exact,
    Wigner,
}

impl FromStr for Engine {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(Engine::Exact),
            "wigner" => Ok(Engine::Wigner),
            _ => Err(format!("unknown engine {s:?} (expected exact or wigner)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub tau_min: f64,
    pub tau_max: f64,
    pub points: usize,
    pub engine: Engine,
    pub beam_splitter: bool,
    /// Fixed measurement angle; absent means re-optimize at every tau.
    pub theta: Option<f64>,
}

pub const DEFAULT_TAU_MAX: f64 = 20.0;

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            tau_min: 0.0,
            tau_max: DEFAULT_TAU_MAX,
            points: 400,
            engine: Engine::Exact,
            beam_splitter: true,
            theta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WignerSection {
    pub dtau: f64,
    pub n_traj: u64,
    pub seed: u64,
    pub stepper: Stepper,
    pub blocks: u64,
}

impl Default for WignerSection {
    fn default() -> Self {
        let sim = SimConfig::default();
        WignerSection {
            dtau: sim.dtau,
            n_traj: sim.n_traj,
            seed: sim.seed,
            stepper: sim.stepper,
            blocks: sim.blocks,
        }
    }
}

/// How the criteria pick the measurement angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaMode {
    Optimize,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub taus: Vec<f64>,
    pub engine: Engine,
    pub beam_splitter: bool,
    pub theta: ThetaMode,
}

/// A configuration that passed validation, with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedConfig {
    pub couplings: PhysicalCouplings,
    pub losses: LossRates,
    pub linear_loss: LinearLoss,
    pub initial: InitialState,
    pub sweep: Sweep,
    pub sim: SimConfig,
    pub warnings: Vec<String>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn with_preset(preset: MagneticPreset, n: f64) -> Self {
        Config {
            preset: Some(PresetSection {
                name: preset,
                kappa: None,
                kappa1: None,
                kappa2: None,
            }),
            initial: InitialSection {
                n_a: n,
                ..InitialSection::default()
            },
            ..Config::default()
        }
    }

    pub fn validate(&self) -> Result<ValidatedConfig> {
        validate_config(self)
    }
}

fn check_nonneg(errs: &mut ConfigErrors, field: &str, v: f64) {
    if !v.is_finite() || v < 0.0 {
        errs.push(field, format!("must be finite and >= 0, got {v}"));
    }
}

fn resolve_kappa(
    errs: &mut ConfigErrors,
    section: &str,
    kappa: Option<f64>,
    kappa1: Option<f64>,
    kappa2: Option<f64>,
) -> (f64, f64) {
    let k1 = kappa1.or(kappa).unwrap_or(0.0);
    let k2 = kappa2.or(kappa).unwrap_or(k1);
    check_nonneg(errs, &format!("{section}.kappa1"), k1);
    check_nonneg(errs, &format!("{section}.kappa2"), k2);
    (k1, k2)
}

/// Checks every field, fills defaults, and reports all violations at once.
pub fn validate_config(cfg: &Config) -> Result<ValidatedConfig> {
    let mut errs = ConfigErrors::default();
    let mut warnings = Vec::new();

    let n_a = cfg.initial.n_a;
    let n_b = cfg.initial.n_b.unwrap_or(n_a);
    for (field, n) in [("initial.n_a", n_a), ("initial.n_b", n_b)] {
        if !n.is_finite() || n <= 0.0 {
            errs.push(field, format!("atom number must be > 0, got {n}"));
        }
    }
    if !cfg.initial.phase.is_finite() {
        errs.push("initial.phase", "must be finite");
    }
    if n_a.is_finite() && n_a > 0.0 && n_a < 50.0 {
        warnings.push(format!(
            "N_A = {n_a} is small; truncated-Wigner corrections scale as N^(-3/2)"
        ));
    }

    let couplings = match (&cfg.preset, &cfg.couplings) {
        (Some(_), Some(_)) => {
            errs.push("couplings", "give either `preset` or `couplings`, not both");
            None
        }
        (Some(p), None) => {
            let (k1, k2) = resolve_kappa(&mut errs, "preset", p.kappa, p.kappa1, p.kappa2);
            if n_a >= 1.0 {
                preset_couplings(p.name, n_a).ok().map(|c| PhysicalCouplings {
                    kappa1: k1,
                    kappa2: k2,
                    ..c
                })
            } else {
                if n_a > 0.0 {
                    errs.push("initial.n_a", "presets need N_A >= 1");
                }
                None
            }
        }
        (None, Some(c)) => {
            let (k1, k2) = resolve_kappa(&mut errs, "couplings", c.kappa, c.kappa1, c.kappa2);
            if !c.g11.is_finite() || c.g11 <= 0.0 {
                errs.push("couplings.g11", format!("must be > 0, got {}", c.g11));
            }
            check_nonneg(&mut errs, "couplings.g12", c.g12);
            check_nonneg(&mut errs, "couplings.g22", c.g22);
            Some(PhysicalCouplings {
                g11: c.g11,
                g12: c.g12,
                g22: c.g22,
                kappa1: k1,
                kappa2: k2,
            })
        }
        (None, None) => {
            if n_a >= 1.0 {
                preset_couplings(MagneticPreset::B9p116G, n_a).ok()
            } else {
                None
            }
        }
    };

    let l = &cfg.losses;
    check_nonneg(&mut errs, "losses.gamma1", l.gamma1);
    check_nonneg(&mut errs, "losses.gamma12", l.gamma12);
    check_nonneg(&mut errs, "losses.gamma22", l.gamma22);

    let s = &cfg.sweep;
    if s.points == 0 {
        errs.push("sweep.points", "tau grid must contain at least one point");
    }
    if !s.tau_min.is_finite() || s.tau_min < 0.0 {
        errs.push("sweep.tau_min", format!("must be >= 0, got {}", s.tau_min));
    }
    if !s.tau_max.is_finite() || s.tau_max < s.tau_min {
        errs.push(
            "sweep.tau_max",
            format!("must be >= tau_min, got {}", s.tau_max),
        );
    }
    if let Some(theta) = s.theta {
        if !theta.is_finite() {
            errs.push("sweep.theta", "must be finite");
        }
    }

    let w = &cfg.wigner;
    if !w.dtau.is_finite() || w.dtau <= 0.0 {
        errs.push("wigner.dtau", format!("must be > 0, got {}", w.dtau));
    }
    if w.n_traj < 2 {
        errs.push("wigner.n_traj", "need at least 2 trajectories");
    }
    if w.blocks < 2 || w.blocks > w.n_traj {
        errs.push(
            "wigner.blocks",
            format!("must lie in 2..=n_traj, got {}", w.blocks),
        );
    }

    if !errs.is_empty() {
        return Err(Error::Config(errs));
    }
    let couplings = couplings.expect("couplings resolved when no errors");

    let taus = if s.points == 1 {
        vec![s.tau_min]
    } else {
        let step = (s.tau_max - s.tau_min) / (s.points - 1) as f64;
        (0..s.points).map(|k| s.tau_min + step * k as f64).collect()
    };

    Ok(ValidatedConfig {
        couplings,
        losses: LossRates {
            gamma1: l.gamma1,
            gamma12: l.gamma12,
            gamma22: l.gamma22,
        },
        linear_loss: l.linear_loss,
        initial: InitialState {
            n_a,
            n_b,
            phase: cfg.initial.phase,
        },
        sweep: Sweep {
            taus,
            engine: s.engine,
            beam_splitter: s.beam_splitter,
            theta: s.theta.map_or(ThetaMode::Optimize, ThetaMode::Fixed),
        },
        sim: SimConfig {
            dtau: w.dtau,
            n_traj: w.n_traj,
            seed: w.seed,
            stepper: w.stepper,
            blocks: w.blocks,
        },
        warnings,
    })
}
