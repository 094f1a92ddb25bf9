//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! reports a PASS/FAIL line even when an earlier one fails; the process
//! exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twowell::criteria::{
    evaluate, optimal_gains, BeamSplitterSource, JointCovariance, JointSpinMoments,
};
use twowell::kerr::{fock_oracle_moment, kerr_moment, single_mode_expectation, KerrExact};
use twowell::sweep::{self, Command, SweepResult, SweepRow};
use twowell::wigner::{
    jackknife_se, run_ensemble, run_trajectories, sample_initial, LinearLoss, SimConfig, Stepper,
    WignerModel,
};
use twowell::{
    preset_couplings, Config, Engine, InitialState, LossRates, MagneticPreset, Mode, Monomial,
    MomentSource, PhysicalCouplings, ThetaMode, ValidatedConfig,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn report(id: &str, name: &str, budget: Option<Duration>, check: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut o = check();
    let elapsed = start.elapsed();
    if let Some(limit) = budget {
        if elapsed > limit {
            o.passed = false;
            o.detail += &format!("; over the {:.0} s budget", limit.as_secs_f64());
        }
    }
    let status = if o.passed { "PASS" } else { "FAIL" };
    println!("{status} [{id}] {name}: {} ({:.2} s)", o.detail, elapsed.as_secs_f64());
    o.passed
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn config(preset: MagneticPreset, n: f64, edit: impl FnOnce(&mut Config)) -> ValidatedConfig {
    let mut cfg = Config::with_preset(preset, n);
    edit(&mut cfg);
    cfg.validate().expect("acceptance configs are valid")
}

fn two_step_exact(preset: MagneticPreset, n: f64) -> SweepResult {
    let cfg = config(preset, n, |c| {
        c.sweep.tau_max = 20.0;
        c.sweep.points = 401;
        c.sweep.engine = Engine::Exact;
    });
    sweep::run(Command::TwoStep, &cfg).unwrap()
}

// ---------------------------------------------------------------------------

fn revival() -> Outcome {
    let g = 0.37;
    let alpha = Complex64::from_polar(4.0, 0.3);
    let t = 2.0 * PI / g;
    let closed = single_mode_expectation(alpha, g, t);
    let closed_err = (closed - alpha).norm();

    let couplings = PhysicalCouplings {
        g11: g,
        g12: 0.0,
        g22: g,
        kappa1: 0.0,
        kappa2: 0.0,
    };
    let init = InitialState {
        n_a: 32.0,
        n_b: 32.0,
        phase: 0.3,
    };
    let oracle = fock_oracle_moment(&Monomial::annihilator(Mode::A1), &couplings, t, &init, 60).unwrap();
    let oracle_err = (oracle - alpha).norm();
    outcome(
        closed_err < 1e-12 && oracle_err < 1e-8,
        format!("closed form off by {closed_err:.1e} (tol 1e-12), Fock oracle off by {oracle_err:.1e} (tol 1e-8)"),
    )
}

fn oracle_equivalence() -> Outcome {
    let couplings = preset_couplings(MagneticPreset::B9p116G, 16.0).unwrap();
    let init = InitialState::symmetric(16.0);
    let monomials = Monomial::enumerate(4, &Mode::ALL);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let tau = 0.2 * (1.0 - rng.random::<f64>());
        let oracle = twowell::kerr::FockOracle::new(couplings, init, tau);
        for m in &monomials {
            let exact = kerr_moment(m, &couplings, tau, &init);
            worst = worst.max(rel(exact, oracle.moment(m).unwrap()));
        }
    }
    outcome(
        worst < 1e-8,
        format!("max relative error {worst:.2e} over {} monomials x 20 times (tol 1e-8)", monomials.len()),
    )
}

fn shot_noise() -> Outcome {
    let mut worst = 0.0f64;
    for n in [200.0, 2000.0] {
        let c = preset_couplings(MagneticPreset::B9p116G, n).unwrap();
        let row = sweep::evaluate_row(
            0.0,
            &KerrExact::new(c, InitialState::symmetric(n), 0.0),
            true,
            ThetaMode::Optimize,
        )
        .unwrap();
        for v in [row.s_local - 1.0, row.s_minus - 1.0, row.s_plus - 1.0, row.e_product - 1.0] {
            worst = worst.max(v.abs());
        }
        // The sum criterion is unnormalized; compare relative to its scale 2N.
        worst = worst.max(row.duan_sum.abs() / (2.0 * n));
    }
    outcome(worst < 1e-10, format!("max deviation {worst:.1e} at N = 200, 2000 (tol 1e-10)"))
}

fn steering_minima() -> Outcome {
    let mut parts = Vec::new();
    let mut passed = true;
    for (n, target) in [(200.0, 0.83), (2000.0, 0.65)] {
        let m = two_step_exact(MagneticPreset::B9p116G, n).minimum(|r| r.e_epr_product);
        let ok = (m.value - target).abs() <= 0.05;
        passed &= ok;
        parts.push(format!(
            "N={n}: min E_EPR_product {:.4} at tau {:.2} (target {target} +/- 0.05){}",
            m.value,
            m.tau,
            if ok { "" } else { " MISS" }
        ));
    }
    outcome(passed, parts.join("; "))
}

fn cross_coupling_ordering() -> Outcome {
    let none = two_step_exact(MagneticPreset::NoCrossCoupling, 200.0).minimum(|r| r.e_product);
    let with = two_step_exact(MagneticPreset::B9p116G, 200.0).minimum(|r| r.e_product);
    outcome(
        none.value < with.value,
        format!("min E_product {:.4} without cross couplings vs {:.4} for B9p116G", none.value, with.value),
    )
}

fn wigner_matches_exact() -> Outcome {
    let cfg = config(MagneticPreset::B9p116G, 200.0, |c| {
        c.sweep.tau_max = 8.0;
        c.sweep.points = 17;
        c.wigner.n_traj = 10_000;
        c.wigner.dtau = 1e-4;
    });
    let exact = sweep::run(
        Command::TwoStep,
        &ValidatedConfig {
            sweep: twowell::config::Sweep {
                engine: Engine::Exact,
                ..cfg.sweep.clone()
            },
            ..cfg.clone()
        },
    )
    .unwrap();
    let wigner = sweep::run(
        Command::TwoStep,
        &ValidatedConfig {
            sweep: twowell::config::Sweep {
                engine: Engine::Wigner,
                ..cfg.sweep.clone()
            },
            ..cfg.clone()
        },
    )
    .unwrap();
    let mut worst = (0.0f64, 0.0);
    for (e, w) in exact.rows.iter().zip(&wigner.rows) {
        let z = ((w.e_product - e.e_product) / w.stderr.unwrap().e_product).abs();
        if z > worst.0 {
            worst = (z, e.tau);
        }
    }
    outcome(
        worst.0 < 3.0,
        format!(
            "max |E_product deviation| {:.2} standard errors (at tau {}) over {} times, 1e4 trajectories (tol 3)",
            worst.0,
            worst.1,
            exact.rows.len()
        ),
    )
}

fn tunneling_entanglement() -> Outcome {
    let cfg = config(MagneticPreset::B9p116G, 200.0, |c| {
        c.preset.as_mut().unwrap().kappa = Some(1.0);
        c.sweep.tau_max = 12.0;
        c.sweep.points = 25;
        c.sweep.beam_splitter = false;
        c.wigner.n_traj = 2_000;
    });
    let r = sweep::run(Command::Dynamic, &cfg).unwrap();
    let m = r.minimum(|row| row.e_product);
    let se = m.stderr.unwrap();
    outcome(
        m.value + 3.0 * se < 1.0,
        format!("min E_product {:.4} +/- {se:.4} at tau {:.2} without beam splitter (need < 1 at 3 sigma)", m.value, m.tau),
    )
}

fn loss_dichotomy() -> Outcome {
    let run = |losses: LossRates| {
        let cfg = config(MagneticPreset::B9p116G, 2000.0, |c| {
            c.losses.gamma1 = losses.gamma1;
            c.losses.gamma12 = losses.gamma12;
            c.losses.gamma22 = losses.gamma22;
            c.sweep.tau_max = 14.0;
            c.sweep.points = 29;
            c.sweep.beam_splitter = true;
            c.wigner.n_traj = 4_000;
            c.wigner.dtau = 5e-4;
        });
        sweep::run(Command::Dynamic, &cfg).unwrap()
    };
    let min_of = |rows: &[SweepRow]| {
        let taus: Vec<f64> = rows.iter().map(|r| r.tau).collect();
        let v: Vec<f64> = rows.iter().map(|r| r.e_epr_product).collect();
        sweep::refined_minimum(&taus, &v).1
    };
    let base = run(LossRates::none());
    let cases = [
        ("gamma1=1e-2", LossRates { gamma1: 1e-2, ..LossRates::none() }, 1.0),
        ("gamma22=1e-5", LossRates { gamma22: 1e-5, ..LossRates::none() }, 1.0),
        ("gamma12=1e-3", LossRates { gamma12: 1e-3, ..LossRates::none() }, -1.0),
    ];
    let mut passed = true;
    let mut parts = vec![format!("lossless {:.4}", min_of(&base.rows))];
    for (name, losses, sign) in cases {
        let lossy = run(losses);
        let diff = min_of(&lossy.rows) - min_of(&base.rows);
        // Both runs share seeds, so the difference is resampled block by block.
        let paired: Vec<f64> = lossy
            .replicates
            .as_ref()
            .unwrap()
            .iter()
            .zip(base.replicates.as_ref().unwrap())
            .map(|(l, b)| min_of(l) - min_of(b))
            .collect();
        let se = jackknife_se(&paired);
        let ok = sign * diff > 3.0 * se;
        passed &= ok;
        parts.push(format!(
            "{name} {:.4} ({}{:.4} +/- {se:.4})",
            min_of(&lossy.rows),
            if diff >= 0.0 { "+" } else { "" },
            diff
        ));
    }
    outcome(passed, format!("min E_EPR_product, N=2000: {}", parts.join(", ")))
}

// ---------------------------------------------------------------------------
// Property suites

fn conjugation_symmetry() -> Outcome {
    let c = preset_couplings(MagneticPreset::B9p116G, 40.0).unwrap();
    let init = InitialState::symmetric(40.0);
    let mut worst = 0.0f64;
    for tau in [0.3, 2.0, 7.5] {
        for m in Monomial::enumerate(4, &Mode::ALL) {
            let v = kerr_moment(&m, &c, tau, &init);
            let w = kerr_moment(&m.adjoint(), &c, tau, &init);
            worst = worst.max(rel(w, v.conj()));
        }
    }
    outcome(worst < 1e-12, format!("max |<m+> - <m>*| relative {worst:.1e} (tol 1e-12)"))
}

fn number_conservation() -> Outcome {
    // Beam splitter: total number in equals total number out for arbitrary
    // Gaussian-sampled states.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let init = InitialState::symmetric(60.0);
    let c = preset_couplings(MagneticPreset::B9p116G, 60.0).unwrap();
    let mut bs_worst = 0.0f64;
    for _ in 0..5 {
        let tau = rng.random_range(0.0..10.0);
        let src = KerrExact::new(c, init, tau);
        let out = BeamSplitterSource::new(src);
        let total = |s: &dyn MomentSource| -> Complex64 {
            Mode::ALL.iter().map(|m| s.moment(&Monomial::number(*m)).unwrap()).sum()
        };
        bs_worst = bs_worst.max(rel(total(&out), total(&src)));
    }
    // Wigner trajectories with tunneling and no loss.
    let model = WignerModel::new(c.with_tunneling(1.0), LossRates::none(), LinearLoss::Symmetric);
    let mut state = sample_initial(&init, &mut rng);
    let n0 = state.total_number();
    let dw = [Complex64::new(0.0, 0.0); 8];
    for _ in 0..100_000 {
        state.z = model.step(Stepper::Midpoint, &state.z, 1e-4, &dw);
    }
    let drift = (state.total_number() - n0).abs() / 60.0;
    outcome(
        bs_worst < 1e-12 && drift < 1e-6,
        format!("beam splitter relative {bs_worst:.1e} (tol 1e-12); trajectory drift {drift:.1e} N over tau = 10 (tol 1e-6)"),
    )
}

fn random_joint(rng: &mut ChaCha8Rng) -> JointSpinMoments {
    let vc = rng.random_range(0.5..5.0);
    let vd = rng.random_range(0.5..5.0);
    let pc = rng.random_range(0.5..5.0);
    let pd = rng.random_range(0.5..5.0);
    JointSpinMoments {
        theta: 0.0,
        mean_jy_c: rng.random_range(1.0..10.0),
        mean_jy_d: rng.random_range(1.0..10.0),
        var_c_theta: vc,
        var_d_theta: vd,
        cov_theta: rng.random_range(-0.9..0.9) * (vc * vd).sqrt(),
        var_c_perp: pc,
        var_d_perp: pd,
        cov_perp: rng.random_range(-0.9..0.9) * (pc * pd).sqrt(),
    }
}

fn angle_and_gain_optimality() -> Outcome {
    let c = preset_couplings(MagneticPreset::B9p116G, 200.0).unwrap();
    let init = InitialState::symmetric(200.0);
    let mut angle_ok = true;
    for tau in [1.0, 4.0, 9.0] {
        let joint = JointCovariance::measure(&BeamSplitterSource::new(KerrExact::new(c, init, tau))).unwrap();
        let best = evaluate(&joint, ThetaMode::Optimize).unwrap();
        for k in 0..720 {
            let theta = -PI / 2.0 + PI * k as f64 / 720.0;
            let r = evaluate(&joint, ThetaMode::Fixed(theta)).unwrap();
            angle_ok &= best.e_product <= r.e_product + 1e-12;
            angle_ok &= best.e_epr_product <= r.e_epr_product + 1e-12;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut gain_ok = true;
    for _ in 0..200 {
        let j = random_joint(&mut rng);
        let g = optimal_gains(&j).unwrap();
        for d in [-1e-3, 1e-3] {
            gain_ok &= j.inference_minus(g.g) <= j.inference_minus(g.g + d);
            gain_ok &= j.inference_plus(g.g_prime) <= j.inference_plus(g.g_prime + d);
        }
    }
    outcome(
        angle_ok && gain_ok,
        format!("theta* beats a 720-point scan: {angle_ok}; gains beat +/-1e-3 perturbations on 200 random moment sets: {gain_ok}"),
    )
}

fn determinism_and_merge() -> Outcome {
    let c = preset_couplings(MagneticPreset::B9p116G, 200.0).unwrap().with_tunneling(0.5);
    let losses = LossRates {
        gamma1: 1e-2,
        gamma12: 1e-3,
        gamma22: 1e-4,
    };
    let model = WignerModel::new(c, losses, LinearLoss::Symmetric);
    let init = InitialState::symmetric(200.0);
    let sim = SimConfig {
        dtau: 1e-3,
        n_traj: 200,
        seed: 42,
        stepper: Stepper::Midpoint,
        blocks: 2,
    };
    let taus = [0.0, 0.5, 1.0];
    let a = run_ensemble(&model, &init, &sim, &taus).unwrap();
    let b = run_ensemble(&model, &init, &sim, &taus).unwrap();
    let first = run_trajectories(&model, &init, &sim, &taus, 0..100).unwrap();
    let second = run_trajectories(&model, &init, &sim, &taus, 100..200).unwrap();
    let merged_ok = (0..taus.len()).all(|i| {
        let mut m = first[i].clone();
        m.merge(&second[i]);
        m == a.total(i)
    });

    let cfg = config(MagneticPreset::B9p116G, 200.0, |c| {
        c.sweep.tau_max = 1.0;
        c.sweep.points = 5;
        c.wigner.n_traj = 100;
        c.wigner.blocks = 4;
        c.wigner.dtau = 1e-3;
        c.wigner.seed = 3;
    });
    let raw = {
        let mut c = Config::with_preset(MagneticPreset::B9p116G, 200.0);
        c.wigner.seed = 3;
        c
    };
    let csv = |v: &ValidatedConfig| sweep::csv_string(&sweep::run(Command::Dynamic, v).unwrap(), &raw, v).unwrap();
    let csv_ok = csv(&cfg) == csv(&cfg);
    outcome(
        a == b && merged_ok && csv_ok,
        format!("repeat run bit-identical: {}; half-ensembles merge to the whole: {merged_ok}; CSV byte-identical: {csv_ok}", a == b),
    )
}

fn step_halving() -> Outcome {
    let init = InitialState::symmetric(200.0);
    let taus: Vec<f64> = (0..=6).map(|k| 0.5 * k as f64).collect();
    let e_product = |t: &twowell::wigner::MomentTable| {
        evaluate(
            &JointCovariance::measure(&BeamSplitterSource::new(t)).unwrap(),
            ThetaMode::Optimize,
        )
        .unwrap()
        .e_product
    };
    let mut worst = 0.0f64;
    for (kappa, losses) in [
        (1.0, LossRates::none()),
        (
            0.0,
            LossRates {
                gamma1: 1e-2,
                gamma12: 1e-3,
                gamma22: 1e-3,
            },
        ),
    ] {
        let c = preset_couplings(MagneticPreset::B9p116G, 200.0).unwrap().with_tunneling(kappa);
        let model = WignerModel::new(c, losses, LinearLoss::Symmetric);
        let sim = |dtau| SimConfig {
            dtau,
            n_traj: 10_000,
            ..SimConfig::default()
        };
        let coarse = run_ensemble(&model, &init, &sim(1e-3), &taus).unwrap();
        let fine = run_ensemble(&model, &init, &sim(5e-4), &taus).unwrap();
        for i in 0..taus.len() {
            let se = jackknife_se(&coarse.jackknife_tables(i).iter().map(e_product).collect::<Vec<_>>());
            let change = (e_product(&coarse.table(i)) - e_product(&fine.table(i))).abs();
            if se > 0.0 {
                worst = worst.max(change / se);
            }
        }
    }
    outcome(
        worst < 1.0,
        format!("halving dtau 1e-3 -> 5e-4 moves E_product by at most {worst:.2} standard errors at 1e4 trajectories (tol 1)"),
    )
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let results = [
        report("1", "revival exactness", secs(1), revival),
        report("2", "closed form vs Fock oracle", secs(10), oracle_equivalence),
        report("3", "shot-noise baselines", secs(1), shot_noise),
        report("4", "two-step E_EPR_product minima", secs(60), steering_minima),
        report("5", "cross-coupling ordering", secs(60), cross_coupling_ordering),
        report("6", "wigner/exact agreement", secs(600), wigner_matches_exact),
        report("7", "tunneling-generated entanglement", None, tunneling_entanglement),
        report("8", "loss dichotomy", None, loss_dichotomy),
        report("9a", "conjugation symmetry", None, conjugation_symmetry),
        report("9b", "number conservation", None, number_conservation),
        report("9c", "angle and gain optimality", None, angle_and_gain_optimality),
        report("9d", "seed determinism and merge", None, determinism_and_merge),
        report("9e", "step-halving convergence", None, step_halving),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
