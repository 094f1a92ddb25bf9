//! Full dynamics with tunneling from stochastic phase-space trajectories,
//! with and without the final beam splitter.

use twowell::sweep::{self, Command};
use twowell::{Config, MagneticPreset};

fn main() -> twowell::Result<()> {
    for kappa in [0.01, 1.0] {
        for beam_splitter in [false, true] {
            let mut cfg = Config::with_preset(MagneticPreset::B9p116G, 200.0);
            cfg.preset.as_mut().unwrap().kappa = Some(kappa);
            cfg.sweep.tau_max = 8.0;
            cfg.sweep.points = 17;
            cfg.sweep.beam_splitter = beam_splitter;
            cfg.wigner.n_traj = 2000;
            cfg.wigner.dtau = 5e-4;
            let result = sweep::run(Command::Dynamic, &cfg.validate()?)?;
            let m = result.minimum(|r| r.e_product);
            println!(
                "kappa {kappa:<5} beam splitter {:<3}: min E_product {:.3} +/- {:.3} at tau {:.2}",
                if beam_splitter { "on" } else { "off" },
                m.value,
                m.stderr.unwrap_or(f64::NAN),
                m.tau
            );
        }
    }
    Ok(())
}
