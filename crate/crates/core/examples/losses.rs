//! Effect of one-body, inter-species and intra-species two-body loss on the
//! best EPR-steering product.

use twowell::sweep::{self, Command};
use twowell::{Config, MagneticPreset};

fn main() -> twowell::Result<()> {
    let cases = [
        ("no loss", 0.0, 0.0, 0.0),
        ("gamma1 = 1e-2", 1e-2, 0.0, 0.0),
        ("gamma12 = 1e-3", 0.0, 1e-3, 0.0),
        ("gamma22 = 1e-5", 0.0, 0.0, 1e-5),
    ];
    for (label, gamma1, gamma12, gamma22) in cases {
        let mut cfg = Config::with_preset(MagneticPreset::B9p116G, 2000.0);
        cfg.losses.gamma1 = gamma1;
        cfg.losses.gamma12 = gamma12;
        cfg.losses.gamma22 = gamma22;
        cfg.sweep.tau_max = 14.0;
        cfg.sweep.points = 29;
        cfg.wigner.n_traj = 1000;
        cfg.wigner.dtau = 5e-4;
        let result = sweep::run(Command::Dynamic, &cfg.validate()?)?;
        let m = result.minimum(|r| r.e_epr_product);
        println!(
            "{label:<15} min E_EPR_product {:.3} +/- {:.3} at tau {:.2}",
            m.value,
            m.stderr.unwrap_or(f64::NAN),
            m.tau
        );
    }
    Ok(())
}
