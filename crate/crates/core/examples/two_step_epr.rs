//! Interaction-generated squeezing turned into two-site entanglement by a
//! beam splitter, for two atom numbers and with or without cross coupling.

use twowell::sweep::{self, Command};
use twowell::{Config, MagneticPreset};

fn main() -> twowell::Result<()> {
    let cases = [
        (MagneticPreset::B9p116G, 200.0),
        (MagneticPreset::B9p116G, 2000.0),
        (MagneticPreset::NoCrossCoupling, 200.0),
        (MagneticPreset::B9p086G, 2000.0),
    ];
    println!("{:<16} {:>6} {:>10} {:>8} {:>14} {:>8}", "preset", "N", "E_product", "tau", "E_EPR_product", "tau");
    for (preset, n) in cases {
        let mut cfg = Config::with_preset(preset, n);
        cfg.sweep.tau_max = 20.0;
        cfg.sweep.points = 401;
        let result = sweep::run(Command::TwoStep, &cfg.validate()?)?;
        let product = result.minimum(|r| r.e_product);
        let epr = result.minimum(|r| r.e_epr_product);
        println!(
            "{:<16} {n:>6} {:>10.4} {:>8.2} {:>14.4} {:>8.2}",
            format!("{preset:?}"),
            product.value,
            product.tau,
            epr.value,
            epr.tau
        );
    }
    Ok(())
}
