//! Local spin squeezing of one well as the interactions act, exact engine.

use twowell::kerr::KerrExact;
use twowell::spin::{optimal_angle, spin_moments, squeezing};
use twowell::{preset_couplings, InitialState, MagneticPreset, Site};

fn main() -> twowell::Result<()> {
    let n = 200.0;
    let couplings = preset_couplings(MagneticPreset::B9p116G, n)?;
    let init = InitialState::symmetric(n);

    println!("{:>6} {:>9} {:>9}", "tau", "theta", "S");
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..=40 {
        let tau = 0.5 * k as f64;
        let m = spin_moments(&KerrExact::new(couplings, init, tau), Site::A)?;
        let theta = optimal_angle(&m);
        let s = squeezing(&m, theta)?;
        if s < best.0 {
            best = (s, tau);
        }
        println!("{tau:6.2} {theta:9.4} {s:9.5}");
    }
    println!("smallest S over the scan: {:.4} at tau = {}", best.0, best.1);
    Ok(())
}
