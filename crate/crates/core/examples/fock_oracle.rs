//! Closed-form Kerr moments checked against brute-force evolution in a
//! truncated Fock basis.

use twowell::kerr::{kerr_moment, FockOracle};
use twowell::{preset_couplings, InitialState, MagneticPreset, Mode, Monomial, MomentSource};

fn main() -> twowell::Result<()> {
    let n = 16.0;
    let couplings = preset_couplings(MagneticPreset::B9p116G, n)?;
    let init = InitialState::symmetric(n);
    let monomials = Monomial::enumerate(4, &Mode::ALL);

    for tau in [0.02, 0.1, 1.0, 5.0] {
        let oracle = FockOracle::new(couplings, init, tau);
        let mut worst = (0.0f64, Monomial::IDENTITY);
        for m in &monomials {
            let reference = oracle.moment(m)?;
            let err = (kerr_moment(m, &couplings, tau, &init) - reference).norm() / (reference.norm() + 1e-12);
            if err > worst.0 {
                worst = (err, *m);
            }
        }
        println!("tau {tau:5}: max relative error {:.2e} ({} monomials, worst {})", worst.0, monomials.len(), worst.1);
    }

    let a1 = Monomial::annihilator(Mode::A1);
    let hop = Monomial::hop(Mode::A2, Mode::A1);
    println!("<a1>(tau=1)    = {:.6}", kerr_moment(&a1, &couplings, 1.0, &init));
    println!("<a2+ a1>(tau=1) = {:.6}", kerr_moment(&hop, &couplings, 1.0, &init));
    Ok(())
}
