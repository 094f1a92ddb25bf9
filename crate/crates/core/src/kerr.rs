//! Exact moments for coherent states evolving under the diagonal Kerr
//! Hamiltonian `H = ½ Σ_ij g_ij a_i† a_j† a_j a_i` (no tunneling).
//!
//! Each well evolves independently, so a four-mode moment is the product of
//! its per-well factors. For one well with coherent amplitudes `β1, β2` and a
//! monomial `a1†^{p1} a2†^{p2} a1^{q1} a2^{q2}`, shifting the Fock sum by the
//! exponents gives
//!
//! ```text
//! β1*^{p1} β1^{q1} β2*^{p2} β2^{q2}
//!     × exp[ |β1|² (e^{iΩ1 τ} − 1) + |β2|² (e^{iΩ2 τ} − 1) + i c τ ]
//! ```
//!
//! with `d = p − q`, `Ω1 = g11 d1 + g12 d2`, `Ω2 = g12 d1 + g22 d2` and
//! `c = ½ g11 [p1(p1−1) − q1(q1−1)] + ½ g22 [p2(p2−1) − q2(q2−1)] + g12 (p1 p2 − q1 q2)`.
//!
//! [`FockOracle`] evaluates the same expectations by brute-force summation in
//! a truncated Fock basis and is used to check the closed form.

use num_complex::Complex64;

use crate::config::{InitialState, PhysicalCouplings};
use crate::error::{Error, Result};
use crate::ops::{Mode, Monomial, MomentSource, Site};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `⟨a(t)⟩ = α exp[|α|² (e^{−igt} − 1)]` for a single Kerr mode.
pub fn single_mode_expectation(alpha: Complex64, g: f64, t: f64) -> Complex64 {
    let n = alpha.norm_sqr();
    alpha * (n * ((-I * g * t).exp() - 1.0)).exp()
}

/// `⟨a_i(t)⟩` for two modes prepared in `|α/√2⟩|α/√2⟩`.
pub fn two_mode_first_moment(
    alpha: Complex64,
    couplings: &PhysicalCouplings,
    i: usize,
    t: f64,
) -> Complex64 {
    assert!(i == 1 || i == 2, "mode index must be 1 or 2");
    let half = alpha.norm_sqr() / 2.0;
    let f1 = (half * ((-I * couplings.g(i, 1) * t).exp() - 1.0)).exp();
    let f2 = (half * ((-I * couplings.g(i, 2) * t).exp() - 1.0)).exp();
    alpha / 2f64.sqrt() * f1 * f2
}

fn site_moment(
    m: &Monomial,
    site: Site,
    couplings: &PhysicalCouplings,
    tau: f64,
    initial: &InitialState,
) -> Complex64 {
    let [m1, m2] = site.modes();
    let (p1, q1) = (
        i32::from(m.create[m1.index()]),
        i32::from(m.annihilate[m1.index()]),
    );
    let (p2, q2) = (
        i32::from(m.create[m2.index()]),
        i32::from(m.annihilate[m2.index()]),
    );
    if p1 + q1 + p2 + q2 == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let b1 = initial.amplitude(m1);
    let b2 = initial.amplitude(m2);
    let (d1, d2) = (f64::from(p1 - q1), f64::from(p2 - q2));
    let omega1 = couplings.g11 * d1 + couplings.g12 * d2;
    let omega2 = couplings.g12 * d1 + couplings.g22 * d2;
    let pair = |p: i32, q: i32| f64::from(p * (p - 1) - q * (q - 1)) / 2.0;
    let c = couplings.g11 * pair(p1, q1)
        + couplings.g22 * pair(p2, q2)
        + couplings.g12 * f64::from(p1 * p2 - q1 * q2);

    let prefactor = b1.conj().powi(p1) * b1.powi(q1) * b2.conj().powi(p2) * b2.powi(q2);
    let exponent = b1.norm_sqr() * ((I * omega1 * tau).exp() - 1.0)
        + b2.norm_sqr() * ((I * omega2 * tau).exp() - 1.0)
        + I * c * tau;
    prefactor * exponent.exp()
}

/// Exact expectation of a normal-ordered four-mode monomial at time `tau`.
///
/// Tunneling rates in `couplings` are ignored: this engine covers the
/// nonlinear stage only.
pub fn kerr_moment(
    m: &Monomial,
    couplings: &PhysicalCouplings,
    tau: f64,
    initial: &InitialState,
) -> Complex64 {
    site_moment(m, Site::A, couplings, tau, initial)
        * site_moment(m, Site::B, couplings, tau, initial)
}

/// Closed-form moment source at a fixed time.
#[derive(Debug, Clone, Copy)]
pub struct KerrExact {
    pub couplings: PhysicalCouplings,
    pub initial: InitialState,
    pub tau: f64,
}

impl KerrExact {
    pub fn new(couplings: PhysicalCouplings, initial: InitialState, tau: f64) -> Self {
        KerrExact {
            couplings,
            initial,
            tau,
        }
    }
}

impl MomentSource for KerrExact {
    fn moment(&self, m: &Monomial) -> Result<Complex64> {
        Ok(kerr_moment(m, &self.couplings, self.tau, &self.initial))
    }
}

// ---------------------------------------------------------------------------
// Truncated Fock-basis oracle

/// Default cutoff `ceil(n̄ + 10 √n̄)` for a coherent mode of mean number `n̄`,
/// widened for small `n̄` until the Poisson tail is well below
/// [`MAX_TAIL_MASS`].
pub fn default_cutoff(mean_number: f64) -> usize {
    let mut cutoff = ((mean_number + 10.0 * mean_number.sqrt()).ceil() as usize).max(12);
    while poisson_tail(mean_number, cutoff) > 0.01 * MAX_TAIL_MASS {
        cutoff += 1;
    }
    cutoff
}

/// `P(n > cutoff)` for a Poisson distribution of mean `mean`.
fn poisson_tail(mean: f64, cutoff: usize) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    let pmf = |n: usize| (n as f64 * mean.ln() - mean - ln_factorial(n)).exp();
    let extra = cutoff + 50 + (10.0 * mean.sqrt()) as usize;
    (cutoff + 1..=extra).map(pmf).sum()
}

/// Largest discarded Poisson probability mass tolerated by the oracle.
pub const MAX_TAIL_MASS: f64 = 1e-12;

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Coherent-state Fock amplitudes `C_n`, `n = 0..=cutoff`, and the discarded
/// probability mass beyond the cutoff.
fn coherent_amplitudes(beta: Complex64, cutoff: usize) -> (Vec<Complex64>, f64) {
    let nbar = beta.norm_sqr();
    let phase = beta.arg();
    let amp = |n: usize| -> Complex64 {
        if nbar == 0.0 {
            return if n == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        let ln_mag = -nbar / 2.0 + n as f64 * nbar.sqrt().ln() - 0.5 * ln_factorial(n);
        Complex64::from_polar(ln_mag.exp(), phase * n as f64)
    };
    let table: Vec<Complex64> = (0..=cutoff).map(amp).collect();
    let extra = cutoff + 50 + (10.0 * nbar.sqrt()) as usize;
    let tail: f64 = (cutoff + 1..=extra).map(|n| amp(n).norm_sqr()).sum();
    (table, tail)
}

fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let (lo, hi) = xs.split_at(xs.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

fn sqrt_falling(n: usize, k: usize) -> f64 {
    // sqrt(n! / (n-k)!)
    ((n - k + 1)..=n).map(|j| j as f64).product::<f64>().sqrt()
}

/// Brute-force moments from the truncated two-mode Fock expansion of each well.
///
/// The Kerr Hamiltonian is diagonal in the joint Fock basis, so each basis
/// state only acquires the phase `exp[−iτ(½g11 n1(n1−1) + g12 n1 n2 + ½g22 n2(n2−1))]`.
#[derive(Debug, Clone)]
pub struct FockOracle {
    pub couplings: PhysicalCouplings,
    pub initial: InitialState,
    pub tau: f64,
    /// Per-mode photon-number cutoff; `None` uses [`default_cutoff`].
    pub cutoff: Option<usize>,
}

impl FockOracle {
    pub fn new(couplings: PhysicalCouplings, initial: InitialState, tau: f64) -> Self {
        FockOracle {
            couplings,
            initial,
            tau,
            cutoff: None,
        }
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    fn energy(&self, n1: usize, n2: usize) -> f64 {
        let (n1, n2) = (n1 as f64, n2 as f64);
        0.5 * self.couplings.g11 * n1 * (n1 - 1.0)
            + self.couplings.g12 * n1 * n2
            + 0.5 * self.couplings.g22 * n2 * (n2 - 1.0)
    }

    fn site(&self, m: &Monomial, site: Site) -> Result<Complex64> {
        let [m1, m2] = site.modes();
        let (p1, q1) = (
            usize::from(m.create[m1.index()]),
            usize::from(m.annihilate[m1.index()]),
        );
        let (p2, q2) = (
            usize::from(m.create[m2.index()]),
            usize::from(m.annihilate[m2.index()]),
        );
        if p1 + q1 + p2 + q2 == 0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let b1 = self.initial.amplitude(m1);
        let b2 = self.initial.amplitude(m2);
        let cut1 = self.cutoff.unwrap_or_else(|| default_cutoff(b1.norm_sqr()));
        let cut2 = self.cutoff.unwrap_or_else(|| default_cutoff(b2.norm_sqr()));
        let (c1, tail1) = coherent_amplitudes(b1, cut1);
        let (c2, tail2) = coherent_amplitudes(b2, cut2);
        let tail = tail1.max(tail2);
        if tail > MAX_TAIL_MASS {
            return Err(Error::Truncation {
                cutoff: cut1.min(cut2),
                tail_mass: tail,
            });
        }

        // Ket |n1 n2>, bra <n1 - q1 + p1, n2 - q2 + p2|.
        let mut terms = Vec::with_capacity((cut1 + 1) * (cut2 + 1));
        for n1 in q1..=cut1 {
            let k1 = n1 - q1 + p1;
            if k1 > cut1 {
                break;
            }
            let e1 = sqrt_falling(n1, q1) * sqrt_falling(k1, p1);
            for n2 in q2..=cut2 {
                let k2 = n2 - q2 + p2;
                if k2 > cut2 {
                    break;
                }
                let e2 = sqrt_falling(n2, q2) * sqrt_falling(k2, p2);
                let phase = (self.energy(k1, k2) - self.energy(n1, n2)) * self.tau;
                let weight = c1[k1].conj() * c2[k2].conj() * c1[n1] * c2[n2];
                terms.push(weight * e1 * e2 * Complex64::from_polar(1.0, phase));
            }
        }
        Ok(pairwise_sum(&terms))
    }
}

impl MomentSource for FockOracle {
    fn moment(&self, m: &Monomial) -> Result<Complex64> {
        Ok(self.site(m, Site::A)? * self.site(m, Site::B)?)
    }
}

/// Convenience: `⟨a_mode⟩` from the oracle.
pub fn fock_oracle_moment(
    m: &Monomial,
    couplings: &PhysicalCouplings,
    tau: f64,
    initial: &InitialState,
    cutoff: usize,
) -> Result<Complex64> {
    FockOracle::new(*couplings, *initial, tau)
        .with_cutoff(cutoff)
        .moment(m)
}

/// Mean atom number in `mode` for the initial state (conserved by the Kerr stage).
pub fn mean_number(initial: &InitialState, mode: Mode) -> f64 {
    initial.amplitude(mode).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{preset_couplings, MagneticPreset};
    use std::f64::consts::PI;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn zero_coupling_is_free_evolution() {
        let alpha = Complex64::new(1.3, -0.4);
        for t in [0.0, 0.7, 12.0] {
            assert_eq!(single_mode_expectation(alpha, 0.0, t), alpha);
        }
    }

    #[test]
    fn single_mode_revival() {
        let alpha = Complex64::new(4.0, 0.0);
        let g = 0.37;
        let v = single_mode_expectation(alpha, g, 2.0 * PI / g);
        assert!((v - alpha).norm() < 1e-12 * alpha.norm());
    }

    #[test]
    fn two_mode_first_moment_without_coupling() {
        let c = PhysicalCouplings {
            g11: 0.0,
            g12: 0.0,
            g22: 0.0,
            kappa1: 0.0,
            kappa2: 0.0,
        };
        let alpha = Complex64::new(3.0, 1.0);
        for i in [1, 2] {
            let v = two_mode_first_moment(alpha, &c, i, 5.0);
            assert!(close(v, alpha / 2f64.sqrt(), 1e-15));
        }
    }

    #[test]
    fn two_mode_first_moment_revival() {
        let c = PhysicalCouplings {
            g11: 0.5,
            g12: 0.25,
            g22: 0.5,
            kappa1: 0.0,
            kappa2: 0.0,
        };
        // g11 t = 2π and g12 t = π... pick t where both are multiples of 2π
        let t = 2.0 * PI / 0.25;
        let alpha = Complex64::new(3.0, 0.0);
        let v = two_mode_first_moment(alpha, &c, 1, t);
        assert!(close(v, alpha / 2f64.sqrt(), 1e-11));
    }

    #[test]
    fn kerr_moment_matches_two_mode_formula() {
        let c = preset_couplings(MagneticPreset::B9p116G, 16.0).unwrap();
        let init = InitialState::symmetric(16.0);
        let alpha = Complex64::new(4.0, 0.0);
        for tau in [0.01, 0.3, 2.0] {
            let a1 = kerr_moment(&Monomial::annihilator(Mode::A1), &c, tau, &init);
            let a2 = kerr_moment(&Monomial::annihilator(Mode::A2), &c, tau, &init);
            assert!(close(a1, two_mode_first_moment(alpha, &c, 1, tau), 1e-14));
            assert!(close(a2, two_mode_first_moment(alpha, &c, 2, tau), 1e-14));
        }
    }

    #[test]
    fn number_operator_is_conserved() {
        let c = preset_couplings(MagneticPreset::B9p116G, 200.0).unwrap();
        let init = InitialState::symmetric(200.0);
        for tau in [0.0, 1.0, 17.0] {
            let n = kerr_moment(&Monomial::number(Mode::A1), &c, tau, &init);
            assert!(close(n, Complex64::new(100.0, 0.0), 1e-14));
        }
    }

    #[test]
    fn hop_at_zero_time_is_overlap() {
        let c = preset_couplings(MagneticPreset::B9p116G, 200.0).unwrap();
        let init = InitialState::symmetric(200.0);
        let v = kerr_moment(&Monomial::hop(Mode::A2, Mode::A1), &c, 0.0, &init);
        assert!(close(v, Complex64::new(100.0, 0.0), 1e-15));
    }

    #[test]
    fn oracle_zero_time_first_moment() {
        let c = preset_couplings(MagneticPreset::B9p116G, 16.0).unwrap();
        let init = InitialState::symmetric(16.0);
        let v = fock_oracle_moment(&Monomial::annihilator(Mode::A1), &c, 0.0, &init, 50).unwrap();
        assert!((v - Complex64::new(8f64.sqrt(), 0.0)).norm() < 1e-10);
    }

    #[test]
    fn oracle_number_product_is_conserved() {
        let c = preset_couplings(MagneticPreset::B9p116G, 16.0).unwrap();
        let init = InitialState::symmetric(16.0);
        let m = Monomial::number(Mode::A1) * Monomial::number(Mode::A2);
        let v = fock_oracle_moment(&m, &c, 0.123, &init, 50).unwrap();
        assert!((v - Complex64::new(64.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn oracle_revival_with_commensurate_couplings() {
        let c = PhysicalCouplings {
            g11: 0.5,
            g12: 0.25,
            g22: 1.0,
            kappa1: 0.0,
            kappa2: 0.0,
        };
        let init = InitialState::symmetric(16.0);
        let tau = 2.0 * PI / 0.25;
        let v = fock_oracle_moment(&Monomial::annihilator(Mode::A1), &c, tau, &init, 60).unwrap();
        assert!((v - Complex64::new(8f64.sqrt(), 0.0)).norm() < 1e-8);
    }

    #[test]
    fn oracle_rejects_small_cutoff() {
        let c = preset_couplings(MagneticPreset::B9p116G, 200.0).unwrap();
        let init = InitialState::symmetric(200.0);
        let err = fock_oracle_moment(&Monomial::annihilator(Mode::A1), &c, 0.1, &init, 100)
            .unwrap_err();
        match err {
            Error::Truncation { tail_mass, .. } => assert!(tail_mass > MAX_TAIL_MASS),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cross_site_moment_factorizes() {
        let c = preset_couplings(MagneticPreset::B9p086G, 50.0).unwrap();
        let init = InitialState {
            n_a: 50.0,
            n_b: 30.0,
            phase: 0.3,
        };
        let ma = Monomial::hop(Mode::A2, Mode::A1);
        let mb = Monomial::new([0, 0, 1, 0], [0, 0, 0, 2]);
        let joint = Monomial::new([0, 1, 1, 0], [1, 0, 0, 2]);
        let tau = 0.77;
        let lhs = kerr_moment(&joint, &c, tau, &init);
        let rhs = kerr_moment(&ma, &c, tau, &init) * kerr_moment(&mb, &c, tau, &init);
        assert!(close(lhs, rhs, 1e-14));
    }
}
