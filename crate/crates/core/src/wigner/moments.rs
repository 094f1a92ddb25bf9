//! Monomial catalogue and the symmetric-to-normal ordering conversion.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ops::{Mode, Monomial, MomentSource, NUM_MODES};

/// Highest total order tracked by the accumulators.
pub const MAX_ORDER: u32 = 4;

/// Number of monomials of order ≤ 4 in four modes and their conjugates.
pub const MONOMIAL_COUNT: usize = 495;

struct Catalogue {
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    /// For each normal-ordered monomial, its expansion in symmetric-ordered
    /// averages as `(coefficient, catalogue index)`.
    conversion: Vec<Vec<(f64, usize)>>,
}

fn catalogue() -> &'static Catalogue {
    static CATALOGUE: OnceLock<Catalogue> = OnceLock::new();
    CATALOGUE.get_or_init(|| {
        let monomials = Monomial::enumerate(MAX_ORDER, &Mode::ALL);
        assert_eq!(monomials.len(), MONOMIAL_COUNT);
        let index: HashMap<Monomial, usize> =
            monomials.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let conversion = monomials
            .iter()
            .map(|m| {
                normal_in_symmetric(m)
                    .into_iter()
                    .map(|(c, s)| (c, index[&s]))
                    .collect()
            })
            .collect();
        Catalogue {
            monomials,
            index,
            conversion,
        }
    })
}

/// All tracked monomials, in accumulator order.
pub fn monomials() -> &'static [Monomial] {
    &catalogue().monomials
}

/// Position of `m` in [`monomials`], if tracked.
pub fn moment_index(m: &Monomial) -> Option<usize> {
    catalogue().index.get(m).copied()
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * f64::from(i))
}

/// Single-mode identity
/// `a†^p a^q = Σ_k (−1/2)^k k! C(p,k) C(q,k) {a†^(p−k) a^(q−k)}_sym`.
fn single_mode_terms(p: u32, q: u32) -> Vec<(f64, u32, u32)> {
    (0..=p.min(q))
        .map(|k| {
            let c = (-0.5f64).powi(k as i32) * factorial(k) * binomial(p, k) * binomial(q, k);
            (c, p - k, q - k)
        })
        .collect()
}

/// Expansion of a normal-ordered monomial in symmetric-ordered monomials.
/// Distinct modes commute, so the expansion factorizes over modes.
pub fn normal_in_symmetric(m: &Monomial) -> Vec<(f64, Monomial)> {
    let mut out = vec![(1.0, Monomial::IDENTITY)];
    for mode in 0..NUM_MODES {
        let terms = single_mode_terms(u32::from(m.create[mode]), u32::from(m.annihilate[mode]));
        let mut next = Vec::with_capacity(out.len() * terms.len());
        for (c0, base) in &out {
            for &(c1, p, q) in &terms {
                let mut s = *base;
                s.create[mode] = p as u8;
                s.annihilate[mode] = q as u8;
                next.push((c0 * c1, s));
            }
        }
        out = next;
    }
    out
}

/// Normal-ordered moments from symmetric-ordered averages indexed like
/// [`monomials`].
pub fn symmetric_to_normal(symmetric: &[Complex64]) -> Vec<Complex64> {
    catalogue()
        .conversion
        .iter()
        .map(|terms| terms.iter().map(|&(c, i)| symmetric[i] * c).sum())
        .collect()
}

/// Normal-ordered moments of order ≤ 4 estimated from an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    normal: Vec<Complex64>,
}

impl MomentTable {
    /// Builds the table from symmetric-ordered averages.
    pub fn from_symmetric(symmetric: &[Complex64]) -> Self {
        assert_eq!(symmetric.len(), MONOMIAL_COUNT);
        MomentTable {
            normal: symmetric_to_normal(symmetric),
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.normal
    }
}

impl MomentSource for MomentTable {
    fn moment(&self, m: &Monomial) -> Result<Complex64> {
        moment_index(m)
            .map(|i| self.normal[i])
            .ok_or(Error::MissingMoment(*m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_is_complete() {
        assert_eq!(monomials().len(), MONOMIAL_COUNT);
        for (i, m) in monomials().iter().enumerate() {
            assert_eq!(moment_index(m), Some(i));
            assert!(moment_index(&m.adjoint()).is_some());
        }
    }

    #[test]
    fn number_and_pair_identities() {
        let n = Monomial::number(Mode::A1);
        let terms = normal_in_symmetric(&n);
        assert_eq!(terms, vec![(1.0, n), (-0.5, Monomial::IDENTITY)]);

        let mut pair = Monomial::IDENTITY;
        pair.create[0] = 2;
        pair.annihilate[0] = 2;
        let terms = normal_in_symmetric(&pair);
        assert_eq!(terms, vec![(1.0, pair), (-2.0, n), (0.5, Monomial::IDENTITY)]);
    }

    #[test]
    fn distinct_modes_need_no_correction() {
        let m = Monomial::hop(Mode::B1, Mode::A2);
        assert_eq!(normal_in_symmetric(&m), vec![(1.0, m)]);
    }

    #[test]
    fn coherent_state_symmetric_averages_convert_to_powers() {
        // Symmetric averages of a coherent state are the averages of
        // z*^p z^q over z = α + δ with Gaussian δ, ⟨|δ|²⟩ = 1/2, computed
        // exactly: ⟨z*^p z^q⟩ = Σ_k k! C(p,k) C(q,k) α*^(p−k) α^(q−k) (1/2)^k.
        let alpha = [
            Complex64::new(1.3, -0.4),
            Complex64::new(-0.7, 0.9),
            Complex64::new(0.2, 2.0),
            Complex64::new(-1.1, -0.3),
        ];
        let sym: Vec<Complex64> = monomials()
            .iter()
            .map(|m| {
                (0..NUM_MODES)
                    .map(|k| {
                        let (p, q) = (u32::from(m.create[k]), u32::from(m.annihilate[k]));
                        (0..=p.min(q))
                            .map(|j| {
                                alpha[k].conj().powu(p - j)
                                    * alpha[k].powu(q - j)
                                    * (factorial(j) * binomial(p, j) * binomial(q, j) * 0.5f64.powi(j as i32))
                            })
                            .sum::<Complex64>()
                    })
                    .product()
            })
            .collect();
        let table = MomentTable::from_symmetric(&sym);
        for m in monomials() {
            let expected: Complex64 = (0..NUM_MODES)
                .map(|k| alpha[k].conj().powu(u32::from(m.create[k])) * alpha[k].powu(u32::from(m.annihilate[k])))
                .product();
            let got = table.moment(m).unwrap();
            assert!((got - expected).norm() < 1e-12 * (1.0 + expected.norm()), "{m}");
        }
    }
}
