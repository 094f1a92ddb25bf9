//! Normal-ordered polynomials in the four bosonic modes `a1, a2, b1, b2`.
//!
//! Every observable the criteria need (spin components, their products,
//! beam-splitter outputs) is expanded into a [`NormalPoly`], whose terms are
//! [`Monomial`]s `Π a_i†^{p_i} a_i^{q_i}`. A [`MomentSource`] then supplies the
//! expectation of each monomial.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::Result;

pub const NUM_MODES: usize = 4;

/// One of the four condensate modes: internal component 1 or 2 in well A or B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    A1 = 0,
    A2 = 1,
    B1 = 2,
    B2 = 3,
}

impl Mode {
    pub const ALL: [Mode; NUM_MODES] = [Mode::A1, Mode::A2, Mode::B1, Mode::B2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn site(self) -> Site {
        match self {
            Mode::A1 | Mode::A2 => Site::A,
            Mode::B1 | Mode::B2 => Site::B,
        }
    }

    /// Internal component, 1 or 2.
    pub fn component(self) -> usize {
        match self {
            Mode::A1 | Mode::B1 => 1,
            Mode::A2 | Mode::B2 => 2,
        }
    }

    pub fn of(site: Site, component: usize) -> Mode {
        match (site, component) {
            (Site::A, 1) => Mode::A1,
            (Site::A, 2) => Mode::A2,
            (Site::B, 1) => Mode::B1,
            (Site::B, 2) => Mode::B2,
            _ => panic!("component must be 1 or 2, got {component}"),
        }
    }

    fn label(self) -> &'static str {
        match self {
            Mode::A1 => "a1",
            Mode::A2 => "a2",
            Mode::B1 => "b1",
            Mode::B2 => "b2",
        }
    }
}

/// Potential well.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Site {
    A,
    B,
}

impl Site {
    pub fn modes(self) -> [Mode; 2] {
        [Mode::of(self, 1), Mode::of(self, 2)]
    }
}

/// Normal-ordered product `Π_i a_i†^{create[i]} a_i^{annihilate[i]}`.
///
/// Operators of different modes commute, so the order across modes is
/// immaterial; within a mode all creation operators stand to the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    pub create: [u8; NUM_MODES],
    pub annihilate: [u8; NUM_MODES],
}

impl Monomial {
    pub const IDENTITY: Monomial = Monomial {
        create: [0; NUM_MODES],
        annihilate: [0; NUM_MODES],
    };

    pub fn new(create: [u8; NUM_MODES], annihilate: [u8; NUM_MODES]) -> Self {
        Monomial { create, annihilate }
    }

    pub fn annihilator(mode: Mode) -> Self {
        let mut m = Monomial::IDENTITY;
        m.annihilate[mode.index()] = 1;
        m
    }

    pub fn creator(mode: Mode) -> Self {
        let mut m = Monomial::IDENTITY;
        m.create[mode.index()] = 1;
        m
    }

    /// `a_from† a_to`.
    pub fn hop(from: Mode, to: Mode) -> Self {
        Monomial::creator(from) * Monomial::annihilator(to)
    }

    pub fn number(mode: Mode) -> Self {
        Monomial::hop(mode, mode)
    }

    pub fn order(&self) -> u32 {
        self.create
            .iter()
            .chain(self.annihilate.iter())
            .map(|&e| u32::from(e))
            .sum()
    }

    /// Hermitian conjugate.
    pub fn adjoint(&self) -> Self {
        Monomial {
            create: self.annihilate,
            annihilate: self.create,
        }
    }

    /// True when every mode has as many creators as annihilators.
    pub fn conserves_each_number(&self) -> bool {
        self.create == self.annihilate
    }

    /// Exponents restricted to one site, as `(create, annihilate)` for
    /// components (1, 2).
    pub fn site_part(&self, site: Site) -> Monomial {
        let mut out = Monomial::IDENTITY;
        for mode in site.modes() {
            out.create[mode.index()] = self.create[mode.index()];
            out.annihilate[mode.index()] = self.annihilate[mode.index()];
        }
        out
    }

    /// All monomials of total order ≤ `max_order` in the given modes.
    pub fn enumerate(max_order: u32, modes: &[Mode]) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut exps = vec![0u8; modes.len() * 2];
        fn rec(
            i: usize,
            remaining: u32,
            exps: &mut Vec<u8>,
            modes: &[Mode],
            out: &mut Vec<Monomial>,
        ) {
            if i == exps.len() {
                let mut m = Monomial::IDENTITY;
                for (k, mode) in modes.iter().enumerate() {
                    m.create[mode.index()] = exps[2 * k];
                    m.annihilate[mode.index()] = exps[2 * k + 1];
                }
                out.push(m);
                return;
            }
            for e in 0..=remaining {
                exps[i] = e as u8;
                rec(i + 1, remaining - e, exps, modes, out);
            }
            exps[i] = 0;
        }
        rec(0, max_order, &mut exps, modes, &mut out);
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Monomial::IDENTITY {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        for mode in Mode::ALL {
            for (e, dag) in [(self.create[mode.index()], "†"), (self.annihilate[mode.index()], "")] {
                match e {
                    0 => {}
                    1 => parts.push(format!("{}{dag}", mode.label())),
                    _ => parts.push(format!("{}{dag}^{e}", mode.label())),
                }
            }
        }
        write!(f, "{}", parts.join(" "))
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * f64::from(i))
}

/// Product of two normal-ordered monomials, re-normal-ordered with
/// `a^q a†^p = Σ_k C(q,k) C(p,k) k! a†^{p-k} a^{q-k}` mode by mode.
fn monomial_product(lhs: &Monomial, rhs: &Monomial) -> Vec<(f64, Monomial)> {
    let mut terms = vec![(1.0, Monomial::IDENTITY)];
    for i in 0..NUM_MODES {
        let (p, q) = (u32::from(lhs.create[i]), u32::from(lhs.annihilate[i]));
        let (p2, q2) = (u32::from(rhs.create[i]), u32::from(rhs.annihilate[i]));
        let contractions: Vec<(f64, u8, u8)> = (0..=q.min(p2))
            .map(|k| {
                let c = binomial(q, k) * binomial(p2, k) * factorial(k);
                (c, (p + p2 - k) as u8, (q + q2 - k) as u8)
            })
            .collect();
        if contractions.len() == 1 {
            let (_, cr, an) = contractions[0];
            for (_, m) in terms.iter_mut() {
                m.create[i] = cr;
                m.annihilate[i] = an;
            }
            continue;
        }
        let mut next = Vec::with_capacity(terms.len() * contractions.len());
        for (c0, m0) in &terms {
            for &(c, cr, an) in &contractions {
                let mut m = *m0;
                m.create[i] = cr;
                m.annihilate[i] = an;
                next.push((c0 * c, m));
            }
        }
        terms = next;
    }
    terms
}

impl Mul for Monomial {
    type Output = Monomial;

    /// Juxtaposition of monomials that needs no reordering (panics otherwise).
    fn mul(self, rhs: Monomial) -> Monomial {
        let terms = monomial_product(&self, &rhs);
        assert_eq!(terms.len(), 1, "product {self} * {rhs} is not normal ordered");
        terms[0].1
    }
}

/// Linear combination of normal-ordered monomials with complex coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NormalPoly {
    terms: BTreeMap<Monomial, Complex64>,
}

impl NormalPoly {
    pub fn zero() -> Self {
        NormalPoly::default()
    }

    pub fn constant(c: impl Into<Complex64>) -> Self {
        NormalPoly::term(c, Monomial::IDENTITY)
    }

    pub fn term(c: impl Into<Complex64>, m: Monomial) -> Self {
        let mut p = NormalPoly::zero();
        p.add_term(c.into(), m);
        p
    }

    pub fn annihilate(mode: Mode) -> Self {
        NormalPoly::term(1.0, Monomial::annihilator(mode))
    }

    pub fn create(mode: Mode) -> Self {
        NormalPoly::term(1.0, Monomial::creator(mode))
    }

    pub fn add_term(&mut self, c: Complex64, m: Monomial) {
        let entry = self.terms.entry(m).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Complex64 {
        self.terms.get(m).copied().unwrap_or_default()
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        let mut out = NormalPoly::zero();
        for (m, v) in &self.terms {
            out.add_term(v * c, *m);
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = NormalPoly::zero();
        for (m, v) in &self.terms {
            out.add_term(v.conj(), m.adjoint());
        }
        out
    }

    /// Largest monomial order present.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(Monomial::order).max().unwrap_or(0)
    }

    /// `(AB + BA)/2`.
    pub fn anticommutator_half(&self, other: &NormalPoly) -> NormalPoly {
        (&(self * other) + &(other * self)).scale(0.5)
    }

    /// Drops coefficients below `eps` in modulus (relative to the largest).
    pub fn pruned(&self, eps: f64) -> Self {
        let max = self.terms.values().map(|c| c.norm()).fold(0.0, f64::max);
        let mut out = NormalPoly::zero();
        for (m, v) in &self.terms {
            if v.norm() > eps * max {
                out.add_term(*v, *m);
            }
        }
        out
    }
}

impl Add for &NormalPoly {
    type Output = NormalPoly;
    fn add(self, rhs: &NormalPoly) -> NormalPoly {
        let mut out = self.clone();
        for (m, v) in &rhs.terms {
            out.add_term(*v, *m);
        }
        out
    }
}

impl Sub for &NormalPoly {
    type Output = NormalPoly;
    fn sub(self, rhs: &NormalPoly) -> NormalPoly {
        let mut out = self.clone();
        for (m, v) in &rhs.terms {
            out.add_term(-*v, *m);
        }
        out
    }
}

impl Neg for &NormalPoly {
    type Output = NormalPoly;
    fn neg(self) -> NormalPoly {
        self.scale(-1.0)
    }
}

impl Mul for &NormalPoly {
    type Output = NormalPoly;
    fn mul(self, rhs: &NormalPoly) -> NormalPoly {
        let mut out = NormalPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                for (k, m) in monomial_product(m1, m2) {
                    out.add_term(c1 * c2 * k, m);
                }
            }
        }
        out
    }
}

/// Supplies expectation values of normal-ordered monomials at a fixed time.
pub trait MomentSource {
    fn moment(&self, m: &Monomial) -> Result<Complex64>;

    fn expect(&self, p: &NormalPoly) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in p.terms() {
            acc += c * self.moment(m)?;
        }
        Ok(acc)
    }
}

impl<S: MomentSource + ?Sized> MomentSource for &S {
    fn moment(&self, m: &Monomial) -> Result<Complex64> {
        (**self).moment(m)
    }
}
