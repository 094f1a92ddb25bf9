//! Schwinger spin observables of one well and the local squeezing parameter.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ops::{Mode, MomentSource, NormalPoly, Site};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// The Schwinger spin components of one site in a fixed phase frame.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub x: NormalPoly,
    pub y: NormalPoly,
    pub z: NormalPoly,
    /// Relative phase applied between components 1 and 2.
    pub delta_theta: f64,
}

/// `Δθ = π/2 − arg⟨a2† a1⟩`, which puts the mean spin along +Y.
pub fn phase_convention(coherence: Complex64) -> f64 {
    FRAC_PI_2 - coherence.arg()
}

/// `J^X = ½(a2†a1 e^{iΔθ} + h.c.)`, `J^Y = (1/2i)(a2†a1 e^{iΔθ} − h.c.)`,
/// `J^Z = ½(a2†a2 − a1†a1)`, for any pair of component annihilators.
pub fn spin_operators(m1: &NormalPoly, m2: &NormalPoly, delta_theta: f64) -> SpinOperators {
    let raise = &(&m2.adjoint() * m1).scale(Complex64::from_polar(1.0, delta_theta));
    let lower = raise.adjoint();
    SpinOperators {
        x: (raise + &lower).scale(0.5),
        y: (raise - &lower).scale(-0.5 * I),
        z: (&(&m2.adjoint() * m2) - &(&m1.adjoint() * m1)).scale(0.5),
        delta_theta,
    }
}

/// Spin operators of a well, with the phase frame fixed from the state.
pub fn site_spin_operators<S: MomentSource + ?Sized>(
    source: &S,
    site: Site,
) -> Result<SpinOperators> {
    let m1 = NormalPoly::annihilate(Mode::of(site, 1));
    let m2 = NormalPoly::annihilate(Mode::of(site, 2));
    let coherence = source.expect(&(&m2.adjoint() * &m1))?;
    Ok(spin_operators(&m1, &m2, phase_convention(coherence)))
}

/// First and second moments of one site's spin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMoments {
    pub mean_jx: f64,
    pub mean_jy: f64,
    pub mean_jz: f64,
    pub var_jz: f64,
    pub var_jx: f64,
    /// Symmetrized covariance `½⟨J^Z J^X + J^X J^Z⟩ − ⟨J^Z⟩⟨J^X⟩`.
    pub cov_zx: f64,
    pub delta_theta: f64,
}

/// Symmetrized covariance of two Hermitian operators.
pub fn covariance<S: MomentSource + ?Sized>(
    source: &S,
    a: &NormalPoly,
    b: &NormalPoly,
) -> Result<f64> {
    let sym = source.expect(&a.anticommutator_half(b))?.re;
    Ok(sym - source.expect(a)?.re * source.expect(b)?.re)
}

pub fn spin_moments<S: MomentSource + ?Sized>(source: &S, site: Site) -> Result<SpinMoments> {
    let ops = site_spin_operators(source, site)?;
    moments_of(source, &ops)
}

pub fn moments_of<S: MomentSource + ?Sized>(
    source: &S,
    ops: &SpinOperators,
) -> Result<SpinMoments> {
    Ok(SpinMoments {
        mean_jx: source.expect(&ops.x)?.re,
        mean_jy: source.expect(&ops.y)?.re,
        mean_jz: source.expect(&ops.z)?.re,
        var_jz: covariance(source, &ops.z, &ops.z)?,
        var_jx: covariance(source, &ops.x, &ops.x)?,
        cov_zx: covariance(source, &ops.z, &ops.x)?,
        delta_theta: ops.delta_theta,
    })
}

/// `cos²θ Δ²J^Z + sin²θ Δ²J^X + 2 sinθ cosθ ⟨J^Z, J^X⟩`.
pub fn rotated_variance(m: &SpinMoments, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    c * c * m.var_jz + s * s * m.var_jx + 2.0 * s * c * m.cov_zx
}

/// Maps an angle into `(−π/2, π/2]`.
pub fn wrap_half_turn(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(PI);
    if t > FRAC_PI_2 {
        t -= PI;
    }
    t
}

/// Angle in `(−π/2, π/2]` minimizing [`rotated_variance`].
///
/// `½ atan2(2C, Δ²Z − Δ²X)` is one stationary point; the other lies a quarter
/// turn away. Both are evaluated and the smaller variance wins, ties going to
/// the smaller `|θ|`.
pub fn optimal_angle(m: &SpinMoments) -> f64 {
    let spread = m.var_jz - m.var_jx;
    if spread == 0.0 && m.cov_zx == 0.0 {
        return 0.0;
    }
    let t1 = wrap_half_turn(0.5 * (2.0 * m.cov_zx).atan2(spread));
    let t2 = wrap_half_turn(t1 + FRAC_PI_2);
    let (v1, v2) = (rotated_variance(m, t1), rotated_variance(m, t2));
    if v1 < v2 || (v1 == v2 && t1.abs() <= t2.abs()) {
        t1
    } else {
        t2
    }
}

/// `S = Δ²J^θ / (|⟨J^Y⟩| / 2)`; values below one signal spin squeezing.
pub fn squeezing(m: &SpinMoments, theta: f64) -> Result<f64> {
    let reference = m.mean_jy.abs() / 2.0;
    if reference == 0.0 {
        return Err(Error::DegenerateReference("mean J^Y vanishes"));
    }
    Ok(rotated_variance(m, theta) / reference)
}
