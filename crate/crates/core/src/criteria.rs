//! Beam splitter, joint spin moments of two sites, and the entanglement and
//! EPR-steering criteria built from them.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::config::ThetaMode;
use crate::error::{Error, Result};
use crate::ops::{Mode, Monomial, MomentSource, NormalPoly, Site};
use crate::spin::{
    covariance, optimal_angle, site_spin_operators, spin_operators,
    squeezing, wrap_half_turn, SpinOperators,
};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// 50:50 beam splitter with phase π/2: `c = (a + i b)/√2`, `d = (b + i a)/√2`.
pub fn beam_splitter(a: &NormalPoly, b: &NormalPoly) -> (NormalPoly, NormalPoly) {
    let c = (a + &b.scale(I)).scale(FRAC_1_SQRT_2);
    let d = (b + &a.scale(I)).scale(FRAC_1_SQRT_2);
    (c, d)
}

/// Output annihilators `c_i`, `d_i` expressed in the input modes, indexed by
/// the slot they occupy (`A1 → c1`, `A2 → c2`, `B1 → d1`, `B2 → d2`).
pub fn beam_splitter_outputs() -> [NormalPoly; 4] {
    let (c1, d1) = beam_splitter(
        &NormalPoly::annihilate(Mode::A1),
        &NormalPoly::annihilate(Mode::B1),
    );
    let (c2, d2) = beam_splitter(
        &NormalPoly::annihilate(Mode::A2),
        &NormalPoly::annihilate(Mode::B2),
    );
    [c1, c2, d1, d2]
}

/// Rewrites a monomial in the output modes as a polynomial in the inputs.
pub fn expand_output_monomial(m: &Monomial, outputs: &[NormalPoly; 4]) -> NormalPoly {
    let mut poly = NormalPoly::constant(1.0);
    for mode in Mode::ALL {
        let out = &outputs[mode.index()];
        let dag = out.adjoint();
        for _ in 0..m.create[mode.index()] {
            poly = &poly * &dag;
        }
    }
    for mode in Mode::ALL {
        let out = &outputs[mode.index()];
        for _ in 0..m.annihilate[mode.index()] {
            poly = &poly * out;
        }
    }
    poly
}

/// Moments after the beam splitter, computed from the moments before it.
///
/// Site A of this source is the output pair `C = (c1, c2)` and site B is
/// `D = (d1, d2)`.
pub struct BeamSplitterSource<S> {
    inner: S,
    outputs: [NormalPoly; 4],
}

impl<S: MomentSource> BeamSplitterSource<S> {
    pub fn new(inner: S) -> Self {
        BeamSplitterSource {
            inner,
            outputs: beam_splitter_outputs(),
        }
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }
}

impl<S: MomentSource> MomentSource for BeamSplitterSource<S> {
    fn moment(&self, m: &Monomial) -> Result<Complex64> {
        self.inner.expect(&expand_output_monomial(m, &self.outputs))
    }
}

/// Covariance structure of `(J_1^Z, J_1^X, J_2^Z, J_2^X)` for two sites, each
/// in its own phase frame, plus the mean spins. Everything angle-dependent is
/// a quadratic form in this matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointCovariance {
    pub cov: [[f64; 4]; 4],
    pub mean_jy: [f64; 2],
    pub mean_jz: [f64; 2],
    pub delta_theta: [f64; 2],
}

impl JointCovariance {
    pub fn from_operators<S: MomentSource + ?Sized>(
        source: &S,
        first: &SpinOperators,
        second: &SpinOperators,
    ) -> Result<Self> {
        let ops = [&first.z, &first.x, &second.z, &second.x];
        let mut cov = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in i..4 {
                let v = covariance(source, ops[i], ops[j])?;
                cov[i][j] = v;
                cov[j][i] = v;
            }
        }
        Ok(JointCovariance {
            cov,
            mean_jy: [source.expect(&first.y)?.re, source.expect(&second.y)?.re],
            mean_jz: [source.expect(&first.z)?.re, source.expect(&second.z)?.re],
            delta_theta: [first.delta_theta, second.delta_theta],
        })
    }

    /// Joint covariance of sites A and B of `source`, each site's phase frame
    /// chosen so that its mean spin points along +Y.
    pub fn measure<S: MomentSource + ?Sized>(source: &S) -> Result<Self> {
        let a = site_spin_operators(source, Site::A)?;
        let b = site_spin_operators(source, Site::B)?;
        JointCovariance::from_operators(source, &a, &b)
    }

    fn quad(&self, u: &[f64; 4], v: &[f64; 4]) -> f64 {
        u.iter()
            .zip(&self.cov)
            .map(|(ui, row)| ui * row.iter().zip(v).map(|(c, vj)| c * vj).sum::<f64>())
            .sum()
    }

    /// Joint moments with both sites measured along `θ` and `θ + π/2`.
    pub fn at_angle(&self, theta: f64) -> JointSpinMoments {
        let (s, c) = theta.sin_cos();
        let first = [c, s, 0.0, 0.0];
        let second = [0.0, 0.0, c, s];
        let first_perp = [-s, c, 0.0, 0.0];
        let second_perp = [0.0, 0.0, -s, c];
        JointSpinMoments {
            theta,
            mean_jy_c: self.mean_jy[0],
            mean_jy_d: self.mean_jy[1],
            var_c_theta: self.quad(&first, &first),
            var_d_theta: self.quad(&second, &second),
            cov_theta: self.quad(&first, &second),
            var_c_perp: self.quad(&first_perp, &first_perp),
            var_d_perp: self.quad(&second_perp, &second_perp),
            cov_perp: self.quad(&first_perp, &second_perp),
        }
    }

    /// Local spin moments of the first (`0`) or second (`1`) site.
    pub fn site(&self, k: usize) -> crate::spin::SpinMoments {
        let o = 2 * k;
        crate::spin::SpinMoments {
            mean_jx: 0.0,
            mean_jy: self.mean_jy[k],
            mean_jz: self.mean_jz[k],
            var_jz: self.cov[o][o],
            var_jx: self.cov[o + 1][o + 1],
            cov_zx: self.cov[o][o + 1],
            delta_theta: self.delta_theta[k],
        }
    }
}

/// Joint spin moments of sites C and D at measurement angle `θ`
/// (`perp` fields refer to `θ + π/2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointSpinMoments {
    pub theta: f64,
    pub mean_jy_c: f64,
    pub mean_jy_d: f64,
    pub var_c_theta: f64,
    pub var_d_theta: f64,
    pub cov_theta: f64,
    pub var_c_perp: f64,
    pub var_d_perp: f64,
    pub cov_perp: f64,
}

impl JointSpinMoments {
    /// `Δ²(J_C^θ − J_D^θ)`.
    pub fn var_minus(&self) -> f64 {
        self.inference_minus(1.0)
    }

    /// `Δ²(J_C^{θ+π/2} + J_D^{θ+π/2})`.
    pub fn var_plus(&self) -> f64 {
        self.inference_plus(1.0)
    }

    /// `Δ²(J_C^θ − g J_D^θ)`.
    pub fn inference_minus(&self, g: f64) -> f64 {
        self.var_c_theta - 2.0 * g * self.cov_theta + g * g * self.var_d_theta
    }

    /// `Δ²(J_C^{θ+π/2} + g′ J_D^{θ+π/2})`.
    pub fn inference_plus(&self, g_prime: f64) -> f64 {
        self.var_c_perp + 2.0 * g_prime * self.cov_perp + g_prime * g_prime * self.var_d_perp
    }

    /// Shot-noise reference `(|⟨J_C^Y⟩| + |⟨J_D^Y⟩|)/2`.
    pub fn shot_noise(&self) -> f64 {
        (self.mean_jy_c.abs() + self.mean_jy_d.abs()) / 2.0
    }
}

/// Linear inference gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainPair {
    pub g: f64,
    pub g_prime: f64,
}

impl GainPair {
    pub const UNIT: GainPair = GainPair { g: 1.0, g_prime: 1.0 };
    pub const ZERO: GainPair = GainPair { g: 0.0, g_prime: 0.0 };
}

/// Product entanglement criterion; entangled below 1.
pub fn e_product(j: &JointSpinMoments) -> Result<f64> {
    let n0 = j.shot_noise();
    if n0 == 0.0 {
        return Err(Error::DegenerateReference("mean J^Y vanishes at both sites"));
    }
    Ok((j.var_minus() * j.var_plus()).max(0.0).sqrt() / n0)
}

/// Gains minimizing `Δ²(J_C^θ − g J_D^θ)` and `Δ²(J_C^{θ+π/2} + g′ J_D^{θ+π/2})`.
pub fn optimal_gains(j: &JointSpinMoments) -> Result<GainPair> {
    if j.var_d_theta <= 0.0 || j.var_d_perp <= 0.0 {
        return Err(Error::DegenerateReference("site D variance vanishes"));
    }
    Ok(GainPair {
        g: j.cov_theta / j.var_d_theta,
        g_prime: -j.cov_perp / j.var_d_perp,
    })
}

/// EPR-steering product criterion, normalized by site C only; steering below 1.
pub fn e_epr_product(j: &JointSpinMoments, gains: GainPair) -> Result<f64> {
    let n0 = j.mean_jy_c.abs() / 2.0;
    if n0 == 0.0 {
        return Err(Error::DegenerateReference("mean J^Y vanishes at site C"));
    }
    let product = j.inference_minus(gains.g) * j.inference_plus(gains.g_prime);
    Ok(product.max(0.0).sqrt() / n0)
}

/// Spin sum criterion in the rotated frame, as `LHS − RHS`; negative means
/// entangled.
pub fn duan_sum_spin(j: &JointSpinMoments) -> f64 {
    j.var_minus() + j.var_plus() - (j.mean_jy_c.abs() + j.mean_jy_d.abs())
}

// ---------------------------------------------------------------------------
// Independent assembly of the inference variances through J± = J_C ± J_D,
// written directly in the pre-beam-splitter modes.

/// `J₊ = J_A + J_B` and `J₋ = J_C − J_D` in terms of the A/B modes, both in
/// the common phase frame `Δθ`.
#[derive(Debug, Clone)]
pub struct SumDifferenceOperators {
    pub plus_z: NormalPoly,
    pub plus_x: NormalPoly,
    pub minus_z: NormalPoly,
    pub minus_x: NormalPoly,
}

pub fn sum_difference_operators(delta_theta: f64) -> SumDifferenceOperators {
    let a = |m: Mode| NormalPoly::annihilate(m);
    let ja = spin_operators(&a(Mode::A1), &a(Mode::A2), delta_theta);
    let jb = spin_operators(&a(Mode::B1), &a(Mode::B2), delta_theta);
    let hop = |c: Complex64, from: Mode, to: Mode| NormalPoly::term(c, Monomial::hop(from, to));
    let half_i = 0.5 * I;
    // J_C^Z − J_D^Z = (i/2)[a2†b2 − b2†a2 − a1†b1 + b1†a1]
    let mut minus_z = NormalPoly::zero();
    for (c, from, to) in [
        (half_i, Mode::A2, Mode::B2),
        (-half_i, Mode::B2, Mode::A2),
        (-half_i, Mode::A1, Mode::B1),
        (half_i, Mode::B1, Mode::A1),
    ] {
        minus_z = &minus_z + &hop(c, from, to);
    }
    // J_C^X − J_D^X = ½[i e^{iΔ} (a2†b1 − b2†a1) + h.c.]
    let e = Complex64::from_polar(1.0, delta_theta);
    let mut minus_x = NormalPoly::zero();
    for (c, from, to) in [
        (half_i * e, Mode::A2, Mode::B1),
        (-half_i * e, Mode::B2, Mode::A1),
        (-half_i * e.conj(), Mode::B1, Mode::A2),
        (half_i * e.conj(), Mode::A1, Mode::B2),
    ] {
        minus_x = &minus_x + &hop(c, from, to);
    }
    SumDifferenceOperators {
        plus_z: &ja.z + &jb.z,
        plus_x: &ja.x + &jb.x,
        minus_z,
        minus_x,
    }
}

/// `Δ²(J_C^θ − g J_D^θ)` and `Δ²(J_C^{θ+π/2} + g′ J_D^{θ+π/2})` assembled as
/// `g₋ J₊ + g₊ J₋` with `g± = (1 ± g)/2`, from moments of the input modes.
/// The `g₋ g₊` cross-covariance is kept.
pub fn decomposed_inference_variances<S: MomentSource + ?Sized>(
    source: &S,
    delta_theta: f64,
    theta: f64,
    gains: GainPair,
) -> Result<(f64, f64)> {
    let ops = sum_difference_operators(delta_theta);
    let (s, c) = theta.sin_cos();
    let plus = |ct: f64, st: f64| &ops.plus_z.scale(ct) + &ops.plus_x.scale(st);
    let minus = |ct: f64, st: f64| &ops.minus_z.scale(ct) + &ops.minus_x.scale(st);

    let g_lo = (1.0 - gains.g) / 2.0;
    let g_hi = (1.0 + gains.g) / 2.0;
    let op_theta = &plus(c, s).scale(g_lo) + &minus(c, s).scale(g_hi);

    // J_C + g′J_D = g′₊ J₊ + g′₋ J₋
    let gp_hi = (1.0 + gains.g_prime) / 2.0;
    let gp_lo = (1.0 - gains.g_prime) / 2.0;
    let op_perp = &plus(-s, c).scale(gp_hi) + &minus(-s, c).scale(gp_lo);

    Ok((
        covariance(source, &op_theta, &op_theta)?,
        covariance(source, &op_perp, &op_perp)?,
    ))
}

// ---------------------------------------------------------------------------
// Angle optimization and the full criteria bundle.

const SCAN_POINTS: usize = 720;

/// Minimizes a π-periodic function on `(−π/2, π/2]`: dense scan, then
/// golden-section refinement inside the best bracket.
pub fn minimize_angle(f: impl Fn(f64) -> f64) -> f64 {
    let step = PI / SCAN_POINTS as f64;
    let grid = |k: usize| -FRAC_PI_2 + step * (k + 1) as f64;
    let (best_k, _) = (0..SCAN_POINTS)
        .map(|k| (k, f(grid(k))))
        .fold((0, f64::INFINITY), |acc, (k, v)| if v < acc.1 { (k, v) } else { acc });
    let (mut lo, mut hi) = (grid(best_k) - step, grid(best_k) + step);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    let refined = 0.5 * (lo + hi);
    let candidate = if f(refined) <= f(grid(best_k)) {
        refined
    } else {
        grid(best_k)
    };
    wrap_half_turn(candidate)
}

/// All criteria at one time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriteriaResult {
    /// Angle used for `S∓`, `E_product` and the sum criterion.
    pub theta_opt: f64,
    /// Angle used for `E_EPR_product`.
    pub theta_epr: f64,
    pub s_minus: f64,
    pub s_plus: f64,
    pub e_product: f64,
    pub e_epr_product: f64,
    pub gains: GainPair,
    pub duan_sum: f64,
}

fn epr_at(joint: &JointCovariance, theta: f64) -> Result<(f64, GainPair)> {
    let j = joint.at_angle(theta);
    let gains = optimal_gains(&j)?;
    Ok((e_epr_product(&j, gains)?, gains))
}

/// Evaluates every joint criterion for a pair of sites.
pub fn evaluate(joint: &JointCovariance, theta_mode: ThetaMode) -> Result<CriteriaResult> {
    let (theta_opt, theta_epr) = match theta_mode {
        ThetaMode::Fixed(t) => (t, t),
        ThetaMode::Optimize => {
            let product = |t: f64| {
                let j = joint.at_angle(t);
                j.var_minus() * j.var_plus()
            };
            let epr = |t: f64| epr_at(joint, t).map_or(f64::INFINITY, |(e, _)| e);
            (minimize_angle(product), minimize_angle(epr))
        }
    };
    let j = joint.at_angle(theta_opt);
    let n0 = j.shot_noise();
    if n0 == 0.0 {
        return Err(Error::DegenerateReference("mean J^Y vanishes at both sites"));
    }
    let (e_epr, gains) = epr_at(joint, theta_epr)?;
    Ok(CriteriaResult {
        theta_opt,
        theta_epr,
        s_minus: j.var_minus() / n0,
        s_plus: j.var_plus() / n0,
        e_product: e_product(&j)?,
        e_epr_product: e_epr,
        gains,
        duan_sum: duan_sum_spin(&j),
    })
}

/// Local squeezing of one site at its optimal angle, with that angle.
pub fn local_squeezing(joint: &JointCovariance, k: usize) -> Result<(f64, f64)> {
    let m = joint.site(k);
    let theta = optimal_angle(&m);
    Ok((squeezing(&m, theta)?, theta))
}

/// Convenience for callers that start from a moment source rather than a
/// precomputed covariance.
pub fn joint_moments<S: MomentSource + ?Sized>(source: &S, theta: f64) -> Result<JointSpinMoments> {
    Ok(JointCovariance::measure(source)?.at_angle(theta))
}
