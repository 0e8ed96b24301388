//! Vector spherical harmonics `X_lm`, the electrodynamic (rank-2 tensor)
//! spherical harmonic `F_lm`, its generalization `G_lm`, and quadrature
//! checks of their orthonormality.
//!
//! `F_lm = Y_lm e_r⊗e_r + X_lm⊗e_θ + (e_r×X_lm)⊗e_φ`, so its columns over
//! `(e_r, e_θ, e_φ)` are `(Y_lm e_r, X_lm, e_r×X_lm)` and a field with
//! radial amplitudes `E^l` is the product `F_lm · E^l`.
//!
//! For `l = 0`, `L Y_00 = 0` and the normalization `1/sqrt(l(l+1))` is
//! undefined, so `X_00 = 0` and `F_00` keeps only its longitudinal dyad.

pub mod quadrature;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::specfun::{self, ModeIndex};
use crate::tensor3::{dual, dyad, tangential_projector, CTensor3, CVec3};

pub use quadrature::{QuadratureRule, SphereNode, CONVERGENCE_TOL};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest Gauss node count the convergence loop will try.
const MAX_REFINED_THETA: usize = 512;

/// A direction on the unit sphere, `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularPoint {
    theta: f64,
    phi: f64,
}

impl AngularPoint {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::AngleOutOfRange(format!("theta = {theta} not in [0, π]")));
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::AngleOutOfRange(format!("phi = {phi} not in [0, 2π)")));
        }
        Ok(AngularPoint { theta, phi })
    }

    /// Accepts any finite `φ` and reduces it modulo `2π`.
    pub fn wrapped(theta: f64, phi: f64) -> Result<Self> {
        let mut phi = phi.rem_euclid(2.0 * PI);
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        AngularPoint::new(theta, phi)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Orthonormal (unitary) triple `(a, b, c)` used by [`glm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthoBasis {
    a: CVec3,
    b: CVec3,
    c: CVec3,
}

impl OrthoBasis {
    pub const TOLERANCE: f64 = 1e-14;

    pub fn new(a: CVec3, b: CVec3, c: CVec3) -> Result<Self> {
        let vs = [a, b, c];
        let mut defect: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((vs[i].cdot(&vs[j]) - target).norm());
            }
        }
        if defect > Self::TOLERANCE || !defect.is_finite() {
            return Err(Error::NonOrthonormalBasis(defect));
        }
        Ok(OrthoBasis { a, b, c })
    }

    /// `(e_r, e_θ, e_φ)`, for which `G_lm = F_lm`.
    pub fn spherical() -> Self {
        OrthoBasis { a: CVec3::e_r(), b: CVec3::e_theta(), c: CVec3::e_phi() }
    }

    pub fn vectors(&self) -> [CVec3; 3] {
        [self.a, self.b, self.c]
    }
}

fn lambda(mode: ModeIndex) -> f64 {
    mode.l_squared().sqrt()
}

/// Vector spherical harmonic `X_lm = L Y_lm / sqrt(l(l+1))`.
///
/// Uses `L = -i e_φ ∂_θ + i e_θ (1/sinθ) ∂_φ` with `∂_φ = i L_z` and the ladder
/// form of `∂_θ`; `Y_lm / sinθ` is evaluated analytically so the poles are
/// handled without division.
pub fn xlm(mode: ModeIndex, p: AngularPoint) -> CVec3 {
    if mode.l() == 0 {
        return CVec3::zero();
    }
    let lam = lambda(mode);
    let (t, ph) = (p.theta, p.phi);
    let x_theta = -(mode.m() as f64) * specfun::ylm_over_sin(mode, t, ph) / lam;
    let x_phi = -I * specfun::ylm_dtheta(mode, t, ph) / lam;
    CVec3::new(Complex64::new(0.0, 0.0), x_theta, x_phi)
}

/// Electrodynamic spherical harmonic from its dyadic definition.
pub fn flm(mode: ModeIndex, p: AngularPoint) -> CTensor3 {
    let y = specfun::ylm(mode, p.theta, p.phi);
    let x = xlm(mode, p);
    let er = CVec3::e_r();
    CTensor3::from_columns(&er.scale(y), &x, &er.cross(&x))
}

/// Electrodynamic spherical harmonic from the explicit operator form
/// `[e_r⊗e_r − (I L_z + e_r^× (i sinθ/2)(e^{-iφ}L+ − e^{iφ}L−)) / (sinθ sqrt(l(l+1)))] Y_lm`.
///
/// An independent construction path used for cross-validation; it divides
/// by `sin θ` and is therefore only valid away from the poles.
pub fn flm_explicit(mode: ModeIndex, p: AngularPoint) -> CTensor3 {
    let (t, ph) = (p.theta, p.phi);
    let y = specfun::ylm(mode, t, ph);
    let er = CVec3::e_r();
    let longitudinal = dyad(&er, &er).scale(y);
    if mode.l() == 0 {
        return longitudinal;
    }
    let s = t.sin();
    let lam = lambda(mode);
    let lz_y = specfun::lz_ylm(mode, t, ph);
    // (i sinθ / 2)(e^{-iφ}L+ − e^{iφ}L−) Y = i sinθ ∂_θ Y
    let ladder_part = I * s * specfun::ylm_dtheta(mode, t, ph);
    let transverse = tangential_projector().scale(lz_y) + dual(&er).scale(ladder_part);
    longitudinal - transverse.scale(Complex64::new(1.0 / (s * lam), 0.0))
}

/// Generalized harmonic `G_lm = Y_lm e_r⊗a + X_lm⊗b + (e_r×X_lm)⊗c`.
pub fn glm(mode: ModeIndex, p: AngularPoint, basis: &OrthoBasis) -> CTensor3 {
    let y = specfun::ylm(mode, p.theta, p.phi);
    let x = xlm(mode, p);
    let er = CVec3::e_r();
    dyad(&er.scale(y), &basis.a) + dyad(&x, &basis.b) + dyad(&er.cross(&x), &basis.c)
}

/// Relative deviations of `F_lm` at one point from the closed forms of its
/// algebraic invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantResiduals {
    /// `tr F = Y + 2 X_θ`
    pub trace: f64,
    /// `det F = Y (X·X)`
    pub det: f64,
    /// `adj F = (X·X) e_r⊗e_r + Y (e_θ⊗X + e_φ⊗(e_r×X))`
    pub adjoint: f64,
    /// `tr adj F = X·X + 2 Y X_θ`
    pub trace_adjoint: f64,
    /// `tr F² = (tr F)² − 2 tr adj F`
    pub trace_square: f64,
}

impl InvariantResiduals {
    pub fn max(&self) -> f64 {
        [self.trace, self.det, self.adjoint, self.trace_adjoint, self.trace_square]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn invariant_residuals(mode: ModeIndex, p: AngularPoint) -> InvariantResiduals {
    let f = flm(mode, p);
    let y = specfun::ylm(mode, p.theta, p.phi);
    let x = xlm(mode, p);
    let xx = x.dot(&x);
    let er = CVec3::e_r();
    let s = f.max_abs().max(f64::MIN_POSITIVE);
    let tr = y + x[1] * 2.0;
    let adj = dyad(&er, &er).scale(xx)
        + dyad(&CVec3::e_theta(), &x).scale(y)
        + dyad(&CVec3::e_phi(), &er.cross(&x)).scale(y);
    let tr_adj = xx + y * x[1] * 2.0;
    InvariantResiduals {
        trace: (f.trace() - tr).norm() / s,
        det: (f.det() - y * xx).norm() / s.powi(3),
        adjoint: f.adjoint().max_abs_diff(&adj) / s.powi(2),
        trace_adjoint: (f.adjoint().trace() - tr_adj).norm() / s.powi(2),
        trace_square: ((f * f).trace() - (tr * tr - tr_adj * 2.0)).norm() / s.powi(2),
    }
}

/// `|L² Y_lm − l(l+1) Y_lm|` with `L² = L_z² + ½(L+L− + L−L+)` applied
/// through the ladder coefficients.
pub fn l_squared_check(mode: ModeIndex, p: AngularPoint) -> f64 {
    let y = specfun::ylm(mode, p.theta, p.phi);
    (specfun::l_squared_ylm(mode, p.theta, p.phi) - y * mode.l_squared()).norm()
}

/// `|L_z Y_lm − m Y_lm|` with `L_z = ½[L+, L−]`.
pub fn lz_check(mode: ModeIndex, p: AngularPoint) -> f64 {
    let y = specfun::ylm(mode, p.theta, p.phi);
    (specfun::lz_ylm(mode, p.theta, p.phi) - y * mode.m() as f64).norm()
}

/// Scalar `L · V` for a tangential field `V = V_θ e_θ + V_φ e_φ` given the
/// pieces of `(1/sinθ)[∂_θ(sinθ V_φ) − ∂_φ V_θ]`: `L·V = −i r·(∇×V)`.
fn l_dot_from_curl(d_sin_vphi: Complex64, d_phi_vtheta: Complex64, sin_theta: f64) -> Complex64 {
    -I * (d_sin_vphi - d_phi_vtheta) / sin_theta
}

/// `L · X_lm`, with all angular derivatives of the components taken through
/// ladder operators. Equals `sqrt(l(l+1)) Y_lm`. Valid away from the poles.
pub fn l_dot_xlm(mode: ModeIndex, p: AngularPoint) -> Complex64 {
    if mode.l() == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let (t, ph) = (p.theta, p.phi);
    let (s, c) = t.sin_cos();
    let lam = lambda(mode);
    let m = mode.m() as f64;
    let lz = specfun::lz_ylm(mode, t, ph);
    // X_φ = −i ∂_θY/λ  ->  ∂_θ(sinθ X_φ) = −i (cosθ ∂_θY + sinθ ∂²_θY)/λ
    let d_sin_xphi =
        -I * (specfun::ylm_dtheta(mode, t, ph) * c + specfun::ylm_dtheta2(mode, t, ph) * s) / lam;
    // X_θ = −m Y/(sinθ λ)  ->  ∂_φ X_θ = −m (i L_z Y)/(sinθ λ)
    let d_phi_xtheta = -m * I * lz / (s * lam);
    l_dot_from_curl(d_sin_xphi, d_phi_xtheta, s)
}

/// `L · (e_r × X_lm)`, which vanishes identically. Valid away from the poles.
pub fn l_dot_er_cross_xlm(mode: ModeIndex, p: AngularPoint) -> Complex64 {
    if mode.l() == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let (t, ph) = (p.theta, p.phi);
    let s = t.sin();
    let lam = lambda(mode);
    let m = mode.m() as f64;
    // e_r × X has θ-component −X_φ and φ-component X_θ.
    // ∂_θ(sinθ X_θ) = −m ∂_θY/λ
    let dy = specfun::ylm_dtheta(mode, t, ph);
    let d_sin_vphi = -m * dy / lam;
    // ∂_φ(−X_φ) = i ∂_φ∂_θY/λ = i (i m) ∂_θY/λ, with m read off by L_z of the ladder terms
    let d_phi_vtheta = I * (I * m * dy) / lam;
    l_dot_from_curl(d_sin_vphi, d_phi_vtheta, s)
}

/// Integral over the sphere with doubling until two successive rules agree
/// to [`CONVERGENCE_TOL`] (max-abs over the returned values).
pub fn integrate_converged<F>(rule: &QuadratureRule, n_values: usize, f: F) -> Result<Vec<Complex64>>
where
    F: Fn(f64, f64, &mut [Complex64]) + Sync,
{
    let eval = |rule: &QuadratureRule| -> Vec<Complex64> {
        let nodes = rule.nodes();
        let per_node: Vec<Vec<Complex64>> = nodes
            .par_iter()
            .map(|n| {
                let mut buf = vec![Complex64::new(0.0, 0.0); n_values];
                f(n.theta, n.phi, &mut buf);
                buf.iter_mut().for_each(|v| *v *= n.weight);
                buf
            })
            .collect();
        (0..n_values)
            .map(|k| {
                let col: Vec<Complex64> = per_node.iter().map(|v| v[k]).collect();
                quadrature::pairwise_sum(&col)
            })
            .collect()
    };
    converge(rule, eval)
}

fn converge<E>(rule: &QuadratureRule, eval: E) -> Result<Vec<Complex64>>
where
    E: Fn(&QuadratureRule) -> Vec<Complex64>,
{
    let mut current_rule = rule.clone();
    let mut current = eval(&current_rule);
    loop {
        let next_rule = current_rule.refined();
        let next = eval(&next_rule);
        let change = current
            .iter()
            .zip(next.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if change < CONVERGENCE_TOL {
            return Ok(next);
        }
        if next_rule.n_theta() * 2 > MAX_REFINED_THETA {
            return Err(Error::UnderResolved { change, tol: CONVERGENCE_TOL });
        }
        current_rule = next_rule;
        current = next;
    }
}

/// `∫ F†_A F_B sinθ dθ dφ`, with the frame vectors held constant.
///
/// Equals `1 δ_AB` for `l >= 1`; for `l = 0` the diagonal entry is the
/// rank-1 tensor `e_r⊗e_r`.
pub fn ortho_matrix(a: ModeIndex, b: ModeIndex, rule: &QuadratureRule) -> Result<CTensor3> {
    let values = integrate_converged(rule, 9, |t, ph, out| {
        let p = AngularPoint { theta: t, phi: ph };
        let prod = flm(a, p).dagger() * flm(b, p);
        out.copy_from_slice(&prod.to_row_major());
    })?;
    Ok(tensor_from_row_major(&values))
}

fn tensor_from_row_major(v: &[Complex64]) -> CTensor3 {
    let mut t = CTensor3::zero();
    for i in 0..3 {
        for j in 0..3 {
            t.0[i][j] = v[3 * i + j];
        }
    }
    t
}

/// Gram tensors `∫ H†_A H_B` for every ordered pair of `modes`, returned
/// row-major (`out[i * n + j]` pairs `modes[i]` with `modes[j]`). `harmonic`
/// selects the tensor field (e.g. [`flm`] or a closure around [`glm`]).
///
/// Each harmonic is tabulated once per rule, so this is much cheaper than
/// calling [`ortho_matrix`] pair by pair.
pub fn gram_tensors<H>(modes: &[ModeIndex], rule: &QuadratureRule, harmonic: H) -> Result<Vec<CTensor3>>
where
    H: Fn(ModeIndex, AngularPoint) -> CTensor3 + Sync,
{
    let n = modes.len();
    let eval = |rule: &QuadratureRule| -> Vec<Complex64> {
        let nodes = rule.nodes();
        let table: Vec<Vec<CTensor3>> = modes
            .par_iter()
            .map(|&md| {
                nodes
                    .iter()
                    .map(|nd| harmonic(md, AngularPoint { theta: nd.theta, phi: nd.phi }))
                    .collect()
            })
            .collect();
        let daggers: Vec<Vec<CTensor3>> = table
            .iter()
            .map(|col| {
                col.iter()
                    .zip(nodes.iter())
                    .map(|(t, nd)| t.dagger() * nd.weight)
                    .collect()
            })
            .collect();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        let grams: Vec<CTensor3> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let terms: Vec<CTensor3> = daggers[i]
                    .iter()
                    .zip(table[j].iter())
                    .map(|(a, b)| a.matmul(b))
                    .collect();
                quadrature::pairwise_sum(&terms)
            })
            .collect();
        grams.iter().flat_map(|g| g.to_row_major()).collect()
    };
    let flat = converge(rule, eval)?;
    Ok(flat.chunks(9).map(tensor_from_row_major).collect())
}

/// The three scalar overlaps that make up the Gram tensor of `F`:
/// `∫ Y*_A Y_B`, `∫ X*_A · X_B` and `∫ e_r · (X*_A × X_B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlaps {
    pub scalar: Complex64,
    pub vector: Complex64,
    pub cross: Complex64,
}

pub fn overlaps(a: ModeIndex, b: ModeIndex, rule: &QuadratureRule) -> Result<Overlaps> {
    let v = integrate_converged(rule, 3, |t, ph, out| {
        let p = AngularPoint { theta: t, phi: ph };
        let xa = xlm(a, p).conj();
        let xb = xlm(b, p);
        out[0] = specfun::ylm(a, t, ph).conj() * specfun::ylm(b, t, ph);
        out[1] = xa.dot(&xb);
        out[2] = CVec3::e_r().dot(&xa.cross(&xb));
    })?;
    Ok(Overlaps { scalar: v[0], vector: v[1], cross: v[2] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor3::{PHI, R, THETA};

    fn mode(l: usize, m: i64) -> ModeIndex {
        ModeIndex::new(l, m).unwrap()
    }

    fn pt(t: f64, p: f64) -> AngularPoint {
        AngularPoint::new(t, p).unwrap()
    }

    fn sample_points() -> Vec<AngularPoint> {
        // fixed low-discrepancy sweep, away from the poles
        (0..10)
            .map(|i| {
                let u = (i as f64 + 0.5) / 10.0;
                let g = (i as f64 * 0.618_033_988_749_895).fract();
                pt(0.05 + u * (PI - 0.1), g * 2.0 * PI)
            })
            .collect()
    }

    #[test]
    fn angular_point_validation() {
        assert!(AngularPoint::new(-0.1, 0.0).is_err());
        assert!(AngularPoint::new(0.0, 2.0 * PI).is_err());
        assert!(AngularPoint::new(PI, 0.0).is_ok());
        let w = AngularPoint::wrapped(1.0, -0.5).unwrap();
        assert!((w.phi() - (2.0 * PI - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn monopole_has_no_transverse_part() {
        let p = pt(0.9, 1.3);
        assert_eq!(xlm(mode(0, 0), p), CVec3::zero());
        let f = flm(mode(0, 0), p);
        let expected = dyad(&CVec3::e_r(), &CVec3::e_r())
            .scale(Complex64::new(1.0 / (4.0 * PI).sqrt(), 0.0));
        assert!(f.max_abs_diff(&expected) < 1e-16);
    }

    #[test]
    fn vector_harmonic_is_tangential() {
        for l in 0..=6 {
            for m in -(l as i64)..=l as i64 {
                for p in sample_points() {
                    assert_eq!(xlm(mode(l, m), p)[R], Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn xlm_matches_finite_difference_of_ylm() {
        // X_θ = -m Y/(sinθ λ), X_φ = -i ∂_θY / λ, checked with plain differences
        let h = 1e-6;
        for l in 1..=5 {
            for m in -(l as i64)..=l as i64 {
                let md = mode(l, m);
                let (t, ph) = (1.1, 0.4);
                let lam = md.l_squared().sqrt();
                let y = specfun::ylm(md, t, ph);
                let dy = (specfun::ylm(md, t + h, ph) - specfun::ylm(md, t - h, ph)) / (2.0 * h);
                let x = xlm(md, pt(t, ph));
                assert!((x[THETA] + y * (m as f64) / (t.sin() * lam)).norm() < 1e-13);
                assert!((x[PHI] + I * dy / lam).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn xlm_at_poles_is_finite_and_only_m_pm1_survive() {
        for l in 1..=5 {
            for m in -(l as i64)..=l as i64 {
                for theta in [0.0, PI] {
                    let x = xlm(mode(l, m), pt(theta, 0.7));
                    assert!(x.is_finite());
                    if m.abs() != 1 {
                        assert!(x.max_abs() < 1e-15, "({l},{m}) at θ={theta}");
                    } else {
                        assert!(x.max_abs() > 1e-3);
                    }
                }
            }
        }
        // the pole value is the limit of nearby interior values
        let near = xlm(mode(3, 1), pt(1e-7, 0.7));
        let at = xlm(mode(3, 1), pt(0.0, 0.7));
        assert!((near - at).max_abs() < 1e-6);
    }

    #[test]
    fn flm_columns_and_commutation() {
        let er = CVec3::e_r();
        let d = dual(&er);
        let proj = tangential_projector();
        let rr = dyad(&er, &er);
        for l in 0..=5 {
            for m in -(l as i64)..=l as i64 {
                for p in sample_points() {
                    let md = mode(l, m);
                    let f = flm(md, p);
                    let x = xlm(md, p);
                    assert_eq!(f.column(1), x);
                    assert_eq!(f.column(2), er.cross(&x));
                    assert!((f * d).max_abs_diff(&(d * f)) < 1e-14);
                    assert!((f * proj).max_abs_diff(&(proj * f)) < 1e-14);
                    assert!((f * rr).max_abs_diff(&(rr * f)) < 1e-14);
                }
            }
        }
    }

    #[test]
    fn explicit_form_agrees_with_definition() {
        for l in 0..=6 {
            for m in -(l as i64)..=l as i64 {
                for p in sample_points() {
                    let md = mode(l, m);
                    let diff = flm(md, p).max_abs_diff(&flm_explicit(md, p));
                    assert!(diff < 1e-12, "{md} diff {diff:e}");
                }
            }
        }
    }

    #[test]
    fn trace_of_dipole_harmonic() {
        let md = mode(1, 0);
        for p in sample_points() {
            let f = flm(md, p);
            let expected = specfun::ylm(md, p.theta(), p.phi()) + xlm(md, p)[THETA] * 2.0;
            assert!((f.trace() - expected).norm() < 1e-15);
        }
        let p = pt(1.0, 0.3);
        let f = flm(md, p);
        assert!((f.trace() - (specfun::ylm(md, 1.0, 0.3) + xlm(md, p)[THETA] * 2.0)).norm() < 1e-15);
    }

    #[test]
    fn invariants_of_flm() {
        for l in 1..=6 {
            for m in -(l as i64)..=l as i64 {
                for p in sample_points() {
                    let md = mode(l, m);
                    let f = flm(md, p);
                    let y = specfun::ylm(md, p.theta(), p.phi());
                    let x = xlm(md, p);
                    let xx = x.dot(&x);
                    let scale = f.max_abs().powi(3).max(1e-300);
                    assert!((f.det() - y * xx).norm() <= 1e-12 * scale);
                    let adj = f.adjoint();
                    let er = CVec3::e_r();
                    let adj_closed = dyad(&er, &er).scale(xx)
                        + dyad(&CVec3::e_theta(), &x).scale(y)
                        + dyad(&CVec3::e_phi(), &er.cross(&x)).scale(y);
                    assert!(adj.max_abs_diff(&adj_closed) <= 1e-12 * f.max_abs().powi(2));
                    let tr_adj = xx + y * x[THETA] * 2.0;
                    assert!((adj.trace() - tr_adj).norm() <= 1e-12 * f.max_abs().powi(2));
                }
            }
        }
    }

    #[test]
    fn invariant_residuals_are_small() {
        for l in 0..=6 {
            for m in -(l as i64)..=l as i64 {
                for p in sample_points() {
                    let res = invariant_residuals(mode(l, m), p);
                    assert!(res.max() < 1e-12, "l={l} m={m} {res:?}");
                }
            }
        }
    }

    #[test]
    fn glm_reduces_and_simplified_trace() {
        let flipped = OrthoBasis::new(CVec3::e_r(), CVec3::e_theta(), -CVec3::e_phi()).unwrap();
        for l in 1..=4 {
            for m in -(l as i64)..=l as i64 {
                for p in sample_points() {
                    let md = mode(l, m);
                    assert!(glm(md, p, &OrthoBasis::spherical()).max_abs_diff(&flm(md, p)) == 0.0);
                    let tr = glm(md, p, &flipped).trace();
                    assert!((tr - specfun::ylm(md, p.theta(), p.phi())).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn non_orthonormal_basis_rejected() {
        let bad = OrthoBasis::new(CVec3::e_r(), CVec3::e_r(), CVec3::e_phi());
        assert!(matches!(bad, Err(Error::NonOrthonormalBasis(_))));
        let unnormalized = OrthoBasis::new(CVec3::e_r() * 2.0, CVec3::e_theta(), CVec3::e_phi());
        assert!(unnormalized.is_err());
    }

    #[test]
    fn orthonormality_examples() {
        let rule = QuadratureRule::for_lmax(3);
        let g = ortho_matrix(mode(1, 0), mode(1, 0), &rule).unwrap();
        assert!(g.max_abs_diff(&CTensor3::identity()) < 1e-10);
        let g = ortho_matrix(mode(2, 1), mode(3, 1), &rule).unwrap();
        assert!(g.max_abs() < 1e-10);
        let o = overlaps(mode(2, 1), mode(2, 1), &rule).unwrap();
        assert!(o.cross.norm() < 1e-10);
        let o = overlaps(mode(3, -2), mode(5, -2), &QuadratureRule::for_lmax(5)).unwrap();
        assert!(o.cross.norm() < 1e-10 && o.vector.norm() < 1e-10);
    }

    #[test]
    fn monopole_gram_is_rank_one() {
        let g = ortho_matrix(mode(0, 0), mode(0, 0), &QuadratureRule::for_lmax(1)).unwrap();
        let er = CVec3::e_r();
        assert!(g.max_abs_diff(&dyad(&er, &er)) < 1e-12);
    }

    #[test]
    fn generalized_harmonic_gram_is_identity() {
        let s = 0.5f64.sqrt();
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let a = CVec3::new(c(s, 0.0), c(0.0, s), c(0.0, 0.0));
        let b = CVec3::new(c(s, 0.0), c(0.0, -s), c(0.0, 0.0));
        let basis = OrthoBasis::new(a, b, CVec3::e_phi()).unwrap();
        let modes = ModeIndex::range(1, 2);
        let grams = gram_tensors(&modes, &QuadratureRule::for_lmax(2), |md, p| glm(md, p, &basis)).unwrap();
        let n = modes.len();
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { CTensor3::identity() } else { CTensor3::zero() };
                assert!(grams[i * n + j].max_abs_diff(&target) < 1e-10);
            }
        }
    }

    #[test]
    fn eigenrelations() {
        for l in 0..=6 {
            for m in -(l as i64)..=l as i64 {
                let md = mode(l, m);
                for p in sample_points() {
                    assert!(l_squared_check(md, p) < 1e-12);
                    assert!(lz_check(md, p) < 1e-12);
                    let y = specfun::ylm(md, p.theta(), p.phi());
                    let lx = l_dot_xlm(md, p);
                    assert!((lx - y * md.l_squared().sqrt()).norm() < 1e-10, "{md}");
                    assert!(l_dot_er_cross_xlm(md, p).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn l_squared_examples() {
        assert_eq!(l_squared_check(mode(0, 0), pt(0.3, 0.1)), 0.0);
        assert!(l_squared_check(mode(3, 2), pt(2.2, 4.4)) < 1e-12);
        assert!(l_squared_check(mode(5, -5), pt(0.6, 5.9)) < 1e-12);
    }
}
